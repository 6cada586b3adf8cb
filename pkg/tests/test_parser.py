import glob

import pytest
from hypothesis import given, settings

from hetlogic.parser import (
    ParseError, parse_class, parse_formula, parse_kripke, parse_proof, parse_sequent,
    parse_signature, parse_structure, parse_theory,
)
from hetlogic.printer import (
    print_formula, print_kripke, print_proof, print_sequent, print_structure, print_theory,
)
from hetlogic.syntax import BOTTOM, TOP, Implies, Var, alpha_eq

from conftest import FORMULAS, STRUCTURES, corpus_path, read
from strategies import VARS, formulas

BASE = parse_signature(read("base.sig"))


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_print_parse_round_trip(f):
    g = parse_formula(print_formula(f), BASE, VARS)
    assert alpha_eq(f, g)


def test_empty_connectives():
    assert parse_formula("and()", BASE) == TOP
    assert parse_formula("or()", BASE) == BOTTOM
    assert parse_formula("not(true)", BASE) == Implies(TOP, BOTTOM)


@pytest.mark.parametrize("text, msg", [
    ("hetAE omega { sched: [[x:s], [y:s]]; payoff: body(true) }", "ω-length requires safety/reach payoff"),
    ("R(one)", "arity error: R expects 2 arguments, got 1"),
    ("P(w)", "unresolved name w"),
    ("hetAE 2 { sched: [[x:s], [y:s]]; payoff: safety(1)[true] }", "finite blocks take a body payoff"),
    ("hetAE omega { payoff: safety(1)[true]; sched: [[x:s]] }", "payoff must follow sched"),
    ("forall [] true", "empty quantifier block"),
    ("P(one) P(one)", "trailing input"),
])
def test_parse_errors_carry_messages(text, msg):
    with pytest.raises(ParseError) as e:
        parse_formula(text, BASE)
    assert msg in str(e.value)
    assert e.value.line >= 1


def test_error_position_is_reported():
    with pytest.raises(ParseError) as e:
        parse_formula("and(P(one),\n  R(one))", BASE)
    assert e.value.line == 2 and e.value.col == 3


@pytest.mark.parametrize("name", FORMULAS)
def test_corpus_formulas_round_trip(name):
    text = read("formulas", name + ".fml")
    ctx = [Var("z", "s")] if text.startswith("[ctx") else []
    body = text.split("]", 1)[1] if ctx else text
    f = parse_formula(body, BASE, ctx)
    assert alpha_eq(parse_formula(print_formula(f), BASE, ctx), f)


@pytest.mark.parametrize("name", STRUCTURES)
def test_structures_round_trip(name):
    M = parse_structure(read("structures", name + ".str"))
    M2 = parse_structure(print_structure(M))
    assert M2.carriers == M.carriers and M2.relations == M.relations and M2.functions == M.functions


@pytest.mark.parametrize("name", ["copycat", "fo", "intu", "takeuti", "bounded", "reach_one"])
def test_theories_round_trip(name):
    T = parse_theory(read("theories", name + ".thy"))
    T2 = parse_theory(print_theory(T))
    assert T2.mode == T.mode
    assert [a.name for a in T2.axioms] == [a.name for a in T.axioms]
    for a, b in zip(T.axioms, T2.axioms):
        assert print_sequent(a.sequent) == print_sequent(b.sequent)


def test_sequent_round_trip():
    s = parse_sequent("and(R(x, y), P(x)) |- or(P(y), x = y) [ctx x:s, y:s]", BASE)
    assert parse_sequent(print_sequent(s), BASE) == s


def test_class_syntax():
    assert parse_class("classC safety;", BASE) == parse_class("safety", BASE)
    assert parse_class("clopen", BASE) != parse_class("safety", BASE)


def test_proofs_round_trip():
    for path in sorted(glob.glob(corpus_path("proofs", "*.prf"))):
        p = parse_proof(open(path).read())
        assert parse_proof(print_proof(p)) == p


def test_kripke_round_trip():
    for path in sorted(glob.glob(corpus_path("kripke", "*.krp"))):
        K = parse_kripke(open(path).read())
        K2 = parse_kripke(print_kripke(K))
        assert K2.nodes == K.nodes and set(K2.order) == set(K.order) and K2.maps == K.maps


def test_kripke_structure_for_unknown_node():
    text = "sort s; node a; structure b { carrier s = {0}; }"
    with pytest.raises(ParseError, match="undeclared node b"):
        parse_kripke(text)


def test_signature_rejects_duplicates():
    with pytest.raises(ParseError, match="duplicate sort s"):
        parse_signature("sort s; sort s;")
    with pytest.raises(ParseError, match="duplicate symbol P"):
        parse_signature("sort s; rel P(s); rel P(s, s);")
