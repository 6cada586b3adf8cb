import re
from collections import Counter

import pytest

from hetlogic.games import check_well_determined, class_games
from hetlogic.kernel import check_proof, parsed
from hetlogic.morley import (
    BackTranslationError, MorleyError, back_translate_proof, derive_item, expand_model, fv_order,
    is_coherent, key_of, lint, morleyize_classical, morleyize_intuitionistic, subformula_set,
    translate,
)
from hetlogic.parser import parse_proof, parse_theory
from hetlogic.structures import assignments, eval_tarski
from hetlogic.syntax import Atom, Het, Or, tail_block

from conftest import STRUCTURES, read, structure, theory

NULLARY = parse_theory("sort s; rel p(); rel q(); axiom a: p |- q;")
QUANT = parse_theory("sort s; rel P(s); rel Q(s); "
                     "axiom a: and(P(x), Q(x)) |- forall [y:s] P(y) [ctx x:s];")


def test_nullary_items():
    MT = morleyize_classical(NULLARY)
    assert [it.name for it in MT.items] == [
        "m0_i", "m1_ii", "m2_i", "m3_ii", "m4_iii_fwd", "m5_iii_bwd", "m6_iii_fwd",
        "m7_iii_bwd", "m8_iv"]
    iv = MT.item("m8_iv").sequent
    c_p, c_q = MT.symbols[key_of(Atom("p", ()))][0], MT.symbols[key_of(Atom("q", ()))][0]
    assert iv.antecedent == Atom(c_p, ()) and iv.succedent == Atom(c_q, ())


def test_symbol_names_are_stable_digests():
    MT = morleyize_classical(QUANT)
    for c, d in MT.symbols.values():
        assert re.fullmatch(r"C#[0-9a-f]{10}", c) and d == "D" + c[1:]
    again = morleyize_classical(QUANT)
    assert again.symbols == MT.symbols


def test_conjunction_and_universal_clauses():
    MT = morleyize_classical(QUANT)
    assert Counter(it.clause for it in MT.items) == Counter(
        {"i": 4, "ii": 4, "iii": 4, "iv": 3, "v": 2, "ix": 2})
    v = [it for it in MT.items if it.clause == "v" and it.direction == "fwd"][0]
    # D of a conjunction is the disjunction of the D's of its conjuncts
    assert isinstance(v.sequent.succedent, Or)
    assert all(a.rel.startswith("D#") for a in v.sequent.succedent.args)
    ix = [it for it in MT.items if it.clause == "ix" and it.direction == "fwd"][0]
    assert ix.sequent.antecedent.rel.startswith("D#")
    assert ix.sequent.succedent.body.rel.startswith("D#")


def test_intuitionistic_partition_only_for_blocks():
    MT = morleyize_intuitionistic(theory("intu"))
    parts = [it for it in MT.items if it.clause in ("i", "ii", "iii", "iv")]
    assert parts and all(isinstance(it.formula, Het) for it in parts)
    assert lint(MT) == []


def test_classical_needs_classical_theory():
    with pytest.raises(MorleyError):
        morleyize_classical(theory("intu"))


def test_bounded_blocks_rejected():
    with pytest.raises(MorleyError, match="bounded"):
        morleyize_classical(theory("bounded"))


@pytest.mark.parametrize("name", ["fo", "copycat", "takeuti", "reach_one"])
def test_lint_clean(name):
    MT = morleyize_classical(theory(name))
    assert lint(MT) == []
    for ax in MT.theory.axioms:
        assert is_coherent(ax.sequent.antecedent) and is_coherent(ax.sequent.succedent)


def test_subformula_set_closed_under_tails():
    S = subformula_set(theory("copycat"))
    blocks = [f for f in S if isinstance(f, Het)]
    # the root, its one-step tail and the root shape with one remembered move
    assert len(blocks) == 3
    keys = {key_of(f) for f in S}
    for b in blocks:
        assert key_of(tail_block(b, 1)) in keys


@pytest.mark.parametrize("name", ["fo", "copycat", "takeuti"])
@pytest.mark.parametrize("struct", STRUCTURES)
def test_expansion_round_trip(name, struct):
    T, M = theory(name), structure(struct)
    MT = morleyize_classical(T)
    N = expand_model(M, MT)
    for f in subformula_set(T):
        c = MT.symbols[key_of(f)][0]
        vs = fv_order(f)
        for a in assignments(M, vs):
            assert eval_tarski(M, f, a) == eval_tarski(N, Atom(c, tuple(vs)), a)


def test_expand_model_rejects_reach_on_two_elements():
    MT = morleyize_classical(theory("reach_one"))
    with pytest.raises(MorleyError, match="not well-determined"):
        expand_model(structure("m2"), MT)
    assert check_well_determined(structure("m1"), class_games(theory("reach_one")))["well_determined"]
    expand_model(structure("m1"), MT)


def test_translate_inverts_symbols():
    MT = morleyize_classical(QUANT)
    for key, (c, d) in MT.symbols.items():
        vs = fv_order(key)
        assert translate(Atom(c, tuple(vs)), MT) == key
        assert translate(Atom(d, tuple(vs)), MT).left == key


@pytest.mark.parametrize("name", ["fo", "copycat"])
def test_items_derive_in_source_theory(name):
    T = theory(name)
    MT = morleyize_classical(T)
    raised = []
    for it in MT.items:
        try:
            d = derive_item(it, MT)
        except BackTranslationError:
            raised.append(it.clause + "_" + it.direction)
            continue
        assert check_proof(d, T).ok, it.name
    assert set(raised) <= {"x_fwd", "xi_bwd"}


@pytest.mark.parametrize("proof, name", [("fo_sigma", "fo"), ("copycat_sigma", "copycat")])
def test_back_translation_accepted(proof, name):
    T = theory(name)
    MT = morleyize_classical(T)
    p = parse_proof(read("proofs", proof + ".prf"))
    assert check_proof(parsed(p, MT.theory), MT.theory).ok
    out = back_translate_proof(p, MT)
    assert check_proof(out, T).ok
    assert out.conclusion.antecedent == translate(parsed(p, MT.theory).conclusion.antecedent, MT)


def test_back_translation_refuses_the_forward_block_clause():
    MT = morleyize_classical(theory("copycat"))
    it = [i for i in MT.items if i.clause == "x" and i.direction == "fwd"][0]
    with pytest.raises(BackTranslationError):
        derive_item(it, MT)
