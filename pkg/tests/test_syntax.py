
import pytest
from hypothesis import given, settings, strategies as st

from hetlogic.games import eval_het
from hetlogic.parser import parse_formula, parse_signature
from hetlogic.random_instances import all_structures, SIG as RSIG
from hetlogic.structures import assignments, eval_tarski
from hetlogic.syntax import (
    AE, BOTTOM, EA, TOP, And, App, Atom, Body, Eq, Exists, Forall, Het, HetBlock, Implies, Or,
    Safety, SyntaxErrorHL, Var, alpha_eq, canonical, desugar_finite_block, dual, free_vars,
    subformulas, substitute, tail_block, term_vars,
)
from hetlogic.wellformed import well_formed

from strategies import ONE, VARS, formulas

x, y, z = (Var(n, "s") for n in "xyz")
v0, v1 = Var("v0", "s"), Var("v1", "s")
SIG = parse_signature("sort s; rel E(s, s); rel P(s); const c: s;")


def E(a, b):
    return Atom("E", (a, b))


def body_block(pol, n, phi, bounds=None):
    sched = tuple((Var("x%d" % i, "s"),) for i in range(n))
    return Het(HetBlock(pol, n, sched, bounds), Body(phi))


def test_minimal_signature():
    sig = parse_signature("sort s; rel E(s,s);")
    assert sig.sorts == ("s",)
    assert sig.relations == {"E": ("s", "s")}


def test_empty_connectives_normalize():
    assert parse_formula("and()", SIG) == TOP
    assert parse_formula("or()", SIG) == BOTTOM


def test_omega_block_needs_safety_or_reach():
    h = Het(HetBlock(AE, None, ((x,), (y,))), Body(TOP))
    errs = well_formed(h, SIG)
    assert any("ω-length requires safety/reach payoff" in e for e in errs)


def test_well_formed_examples():
    assert well_formed(E(x, y), SIG, {x, y}) == []
    assert well_formed(Atom("E", (x,)), SIG, {x})
    assert well_formed(E(x, y), SIG, {x})          # y not in context


def test_free_vars_examples():
    assert free_vars(Exists((y,), E(x, y))) == {x}
    copy = Het(HetBlock(AE, None, ((x,), (y,))), Safety(2, (TOP, Eq(v0, v1))))
    assert free_vars(copy) == frozenset()
    with_param = Het(HetBlock(AE, None, ((x,), (y,))),
                     Safety(2, (And((Eq(v0, App("c", ())), E(v1, y))),)))
    assert free_vars(with_param) == {y}


def test_substitute_examples():
    c = App("c", ())
    assert substitute(Eq(x, y), {x: c}) == Eq(c, y)
    f = substitute(Exists((y,), E(x, y)), {x: y})
    assert isinstance(f, Exists)
    (y2,) = f.vars
    assert y2 != y and f.body == E(y, y2)
    g = Exists((y,), E(x, y))
    assert substitute(g, {}) == g
    assert substitute(g, {x: x}) == g


@settings(max_examples=200, deadline=None)
@given(formulas(), st.dictionaries(st.sampled_from(VARS), st.one_of(st.sampled_from(VARS), st.just(ONE)),
                                   max_size=3))
def test_substitute_free_vars_contract(f, sigma):
    out = substitute(f, sigma)
    fv = free_vars(f)
    used = set()
    for v in fv:
        if v in sigma:
            used |= term_vars(sigma[v])
    assert free_vars(out) == (fv - set(sigma)) | used


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_substitute_identity(f):
    assert substitute(f, {}) == f
    assert substitute(f, {v: v for v in free_vars(f)}) == f


@settings(max_examples=150, deadline=None)
@given(formulas(), st.sampled_from(VARS), st.sampled_from(VARS))
def test_substitute_composition(f, a, b):
    # renaming a to b and then b to x equals renaming both to x at once
    step = substitute(substitute(f, {a: b}), {b: x})
    both = substitute(f, {a: x, b: x})
    assert alpha_eq(step, both)


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_canonical_is_idempotent_and_alpha_invariant(f):
    c = canonical(f)
    assert canonical(c) == c
    assert alpha_eq(f, c)


def test_dual_is_an_involution():
    h = Het(HetBlock(AE, None, ((x,), (y,))), Safety(2, (TOP, Eq(v0, v1))))
    assert dual(h).block.polarity == EA
    assert alpha_eq(dual(dual(h)), h)


def test_tail_of_finite_block():
    phi = And((E(Var("x0", "s"), Var("x1", "s")), E(Var("x2", "s"), Var("x3", "s"))))
    h = body_block(AE, 4, phi)
    assert tail_block(h, 0) == h
    t1 = tail_block(h, 1)
    assert t1.block.polarity == EA and t1.block.length == 3
    assert t1.block.schedule == h.block.schedule[1:]
    h2 = body_block(AE, 2, E(Var("x0", "s"), Var("x1", "s")))
    assert tail_block(h2, 2) == E(Var("x0", "s"), Var("x1", "s"))
    with pytest.raises(SyntaxErrorHL):
        tail_block(h2, 3)


def test_tail_of_omega_block_flips_at_odd_stages():
    h = Het(HetBlock(AE, None, ((x,), (y,))), Safety(2, (TOP, Eq(v0, v1))))
    t1 = tail_block(h, 1)
    assert t1.block.polarity == EA
    assert t1.block.schedule == ((y,), (x,))
    assert t1.payoff.templates == (Eq(v0, v1), TOP)
    assert len(t1.prefix) == 1
    assert tail_block(h, 2).block.polarity == AE


def test_desugar_examples():
    x0, x1 = Var("x0", "s"), Var("x1", "s")
    phi = E(x0, x1)
    assert desugar_finite_block(body_block(AE, 2, phi)) == Forall((x0,), Exists((x1,), phi))
    assert desugar_finite_block(body_block(EA, 2, phi)) == Exists((x0,), Forall((x1,), phi))
    p0, p1 = Atom("P", (x0,)), Atom("P", (x1,))
    out = desugar_finite_block(body_block(AE, 2, phi, (p0, p1)))
    assert out == Forall((x0,), Implies(p0, Exists((x1,), And((p1, phi)))))


def test_eval_tarski_examples():
    from hetlogic.structures import Structure
    sig = parse_signature("sort s; const zero: s; const unit: s;")
    M = Structure(sig, {"s": ("0", "1")}, {}, {"zero": {(): "0"}, "unit": {(): "1"}})
    zero, unit = App("zero", ()), App("unit", ())
    assert eval_tarski(M, Eq(zero, zero), {})
    assert eval_tarski(M, Forall((x,), Exists((y,), Eq(x, y))), {})
    assert not eval_tarski(M, Exists((x,), And((Eq(x, zero), Eq(x, unit)))), {})


def _finite_blocks():
    a0, a1, a2 = (Var("a%d" % i, "s") for i in range(3))
    P = lambda t: Atom("P", (t,))
    R = lambda s, t: Atom("R", (s, t))
    bodies = [R(a0, a1), Or((P(a0), R(a1, a0))), Implies(P(a0), P(a1))]
    out = []
    for pol in (AE, EA):
        for phi in bodies:
            sched = ((a0,), (a1,))
            out.append(Het(HetBlock(pol, 2, sched), Body(phi)))
            out.append(Het(HetBlock(pol, 2, sched, (P(a0), TOP)), Body(phi)))
        out.append(Het(HetBlock(pol, 3, ((a0,), (a1,), (a2,))), Body(And((R(a0, a1), R(a1, a2))))))
    return out


def test_desugar_agrees_with_game_tree_exhaustively():
    # eval_het checks the expansion against the direct game tree and raises on disagreement
    for n in (1, 2):
        for M in all_structures(n, RSIG):
            for h in _finite_blocks():
                eval_het(M, h, {})
    count = 0
    import random
    rng = random.Random(3)
    Ms = list(all_structures(3, RSIG))
    for M in rng.sample(Ms, 40):
        for h in _finite_blocks():
            eval_het(M, h, {})
            count += 1
    assert count == 40 * len(_finite_blocks())


def test_tail_composition_preserves_game_value():
    # the fresh prefix names differ, so compare after pairing prefix slots positionally
    from hetlogic.random_instances import random_het, random_structure
    import random
    rng = random.Random(11)
    for _ in range(40):
        M = random_structure(rng, 3)
        h = random_het(rng)
        for b, d in ((1, 1), (1, 2), (2, 1)):
            t = tail_block(tail_block(h, b), d)
            u = tail_block(h, b + d)
            assert t.block == u.block and t.payoff == u.payoff
            assert len(t.prefix) == len(u.prefix)
            tv = [v for blk in t.prefix for v in blk]
            uv = [v for blk in u.prefix for v in blk]
            for a in assignments(M, tv):
                a2 = {uv[i]: a[tv[i]] for i in range(len(tv))}
                assert eval_het(M, t, a) == eval_het(M, u, a2)


def test_subformulas_stop_at_blocks():
    h = Het(HetBlock(AE, None, ((x,), (y,))), Safety(2, (TOP, Eq(v0, v1))))
    f = And((h, Atom("P", (x,))))
    subs = subformulas(f)
    assert h in subs and Eq(v0, v1) not in subs
