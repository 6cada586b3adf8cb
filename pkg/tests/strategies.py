"""Hypothesis strategies for terms and formulas over the corpus signature."""
from hypothesis import strategies as st

from hetlogic.syntax import (
    AE, BOTTOM, EA, TOP, And, App, Atom, Eq, Exists, Forall, Het, HetBlock, Implies, Or, Reach,
    Safety, Var,
)

VARS = tuple(Var(n, "s") for n in ("x", "y", "z", "u"))
ONE = App("one", ())

terms = st.one_of(st.sampled_from(VARS), st.just(ONE))


def _atoms(ts):
    return st.one_of(
        st.builds(lambda t: Atom("P", (t,)), ts),
        st.builds(lambda a, b: Atom("R", (a, b)), ts, ts),
        st.builds(Eq, ts, ts),
        st.just(TOP),
        st.just(BOTTOM),
    )


def _templates(window):
    slots = tuple(Var("v%d" % i, "s") for i in range(window))
    ts = st.one_of(st.sampled_from(slots), st.just(ONE), st.sampled_from(VARS[2:]))
    base = _atoms(ts)
    return st.recursive(base, lambda inner: st.one_of(
        st.builds(lambda a: Implies(a, BOTTOM), inner),
        st.builds(lambda a, b: And((a, b)), inner, inner),
        st.builds(lambda a, b: Or((a, b)), inner, inner),
    ), max_leaves=3)


@st.composite
def het_blocks(draw, kinds=("safety", "reach")):
    period = draw(st.integers(1, 2))
    names = ("a", "b")
    sched = tuple((Var(names[i], "s"),) for i in range(period))
    window = draw(st.integers(1, 2))
    n = draw(st.integers(1, 2))
    temps = tuple(draw(_templates(window)) for _ in range(n))
    kind = draw(st.sampled_from(kinds))
    payoff = Safety(window, temps) if kind == "safety" else Reach(window, temps)
    pol = draw(st.sampled_from((AE, EA)))
    return Het(HetBlock(pol, None, sched), payoff)


def formulas(with_het=True, max_leaves=6):
    base = _atoms(terms)
    if with_het:
        base = st.one_of(base, het_blocks())

    def extend(inner):
        return st.one_of(
            st.builds(lambda a, b: And((a, b)), inner, inner),
            st.builds(lambda a, b: Or((a, b)), inner, inner),
            st.builds(Implies, inner, inner),
            st.builds(lambda v, a: Exists((v,), a), st.sampled_from(VARS), inner),
            st.builds(lambda v, a: Forall((v,), a), st.sampled_from(VARS), inner),
        )
    return st.recursive(base, extend, max_leaves=max_leaves)
