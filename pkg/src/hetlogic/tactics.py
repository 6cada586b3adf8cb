"""Small proof builders for the kernel's calculus.

Every builder returns a :class:`ProofTree` whose conclusion is a parsed
:class:`Sequent`.  Contexts are the free variables of the two sides.
"""
from __future__ import annotations

from .proofs import ProofTree, RuleTag as R
from .syntax import (
    BOTTOM, TOP, And, Exists, Forall, Implies, Or, Sequent, free_vars,
)


def nt(f):
    """Literal negation (never strips an existing one)."""
    return Implies(f, BOTTOM)


def seq(a, b, extra=()) -> Sequent:
    fv = set(free_vars(a)) | set(free_vars(b)) | set(extra)
    return Sequent(a, b, tuple(sorted(fv, key=lambda v: (v.name, v.sort))))


def node(rule, a, b, premises=(), params=None, extra=()) -> ProofTree:
    return ProofTree(rule, seq(a, b, extra), params or {}, tuple(premises))


def concl(p: ProofTree):
    return p.conclusion.antecedent, p.conclusion.succedent


def identity(f) -> ProofTree:
    return node(R.Identity, f, f)


def cut(p: ProofTree, q: ProofTree) -> ProofTree:
    a, _ = concl(p)
    _, c = concl(q)
    return node(R.Cut, a, c, (p, q))


def chain(*ps) -> ProofTree:
    out = ps[0]
    for q in ps[1:]:
        out = cut(out, q)
    return out


def truth(a) -> ProofTree:
    """a |- T (empty conjunction rule)."""
    return node(R.ConjRule, a, TOP)


def absurd(b) -> ProofTree:
    """F |- b (empty disjunction rule)."""
    return node(R.DisjRule, BOTTOM, b)


def proj(conj: And, j: int) -> ProofTree:
    return node(R.ConjAx, conj, conj.args[j], params={"j": j})


def inj(f, disj: Or, j: int) -> ProofTree:
    return node(R.DisjAx, f, disj, params={"j": j})


def pair(*ps) -> ProofTree:
    """From a |- b_i for each i, a |- and(b_0, ...)."""
    a, _ = concl(ps[0])
    return node(R.ConjRule, a, And(tuple(concl(p)[1] for p in ps)), ps)


def cases(b, *ps) -> ProofTree:
    """From a_i |- b for each i, or(a_0, ...) |- b."""
    return node(R.DisjRule, Or(tuple(concl(p)[0] for p in ps)), b, ps)


def impl_intro(p: ProofTree) -> ProofTree:
    """From and(a, b) |- c, a |- (b -> c)."""
    ab, c = concl(p)
    a, b = ab.args
    return node(R.ImplIntro, a, Implies(b, c), (p,))


def impl_elim(p: ProofTree) -> ProofTree:
    """From a |- (b -> c), and(a, b) |- c."""
    a, bc = concl(p)
    return node(R.ImplElim, And((a, bc.left)), bc.right, (p,))


def clash(f) -> ProofTree:
    """and(not f, f) |- F."""
    return impl_elim(identity(nt(f)))


def contradiction(p_neg: ProofTree, p_pos: ProofTree) -> ProofTree:
    """From G |- not X and G |- X, G |- F."""
    _, nx = concl(p_neg)
    return cut(pair(p_neg, p_pos), clash(nx.left))


def swap(a, b) -> ProofTree:
    """and(a, b) |- and(b, a)."""
    ab = And((a, b))
    return pair(proj(ab, 1), proj(ab, 0))


def left(a, b) -> ProofTree:
    return proj(And((a, b)), 0)


def right(a, b) -> ProofTree:
    return proj(And((a, b)), 1)


def under_right(a, p: ProofTree) -> ProofTree:
    """From b |- c, and(a, b) |- and(a, c)."""
    b, _ = concl(p)
    return pair(left(a, b), cut(right(a, b), p))


def by_contra(a, b, refute: ProofTree) -> ProofTree:
    """Classical: from and(a, not b) |- F, derive a |- b."""
    nb = nt(b)
    em = node(R.ExcludedMiddle, TOP, Or((b, nb)))
    # or(b, not b) |- (a -> b)
    from_b = impl_intro(proj(And((b, a)), 0))
    from_nb = impl_intro(chain(swap(nb, a), refute, absurd(b)))
    split = cases(Implies(a, b), from_b, from_nb)
    a_imp = chain(truth(a), em, split)                # a |- a -> b
    aa = impl_elim(a_imp)                             # and(a, a) |- b
    return cut(pair(identity(a), identity(a)), aa)


def exists_intro_from(f, ex: Exists) -> ProofTree:
    """f |- exists y f (f the body of ``ex``)."""
    return node(R.ExistsIntro, f, ex, (identity(ex),))


def forall_elim(p: ProofTree) -> ProofTree:
    a, fa = concl(p)
    return node(R.ForallElim, a, fa.body, (p,))


def forall_intro(p: ProofTree, ys) -> ProofTree:
    a, f = concl(p)
    return node(R.ForallIntro, a, Forall(tuple(ys), f), (p,))


def exists_elim(p: ProofTree, ys) -> ProofTree:
    f, b = concl(p)
    return node(R.ExistsElim, Exists(tuple(ys), f), b, (p,))
