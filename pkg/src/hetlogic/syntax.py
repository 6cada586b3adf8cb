"""Terms, formulas and the purely syntactic operations on them.

Heterogeneous quantifier blocks come in two lengths.  A finite block lists
one variable block per stage and carries an ordinary body formula.  An
omega block lists a periodic schedule and a windowed payoff (safety or
reachability) whose templates talk about the last ``w`` moves through the
placeholders ``v0 .. v{w-1}`` (``v{i}_{j}`` for component ``j`` of a
multi-variable move).  Tails of omega blocks remember the moves already
played in ``prefix``; only the last ``w - 1`` of them can still matter, so
older ones are dropped.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

AE = "AE"
EA = "EA"
PLAY_SORT = "play"

PLACEHOLDER_RE = re.compile(r"^v(\d+)(?:_(\d+))?$")


class SyntaxErrorHL(Exception):
    """Raised for ill-formed syntax objects or failed syntactic operations."""


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.fn
        return "%s(%s)" % (self.fn, ", ".join(map(str, self.args)))


Term = Union[Var, App]


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t])
    out = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


def subst_term(t: Term, sigma: dict) -> Term:
    if isinstance(t, Var):
        return sigma.get(t, t)
    return App(t.fn, tuple(subst_term(a, sigma) for a in t.args))


def is_placeholder(name: str) -> bool:
    return PLACEHOLDER_RE.match(name) is not None


# ---------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: tuple = ()


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise SyntaxErrorHL("empty conjunction: use Top")


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise SyntaxErrorHL("empty disjunction: use Bottom")


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple
    body: Formula


@dataclass(frozen=True)
class HetBlock:
    """Quantifier block.  ``length`` is an int or ``None`` for omega."""
    polarity: str
    length: Optional[int]
    schedule: tuple
    bounds: Optional[tuple] = None

    @property
    def period(self) -> int:
        return len(self.schedule)

    @property
    def is_omega(self) -> bool:
        return self.length is None


@dataclass(frozen=True)
class Body:
    formula: Formula


@dataclass(frozen=True)
class Safety:
    window: int
    templates: tuple


@dataclass(frozen=True)
class Reach:
    window: int
    templates: tuple


Payoff = Union[Body, Safety, Reach]


@dataclass(frozen=True)
class Het(Formula):
    block: HetBlock
    payoff: Payoff
    prefix: tuple = ()


@dataclass(frozen=True)
class PlayTails(Formula):
    """The conjunction over all stages of the tails of ``het`` along ``stream``."""
    het: Het
    stream: Var


@dataclass(frozen=True)
class PlayPayoff(Formula):
    """The payoff of ``het`` evaluated on the whole play ``stream``."""
    het: Het
    stream: Var


def mk_and(fs: Iterable[Formula]) -> Formula:
    fs = tuple(fs)
    return And(fs) if fs else TOP


def mk_or(fs: Iterable[Formula]) -> Formula:
    fs = tuple(fs)
    return Or(fs) if fs else BOTTOM


def conj1(fs) -> Formula:
    """Conjunction that leaves a single conjunct alone."""
    fs = tuple(fs)
    return fs[0] if len(fs) == 1 else mk_and(fs)


def disj1(fs) -> Formula:
    fs = tuple(fs)
    return fs[0] if len(fs) == 1 else mk_or(fs)


def neg(f: Formula) -> Formula:
    """Negation as implication into bottom; strips an existing negation."""
    if isinstance(f, Implies) and f.right == BOTTOM:
        return f.left
    return Implies(f, BOTTOM)


def is_neg(f: Formula) -> bool:
    return isinstance(f, Implies) and f.right == BOTTOM


# ---------------------------------------------------------------- sequents, signatures

@dataclass(frozen=True)
class Sequent:
    antecedent: Formula
    succedent: Formula
    context: tuple = ()


@dataclass(frozen=True)
class Signature:
    sorts: tuple = ()
    relations: dict = field(default_factory=dict)    # name -> tuple of sorts
    functions: dict = field(default_factory=dict)    # name -> (arg sorts, result sort)

    def __hash__(self):
        return hash((self.sorts, tuple(sorted(self.relations.items())),
                     tuple(sorted(self.functions.items()))))

    def validate(self) -> list:
        errs = []
        if len(set(self.sorts)) != len(self.sorts):
            errs.append("duplicate sort name")
        if PLAY_SORT in self.sorts:
            errs.append("sort name %r is reserved" % PLAY_SORT)
        for name, args in self.relations.items():
            for s in args:
                if s not in self.sorts:
                    errs.append("relation %s: unknown sort %s" % (name, s))
        for name, (args, res) in self.functions.items():
            for s in tuple(args) + (res,):
                if s not in self.sorts:
                    errs.append("function %s: unknown sort %s" % (name, s))
        clash = set(self.relations) & set(self.functions)
        for name in sorted(clash):
            errs.append("name %s used as both relation and function" % name)
        return errs

    def extend(self, relations: dict) -> "Signature":
        rels = dict(self.relations)
        rels.update(relations)
        return Signature(self.sorts, rels, dict(self.functions))


@dataclass(frozen=True)
class ClassSpec:
    """Admissible payoff class: ``safety``, ``clopen`` or an explicit list."""
    kind: str
    members: tuple = ()


SAFETY_ONLY = ClassSpec("safety")
CLOPEN = ClassSpec("clopen")


@dataclass(frozen=True)
class Axiom:
    name: str
    sequent: Sequent


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple = ()
    classC: ClassSpec = SAFETY_ONLY
    mode: str = "classical"

    def axiom(self, name: str) -> Sequent:
        for ax in self.axioms:
            if ax.name == name:
                return ax.sequent
        raise KeyError(name)


# ---------------------------------------------------------------- free variables

def _payoff_params(h: Het) -> frozenset:
    p = h.payoff
    if isinstance(p, Body):
        bound = frozenset(v for blk in h.block.schedule for v in blk)
        return free_vars(p.formula) - bound
    out = frozenset()
    for t in p.templates:
        out |= frozenset(v for v in free_vars(t) if not is_placeholder(v.name))
    return out


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        out = frozenset()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (Top, Bottom)):
        return frozenset()
    if isinstance(f, (And, Or)):
        out = frozenset()
        for g in f.args:
            out |= free_vars(g)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - frozenset(f.vars)
    if isinstance(f, Het):
        out = _payoff_params(f)
        for blk in f.prefix:
            for t in blk:
                out |= term_vars(t)
        return out
    if isinstance(f, (PlayTails, PlayPayoff)):
        return free_vars(f.het) | {f.stream}
    raise TypeError(f)


def fv_order(f: Formula) -> list:
    """Free variables in order of first occurrence (deterministic traversal)."""
    seen = []
    fvs = free_vars(f)

    def visit_term(t):
        if isinstance(t, Var):
            if t in fvs and t not in seen:
                seen.append(t)
        else:
            for a in t.args:
                visit_term(a)

    def visit(g):
        if isinstance(g, Atom):
            for a in g.args:
                visit_term(a)
        elif isinstance(g, Eq):
            visit_term(g.left)
            visit_term(g.right)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                visit(a)
        elif isinstance(g, Implies):
            visit(g.left)
            visit(g.right)
        elif isinstance(g, (Exists, Forall)):
            visit(g.body)
        elif isinstance(g, Het):
            for blk in g.prefix:
                for t in blk:
                    visit_term(t)
            if isinstance(g.payoff, Body):
                visit(g.payoff.formula)
            else:
                for t in g.payoff.templates:
                    visit(t)
        elif isinstance(g, (PlayTails, PlayPayoff)):
            visit(g.het)
            visit_term(g.stream)

    visit(f)
    # bound-variable shadowing can hide a free occurrence from the walk above
    for v in sorted(fvs, key=lambda v: (v.name, v.sort)):
        if v not in seen:
            seen.append(v)
    return seen


def all_var_names(f: Formula) -> set:
    """Every variable name occurring anywhere, bound or free."""
    names = set()

    def vt(t):
        if isinstance(t, Var):
            names.add(t.name)
        else:
            for a in t.args:
                vt(a)

    def visit(g):
        if isinstance(g, Atom):
            for a in g.args:
                vt(a)
        elif isinstance(g, Eq):
            vt(g.left)
            vt(g.right)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                visit(a)
        elif isinstance(g, Implies):
            visit(g.left)
            visit(g.right)
        elif isinstance(g, (Exists, Forall)):
            names.update(v.name for v in g.vars)
            visit(g.body)
        elif isinstance(g, Het):
            for blk in g.block.schedule:
                names.update(v.name for v in blk)
            for blk in g.prefix:
                for t in blk:
                    vt(t)
            if g.block.bounds:
                for b in g.block.bounds:
                    visit(b)
            if isinstance(g.payoff, Body):
                visit(g.payoff.formula)
            else:
                for t in g.payoff.templates:
                    visit(t)
        elif isinstance(g, (PlayTails, PlayPayoff)):
            visit(g.het)
            names.add(g.stream.name)

    visit(f)
    return names


def fresh_var(v: Var, avoid: set) -> Var:
    name = v.name + "'"
    while name in avoid or is_placeholder(name):
        name += "'"
    return Var(name, v.sort)


def subformulas(f: Formula) -> list:
    """Immediate-and-deeper subformulas (pre-order), excluding payoff templates."""
    out = [f]
    if isinstance(f, (And, Or)):
        for g in f.args:
            out.extend(subformulas(g))
    elif isinstance(f, Implies):
        out.extend(subformulas(f.left))
        out.extend(subformulas(f.right))
    elif isinstance(f, (Exists, Forall)):
        out.extend(subformulas(f.body))
    elif isinstance(f, Het) and isinstance(f.payoff, Body):
        out.extend(subformulas(f.payoff.formula))
    return out


def het_subformulas(f: Formula) -> list:
    return [g for g in subformulas(f) if isinstance(g, Het)]


# ---------------------------------------------------------------- substitution

def substitute(f: Formula, sigma: dict) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for variables."""
    for v, t in sigma.items():
        if isinstance(t, Var) and t.sort != v.sort:
            raise SyntaxErrorHL("sort mismatch substituting %s:%s by %s:%s"
                                % (v.name, v.sort, t.name, t.sort))
    sigma = {v: t for v, t in sigma.items() if v != t}
    if not sigma:
        return f
    return _subst(f, sigma)


def _sigma_fv(sigma: dict, relevant: frozenset) -> set:
    out = set()
    for v, t in sigma.items():
        if v in relevant:
            out |= {u.name for u in term_vars(t)}
    return out


def _rebind(bound: tuple, body_fv: frozenset, sigma: dict, extra_avoid: set):
    """Rename bound variables that would capture a substituted term."""
    sigma = {v: t for v, t in sigma.items() if v not in bound}
    incoming = _sigma_fv(sigma, body_fv)
    if not any(v.name in incoming for v in bound):
        return bound, sigma
    avoid = set(incoming) | extra_avoid | {v.name for v in body_fv}
    avoid |= {u.name for t in sigma.values() for u in term_vars(t)}
    new_bound = []
    for v in bound:
        if v.name in incoming:
            nv = fresh_var(v, avoid | {b.name for b in bound} | {b.name for b in new_bound})
            avoid.add(nv.name)
            sigma[v] = nv
            new_bound.append(nv)
        else:
            new_bound.append(v)
    return tuple(new_bound), sigma


def _subst(f: Formula, sigma: dict) -> Formula:
    if not sigma:
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(subst_term(a, sigma) for a in f.args))
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, sigma), subst_term(f.right, sigma))
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, And):
        return And(tuple(_subst(g, sigma) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(_subst(g, sigma) for g in f.args))
    if isinstance(f, Implies):
        return Implies(_subst(f.left, sigma), _subst(f.right, sigma))
    if isinstance(f, (Exists, Forall)):
        bound, s2 = _rebind(f.vars, free_vars(f.body), sigma, all_var_names(f.body))
        return type(f)(bound, _subst(f.body, s2))
    if isinstance(f, Het):
        return _subst_het(f, sigma)
    if isinstance(f, (PlayTails, PlayPayoff)):
        h = _subst_het(f.het, sigma)
        s = sigma.get(f.stream, f.stream)
        if not isinstance(s, Var):
            raise SyntaxErrorHL("a play stream can only be renamed to a variable")
        return type(f)(h, s)
    raise TypeError(f)


def _subst_het(h: Het, sigma: dict) -> Het:
    prefix = tuple(tuple(subst_term(t, sigma) for t in blk) for blk in h.prefix)
    blk = h.block
    if isinstance(h.payoff, Body):
        bound = tuple(v for b in blk.schedule for v in b)
        inner_fv = free_vars(h.payoff.formula)
        if blk.bounds:
            for b in blk.bounds:
                inner_fv |= free_vars(b)
        new_bound, s2 = _rebind(bound, inner_fv, sigma, all_var_names(h))
        ren = {o: n for o, n in zip(bound, new_bound) if o != n}
        sched, i = [], 0
        for b in blk.schedule:
            sched.append(tuple(new_bound[i:i + len(b)]))
            i += len(b)
        bounds = None
        if blk.bounds is not None:
            bounds = tuple(_subst(b, ren) if ren else b for b in blk.bounds)
        body = _subst(h.payoff.formula, s2)
        return Het(HetBlock(blk.polarity, blk.length, tuple(sched), bounds), Body(body), prefix)
    for v, t in sigma.items():
        for u in term_vars(t):
            if is_placeholder(u.name):
                raise SyntaxErrorHL("substituted term mentions reserved name %s" % u.name)
    s2 = {v: t for v, t in sigma.items() if not is_placeholder(v.name)}
    temps = tuple(_subst(t, s2) for t in h.payoff.templates)
    return Het(blk, type(h.payoff)(h.payoff.window, temps), prefix)


# ---------------------------------------------------------------- alpha equivalence

def canonical(f: Formula, rename_free: bool = False):
    """Rename bound variables positionally (and free ones too if asked)."""
    env = {}
    counter = itertools.count()
    if rename_free:
        for i, v in enumerate(fv_order(f)):
            env[v] = Var("_f%d" % i, v.sort)
    return _canon(f, env, counter)


def _canon_term(t, env):
    if isinstance(t, Var):
        return env.get(t, t)
    return App(t.fn, tuple(_canon_term(a, env) for a in t.args))


def _canon(f, env, counter):
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(_canon_term(a, env) for a in f.args))
    if isinstance(f, Eq):
        return Eq(_canon_term(f.left, env), _canon_term(f.right, env))
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, And):
        return And(tuple(_canon(g, env, counter) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(_canon(g, env, counter) for g in f.args))
    if isinstance(f, Implies):
        return Implies(_canon(f.left, env, counter), _canon(f.right, env, counter))
    if isinstance(f, (Exists, Forall)):
        e2 = dict(env)
        nb = []
        for v in f.vars:
            nv = Var("_b%d" % next(counter), v.sort)
            e2[v] = nv
            nb.append(nv)
        return type(f)(tuple(nb), _canon(f.body, e2, counter))
    if isinstance(f, Het):
        prefix = tuple(tuple(_canon_term(t, env) for t in b) for b in f.prefix)
        e2 = dict(env)
        sched = []
        for b in f.block.schedule:
            nb = []
            for v in b:
                nv = Var("_b%d" % next(counter), v.sort)
                e2[v] = nv
                nb.append(nv)
            sched.append(tuple(nb))
        bounds = None
        if f.block.bounds is not None:
            bounds = tuple(_canon(b, e2, counter) for b in f.block.bounds)
        blk = HetBlock(f.block.polarity, f.block.length, tuple(sched), bounds)
        if isinstance(f.payoff, Body):
            payoff = Body(_canon(f.payoff.formula, e2, counter))
        else:
            payoff = type(f.payoff)(f.payoff.window,
                                    tuple(_canon(t, env, counter) for t in f.payoff.templates))
        return Het(blk, payoff, prefix)
    if isinstance(f, (PlayTails, PlayPayoff)):
        return type(f)(_canon(f.het, env, counter), _canon_term(f.stream, env))
    raise TypeError(f)


def alpha_eq(f: Formula, g: Formula) -> bool:
    if f == g:
        return True
    return canonical(f) == canonical(g)


# ---------------------------------------------------------------- heterogeneous blocks

def rotate(seq: tuple, k: int) -> tuple:
    if not seq:
        return seq
    k %= len(seq)
    return tuple(seq[k:]) + tuple(seq[:k])


def flip(polarity: str) -> str:
    return EA if polarity == AE else AE


def owner_is_universal(polarity: str, stage: int) -> bool:
    """Whether the universal player moves at relative ``stage``."""
    return (stage % 2 == 0) == (polarity == AE)


def negate_payoff(p: Payoff) -> Payoff:
    if isinstance(p, Body):
        return Body(neg(p.formula))
    if isinstance(p, Safety):
        return Reach(p.window, tuple(neg(t) for t in p.templates))
    return Safety(p.window, tuple(neg(t) for t in p.templates))


def dual(h: Het) -> Het:
    """(AE)phi <-> (EA)(not phi): same moves, opposite goal."""
    b = h.block
    return Het(HetBlock(flip(b.polarity), b.length, b.schedule, b.bounds),
               negate_payoff(h.payoff), h.prefix)


def _fresh_prefix_blocks(h: Het, beta: int) -> list:
    """Fresh variables naming the first ``beta`` moves of an omega block."""
    avoid = {v.name for v in free_vars(h)}
    start = len(h.prefix)
    out = []
    for k in range(beta):
        blk = h.block.schedule[k % h.block.period]
        nb = []
        for v in blk:
            n = start + k
            name = "%s_%d" % (v.name, n)
            while name in avoid or is_placeholder(name):
                n += 1
                name = "%s_%d" % (v.name, n)
            avoid.add(name)
            nb.append(Var(name, v.sort))
        out.append(tuple(nb))
    return out


def first_move_vars(h: Het) -> tuple:
    """The variables an explicit first-stage quantifier binds in axiom instances."""
    if h.block.is_omega:
        return _fresh_prefix_blocks(h, 1)[0]
    return h.block.schedule[0]


def tail_block(h: Het, beta: int) -> Formula:
    """The block restricted to stages beta, beta+1, ...; polarity flips at odd beta."""
    if beta < 0:
        raise SyntaxErrorHL("negative stage index")
    blk = h.block
    if beta == 0:
        return h
    if not blk.is_omega:
        if beta > blk.length:
            raise SyntaxErrorHL("stage %d beyond block length %d" % (beta, blk.length))
        if beta == blk.length:
            return h.payoff.formula
        pol = flip(blk.polarity) if beta % 2 else blk.polarity
        bounds = blk.bounds[beta:] if blk.bounds is not None else None
        return Het(HetBlock(pol, blk.length - beta, blk.schedule[beta:], bounds), h.payoff, ())
    fresh = _fresh_prefix_blocks(h, beta)
    w = h.payoff.window
    prefix = tuple(h.prefix) + tuple(fresh)
    keep = max(w - 1, 0)
    prefix = prefix[len(prefix) - keep:] if keep else ()
    pol = flip(blk.polarity) if beta % 2 else blk.polarity
    bounds = rotate(blk.bounds, beta) if blk.bounds is not None else None
    new_blk = HetBlock(pol, None, rotate(blk.schedule, beta), bounds)
    payoff = type(h.payoff)(w, rotate(h.payoff.templates, beta))
    return Het(new_blk, payoff, prefix)


def bound_on(h: Het, stage: int, vars_: tuple) -> Optional[Formula]:
    """Bound of relative ``stage`` rewritten onto ``vars_``; None when unbounded."""
    blk = h.block
    if blk.bounds is None:
        return None
    k = stage % blk.period
    sched = blk.schedule[k]
    return substitute(blk.bounds[k], dict(zip(sched, vars_)))


def desugar_finite_block(h: Het) -> Formula:
    blk = h.block
    if blk.is_omega:
        raise SyntaxErrorHL("only finite blocks can be expanded")
    out = h.payoff.formula
    for k in range(blk.length - 1, -1, -1):
        vs = blk.schedule[k]
        b = blk.bounds[k] if blk.bounds is not None else None
        if owner_is_universal(blk.polarity, k):
            out = Forall(vs, Implies(b, out) if b is not None else out)
        else:
            out = Exists(vs, And((b, out)) if b is not None else out)
    return out


def desugar_finite(f: Formula) -> Formula:
    """Replace every finite block by its nested-quantifier expansion."""
    if isinstance(f, (Atom, Eq, Top, Bottom)):
        return f
    if isinstance(f, And):
        return And(tuple(desugar_finite(g) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(desugar_finite(g) for g in f.args))
    if isinstance(f, Implies):
        return Implies(desugar_finite(f.left), desugar_finite(f.right))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, desugar_finite(f.body))
    if isinstance(f, Het):
        if f.block.is_omega:
            return f
        blk = f.block
        inner = Het(blk, Body(desugar_finite(f.payoff.formula)), f.prefix)
        return desugar_finite_block(inner)
    return f


def template_period(h: Het) -> int:
    if isinstance(h.payoff, Body):
        return 1
    return len(h.payoff.templates)


def game_period(h: Het) -> int:
    """Period after which turn, schedule phase and template phase all repeat."""
    p = h.block.period
    return math.lcm(2, p, template_period(h))


def placeholder_sorts(block: HetBlock, window: int, n_templates: int, k: int,
                      prefix_len: int = 0) -> dict:
    """Sorts of placeholder names in template ``k``; raises on inconsistency."""
    p = len(block.schedule)
    lcm = math.lcm(p, n_templates)
    out = {}
    for i in range(window):
        residues = set()
        for n in range(k, k + lcm, n_templates):
            m = n - (window - 1) + i
            residues.add(m % p)
        blocks = {tuple(v.sort for v in block.schedule[r]) for r in residues}
        if len(blocks) != 1:
            raise SyntaxErrorHL("placeholder v%d of template %d has no consistent sort" % (i, k))
        sorts = blocks.pop()
        if len(sorts) == 1:
            out["v%d" % i] = sorts[0]
        for j, s in enumerate(sorts):
            out["v%d_%d" % (i, j)] = s
    return out


def payoff_in_class(p: Payoff, cls: ClassSpec) -> bool:
    """Membership of a payoff in the class, closed under tails (template rotation)."""
    if isinstance(p, Body):
        return True
    if cls.kind == "safety":
        return isinstance(p, Safety)
    if cls.kind == "clopen":
        return isinstance(p, (Safety, Reach))
    for m in cls.members:
        q = m.payoff if isinstance(m, Het) else m
        if type(q) is not type(p) or q.window != p.window:
            continue
        if len(q.templates) != len(p.templates):
            continue
        for r in range(len(q.templates)):
            if rotate(q.templates, r) == p.templates:
                return True
    return False


def het_admissible(h: Het, cls: ClassSpec) -> bool:
    """(AE)phi with phi in C, or (EA)(not phi) with phi in C."""
    if h.block.polarity == AE:
        return payoff_in_class(h.payoff, cls)
    return payoff_in_class(negate_payoff(h.payoff), cls)


def formula_in_class(f: Formula, cls: ClassSpec) -> bool:
    if not isinstance(f, Het):
        return False
    return payoff_in_class(f.payoff, cls)


def ae_form(h: Het) -> Het:
    """The (AE)phi member of the determinacy pair that ``h`` belongs to."""
    return h if h.block.polarity == AE else dual(h)
