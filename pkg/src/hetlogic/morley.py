"""Morleyization: a coherent theory with predicates C_phi ("phi holds") and D_phi ("not phi holds").

Subformulas are identified up to renaming of bound and free variables; a
predicate's arguments are the formula's free variables in order of first
occurrence.  Finite heterogeneous blocks are expanded into ordinary
quantifiers first.  For omega blocks the subformula set also contains every
tail, which is finite because tails only remember the last ``w - 1`` moves.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .printer import print_formula
from .syntax import (
    AE, BOTTOM, EA, TOP, And, Atom, Axiom, Bottom, Eq, Exists, Forall, Het, Implies, Or,
    PlayPayoff, PlayTails, Sequent, alpha_eq, Theory, Top, canonical, desugar_finite,
    first_move_vars, fv_order, free_vars, het_admissible, substitute, subformulas, tail_block,
)


class MorleyError(Exception):
    pass


@dataclass(frozen=True)
class MItem:
    """One emitted axiom with its provenance (clause label, formula, direction)."""
    name: str
    clause: str
    sequent: Sequent
    formula: object
    direction: str = ""          # "fwd" (left to right), "bwd", or "" for one-way clauses
    extra: object = None


@dataclass
class MorleyizedTheory:
    source: Theory
    theory: Theory                       # over the extended signature
    items: list
    symbols: dict                        # key formula -> (C name, D name)
    sidecar: dict                        # symbol name -> printed formula
    keys: dict = field(default_factory=dict)   # symbol name -> (key formula, "C" | "D")
    intuitionistic: bool = False

    def item(self, name: str) -> MItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)


def key_of(f):
    return canonical(f, rename_free=True)


def _digest(key) -> str:
    return hashlib.sha1(print_formula(key).encode()).hexdigest()[:10]


def _sorted_ctx(fs) -> tuple:
    fv = set()
    for f in fs:
        fv |= free_vars(f)
    return tuple(sorted(fv, key=lambda v: (v.name, v.sort)))


def subformula_set(T: Theory) -> list:
    """Subformulas of the axioms (finite blocks expanded) closed under omega tails."""
    out, seen = [], set()
    todo = []
    for ax in T.axioms:
        for f in (ax.sequent.antecedent, ax.sequent.succedent):
            todo.append(desugar_finite(f))
    while todo:
        f = todo.pop(0)
        for g in subformulas(f):
            if isinstance(g, (PlayTails, PlayPayoff)):
                raise MorleyError("play formulas cannot be Morleyized")
            k = key_of(g)
            if k in seen:
                continue
            seen.add(k)
            out.append(g)
            if isinstance(g, Het):
                if g.block.bounds is not None:
                    raise MorleyError("bounded heterogeneous blocks are not Morleyized")
                todo.append(tail_block(g, 1))
    return out


class _Builder:
    def __init__(self, T: Theory, intuitionistic: bool):
        self.T = T
        self.intu = intuitionistic
        self.S = subformula_set(T)
        self.symbols = {}
        self.sidecar = {}
        self.keys = {}
        rels = {}
        for f in self.S:
            k = key_of(f)
            h = _digest(k)
            c, d = "C#" + h, "D#" + h
            self.symbols[k] = (c, d)
            self.sidecar[c] = print_formula(k)
            self.sidecar[d] = "not(%s)" % print_formula(k)
            self.keys[c] = (k, "C")
            self.keys[d] = (k, "D")
            sorts = tuple(v.sort for v in fv_order(k))
            rels[c] = sorts
            rels[d] = sorts
        self.sig = T.signature.extend(rels)
        self.items = []

    def C(self, f):
        return Atom(self.symbols[key_of(f)][0], tuple(fv_order(f)))

    def D(self, f):
        return Atom(self.symbols[key_of(f)][1], tuple(fv_order(f)))

    def emit(self, clause, a, b, f, direction="", extra=None, ctx=None):
        n = len(self.items)
        name = "m%d_%s%s" % (n, clause, "_" + direction if direction else "")
        s = Sequent(a, b, tuple(ctx) if ctx is not None else _sorted_ctx([a, b]))
        self.items.append(MItem(name, clause, s, f, direction, extra))

    def both(self, clause, a, b, f, extra=None):
        self.emit(clause, a, b, f, "fwd", extra)
        self.emit(clause, b, a, f, "bwd", extra)

    def partition(self, f, c1="i", c2="ii"):
        self.emit(c1, And((self.C(f), self.D(f))), BOTTOM, f)
        self.emit(c2, TOP, Or((self.C(f), self.D(f))), f)

    def het_clauses(self, f):
        if f.block.polarity == AE and het_admissible(f, self.T.classC):
            x0 = first_move_vars(f)
            t = tail_block(f, 1)
            self.both("x", self.D(f), Exists(tuple(x0), self.D(t)), f)
        if f.block.polarity == EA and het_admissible(f, self.T.classC):
            x0 = first_move_vars(f)
            t = tail_block(f, 1)
            self.both("xi", self.C(f), Exists(tuple(x0), self.C(t)), f)

    def axioms_iv(self, clause):
        for ax in self.T.axioms:
            s = ax.sequent
            a, b = desugar_finite(s.antecedent), desugar_finite(s.succedent)
            self.emit(clause, self.C(a), self.C(b), ax.name, extra="theory", ctx=s.context)
        # logical axioms whose two sides both lie in S
        for f in self.S:
            if isinstance(f, And):
                for j, g in enumerate(f.args):
                    self.emit(clause, self.C(f), self.C(g), f, extra=("ConjAx", j))
            if isinstance(f, Or):
                for j, g in enumerate(f.args):
                    self.emit(clause, self.C(g), self.C(f), f, extra=("DisjAx", j))

    def classical(self):
        for f in self.S:
            self.partition(f)
        for f in self.S:
            if isinstance(f, (Atom, Eq)):
                self.both("iii", self.C(f), f, f)
        self.axioms_iv("iv")
        for f in self.S:
            if isinstance(f, (And, Top)):
                args = f.args if isinstance(f, And) else ()
                self.both("v", self.D(f), _or([self.D(g) for g in args]), f)
            elif isinstance(f, (Or, Bottom)):
                args = f.args if isinstance(f, Or) else ()
                self.both("vi", self.C(f), _or([self.C(g) for g in args]), f)
            elif isinstance(f, Implies):
                self.both("vii", self.C(f), Or((self.D(f.left), self.C(f.right))), f)
            elif isinstance(f, Exists):
                self.both("viii", self.C(f), Exists(f.vars, self.C(f.body)), f)
            elif isinstance(f, Forall):
                self.both("ix", self.D(f), Exists(f.vars, self.D(f.body)), f)
            elif isinstance(f, Het):
                self.het_clauses(f)

    def intuitionistic(self):
        for f in self.S:
            if isinstance(f, Het) and het_admissible(f, self.T.classC):
                if f.block.polarity == AE:
                    self.partition(f, "i", "iii")
                else:
                    self.partition(f, "ii", "iv")
        for f in self.S:
            if isinstance(f, (Atom, Eq)):
                self.both("v", self.C(f), f, f)
        self.axioms_iv("vi")
        for f in self.S:
            if isinstance(f, (And, Top)):
                args = f.args if isinstance(f, And) else ()
                self.both("vii", self.D(f), _or([self.D(g) for g in args]), f)
            elif isinstance(f, (Or, Bottom)):
                args = f.args if isinstance(f, Or) else ()
                self.both("viii", self.C(f), _or([self.C(g) for g in args]), f)
            elif isinstance(f, Exists):
                self.both("ix", self.C(f), Exists(f.vars, self.C(f.body)), f)
            elif isinstance(f, Het):
                self.het_clauses(f)

    def result(self) -> MorleyizedTheory:
        axioms = tuple(Axiom(it.name, it.sequent) for it in self.items)
        mode = "intuitionistic" if self.intu else "classical"
        th = Theory(self.sig, axioms, self.T.classC, mode)
        return MorleyizedTheory(self.T, th, self.items, self.symbols, self.sidecar, self.keys, self.intu)


def _or(fs):
    fs = tuple(fs)
    return Or(fs) if fs else BOTTOM


def morleyize_classical(T: Theory) -> MorleyizedTheory:
    if T.mode != "classical":
        raise MorleyError("classical Morleyization needs a classical theory")
    b = _Builder(T, False)
    b.classical()
    return b.result()


def morleyize_intuitionistic(T: Theory) -> MorleyizedTheory:
    b = _Builder(T, True)
    b.intuitionistic()
    return b.result()


# ---------------------------------------------------------------- linting

def is_coherent(f) -> bool:
    if isinstance(f, (Atom, Eq, Top, Bottom)):
        return True
    if isinstance(f, (And, Or)):
        return all(is_coherent(g) for g in f.args)
    if isinstance(f, Exists):
        return is_coherent(f.body)
    return False


def lint(MT: MorleyizedTheory) -> list:
    """Names of emitted axioms outside the coherent fragment."""
    return [ax.name for ax in MT.theory.axioms
            if not (is_coherent(ax.sequent.antecedent) and is_coherent(ax.sequent.succedent))]


# ---------------------------------------------------------------- back-map and model expansion

def translate(f, MT: MorleyizedTheory):
    """Replace C_phi(t) by phi(t/x) and D_phi(t) by not phi(t/x)."""
    if isinstance(f, Atom) and f.rel in MT.keys:
        key, kind = MT.keys[f.rel]
        g = substitute(key, dict(zip(fv_order(key), f.args)))
        return g if kind == "C" else Implies(g, BOTTOM)
    if isinstance(f, (Atom, Eq, Top, Bottom)):
        return f
    if isinstance(f, And):
        return And(tuple(translate(g, MT) for g in f.args))
    if isinstance(f, Or):
        return Or(tuple(translate(g, MT) for g in f.args))
    if isinstance(f, Implies):
        return Implies(translate(f.left, MT), translate(f.right, MT))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, translate(f.body, MT))
    return f


def expand_model(M, MT: MorleyizedTheory, check_well_determined: bool = True):
    """Interpret C_phi as phi and D_phi as its complement, then verify every emitted axiom."""
    from .games import check_well_determined as cwd, class_games
    from .structures import assignments, eval_tarski, sequent_holds
    if check_well_determined:
        games = class_games(MT.source)
        rep = cwd(M, games)
        if not rep["well_determined"]:
            raise MorleyError("structure is not well-determined for the class: %s"
                              % _first_failure(rep))
    extra = {}
    for key, (c, d) in MT.symbols.items():
        vs = fv_order(key)
        ctab, dtab = set(), set()
        for a in assignments(M, vs):
            tup = tuple(a[v] for v in vs)
            (ctab if eval_tarski(M, key, a) else dtab).add(tup)
        extra[c] = frozenset(ctab)
        extra[d] = frozenset(dtab)
    N = M.with_relations(MT.theory.signature, extra)
    for ax in MT.theory.axioms:
        if not sequent_holds(N, ax.sequent):
            raise MorleyError("axiom %s fails in the expanded model" % ax.name)
    return N


def _first_failure(rep) -> str:
    for g in rep["determinacy"]["games"]:
        if g["violations"]:
            return "determinacy fails for game %d" % g["game"]
    for p in rep["preservation"]:
        if not p["passed"]:
            return "preservation fails for game %d (%s schema)" % (p["game"], p["schema"])
    return "unknown"


# ---------------------------------------------------------------- proof back-translation

class BackTranslationError(Exception):
    def __init__(self, msg, path=None):
        self.path = path or []
        super().__init__("%s (at %s)" % (msg, self.path) if path is not None else msg)


_INTU_LABELS = {"i": "i", "ii": "i", "iii": "ii", "iv": "ii", "v": "iii", "vi": "iv",
                "vii": "v", "viii": "vi", "ix": "viii", "x": "x", "xi": "xi"}


def derive_item(it: MItem, MT: MorleyizedTheory):
    """A proof over the original signature of the translated emitted axiom."""
    from . import tactics as tk
    from .proofs import RuleTag as R
    label = _INTU_LABELS[it.clause] if MT.intuitionistic else it.clause
    f = it.formula
    nt = tk.nt
    if label == "i":
        return tk.cut(tk.swap(f, nt(f)), tk.clash(f))
    if label == "ii":
        return tk.node(R.ExcludedMiddle, TOP, Or((f, nt(f))))
    if label in ("iii", "vi", "viii"):
        g = translate(it.sequent.antecedent, MT)
        return tk.identity(g)
    if label == "iv":
        if it.extra == "theory":
            s = MT.source.axiom(f)
            if not (alpha_eq(s.antecedent, desugar_finite(s.antecedent))
                    and alpha_eq(s.succedent, desugar_finite(s.succedent))):
                raise BackTranslationError(
                    "axiom %s mentions a finite block; its expansion is not a kernel step" % f)
            return ProofTreeLeaf(R.TheoryAx, s, {"name": f})
        kind, j = it.extra
        if kind == "ConjAx":
            return tk.proj(f, j)
        return tk.inj(f.args[j], f, j)
    if label == "v":
        fs = f.args if isinstance(f, And) else ()
        return _v_fwd(fs) if it.direction == "fwd" else _v_bwd(fs)
    if label == "vii":
        return _vii_fwd(f.left, f.right) if it.direction == "fwd" else _vii_bwd(f.left, f.right)
    if label == "ix":
        return _ix_fwd(f) if it.direction == "fwd" else _ix_bwd(f)
    if label == "x":
        if it.direction == "fwd":
            raise BackTranslationError(
                "clause (x) left-to-right has no finite derivation over the original signature")
        return _x_bwd(f)
    if label == "xi":
        if it.direction == "bwd":
            raise BackTranslationError(
                "clause (xi) right-to-left has no finite derivation over the original signature")
        x0 = first_move_vars(f)
        return tk.node(R.HetAx2, f, Exists(tuple(x0), tail_block(f, 1)))
    raise BackTranslationError("no derivation for clause %s" % it.clause)


def ProofTreeLeaf(rule, s: Sequent, params):
    from .proofs import ProofTree
    return ProofTree(rule, s, params, ())


def _v_fwd(fs):
    from . import tactics as tk
    nt = tk.nt
    conj = And(tuple(fs)) if fs else TOP
    A = nt(conj)
    if not fs:
        # not T |- F
        return tk.cut(tk.pair(tk.identity(A), tk.truth(A)), tk.clash(TOP))
    B = Or(tuple(nt(g) for g in fs))
    N = nt(B)
    parts = []
    for i, g in enumerate(fs):
        ref = tk.contradiction(tk.left(N, nt(g)), tk.cut(tk.right(N, nt(g)), tk.inj(nt(g), B, i)))
        parts.append(tk.by_contra(N, g, ref))
    n_conj = tk.pair(*parts)
    refute = tk.contradiction(tk.left(A, N), tk.cut(tk.right(A, N), n_conj))
    return tk.by_contra(A, B, refute)


def _v_bwd(fs):
    from . import tactics as tk
    nt = tk.nt
    if not fs:
        return tk.absurd(nt(TOP))
    C = And(tuple(fs))
    arms = []
    for i, g in enumerate(fs):
        p = tk.contradiction(tk.left(nt(g), C), tk.cut(tk.right(nt(g), C), tk.proj(C, i)))
        arms.append(tk.impl_intro(p))
    return tk.cases(nt(C), *arms)


def _vii_bwd(a, b):
    from . import tactics as tk
    I = Implies(a, b)
    from_na = tk.impl_intro(tk.chain(tk.clash(a), tk.absurd(b)))
    from_b = tk.impl_intro(tk.proj(And((b, a)), 0))
    return tk.cases(I, from_na, from_b)


def _vii_fwd(a, b):
    from . import tactics as tk
    nt = tk.nt
    I = Implies(a, b)
    B = Or((nt(a), b))
    N = nt(B)
    n_a = tk.by_contra(N, a, tk.contradiction(tk.left(N, nt(a)),
                                              tk.cut(tk.right(N, nt(a)), tk.inj(nt(a), B, 0))))
    n_nb = tk.impl_intro(tk.contradiction(tk.left(N, b), tk.cut(tk.right(N, b), tk.inj(b, B, 1))))
    g_b = tk.cut(tk.pair(tk.left(I, N), tk.cut(tk.right(I, N), n_a)), tk.impl_elim(tk.identity(I)))
    g_nb = tk.cut(tk.right(I, N), n_nb)
    return tk.by_contra(I, B, tk.contradiction(g_nb, g_b))


def _ix_bwd(F: Forall):
    from . import tactics as tk
    nt = tk.nt
    phi = F.body
    p = tk.contradiction(tk.left(nt(phi), F),
                         tk.cut(tk.right(nt(phi), F), tk.forall_elim(tk.identity(F))))
    return tk.exists_elim(tk.impl_intro(p), F.vars)


def _ix_fwd(F: Forall):
    from . import tactics as tk
    nt = tk.nt
    phi = F.body
    A = nt(F)
    B = Exists(F.vars, nt(phi))
    N = nt(B)
    n_phi = tk.by_contra(N, phi, tk.contradiction(
        tk.left(N, nt(phi)), tk.cut(tk.right(N, nt(phi)), tk.exists_intro_from(nt(phi), B))))
    n_F = tk.forall_intro(n_phi, F.vars)
    return tk.by_contra(A, B, tk.contradiction(tk.left(A, N), tk.cut(tk.right(A, N), n_F)))


def _x_bwd(h: Het):
    from . import tactics as tk
    from .proofs import RuleTag as R
    nt = tk.nt
    x0 = tuple(first_move_vars(h))
    t = tail_block(h, 1)
    ax = tk.node(R.HetAx1, h, Forall(x0, t))
    p = tk.contradiction(tk.left(nt(t), h), tk.cut(tk.right(nt(t), h), tk.forall_elim(ax)))
    return tk.exists_elim(tk.impl_intro(p), x0)


def _translate_params(params: dict, ctx, MT: MorleyizedTheory) -> dict:
    from .kernel import read_formula, read_vars
    out = {}
    for k, v in (params or {}).items():
        if k == "phi":
            out[k] = translate(read_formula(v, MT.theory, ctx), MT)
        elif k == "nodes" and isinstance(v, dict):
            scope = list(ctx)
            for entry in v.values():
                scope += read_vars(entry.get("x", []), MT.theory)
            out[k] = {kk: dict(entry, phi=translate(read_formula(entry["phi"], MT.theory, scope), MT))
                      for kk, entry in v.items()}
        else:
            out[k] = v
    return out


def back_translate_proof(p, MT: MorleyizedTheory, check: bool = True):
    """Rewrite a proof over the extended signature into one over the original signature."""
    from .kernel import check_proof, parsed
    from .proofs import ProofTree, RuleTag as R
    import dataclasses
    tree = parsed(p, MT.theory)

    def go(node, path):
        c = node.conclusion
        want = Sequent(translate(c.antecedent, MT), translate(c.succedent, MT), c.context)
        if node.rule == R.TheoryAx:
            try:
                it = MT.item(node.params.get("name"))
            except KeyError:
                raise BackTranslationError("unknown emitted axiom %s" % node.params.get("name"), path)
            try:
                d = derive_item(it, MT)
            except BackTranslationError as e:
                raise BackTranslationError(str(e), path)
            return d
        prem = tuple(go(q, path + [i]) for i, q in enumerate(node.premises))
        return ProofTree(node.rule, want, _translate_params(node.params, c.context, MT), prem)

    out = go(tree, [])
    if check:
        T = dataclasses.replace(MT.source, mode="classical")
        v = check_proof(out, T)
        if not v.ok:
            raise BackTranslationError("back-translated node fails re-check: %s"
                                       % "; ".join(v.diagnostics), v.path)
    return out
