"""Finite Kripke models and the forcing relation, heterogeneous blocks included.

A model is a finite poset of nodes with one structure per node and a
homomorphism for every pair p <= q.  The order is given by generating pairs;
maps may be given for any pairs and the rest are obtained by composition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .structures import EvaluationError, Structure, assignments, eval_term
from .syntax import (
    And, Atom, Bottom, Eq, Exists, Forall, Het, Implies, Or, PlayPayoff, PlayTails, Signature,
    Theory, Top, desugar_finite_block, free_vars, het_subformulas,
)


class KripkeError(Exception):
    pass


@dataclass
class KripkeModel:
    signature: Signature
    nodes: tuple
    order: tuple                      # generating pairs (a, b) meaning a <= b
    structures: dict                  # node -> Structure
    maps: dict                        # (a, b) -> {sort: {x: y}}
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _closure: Optional[dict] = field(default=None, repr=False, compare=False)

    def __hash__(self):
        return id(self)

    def above(self, p) -> list:
        """Nodes q with p <= q, p first, then in declaration order."""
        up = self.closure()
        return [p] + [q for q in self.nodes if q != p and (p, q) in up]

    def closure(self) -> dict:
        """(p, q) -> map for every p <= q, composed from the given maps."""
        if self._closure is None:
            self._closure = _compose_all(self)[0]
        return self._closure

    def transport(self, p, q, a: dict) -> dict:
        h = self.closure()[(p, q)]
        return {v: h[v.sort][x] for v, x in a.items()}


def _identity(M: Structure) -> dict:
    return {s: {x: x for x in M.carriers[s]} for s in M.signature.sorts}


def _compose(f: dict, g: dict) -> dict:
    """g after f."""
    return {s: {x: g[s][y] for x, y in f[s].items()} for s in f}


def _compose_all(K: KripkeModel):
    """Reflexive-transitive closure with maps; also returns the violations found."""
    errs = []
    given = {}
    for (a, b), per_sort in K.maps.items():
        given[(a, b)] = {s: dict(t) for s, t in per_sort.items()}
    out = {}
    for p in K.nodes:
        if p in K.structures:
            out[(p, p)] = _identity(K.structures[p])
    edges = [(a, b) for a, b in K.order if a != b]
    changed = True
    while changed:
        changed = False
        for (a, b) in edges:
            if (a, b) not in given:
                continue
            step = given[(a, b)]
            for (p, q), f in list(out.items()):
                if q != a:
                    continue
                g = _compose(f, step) if p != a else step
                key = (p, b)
                if key not in out:
                    out[key] = g
                    changed = True
                elif out[key] != g:
                    errs.append("maps do not commute on %s <= %s" % key)
                    return out, errs
    return out, errs


@dataclass
class KripkeVerdict:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def check_kripke_model(K: KripkeModel, T: Optional[Theory] = None, formulas=(),
                       check_well_determined: bool = True) -> KripkeVerdict:
    """Model invariants, well-determined nodes, and persistence of the omega blocks.

    Persistence is checked for the omega blocks occurring in the theory and in
    ``formulas``: whenever p <= q, a block forced at p under an assignment must
    be forced at q under the transported assignment.
    """
    errs = []
    sig = K.signature
    if len(set(K.nodes)) != len(K.nodes):
        errs.append("duplicate node names")
    for n in K.nodes:
        if n not in K.structures:
            errs.append("node %s has no structure" % n)
            continue
        errs += ["node %s: %s" % (n, e) for e in K.structures[n].validate()]
    for a, b in K.order:
        if a not in K.nodes or b not in K.nodes:
            errs.append("order pair %s <= %s names an unknown node" % (a, b))
    if errs:
        return KripkeVerdict(False, errs)
    for (a, b), per_sort in K.maps.items():
        if a == b:
            if per_sort and _full(per_sort, K.structures[a]) != _identity(K.structures[a]):
                errs.append("map %s->%s is not the identity" % (a, b))
            continue
        if (a, b) not in K.order:
            errs.append("map %s->%s is not along a generating pair" % (a, b))
        for s in sig.sorts:
            tab = per_sort.get(s)
            if tab is None:
                errs.append("map %s->%s has no table for sort %s" % (a, b, s))
                continue
            src, dst = K.structures[a].carriers[s], K.structures[b].carriers[s]
            for x in src:
                if x not in tab:
                    errs.append("map %s->%s undefined at %s" % (a, b, x))
                elif tab[x] not in dst:
                    errs.append("map %s->%s sends %s outside sort %s" % (a, b, x, s))
    for a, b in K.order:
        if a != b and (a, b) not in K.maps:
            errs.append("no map for order pair %s <= %s" % (a, b))
    if errs:
        return KripkeVerdict(False, errs)
    closure, cerrs = _compose_all(K)
    if cerrs:
        return KripkeVerdict(False, cerrs)
    for p, q in closure:
        if p != q and (q, p) in closure:
            errs.append("order is not antisymmetric: %s, %s" % (p, q))
    if errs:
        return KripkeVerdict(False, errs)
    K._closure = closure
    for (p, q), h in closure.items():
        errs += _homomorphism_errors(K.structures[p], K.structures[q], h, p, q)
    if errs:
        return KripkeVerdict(False, errs)
    if T is not None and check_well_determined:
        from .games import check_well_determined as cwd, class_games
        games = class_games(T)
        for n in K.nodes:
            rep = cwd(K.structures[n], games)
            if not rep["well_determined"]:
                errs.append("node %s is not well-determined for the class" % n)
    if errs:
        return KripkeVerdict(False, errs)
    blocks = []
    sources = list(formulas)
    if T is not None:
        for ax in T.axioms:
            sources += [ax.sequent.antecedent, ax.sequent.succedent]
    for f in sources:
        for h in het_subformulas(f):
            if h.block.is_omega and h not in blocks:
                blocks.append(h)
    for h in blocks:
        bad = persistence_failure(K, h)
        if bad:
            errs.append("block %s is forced at %s but not at %s" % bad)
            break
    return KripkeVerdict(not errs, errs)


def _full(per_sort: dict, M: Structure) -> dict:
    return {s: dict(per_sort.get(s, {})) for s in M.signature.sorts}


def _homomorphism_errors(A: Structure, B: Structure, h: dict, p, q) -> list:
    errs = []
    for name in A.signature.relations:
        sorts = A.signature.relations[name]
        target = B.relations.get(name, frozenset())
        for tup in A.relations.get(name, ()):
            img = tuple(h[s][x] for s, x in zip(sorts, tup))
            if img not in target:
                errs.append("map %s->%s does not preserve %s%s" % (p, q, name, tup))
    for name, (args, res) in A.signature.functions.items():
        for tup, val in A.functions[name].items():
            img = tuple(h[s][x] for s, x in zip(args, tup))
            if B.functions[name][img] != h[res][val]:
                errs.append("map %s->%s does not commute with %s at %s" % (p, q, name, tup))
    return errs


def persistence_failure(K: KripkeModel, h: Het):
    from .printer import print_formula
    vs = sorted(free_vars(h), key=lambda v: (v.name, v.sort))
    for p in K.nodes:
        for a in assignments(K.structures[p], vs):
            if not force(K, p, h, a):
                continue
            for q in K.above(p)[1:]:
                if not force(K, q, h, K.transport(p, q, a)):
                    return (print_formula(h), p, q)
    return None


def _key(a: dict) -> tuple:
    return tuple(sorted(((v.name, v.sort), x) for v, x in a.items()))


def force(K: KripkeModel, p, f, a: dict) -> bool:
    """p forces f under the assignment a into the structure at p."""
    M = K.structures.get(p)
    if M is None:
        raise KripkeError("unknown node %s" % p)
    for v in free_vars(f):
        if v not in a:
            raise KripkeError("missing assignment entry for %s" % v.name)
        if a[v] not in M.carriers.get(v.sort, ()):
            raise KripkeError("%s is not an element of sort %s at node %s" % (a[v], v.sort, p))
    env = {v: a[v] for v in free_vars(f)}
    ck = (p, f, _key(env))
    if ck in K._cache:
        return K._cache[ck]
    out = _force(K, p, M, f, env)
    K._cache[ck] = out
    return out


def _force(K, p, M, f, a) -> bool:
    if isinstance(f, Atom):
        return tuple(eval_term(M, t, a) for t in f.args) in M.relations.get(f.rel, frozenset())
    if isinstance(f, Eq):
        return eval_term(M, f.left, a) == eval_term(M, f.right, a)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(force(K, p, g, a) for g in f.args)
    if isinstance(f, Or):
        return any(force(K, p, g, a) for g in f.args)
    if isinstance(f, Exists):
        return any(force(K, p, f.body, {**a, **b}) for b in assignments(M, f.vars))
    if isinstance(f, Implies):
        for q in K.above(p):
            b = K.transport(p, q, a)
            if force(K, q, f.left, b) and not force(K, q, f.right, b):
                return False
        return True
    if isinstance(f, Forall):
        for q in K.above(p):
            b = K.transport(p, q, a)
            for c in assignments(K.structures[q], f.vars):
                if not force(K, q, f.body, {**b, **c}):
                    return False
        return True
    if isinstance(f, Het):
        if not f.block.is_omega:
            return force(K, p, desugar_finite_block(f), a)
        from .games import eval_het
        return eval_het(M, f, a, evaluator=lambda g, env: force(K, p, g, env))
    if isinstance(f, (PlayTails, PlayPayoff)):
        raise EvaluationError("play formulas are not forced at Kripke nodes")
    raise EvaluationError("cannot force %r" % (f,))


def forces_sequent(K: KripkeModel, p, s) -> bool:
    """Every assignment at p forcing the antecedent forces the succedent."""
    M = K.structures[p]
    for a in assignments(M, s.context):
        if force(K, p, s.antecedent, a) and not force(K, p, s.succedent, a):
            return False
    return True


def one_node(M: Structure, name: str = "p") -> KripkeModel:
    return KripkeModel(M.signature, (name,), (), {name: M}, {})
