"""Finite many-sorted structures and Tarskian evaluation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import (
    And, Atom, Bottom, Eq, Exists, Forall, Het, Implies, Or, PlayPayoff,
    PlayTails, Signature, Top, Var,
)


class EvaluationError(Exception):
    pass


@dataclass(frozen=True)
class Stream:
    """Ultimately periodic play: ``stem`` then ``cycle`` forever (lists of move tuples)."""
    stem: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("stream cycle must be nonempty")

    def move(self, n: int) -> tuple:
        if n < len(self.stem):
            return self.stem[n]
        return self.cycle[(n - len(self.stem)) % len(self.cycle)]


@dataclass(frozen=True)
class Structure:
    signature: Signature
    carriers: dict                       # sort -> tuple of element names
    relations: dict = field(default_factory=dict)   # name -> frozenset of tuples
    functions: dict = field(default_factory=dict)   # name -> {args tuple: value}

    def __hash__(self):
        return id(self)

    def validate(self) -> list:
        errs = []
        sig = self.signature
        for s in sig.sorts:
            if s not in self.carriers:
                errs.append("no carrier for sort %s" % s)
            elif not self.carriers[s]:
                errs.append("carrier of sort %s is empty" % s)
            elif len(set(self.carriers[s])) != len(self.carriers[s]):
                errs.append("carrier of sort %s repeats an element" % s)
        if errs:
            return errs
        for name, sorts in sig.relations.items():
            for tup in self.relations.get(name, ()):
                if len(tup) != len(sorts) or any(a not in self.carriers[s] for a, s in zip(tup, sorts)):
                    errs.append("relation %s: bad tuple %s" % (name, tup))
        for name in self.relations:
            if name not in sig.relations:
                errs.append("table for undeclared relation %s" % name)
        for name, (args, res) in sig.functions.items():
            table = self.functions.get(name)
            if table is None:
                errs.append("no table for function %s" % name)
                continue
            for tup in itertools.product(*(self.carriers[s] for s in args)):
                if tup not in table:
                    errs.append("function %s undefined at %s" % (name, tup))
                elif table[tup] not in self.carriers[res]:
                    errs.append("function %s: value %s outside sort %s" % (name, table[tup], res))
        return errs

    def carrier(self, sort: str) -> tuple:
        return self.carriers[sort]

    def with_relations(self, signature: Signature, extra: dict) -> "Structure":
        rels = dict(self.relations)
        rels.update(extra)
        return Structure(signature, self.carriers, rels, self.functions)


def eval_term(M: Structure, t, a: dict):
    if isinstance(t, Var):
        if t not in a:
            raise EvaluationError("missing assignment entry for %s" % t.name)
        return a[t]
    return M.functions[t.fn][tuple(eval_term(M, s, a) for s in t.args)]


def assignments(M: Structure, vars_) -> list:
    """All assignments of carrier elements to ``vars_`` (in carrier order)."""
    vars_ = list(vars_)
    pools = [M.carriers[v.sort] for v in vars_]
    return [dict(zip(vars_, vals)) for vals in itertools.product(*pools)]


def eval_tarski(M: Structure, f, a: dict) -> bool:
    if isinstance(f, Atom):
        return tuple(eval_term(M, t, a) for t in f.args) in M.relations.get(f.rel, frozenset())
    if isinstance(f, Eq):
        return eval_term(M, f.left, a) == eval_term(M, f.right, a)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(eval_tarski(M, g, a) for g in f.args)
    if isinstance(f, Or):
        return any(eval_tarski(M, g, a) for g in f.args)
    if isinstance(f, Implies):
        return (not eval_tarski(M, f.left, a)) or eval_tarski(M, f.right, a)
    if isinstance(f, (Exists, Forall)):
        test = any if isinstance(f, Exists) else all
        return test(eval_tarski(M, f.body, {**a, **b}) for b in assignments(M, f.vars))
    if isinstance(f, Het):
        from .games import eval_het
        return eval_het(M, f, a)
    if isinstance(f, (PlayTails, PlayPayoff)):
        from .games import eval_play
        return eval_play(M, f, a)
    raise EvaluationError("cannot evaluate %r" % (f,))


def sequent_holds(M: Structure, seq, streams=None) -> bool:
    """Validity of a sequent in ``M`` over every assignment to its context.

    Stream variables range over the finite pool ``streams[var]`` (or the
    default pool built by :func:`games.stream_pool`).
    """
    return counterexample(M, seq, streams) is None


def counterexample(M: Structure, seq, streams=None):
    from .games import stream_pool
    plain = [v for v in seq.context if v.sort != "play"]
    plays = [v for v in seq.context if v.sort == "play"]
    pools = []
    for v in plays:
        if streams and v in streams:
            pools.append(streams[v])
        else:
            pools.append(stream_pool(M, _stream_het(seq, v)))
    for a in assignments(M, plain):
        for combo in itertools.product(*pools):
            b = dict(a)
            b.update(zip(plays, combo))
            if eval_tarski(M, seq.antecedent, b) and not eval_tarski(M, seq.succedent, b):
                return b
    return None


def _stream_het(seq, v):
    from .syntax import subformulas
    for f in (seq.antecedent, seq.succedent):
        for g in subformulas(f):
            if isinstance(g, (PlayTails, PlayPayoff)) and g.stream == v:
                return g.het
    return None
