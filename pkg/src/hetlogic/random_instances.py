"""Seeded generators of small structures and clopen heterogeneous formulas.

Used by the ``oracle`` subcommand and by the property suites.  All formulas
are over one sort ``s`` with a unary relation ``P`` and a binary relation ``R``.
"""
from __future__ import annotations

import itertools
import random

from .structures import Structure
from .syntax import (
    AE, BOTTOM, EA, TOP, And, Atom, Eq, Het, HetBlock, Implies, Or, Reach, Safety, Signature, Var,
)

SIG = Signature(("s",), {"P": ("s",), "R": ("s", "s")}, {})


def random_structure(rng: random.Random, max_card: int = 3, min_card: int = 1,
                     sig: Signature = SIG) -> Structure:
    n = rng.randint(min_card, max_card)
    elems = tuple(str(i) for i in range(n))
    carriers = {s: elems for s in sig.sorts}
    rels = {}
    for name, sorts in sig.relations.items():
        tuples = itertools.product(*(carriers[s] for s in sorts))
        rels[name] = frozenset(t for t in tuples if rng.random() < 0.5)
    return Structure(sig, carriers, rels, {})


def all_structures(card: int, sig: Signature = SIG):
    """Every structure for ``sig`` (relations only) on ``card`` elements."""
    elems = tuple(str(i) for i in range(card))
    carriers = {s: elems for s in sig.sorts}
    names = list(sig.relations)
    spaces = []
    for name in names:
        tuples = list(itertools.product(*(carriers[s] for s in sig.relations[name])))
        spaces.append([frozenset(t for t, bit in zip(tuples, bits) if bit)
                       for bits in itertools.product((0, 1), repeat=len(tuples))])
    for choice in itertools.product(*spaces):
        yield Structure(sig, carriers, dict(zip(names, choice)), {})


def random_template(rng: random.Random, window: int, depth: int = 1):
    vs = [Var("v%d" % i, "s") for i in range(window)]
    if depth <= 0 or rng.random() < 0.45:
        r = rng.random()
        if r < 0.3:
            return Atom("P", (rng.choice(vs),))
        if r < 0.6:
            return Atom("R", (rng.choice(vs), rng.choice(vs)))
        if r < 0.85:
            return Eq(rng.choice(vs), rng.choice(vs))
        return rng.choice((TOP, BOTTOM))
    r = rng.random()
    a = random_template(rng, window, depth - 1)
    if r < 0.3:
        return Implies(a, BOTTOM)
    b = random_template(rng, window, depth - 1)
    if r < 0.65:
        return And((a, b))
    return Or((a, b))


def random_het(rng: random.Random, max_period: int = 2, max_window: int = 2,
               max_templates: int = 2, polarity=None, kind=None) -> Het:
    """A random omega block with a safety or reach payoff."""
    period = rng.randint(1, max_period)
    names = ["x", "y", "z", "u"]
    sched = tuple((Var(names[i], "s"),) for i in range(period))
    window = rng.randint(1, max_window)
    n_t = rng.randint(1, max_templates)
    temps = tuple(random_template(rng, window) for _ in range(n_t))
    kind = kind or rng.choice(("safety", "reach"))
    payoff = Safety(window, temps) if kind == "safety" else Reach(window, temps)
    polarity = polarity or rng.choice((AE, EA))
    return Het(HetBlock(polarity, None, sched), payoff)


def random_kripke(rng: random.Random, max_nodes: int = 4, universe: int = 3,
                  sig: Signature = SIG):
    """A random finite Kripke model whose maps are quotient maps of one universe.

    Every node carries a partition of ``{0..universe-1}`` coarser than those of
    the nodes below it, so the induced maps commute.  Relations only grow along
    the order.  A nullary function symbol is read as the class of element 0.
    """
    from .kripke import KripkeModel
    n = rng.randint(1, max_nodes)
    names = ["n%d" % i for i in range(n)]
    below = {j: [i for i in range(j) if rng.random() < 0.5] for j in range(n)}
    structs, blocks_of = {}, {}
    for j in range(n):
        # union-find over the universe, seeded by every predecessor's partition
        rep = list(range(universe))

        def find(u):
            while rep[u] != u:
                u = rep[u]
            return u

        def union(u, v):
            ru, rv = find(u), find(v)
            if ru != rv:
                rep[max(ru, rv)] = min(ru, rv)
        for i in below[j]:
            for u in range(universe):
                union(u, blocks_of[i][u])
        if below[j] and rng.random() < 0.3:
            union(rng.randrange(universe), rng.randrange(universe))
        cls = {u: find(u) for u in range(universe)}
        blocks_of[j] = cls
        elems = tuple(str(c) for c in sorted(set(cls.values())))
        carriers = {s: elems for s in sig.sorts}
        rels = {}
        for name, sorts in sig.relations.items():
            got = set()
            for i in below[j]:
                for tup in structs[names[i]].relations[name]:
                    got.add(tuple(str(cls[int(x)]) for x in tup))
            for tup in itertools.product(elems, repeat=len(sorts)):
                if rng.random() < 0.25:
                    got.add(tup)
            rels[name] = frozenset(got)
        funcs = {f: {(): str(cls[0])} for f, (args, _) in sig.functions.items() if not args}
        structs[names[j]] = Structure(sig, carriers, rels, funcs)
    order, maps = [], {}
    for j in range(n):
        for i in below[j]:
            order.append((names[i], names[j]))
            tab = {}
            for u in range(universe):
                tab[str(blocks_of[i][u])] = str(blocks_of[j][u])
            maps[(names[i], names[j])] = {s: dict(tab) for s in sig.sorts}
    return KripkeModel(sig, tuple(names), tuple(order), structs, maps)
