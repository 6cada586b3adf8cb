"""Independent brute-force evaluators used to cross-check the game solver.

``strategy_enum`` enumerates every positional strategy of the payoff seeker
on the compiled arena and checks all counterplays by graph search.
``cover_eval`` never builds a monitor: it unfolds the game element by
element (a covering family of a point of a set is just a choice of witness)
over semantic states (stage phase, last moves), evaluating templates on the
window directly, down to a depth equal to the number of such states.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from typing import Optional

from .games import (
    DEAD, HIT, Arena, Evaluator, InstanceTooLarge, _bind_placeholders, _default_eval,
    _legal, _window_env, build_arena, stage_alphabet,
)
from .structures import Structure, eval_term
from .syntax import Het, Safety, owner_is_universal

MAX_STRATEGIES = 200_000


def _a_wins_against(ar: Arena, choice: dict) -> bool:
    """Whether the opponent beats the fixed E strategy ``choice`` from the initial position."""
    def succ(p):
        if ar.owner[p] == "E" and ar.moves[p]:
            return [choice[p]]
        return [q for _, q in ar.moves[p]]

    if ar.objective == "safety":
        # A wins by reaching Dead or a position where E is stuck
        seen = {ar.initial}
        queue = deque([ar.initial])
        while queue:
            p = queue.popleft()
            if ar.status[p] == DEAD or (ar.owner[p] == "E" and not ar.moves[p]):
                return True
            for q in succ(p):
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return False
    # reach: A wins by trapping E away from Hit forever or leaving her stuck
    if ar.status[ar.initial] == HIT:
        return False
    live = set()
    queue = deque([ar.initial])
    live.add(ar.initial)
    while queue:
        p = queue.popleft()
        if ar.owner[p] == "E" and not ar.moves[p]:
            return True
        for q in succ(p):
            if ar.status[q] != HIT and q not in live:
                live.add(q)
                queue.append(q)
    # a cycle inside the Hit-free reachable part is an infinite losing play
    graph = {p: [q for q in succ(p) if q in live] for p in live}
    color = {}
    for s in live:
        if s in color:
            continue
        stack = [(s, iter(graph[s]))]
        color[s] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color.get(nxt) == 1:
                return True
            elif nxt not in color:
                color[nxt] = 1
                stack.append((nxt, iter(graph[nxt])))
    return False


def strategy_enum(ar: Arena, max_positions: int = 30) -> bool:
    if ar.n_positions > max_positions:
        raise InstanceTooLarge("arena has %d positions (cap %d)" % (ar.n_positions, max_positions))
    mine = [p for p in range(ar.n_positions) if ar.owner[p] == "E" and ar.moves[p]]
    total = 1
    for p in mine:
        total *= len(ar.moves[p])
    if total > MAX_STRATEGIES:
        raise InstanceTooLarge("%d positional strategies" % total)
    pools = [[q for _, q in ar.moves[p]] for p in mine]
    for combo in itertools.product(*pools):
        if not _a_wins_against(ar, dict(zip(mine, combo))):
            return True
    return False


def cover_eval(M: Structure, h: Het, a: dict, evaluator: Optional[Evaluator] = None,
               max_states: int = 5000) -> bool:
    ev = evaluator or _default_eval(M)
    p = h.payoff
    safety = isinstance(p, Safety)
    w = p.window
    keep = w - 1
    L = math.lcm(2, h.block.period, len(p.templates))
    prefix = tuple(tuple(eval_term(M, t, a) for t in blk) for blk in h.prefix)
    start = (0, prefix[len(prefix) - keep:] if keep else ())

    def step(state, mv):
        k, hist = state
        window = hist + (mv,)
        if len(window) >= w:
            t = p.templates[k % len(p.templates)]
            env = dict(a)
            env.update(_bind_placeholders(t, _window_env(h, window[-w:])))
            val = ev(t, env)
            if safety and not val:
                return "lost"
            if not safety and val:
                return "won"
        return ((k + 1) % L, window[len(window) - keep:] if keep else ())

    def moves(state):
        k = state[0]
        return [mv for mv in stage_alphabet(M, h, k) if _legal(M, h, k, mv, a, ev)]

    # count semantic states to fix the unfolding depth
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for mv in moves(s):
            t = step(s, mv)
            if isinstance(t, tuple) and t not in seen:
                if len(seen) >= max_states:
                    raise InstanceTooLarge("more than %d semantic states" % max_states)
                seen.add(t)
                queue.append(t)
    depth = len(seen) + 1
    memo = {}

    def value(state, d):
        if state == "lost":
            return False
        if state == "won":
            return True
        if d == 0:
            return safety
        key = (state, d)
        if key in memo:
            return memo[key]
        universal = owner_is_universal(h.block.polarity, state[0])
        opts = moves(state)
        if universal:
            r = all(value(step(state, mv), d - 1) for mv in opts)
        else:
            r = any(value(step(state, mv), d - 1) for mv in opts)
        memo[key] = r
        return r

    return value(start, depth)


def oracle_eval(M: Structure, h: Het, a: dict, mode: str, max_positions: int = 30,
                evaluator: Optional[Evaluator] = None) -> bool:
    if mode == "strategy-enum":
        return strategy_enum(build_arena(M, h, a, evaluator), max_positions)
    if mode == "cover-semantics":
        return cover_eval(M, h, a, evaluator)
    raise ValueError("unknown oracle mode %s" % mode)
