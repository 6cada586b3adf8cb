"""Heterogeneous quantifiers as finite-arena clopen games.

The existential player ("E" below) is the one whose strategy witnesses the
formula: she wants the payoff, the universal player ("A") wants its
complement.  For ``(AE)`` blocks A moves at even stages; for ``(EA)`` blocks
E moves first.  Positions pair the stage phase with a minimized payoff
monitor state.  Safety payoffs are solved by a greatest fixpoint,
reachability payoffs by an attractor.
"""
from __future__ import annotations

import functools
import itertools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .structures import EvaluationError, Stream, Structure, assignments, eval_tarski, eval_term
from .syntax import (
    Het, PlayPayoff, Reach, Safety, SyntaxErrorHL, Theory, ae_form,
    desugar_finite_block, dual, free_vars, het_admissible, het_subformulas,
    owner_is_universal,
)

ALIVE, DEAD, PENDING, HIT = "alive", "dead", "pending", "hit"

Evaluator = Callable[[object, dict], bool]


class IllegalMove(Exception):
    pass


class InstanceTooLarge(Exception):
    pass


# ---------------------------------------------------------------- monitors

@dataclass(frozen=True)
class Monitor:
    kind: str                       # "safety" or "reach"
    initial: int
    status: tuple                   # per state
    trans: dict                     # (state, move) -> state
    absorbing: Optional[int]        # the Dead / Hit sink, if reachable

    @property
    def n_states(self) -> int:
        return len(self.status)

    def step(self, state: int, move: tuple) -> int:
        if state == self.absorbing:
            return state
        try:
            return self.trans[(state, move)]
        except KeyError:
            raise IllegalMove("move %s not in the alphabet of monitor state %d" % (move, state))


def stage_alphabet(M: Structure, h: Het, k: int) -> list:
    blk = h.block.schedule[k % h.block.period]
    return list(itertools.product(*(M.carriers[v.sort] for v in blk)))


def _window_env(h: Het, window: tuple) -> dict:
    env = {}
    for i, mv in enumerate(window):
        # placeholder sort is fixed per template, take it from the move block
        for j, val in enumerate(mv):
            env[("v%d_%d" % (i, j))] = val
        if len(mv) == 1:
            env["v%d" % i] = mv[0]
    return env


def _bind_placeholders(template, names: dict) -> dict:
    out = {}
    for v in free_vars(template):
        if v.name in names:
            out[v] = names[v.name]
    return out


def _default_eval(M):
    return lambda f, env: eval_tarski(M, f, env)


def compile_monitor(h: Het, M: Structure, a: dict, evaluator: Optional[Evaluator] = None) -> Monitor:
    """Minimized deterministic monitor for the windowed payoff of ``h``."""
    p = h.payoff
    if not isinstance(p, (Safety, Reach)):
        raise SyntaxErrorHL("monitors are compiled from safety/reach payoffs")
    ev = evaluator or _default_eval(M)
    w = p.window
    tvars = [tuple(free_vars(t)) for t in p.templates]
    for vs in tvars:
        for v in vs:
            m = re.match(r"^v(\d+)", v.name)
            if m and int(m.group(1)) >= w:
                raise SyntaxErrorHL("template window exceeds declared w: %s" % v.name)
    safety = isinstance(p, Safety)
    ok, bad = (ALIVE, DEAD) if safety else (PENDING, HIT)
    period = h.block.period
    L = math.lcm(period, len(p.templates))
    prefix_vals = tuple(tuple(eval_term(M, t, a) for t in blk) for blk in h.prefix)
    keep = w - 1
    hist0 = prefix_vals[len(prefix_vals) - keep:] if keep else ()

    sink = ("sink",)
    init = (0, hist0)
    index = {init: 0}
    raw = [init]
    raw_trans = {}
    queue = deque([init])
    alphabets = [stage_alphabet(M, h, k) for k in range(period)]
    while queue:
        st = queue.popleft()
        k, hist = st
        for mv in alphabets[k % period]:
            window = hist + (mv,)
            nxt_hist = window[len(window) - keep:] if keep else ()
            fire = len(window) >= w
            dead = False
            if fire:
                j = k % len(p.templates)
                t = p.templates[j]
                names = _window_env(h, window[-w:])
                env = dict(a)
                env.update({v: names[v.name] for v in tvars[j] if v.name in names})
                val = ev(t, env)
                dead = (not val) if safety else val
            nxt = sink if dead else ((k + 1) % L, nxt_hist)
            if nxt not in index:
                index[nxt] = len(raw)
                raw.append(nxt)
                if nxt != sink:
                    queue.append(nxt)
            raw_trans[(index[st], mv)] = index[nxt]

    # Moore refinement; states only merge when they read the same sorts next
    def alpha_key(i):
        st = raw[i]
        if st == sink:
            return ("sink",)
        blk = h.block.schedule[st[0] % period]
        return (ok, tuple(v.sort for v in blk))

    part = {}
    keys = {}
    for i in range(len(raw)):
        part[i] = keys.setdefault(alpha_key(i), len(keys))
    while True:
        sigs = {}
        new = {}
        for i in range(len(raw)):
            if raw[i] == sink:
                sig = (part[i], "sink")
            else:
                k = raw[i][0]
                sig = (part[i], tuple(part[raw_trans[(i, mv)]] for mv in alphabets[k % period]))
            new[i] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == len(set(part.values())):
            part = new
            break
        part = new

    # renumber blocks in order of first discovery so the initial state is 0
    order = {}
    for i in range(len(raw)):
        order.setdefault(part[i], len(order))
    n = len(order)
    status = [ok] * n
    trans = {}
    absorbing = None
    for i in range(len(raw)):
        s = order[part[i]]
        if raw[i] == sink:
            status[s] = bad
            absorbing = s
            continue
        k = raw[i][0]
        for mv in alphabets[k % period]:
            trans[(s, mv)] = order[part[raw_trans[(i, mv)]]]
    return Monitor("safety" if safety else "reach", order[part[0]], tuple(status), trans, absorbing)


# ---------------------------------------------------------------- arenas

@dataclass
class Arena:
    """Finite turn-based arena.  ``owner`` is "E" (payoff seeker) or "A"."""
    objective: str                  # "safety" | "reach"
    initial: int
    owner: list
    status: list
    moves: list                     # per position: list of (move, successor)
    labels: list = field(default_factory=list)

    @property
    def n_positions(self) -> int:
        return len(self.owner)

    def successors(self, pos: int) -> list:
        return [t for _, t in self.moves[pos]]

    def is_terminal(self, pos: int) -> bool:
        return self.status[pos] in (DEAD, HIT)


def _legal(M, h, k, mv, a, ev) -> bool:
    if h.block.bounds is None:
        return True
    blk = h.block.schedule[k % h.block.period]
    b = h.block.bounds[k % h.block.period]
    env = dict(a)
    env.update(zip(blk, mv))
    return ev(b, env)


_position_cap: Optional[int] = None


def set_position_cap(n: Optional[int]) -> Optional[int]:
    """Limit the number of arena positions (None lifts the limit); returns the old cap."""
    global _position_cap
    old, _position_cap = _position_cap, n
    return old


def build_arena(M: Structure, h: Het, a: dict, evaluator: Optional[Evaluator] = None) -> Arena:
    if not h.block.is_omega:
        raise SyntaxErrorHL("arenas are built for omega blocks; finite blocks are expanded")
    ev = evaluator or _default_eval(M)
    mon = compile_monitor(h, M, a, ev)
    G = math.lcm(2, h.block.period)
    start = (0, mon.initial)
    index = {start: 0}
    labels = [start]
    moves = [None]
    queue = deque([start])
    while queue:
        pos = queue.popleft()
        k, m = pos
        out = []
        for mv in stage_alphabet(M, h, k):
            if not _legal(M, h, k, mv, a, ev):
                continue
            nxt = ((k + 1) % G, mon.step(m, mv))
            if nxt not in index:
                index[nxt] = len(labels)
                labels.append(nxt)
                if _position_cap is not None and len(labels) > _position_cap:
                    raise InstanceTooLarge("arena exceeds %d positions" % _position_cap)
                moves.append(None)
                queue.append(nxt)
            out.append((mv, index[nxt]))
        moves[index[pos]] = out
    owner = ["A" if owner_is_universal(h.block.polarity, k) else "E" for k, _ in labels]
    status = [mon.status[m] for _, m in labels]
    return Arena(mon.kind, 0, owner, status, moves, labels)


# ---------------------------------------------------------------- solving

@dataclass(frozen=True)
class GameResult:
    win_ae: frozenset               # E (payoff seeker) wins
    win_ea: frozenset               # A wins
    strategy_ae: dict
    strategy_ea: dict
    iterations: int

    @property
    def determined(self) -> bool:
        return not (self.win_ae & self.win_ea)

    def partitions(self, n: int) -> bool:
        return self.determined and len(self.win_ae | self.win_ea) == n


def _attractor(ar: Arena, player: str, target: set):
    """Least fixpoint: positions from which ``player`` forces a visit to ``target``."""
    rank = {p: 0 for p in target}
    strat = {}
    preds = [[] for _ in range(ar.n_positions)]
    for p in range(ar.n_positions):
        for mv, q in ar.moves[p]:
            preds[q].append(p)
    count = [len(ar.moves[p]) for p in range(ar.n_positions)]
    queue = deque(sorted(target))
    iterations = 0
    while queue:
        q = queue.popleft()
        iterations += 1
        for p in preds[q]:
            if p in rank:
                continue
            if ar.owner[p] == player:
                rank[p] = rank[q] + 1
                queue.append(p)
            else:
                count[p] -= 1
                if count[p] == 0:
                    rank[p] = rank[q] + 1
                    queue.append(p)
    for p in rank:
        if ar.owner[p] == player and p not in target:
            # lowest-indexed move that makes progress
            for mv, q in ar.moves[p]:
                if q in rank and rank[q] < rank[p]:
                    strat[p] = mv
                    break
    return set(rank), strat, iterations


def _safe_region(ar: Arena, player: str, allowed: set):
    """Greatest fixpoint: positions from which ``player`` stays inside ``allowed``."""
    region = set(allowed)
    iterations = 0
    changed = True
    while changed:
        changed = False
        iterations += 1
        for p in sorted(region):
            succ = [q for _, q in ar.moves[p]]
            if ar.owner[p] == player:
                keep = any(q in region for q in succ)
            else:
                keep = all(q in region for q in succ)
            if not keep:
                region.discard(p)
                changed = True
    strat = {}
    for p in sorted(region):
        if ar.owner[p] == player:
            for mv, q in ar.moves[p]:
                if q in region:
                    strat[p] = mv
                    break
    return region, strat, iterations


def solve_game(ar: Arena) -> GameResult:
    """Both winning regions, each computed by its own fixpoint."""
    allpos = set(range(ar.n_positions))
    stuck = {p for p in allpos if not ar.moves[p]}
    if ar.objective == "safety":
        bad = {p for p in allpos if ar.status[p] == DEAD}
        allowed = allpos - bad - {p for p in stuck if ar.owner[p] == "E"}
        w_e, s_e, i1 = _safe_region(ar, "E", allowed)
        target = bad | {p for p in stuck if ar.owner[p] == "E"}
        w_a, s_a, i2 = _attractor(ar, "A", target)
    else:
        good = {p for p in allpos if ar.status[p] == HIT}
        target = good | {p for p in stuck if ar.owner[p] == "A"}
        w_e, s_e, i1 = _attractor(ar, "E", target)
        allowed = allpos - good - {p for p in stuck if ar.owner[p] == "A"}
        w_a, s_a, i2 = _safe_region(ar, "A", allowed)
    return GameResult(frozenset(w_e), frozenset(w_a), s_e, s_a, i1 + i2)


# ---------------------------------------------------------------- evaluation

@functools.lru_cache(maxsize=4096)
def _cached_game(M: Structure, h: Het, key: tuple):
    a = dict(key)
    ar = build_arena(M, h, a)
    return ar, solve_game(ar)


def _key(h: Het, a: dict) -> tuple:
    fv = free_vars(h)
    try:
        return tuple(sorted(((v, a[v]) for v in fv), key=lambda kv: (kv[0].name, kv[0].sort)))
    except KeyError as e:
        raise EvaluationError("missing assignment entry for %s" % e.args[0].name)


def solved(M: Structure, h: Het, a: dict, evaluator: Optional[Evaluator] = None):
    if evaluator is None:
        return _cached_game(M, h, _key(h, a))
    ar = build_arena(M, h, a, evaluator)
    return ar, solve_game(ar)


def finite_game_value(M: Structure, h: Het, a: dict, evaluator: Optional[Evaluator] = None) -> bool:
    """Backward induction over the finite game tree."""
    ev = evaluator or _default_eval(M)
    blk = h.block

    def value(k, env):
        if k == blk.length:
            return ev(h.payoff.formula, env)
        vs = blk.schedule[k]
        universal = owner_is_universal(blk.polarity, k)
        results = []
        for vals in itertools.product(*(M.carriers[v.sort] for v in vs)):
            e2 = dict(env)
            e2.update(zip(vs, vals))
            if blk.bounds is not None and not ev(blk.bounds[k], e2):
                continue
            results.append(value(k + 1, e2))
            if universal and not results[-1]:
                return False
            if not universal and results[-1]:
                return True
        # a mover without a legal move loses
        return universal

    return value(0, dict(a))


def eval_het(M: Structure, h: Het, a: dict, evaluator: Optional[Evaluator] = None) -> bool:
    if not h.block.is_omega:
        ev = evaluator or _default_eval(M)
        expanded = ev(desugar_finite_block(h), dict(a))
        direct = finite_game_value(M, h, a, evaluator)
        if expanded != direct:
            raise AssertionError("finite block expansion disagrees with the game tree")
        return expanded
    ar, res = solved(M, h, a, evaluator)
    return ar.initial in res.win_ae


def param_vars(h) -> list:
    return sorted(free_vars(h), key=lambda v: (v.name, v.sort))


def het_extension(M: Structure, h: Het, params=None) -> set:
    """Parameter tuples (ordered as ``params``) at which the block holds."""
    params = list(params) if params is not None else param_vars(h)
    out = set()
    for a in assignments(M, params):
        if eval_het(M, h, a):
            out.add(tuple(a[v] for v in params))
    return out


# ---------------------------------------------------------------- plays as formulas

def _follow(ar: Arena, stream: Stream):
    """Positions visited by an ultimately periodic play until it repeats."""
    seen = set()
    pos = ar.initial
    visited = [pos]
    n = 0
    while True:
        if n >= len(stream.stem):
            key = (pos, (n - len(stream.stem)) % len(stream.cycle))
            if key in seen:
                return visited
            seen.add(key)
        mv = tuple(stream.move(n))
        nxt = dict(ar.moves[pos]).get(mv)
        if nxt is None:
            raise EvaluationError("stream move %s is illegal at stage %d" % (mv, n))
        pos = nxt
        visited.append(pos)
        n += 1


def eval_play(M: Structure, f, a: dict) -> bool:
    stream = a.get(f.stream)
    if not isinstance(stream, Stream):
        raise EvaluationError("missing stream value for %s" % f.stream.name)
    ar, res = solved(M, f.het, a)
    visited = _follow(ar, stream)
    if isinstance(f, PlayPayoff):
        if ar.objective == "safety":
            return all(ar.status[p] != DEAD for p in visited)
        return any(ar.status[p] == HIT for p in visited)
    return all(p in res.win_ae for p in visited)


def stream_pool(M: Structure, h: Optional[Het], max_stem: int = 1) -> list:
    """Small exhaustive pool of lasso plays for sequents over a play variable."""
    if h is None:
        raise EvaluationError("cannot infer the move schedule of a play variable")
    p = h.block.period
    cycles = sorted({p, 2 * p if p == 1 else p})
    out = []
    for stem_len in range(max_stem + 1):
        for cyc_len in cycles:
            alph = [stage_alphabet(M, h, k) for k in range(stem_len + cyc_len)]
            for moves in itertools.product(*alph):
                out.append(Stream(tuple(moves[:stem_len]), tuple(moves[stem_len:])))
    return out


# ---------------------------------------------------------------- well-determinedness

@dataclass(frozen=True)
class Lasso:
    stem: tuple
    cycle: tuple

    def as_lists(self):
        return {"stem": [list(m) for m in self.stem], "cycle": [list(m) for m in self.cycle]}


@dataclass(frozen=True)
class PreservationResult:
    passed: bool
    lasso: Optional[Lasso] = None
    params: Optional[dict] = None


def _find_cycle(ar: Arena, region: set, starts: list):
    """DFS in the region subgraph; returns (path moves to cycle start, cycle moves)."""
    color = {}
    for s in starts:
        if s not in region or s in color:
            continue
        stack = [(s, iter(ar.moves[s]))]
        path_moves = []
        on_path = [s]
        color[s] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for mv, q in it:
                if q not in region:
                    continue
                if color.get(q) == 1:
                    i = on_path.index(q)
                    return s, path_moves[:i], path_moves[i:] + [mv]
                if q not in color:
                    color[q] = 1
                    stack.append((q, iter(ar.moves[q])))
                    path_moves.append(mv)
                    on_path.append(q)
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
                on_path.pop()
                if path_moves:
                    path_moves.pop()
    return None


def _path_to(ar: Arena, target: int) -> list:
    prev = {ar.initial: None}
    queue = deque([ar.initial])
    while queue:
        p = queue.popleft()
        if p == target:
            break
        for mv, q in ar.moves[p]:
            if q not in prev:
                prev[q] = (p, mv)
                queue.append(q)
    out = []
    node = target
    while prev[node] is not None:
        p, mv = prev[node]
        out.append(mv)
        node = p
    return out[::-1]


def preservation_witness(ar: Arena, res: GameResult, from_all: bool = False) -> Optional[Lasso]:
    """A play staying in E's winning region whose payoff still fails."""
    if ar.objective == "safety":
        # leaving Alive means leaving E's region, so no witness can exist
        assert all(ar.status[p] != DEAD for p in res.win_ae)
        return None
    region = {p for p in res.win_ae if ar.status[p] != HIT}
    starts = sorted(region) if from_all else [ar.initial]
    found = _find_cycle(ar, region, starts)
    if found is None:
        return None
    s, stem, cycle = found
    lead = _path_to(ar, s) if s != ar.initial else []
    return Lasso(tuple(lead + stem), tuple(cycle))


def check_preservation(M: Structure, h: Het, a: Optional[dict] = None,
                       from_all: bool = False) -> PreservationResult:
    if not h.block.is_omega:
        raise SyntaxErrorHL("preservation concerns omega blocks")
    pool = [a] if a is not None else assignments(M, param_vars(h))
    for b in pool:
        ar, res = solved(M, h, b)
        lasso = preservation_witness(ar, res, from_all)
        if lasso is not None:
            return PreservationResult(False, lasso, b)
    return PreservationResult(True)


def _params_repr(a: dict) -> dict:
    return {v.name: val for v, val in sorted(a.items(), key=lambda kv: kv[0].name)}


def check_determinacy(M: Structure, games: list) -> dict:
    """Exactly one of (AE)phi, (EA)(not phi) per game and parameter tuple."""
    entries = []
    ok = True
    for gid, h in enumerate(games):
        g = ae_form(h)
        d = dual(g)
        violations = []
        sizes = []
        for a in assignments(M, param_vars(g)):
            ar1, r1 = solved(M, g, a)
            ar2, r2 = solved(M, d, a)
            holds1 = ar1.initial in r1.win_ae
            holds2 = ar2.initial in r2.win_ae
            part = r1.partitions(ar1.n_positions) and r2.partitions(ar2.n_positions)
            sizes.append({"params": _params_repr(a), "positions": ar1.n_positions,
                          "win_ae": len(r1.win_ae), "win_ea": len(r1.win_ea)})
            if holds1 == holds2 or not part:
                violations.append(_params_repr(a))
        ok = ok and not violations
        entries.append({"game": gid, "polarity": g.block.polarity, "regions": sizes,
                        "violations": violations})
    return {"passed": ok, "games": entries}


def check_well_determined(M: Structure, games: list) -> dict:
    det = check_determinacy(M, games)
    pres = []
    ok = det["passed"]
    for gid, h in enumerate(games):
        g = ae_form(h)
        for which, f in (("AE", g), ("EA", dual(g))):
            r = check_preservation(M, f, from_all=True)
            item = {"game": gid, "schema": which, "passed": r.passed}
            if not r.passed:
                item["witness"] = r.lasso.as_lists()
                item["params"] = _params_repr(r.params)
                ok = False
            pres.append(item)
    return {"well_determined": ok, "determinacy": det, "preservation": pres}


def class_games(theory: Theory) -> list:
    """AE-normalized omega blocks of the theory's axioms whose game lies in the class."""
    out, seen = [], set()
    for ax in theory.axioms:
        for f in (ax.sequent.antecedent, ax.sequent.succedent):
            for h in het_subformulas(f):
                if not h.block.is_omega or not het_admissible(h, theory.classC):
                    continue
                g = ae_form(h)
                if g not in seen:
                    seen.add(g)
                    out.append(g)
    for m in theory.classC.members:
        if isinstance(m, Het):
            g = ae_form(m)
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


# ---------------------------------------------------------------- interactive play

@dataclass(frozen=True)
class StepReport:
    position: int
    engine_move: Optional[tuple]
    status: str
    finished: bool


def engine_move(ar: Arena, res: GameResult, pos: int) -> tuple:
    if not ar.moves[pos]:
        raise IllegalMove("no legal move")
    strat = res.strategy_ae if ar.owner[pos] == "E" else res.strategy_ea
    return strat.get(pos, ar.moves[pos][0][0])


def play_step(ar: Arena, res: GameResult, pos: int, move: Optional[tuple] = None) -> StepReport:
    """Apply ``move`` (or the engine's choice) at ``pos``; the engine answers if it owns the next position.

    The engine plays the side that does not own ``pos`` when ``move`` is given.
    """
    human = ar.owner[pos]
    if move is None:
        move = engine_move(ar, res, pos)
        human = "A" if ar.owner[pos] == "E" else "E"
    legal = dict(ar.moves[pos])
    if tuple(move) not in legal:
        raise IllegalMove("illegal move %s" % (tuple(move),))
    nxt = legal[tuple(move)]
    reply = None
    if ar.owner[nxt] != human and ar.moves[nxt] and not ar.is_terminal(nxt):
        reply = engine_move(ar, res, nxt)
        nxt = dict(ar.moves[nxt])[reply]
    st = ar.status[nxt]
    return StepReport(nxt, reply, st, st in (DEAD, HIT) or not ar.moves[nxt])
