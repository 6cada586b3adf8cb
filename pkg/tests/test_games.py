import random

import pytest
from hypothesis import given, settings, strategies as st

from hetlogic.games import (
    DEAD, HIT, IllegalMove, InstanceTooLarge, build_arena, check_determinacy, check_preservation,
    compile_monitor, eval_het, het_extension, param_vars, play_step, set_position_cap, solve_game,
)
from hetlogic.parser import parse_formula, parse_signature
from hetlogic.random_instances import random_structure
from hetlogic.structures import Structure, assignments
from hetlogic.syntax import Var, dual

from conftest import read, structure
from strategies import het_blocks

BASE = parse_signature(read("base.sig"))


def _random_model(seed):
    rng = random.Random(seed)
    M = random_structure(rng, 3, sig=BASE)
    one = rng.choice(M.carrier("s"))
    return Structure(BASE, M.carriers, M.relations, {"one": {(): one}})


def fml(name):
    return parse_formula(read("formulas", name + ".fml"), BASE)


def het(text, ctx=()):
    return parse_formula(text, BASE, ctx)


# frozen values, computed by the independent game-tree oracle and then recorded
@pytest.mark.parametrize("name, struct, states, positions, value", [
    ("copycat", "m1", 1, 2, True),
    ("copycat", "m2", 4, 5, True),
    ("copycat", "m3", 5, 6, True),
    ("copycat_dual", "m2", 4, 5, False),
    ("reach_one", "m1", 2, 3, True),
    ("reach_one", "m2", 2, 4, True),
    ("avoid_p", "m2", 3, 4, True),
])
def test_monitor_and_arena_sizes(name, struct, states, positions, value):
    M, h = structure(struct), fml(name)
    assert compile_monitor(h, M, {}).n_states == states
    ar = build_arena(M, h, {})
    assert ar.n_positions == positions
    assert eval_het(M, h, {}) is value


def test_true_template_has_one_state():
    h = het("hetAE omega { sched: [[x:s]]; payoff: safety(1)[true] }")
    assert compile_monitor(h, structure("m3"), {}).n_states == 1


def test_singleton_carrier_has_one_move_per_position():
    ar = build_arena(structure("m1"), fml("copycat"), {})
    assert all(len(m) == 1 for m in ar.moves)


def test_bound_restricts_moves():
    # only element 1 satisfies P in m2
    h = het("hetAE omega { sched: [[x:s], [y:s]]; bounds: [P(x), true]; payoff: safety(2)[true, v0 = v1] }")
    ar = build_arena(structure("m2"), h, {})
    assert len(ar.moves[ar.initial]) == 1
    assert eval_het(structure("m2"), h, {})


def test_stuck_players():
    never = "hetAE omega { sched: [[x:s], [y:s]]; bounds: [%s, %s]; payoff: safety(2)[false, false] }"
    M = structure("m2")
    # universal player has no legal move, so the existential player wins at once
    assert eval_het(M, het(never % ("false", "true")), {})
    # existential player is stuck after the first move and loses
    stuck = "hetAE omega { sched: [[x:s], [y:s]]; bounds: [true, false]; payoff: safety(2)[true, true] }"
    assert not eval_het(M, het(stuck), {})


def test_all_universal_moves_equal_parameter():
    y = Var("y", "s")
    h = het("hetAE omega { sched: [[x:s], [w:s]]; payoff: safety(1)[v0 = y, true] }", [y])
    M = structure("m2")
    assert het_extension(M, h, [y]) == set()
    assert het_extension(M, dual(h), [y]) == {("0",), ("1",)}
    assert het_extension(structure("m1"), h, [y]) == {("0",)}


def test_parameterised_copycat_extension():
    z = Var("z", "s")
    text = read("formulas", "param_copy.fml").split("]", 1)[1]
    h = het(text, [z])
    M = structure("m3")
    ext = het_extension(M, h, [z])
    for (e,) in [("0",), ("1",), ("2",)]:
        assert ((e,) in ext) == eval_het(M, h, {z: e})


def _check_strategy(ar, res):
    # following E's strategy from E's region never leaves the region
    for p in res.win_ae:
        if ar.is_terminal(p):
            continue
        succ = dict(ar.moves[p])
        if ar.owner[p] == "E":
            if succ:
                assert succ[res.strategy_ae[p]] in res.win_ae
        else:
            assert all(q in res.win_ae for q in succ.values())
    for p in res.win_ea:
        if ar.is_terminal(p):
            continue
        succ = dict(ar.moves[p])
        if ar.owner[p] == "A":
            if succ:
                assert succ[res.strategy_ea[p]] in res.win_ea
        else:
            assert all(q in res.win_ea for q in succ.values())


@settings(max_examples=120, deadline=None)
@given(het_blocks(), st.integers(0, 10 ** 6))
def test_regions_partition_and_strategies_are_sound(h, seed):
    M = _random_model(seed)
    elems = M.carrier("s")
    a = {v: elems[seed % len(elems)] for v in param_vars(h)}
    ar = build_arena(M, h, a)
    res = solve_game(ar)
    assert res.partitions(ar.n_positions)
    _check_strategy(ar, res)
    for p in res.win_ae:
        assert ar.status[p] != DEAD
    if ar.objective == "safety":
        assert all(ar.status[p] != HIT for p in range(ar.n_positions))


@settings(max_examples=80, deadline=None)
@given(het_blocks(), st.integers(0, 10 ** 6))
def test_duality(h, seed):
    M = _random_model(seed)
    for a in assignments(M, param_vars(h)):
        assert eval_het(M, h, a) != eval_het(M, dual(h), a)


def test_determinacy_report():
    rep = check_determinacy(structure("m3"), [fml("copycat"), fml("reach_one")])
    assert rep["passed"]
    assert [g["violations"] for g in rep["games"]] == [[], []]


def test_preservation_safety_and_reach():
    for s in ("m1", "m2", "m3"):
        assert check_preservation(structure(s), fml("copycat")).passed
    r = check_preservation(structure("m1"), fml("reach_one"))
    assert r.passed
    r = check_preservation(structure("m2"), fml("reach_one"))
    assert not r.passed
    assert r.lasso.as_lists() == {"stem": [], "cycle": [["0"], ["0"]]}


def test_play_step_copycat_reply():
    M, h = structure("m2"), fml("copycat")
    ar = build_arena(M, h, {})
    res = solve_game(ar)
    step = play_step(ar, res, ar.initial, ("1",))
    assert step.engine_move == ("1",)
    assert not step.finished
    with pytest.raises(IllegalMove):
        play_step(ar, res, ar.initial, ("7",))


def test_position_cap():
    old = set_position_cap(3)
    try:
        with pytest.raises(InstanceTooLarge):
            build_arena(structure("m3"), fml("copycat"), {})
    finally:
        set_position_cap(old)

