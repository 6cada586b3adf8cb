import random

import pytest
from hypothesis import given, settings, strategies as st

from hetlogic.games import InstanceTooLarge, build_arena, compile_monitor, eval_het, param_vars
from hetlogic.oracles import cover_eval, oracle_eval, strategy_enum
from hetlogic.parser import parse_formula, parse_signature
from hetlogic.random_instances import all_structures, random_het, random_structure
from hetlogic.structures import assignments

from conftest import read, structure

BASE = parse_signature(read("base.sig"))


def _agree(M, h, a):
    want = eval_het(M, h, a)
    assert oracle_eval(M, h, a, "strategy-enum") == want
    assert oracle_eval(M, h, a, "cover-semantics") == want


@pytest.mark.parametrize("name", ["copycat", "copycat_dual", "reach_one", "avoid_p"])
@pytest.mark.parametrize("struct", ["m1", "m2", "m3"])
def test_corpus_agreement(name, struct):
    h = parse_formula(read("formulas", name + ".fml"), BASE)
    _agree(structure(struct), h, {})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_random_agreement(seed):
    rng = random.Random(seed)
    M = random_structure(rng, 2)
    h = random_het(rng)
    for a in assignments(M, param_vars(h)):
        _agree(M, h, a)


def test_exhaustive_singletons_and_pairs_sample():
    rng = random.Random(5)
    hs = [random_het(rng) for _ in range(12)]
    for card in (1, 2):
        for M in all_structures(card):
            for h in hs:
                _agree(M, h, {})


def test_unknown_mode():
    h = parse_formula(read("formulas", "copycat.fml"), BASE)
    with pytest.raises(ValueError):
        oracle_eval(structure("m1"), h, {}, "magic")


def test_strategy_enum_respects_cap():
    h = parse_formula(read("formulas", "copycat.fml"), BASE)
    ar = build_arena(structure("m3"), h, {})
    with pytest.raises(InstanceTooLarge):
        strategy_enum(ar, max_positions=2)


def test_cover_eval_builds_no_monitor(monkeypatch):
    import hetlogic.games as games
    h = parse_formula(read("formulas", "copycat.fml"), BASE)

    def boom(*args, **kw):
        raise AssertionError("monitor compiled")
    monkeypatch.setattr(games, "compile_monitor", boom)
    assert cover_eval(structure("m2"), h, {})
    assert compile_monitor is not boom
