import contextlib
import io
import json
import os
import subprocess
import sys

import pytest

from hetlogic import cli

from conftest import ROOT, corpus_path, formula, manifest, read, structure

COMMANDS = manifest()["commands"]


def run(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(args)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)


@pytest.mark.parametrize("entry", COMMANDS, ids=[c["name"] for c in COMMANDS])
def test_manifest_replay(entry):
    code, out, _ = run(entry["args"])
    assert code == entry["exit"]
    assert out == read(entry["expected"])


def test_exit_codes_cover_all_outcomes():
    assert {c["exit"] for c in COMMANDS} == {0, 1, 2}


def test_structured_report_shape():
    code, out, _ = run(["eval", "corpus/structures/m2.str", "@corpus/formulas/copycat.fml",
                        "--format", "structured"])
    assert code == 0
    rep = json.loads(out)
    assert list(rep)[:5] == ["kind", "verdict", "regions", "witness", "timings"]
    assert rep["schema"] == 1 and rep["timings"] is None


def test_timings_flag():
    code, out, _ = run(["eval", "corpus/structures/m2.str", "@corpus/formulas/copycat.fml",
                        "--format", "structured", "--timings"])
    assert code == 0
    assert isinstance(json.loads(out)["timings"], dict)


def test_human_format():
    code, out, _ = run(["eval", "corpus/structures/m2.str", "@corpus/formulas/copycat_dual.fml"])
    assert code == 1
    assert "false" in out


@pytest.mark.parametrize("args", [
    [],
    ["eval"],
    ["eval", "corpus/structures/m2.str", "P("],
    ["eval", "corpus/structures/missing.str", "true"],
    ["frobnicate"],
])
def test_usage_errors(args):
    code, _, _ = run(args)
    assert code == 2


def test_max_positions_limit():
    code, _, err = run(["solve", "corpus/structures/m3.str", "@corpus/formulas/copycat.fml",
                        "--max-positions", "2"])
    assert code == 2 and "exceeds" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hetlogic", "eval", "corpus/structures/m1.str",
                           "@corpus/formulas/reach_one.fml"], cwd=ROOT, capture_output=True,
                          text=True, timeout=60)
    assert proc.returncode == 0


def _play(side, lines, name="copycat", struct="m2", transcript=None):
    M = structure(struct)
    h = formula(name, M.signature)
    out = io.StringIO()
    cli.play_interactive(M, h, side, io.StringIO("".join(l + "\n" for l in lines)), out, transcript)
    return out.getvalue()


def test_play_as_forall_against_copycat():
    text = _play("forall", ["1", "0", "quit"])
    assert text.startswith("opponent wins from initial position")
    assert text.count("engine plays 1") == 1 and text.count("engine plays 0") == 1
    assert text.rstrip().endswith("bye")


def test_play_illegal_move_is_reported():
    text = _play("forall", ["7", "quit"])
    assert "illegal move; legal moves: 0; 1" in text


def test_play_as_exists_losing_move(tmp_path):
    log = tmp_path / "t.json"
    # copy once, then answer the engine's 0 with 1 and break the copy
    text = _play("exists", ["0", "1"], transcript=str(log))
    assert text.startswith("you win from initial position")
    assert "stage 3, choose y:s>" in text
    assert text.rstrip().endswith("payoff violated: forall wins")
    data = json.loads(log.read_text())
    assert data["side"] == "exists"
    assert [(m["stage"], m["player"], m["move"]) for m in data["moves"]] == [
        (0, "engine", ["0"]), (1, "human", ["0"]), (2, "engine", ["0"]), (3, "human", ["1"])]


def test_play_eof_says_bye():
    assert _play("forall", []).rstrip().endswith("bye")


def test_corpus_files_exist():
    for c in COMMANDS:
        assert os.path.exists(corpus_path(c["expected"]))
