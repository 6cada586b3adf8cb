"""Command line: ``hetlogic <subcommand> ...``.

Exit status is 0 for pass/true verdicts, 1 for fail/false verdicts and 2 for
usage or parse errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
import time

from . import games
from .kernel import KernelError, check_proof, parsed
from .parser import (
    ParseError, parse_class, parse_ctx, parse_formula, parse_kripke, parse_proof, parse_signature,
    parse_structure, parse_theory,
)
from .printer import print_formula, print_proof, print_theory
from .report import Report, emit_report
from .structures import EvaluationError, assignments, eval_tarski
from .syntax import Het, Signature, SyntaxErrorHL, Theory, free_vars
from .wellformed import check_theory, well_formed

EXTENSIONS = {".sig": "sig", ".thy": "thy", ".str": "str", ".prf": "prf", ".krp": "krp"}


class UsageError(Exception):
    pass


@dataclasses.dataclass
class CommandConfig:
    subcommand: str
    inputs: list
    fmt: str = "human"
    seed: int = 0
    max_positions: int = 100000
    mode: str | None = None
    cls: str | None = None
    timings: bool = False
    options: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.max_positions <= 0:
            raise UsageError("--max-positions must be positive")


# ---------------------------------------------------------------- loading

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError("cannot read %s: %s" % (path, e.strerror))


def kind_of(path: str) -> str:
    ext = os.path.splitext(path)[1]
    if ext not in EXTENSIONS:
        raise UsageError("unknown file extension %s (expected one of %s)"
                         % (ext or "''", ", ".join(sorted(EXTENSIONS))))
    return EXTENSIONS[ext]


def _expect_kind(path: str, want: str):
    if kind_of(path) != want:
        raise UsageError("%s: expected a .%s file" % (path, want))


def load_signature(path):
    return parse_signature(_read(path)) if path else None


def load_theory(path: str, cfg: CommandConfig, sig=None) -> Theory:
    _expect_kind(path, "thy")
    T = parse_theory(_read(path), sig)
    if cfg.mode:
        T = dataclasses.replace(T, mode=cfg.mode)
    if cfg.cls:
        T = dataclasses.replace(T, classC=load_class(cfg.cls, T.signature))
    return T


def load_class(source: str, sig: Signature):
    if source in ("safety", "clopen"):
        return parse_class(source, sig)
    return parse_class(_read(source), sig)


def load_structure(path: str, sig=None):
    _expect_kind(path, "str")
    M = parse_structure(_read(path), sig)
    errs = M.validate()
    if errs:
        raise UsageError("%s: %s" % (path, "; ".join(errs)))
    return M


def compatible(small: Signature, big: Signature) -> list:
    errs = []
    for s in small.sorts:
        if s not in big.sorts:
            errs.append("sort %s is not interpreted" % s)
    for r, args in small.relations.items():
        if big.relations.get(r) != args:
            errs.append("relation %s is not interpreted with the same arity" % r)
    for f, ty in small.functions.items():
        if big.functions.get(f) != ty:
            errs.append("function %s is not interpreted with the same type" % f)
    return errs


def _check_compatible(T: Theory, M):
    errs = compatible(T.signature, M.signature)
    if errs:
        raise UsageError("structure does not match the theory: " + "; ".join(errs))


def read_formula_arg(text: str, sig: Signature, ctx=()):
    """A formula given inline or as ``@file``, optionally preceded by ``[ctx z:s, ...]``."""
    if text.startswith("@"):
        text = _read(text[1:])
    text = text.strip()
    if text.startswith("[ctx"):
        end = text.index("]") + 1
        ctx = tuple(ctx) + tuple(parse_ctx(text[:end], sig))
        text = text[end:]
    f = parse_formula(text.strip(), sig, ctx)
    errs = well_formed(f, sig, free_vars(f))
    if errs:
        raise UsageError("formula is not well formed: " + "; ".join(errs))
    return f


def parse_assignment(text: str | None, f, M) -> dict:
    """``x=a,y=b`` matched by name against the free variables of ``f``."""
    fv = {v.name: v for v in free_vars(f)}
    out = {}
    if text:
        for part in text.split(","):
            if "=" not in part:
                raise UsageError("bad assignment entry %r (expected name=element)" % part)
            name, val = (s.strip() for s in part.split("=", 1))
            if name not in fv:
                raise UsageError("%s is not a free variable of the formula" % name)
            v = fv[name]
            if val not in M.carriers.get(v.sort, ()):
                raise UsageError("%s is not an element of sort %s" % (val, v.sort))
            out[v] = val
    missing = sorted(n for n, v in fv.items() if v not in out)
    if missing:
        raise UsageError("no value for free variable(s) %s" % ", ".join(missing))
    return out


def _params(a: dict) -> dict:
    return {v.name: x for v, x in sorted(a.items(), key=lambda kv: kv[0].name)}


class _Clock:
    def __init__(self, on: bool):
        self.on = on
        self.t = {}

    def run(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        if self.on:
            self.t[name] = self.t.get(name, 0.0) + time.perf_counter() - t0
        return out

    def result(self):
        return dict(self.t) if self.on else None


# ---------------------------------------------------------------- subcommands

def cmd_check(cfg: CommandConfig, sig) -> Report:
    files = {}
    ok = True
    for path in cfg.inputs:
        kind = kind_of(path)
        text = _read(path)
        errs = []
        if kind == "sig":
            errs = parse_signature(text).validate()
        elif kind == "thy":
            errs = check_theory(parse_theory(text, sig))
        elif kind == "str":
            errs = parse_structure(text, sig).validate()
        elif kind == "krp":
            from .kripke import check_kripke_model
            errs = check_kripke_model(parse_kripke(text, sig)).violations
        elif kind == "prf":
            parse_proof(text)
        files[path] = errs or "ok"
        ok = ok and not errs
    return Report("check", "ok" if ok else "errors", details={"files": files},
                  exit_code=0 if ok else 1)


def _structure_and_formula(cfg: CommandConfig, sig):
    if len(cfg.inputs) != 2:
        raise UsageError("%s needs a structure file and a formula" % cfg.subcommand)
    M = load_structure(cfg.inputs[0], sig)
    f = read_formula_arg(cfg.inputs[1], M.signature)
    return M, f


def cmd_eval(cfg: CommandConfig, sig, clock) -> Report:
    M, f = _structure_and_formula(cfg, sig)
    a = parse_assignment(cfg.options.get("assign"), f, M)
    v = clock.run("evaluate", eval_tarski, M, f, a)
    return Report("eval", bool(v), details={"formula": print_formula(f), "assignment": _params(a)},
                  exit_code=0 if v else 1)


def cmd_extension(cfg: CommandConfig, sig, clock) -> Report:
    M, f = _structure_and_formula(cfg, sig)
    fv = sorted(free_vars(f), key=lambda v: (v.name, v.sort))
    if cfg.options.get("params"):
        by_name = {v.name: v for v in fv}
        names = [n.strip() for n in cfg.options["params"].split(",")]
        if sorted(names) != sorted(by_name):
            raise UsageError("--params must list exactly the free variables: %s"
                             % ", ".join(sorted(by_name)))
        fv = [by_name[n] for n in names]
    rows = []
    for a in clock.run("enumerate", assignments, M, fv):
        if clock.run("evaluate", eval_tarski, M, f, a):
            rows.append([a[v] for v in fv])
    return Report("extension", len(rows), details={
        "formula": print_formula(f), "params": [v.name for v in fv], "tuples": rows})


def _omega_block(f):
    if not isinstance(f, Het) or not f.block.is_omega:
        raise UsageError("expected an omega heterogeneous block")
    return f


def cmd_solve(cfg: CommandConfig, sig, clock) -> Report:
    M, f = _structure_and_formula(cfg, sig)
    h = _omega_block(f)
    a = parse_assignment(cfg.options.get("assign"), h, M)
    ar, res = clock.run("solve", games.solved, M, h, a)
    e_wins = ar.initial in res.win_ae
    regions = {
        "exists": sorted(res.win_ae),
        "forall": sorted(res.win_ea),
    }
    strat = res.strategy_ae if e_wins else res.strategy_ea
    witness = {"winner": "exists" if e_wins else "forall",
               "strategy": {str(p): list(mv) for p, mv in sorted(strat.items())}}
    details = {
        "formula": print_formula(h),
        "positions": [[k, m] for k, m in ar.labels],
        "owners": ["exists" if o == "E" else "forall" for o in ar.owner],
        "objective": ar.objective,
        "iterations": res.iterations,
    }
    return Report("solve", e_wins, regions=regions, witness=witness, details=details,
                  exit_code=0 if e_wins else 1)


def cmd_certify(cfg: CommandConfig, sig, clock) -> Report:
    if len(cfg.inputs) != 2:
        raise UsageError("certify needs a structure file and a theory file")
    M = load_structure(cfg.inputs[0], sig)
    T = load_theory(cfg.inputs[1], cfg, sig)
    _check_compatible(T, M)
    gs = games.class_games(T)
    rep = clock.run("certify", games.check_well_determined, M, gs)
    ok = rep["well_determined"]
    regions = {str(g["game"]): g["regions"] for g in rep["determinacy"]["games"]}
    witness = None
    for p in rep["preservation"]:
        if not p["passed"]:
            witness = {"game": p["game"], "schema": p["schema"], "params": p["params"],
                       "stem": p["witness"]["stem"], "cycle": p["witness"]["cycle"]}
            break
    if witness is None:
        for g in rep["determinacy"]["games"]:
            if g["violations"]:
                witness = {"game": g["game"], "determinacy_violations": g["violations"]}
                break
    details = {"games": [print_formula(g) for g in gs], "class": T.classC.kind}
    return Report("certify", "well-determined" if ok else "not well-determined",
                  regions=regions, witness=witness, details=details,
                  exit_code=0 if ok else 1)


def cmd_prove(cfg: CommandConfig, sig, clock) -> Report:
    if len(cfg.inputs) != 2:
        raise UsageError("prove needs a proof file and a theory file")
    _expect_kind(cfg.inputs[0], "prf")
    p = parse_proof(_read(cfg.inputs[0]))
    T = load_theory(cfg.inputs[1], cfg, sig)
    v = clock.run("check", check_proof, p, T)
    details = {"nodes": p.size(), "mode": T.mode}
    if v.ok:
        details["conclusion"] = _conclusion_text(p, T)
    return Report("prove", "accepted" if v.ok else "rejected",
                  witness=None if v.ok else {"path": list(v.path), "rule": v.rule},
                  details=details, diagnostics=list(v.diagnostics),
                  exit_code=0 if v.ok else 1)


def _conclusion_text(p, T) -> str:
    from .printer import print_sequent
    return print_sequent(parsed(p, T).conclusion)


def cmd_morleyize(cfg: CommandConfig, sig, clock) -> Report:
    from . import morley
    if len(cfg.inputs) != 1:
        raise UsageError("morleyize needs one theory file")
    T = load_theory(cfg.inputs[0], cfg, sig)
    build = morley.morleyize_intuitionistic if cfg.options.get("intuitionistic") \
        else morley.morleyize_classical
    try:
        MT = clock.run("translate", build, T)
    except morley.MorleyError as e:
        return Report("morleyize", "unsupported", diagnostics=[str(e)], exit_code=1)
    bad = morley.lint(MT)
    ok = not bad
    text = print_theory(MT.theory)
    details = {"items": len(MT.items), "symbols": dict(sorted(MT.sidecar.items())), "lint": bad}
    if cfg.options.get("output"):
        out = cfg.options["output"]
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(out + ".sidecar.json", "w", encoding="utf-8") as fh:
            json.dump(details["symbols"], fh, indent=1, sort_keys=True)
    else:
        details["theory"] = text.splitlines()
    diags = ["not coherent: %s" % n for n in bad]
    if cfg.options.get("structure"):
        M = load_structure(cfg.options["structure"], sig)
        _check_compatible(T, M)
        try:
            N = clock.run("expand", morley.expand_model, M, MT)
            details["model"] = "expanded"
            details["relations"] = {k: sorted(list(t) for t in N.relations[k])
                                    for k in sorted(MT.sidecar)}
        except morley.MorleyError as e:
            details["model"] = "rejected"
            diags.append(str(e))
            ok = False
    if cfg.options.get("proof"):
        p = parse_proof(_read(cfg.options["proof"]))
        try:
            q = clock.run("back-translate", morley.back_translate_proof, p, MT)
            details["proof"] = print_proof(q).splitlines()
        except (morley.BackTranslationError, KernelError) as e:
            diags.append("back-translation failed: %s" % e)
            ok = False
    return Report("morleyize", "coherent" if ok else "failed", details=details,
                  diagnostics=diags, exit_code=0 if ok else 1)


def cmd_force(cfg: CommandConfig, sig, clock) -> Report:
    from .kripke import check_kripke_model, force
    if len(cfg.inputs) != 2:
        raise UsageError("force needs a Kripke model file and a formula")
    _expect_kind(cfg.inputs[0], "krp")
    K = parse_kripke(_read(cfg.inputs[0]), sig)
    f = read_formula_arg(cfg.inputs[1], K.signature)
    T = load_theory(cfg.options["theory"], cfg, sig) if cfg.options.get("theory") else None
    node = cfg.options.get("node") or (K.nodes[0] if K.nodes else None)
    if node not in K.nodes:
        raise UsageError("unknown node %s" % node)
    v = clock.run("check", check_kripke_model, K, T, [f])
    if not v.ok:
        return Report("force", "invalid model", diagnostics=v.violations, exit_code=1)
    a = parse_assignment(cfg.options.get("assign"), f, K.structures[node])
    r = clock.run("force", force, K, node, f, a)
    return Report("force", bool(r), details={"node": node, "formula": print_formula(f),
                                            "assignment": _params(a)},
                  exit_code=0 if r else 1)


def cmd_oracle(cfg: CommandConfig, sig, clock) -> Report:
    from .oracles import oracle_eval
    from .random_instances import random_het, random_structure
    modes = ("strategy-enum", "cover-semantics")
    cases = []
    if cfg.inputs:
        M, f = _structure_and_formula(cfg, sig)
        h = _omega_block(f)
        for a in assignments(M, games.param_vars(h)):
            cases.append((M, h, a))
    else:
        rng = random.Random(cfg.seed)
        count = int(cfg.options.get("count") or 50)
        while len(cases) < count:
            M = random_structure(rng, 2)
            h = random_het(rng)
            if games.compile_monitor(h, M, {}).n_states <= 4:
                cases.append((M, h, {}))
    disagreements = []
    for i, (M, h, a) in enumerate(cases):
        v = clock.run("solve", games.eval_het, M, h, a)
        for mode in modes:
            o = clock.run(mode, oracle_eval, M, h, a, mode)
            if o != v:
                disagreements.append({"instance": i, "mode": mode, "formula": print_formula(h),
                                      "params": _params(a), "solver": v, "oracle": o})
    ok = not disagreements
    return Report("oracle", "agree" if ok else "disagree",
                  witness=disagreements[0] if disagreements else None,
                  details={"instances": len(cases), "modes": list(modes),
                           "disagreements": len(disagreements)},
                  exit_code=0 if ok else 1)


def play_interactive(M, h, side: str, stdin=None, stdout=None, transcript=None) -> int:
    """Human plays ``side`` ("forall" or "exists"); the engine plays the other side."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    ar, res = games.solved(M, h, {})
    human = "E" if side == "exists" else "A"
    log = []

    def say(msg):
        print(msg, file=stdout, flush=True)

    pos = ar.initial
    human_region = res.win_ae if human == "E" else res.win_ea
    if pos not in human_region:
        say("opponent wins from initial position")
    else:
        say("you win from initial position")
    blk = h.block
    k = 0
    while True:
        if ar.is_terminal(pos) or not ar.moves[pos]:
            break
        if ar.owner[pos] != human:
            mv = games.engine_move(ar, res, pos)
            step = games.play_step(ar, res, pos)
            say("engine plays %s" % " ".join(mv))
            log.append({"stage": k, "player": "engine", "move": list(mv)})
            k += 1
            if step.engine_move is not None:
                say("engine plays %s" % " ".join(step.engine_move))
                log.append({"stage": k, "player": "engine", "move": list(step.engine_move)})
                k += 1
            pos = step.position
            continue
        vs = blk.schedule[k % blk.period]
        stdout.write("stage %d, choose %s> " % (k, ", ".join("%s:%s" % (v.name, v.sort) for v in vs)))
        stdout.flush()
        line = stdin.readline()
        if not line or line.strip() == "quit":
            say("bye")
            break
        move = tuple(line.replace(",", " ").split())
        try:
            step = games.play_step(ar, res, pos, move)
        except games.IllegalMove:
            legal = [" ".join(mv) for mv, _ in ar.moves[pos]]
            say("illegal move; legal moves: %s" % "; ".join(legal))
            continue
        log.append({"stage": k, "player": "human", "move": list(move)})
        k += 1
        if step.engine_move is not None:
            say("engine plays %s" % " ".join(step.engine_move))
            log.append({"stage": k, "player": "engine", "move": list(step.engine_move)})
            k += 1
        pos = step.position
        say("monitor: %s" % step.status)
    st = ar.status[pos]
    if st == games.DEAD:
        say("payoff violated: forall wins")
    elif st == games.HIT:
        say("payoff reached: exists wins")
    elif not ar.moves[pos]:
        say("%s has no legal move" % ("exists" if ar.owner[pos] == "E" else "forall"))
    if transcript:
        with open(transcript, "w", encoding="utf-8") as fh:
            json.dump({"formula": print_formula(h), "side": side, "moves": log}, fh, indent=1)
    return 0


def cmd_play(cfg: CommandConfig, sig, clock) -> int:
    M, f = _structure_and_formula(cfg, sig)
    h = _omega_block(f)
    if games.free_vars(h):
        raise UsageError("play needs a formula without free variables")
    return play_interactive(M, h, cfg.options.get("side") or "forall",
                            transcript=cfg.options.get("transcript"))


COMMANDS = {
    "check": lambda cfg, sig, clock: cmd_check(cfg, sig),
    "eval": cmd_eval,
    "extension": cmd_extension,
    "solve": cmd_solve,
    "certify": cmd_certify,
    "prove": cmd_prove,
    "morleyize": cmd_morleyize,
    "force": cmd_force,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-positions", type=int, default=100000)
    common.add_argument("--mode", choices=("classical", "intuitionistic"))
    common.add_argument("--class", dest="cls", metavar="safety|clopen|FILE")
    common.add_argument("--sig", help="signature file for inputs that do not declare one")
    common.add_argument("--timings", action="store_true")

    ap = argparse.ArgumentParser(prog="hetlogic", description=(
        "Heterogeneous quantifiers over finite structures: evaluation, games, proofs, "
        "Morleyization and Kripke forcing."))
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse and validate input files")
    p.add_argument("files", nargs="+")
    for name, hlp in (("eval", "evaluate a formula"), ("solve", "solve the game of an omega block")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("structure")
        p.add_argument("formula", help="formula text or @file")
        p.add_argument("--assign", help="x=a,y=b")
    p = sub.add_parser("extension", parents=[common], help="tuples satisfying a formula")
    p.add_argument("structure")
    p.add_argument("formula")
    p.add_argument("--params", help="order of the free variables, comma separated")
    p = sub.add_parser("certify", parents=[common], help="check well-determinedness")
    p.add_argument("structure")
    p.add_argument("theory")
    p = sub.add_parser("prove", parents=[common], help="check a proof script")
    p.add_argument("proof")
    p.add_argument("theory")
    p = sub.add_parser("morleyize", parents=[common], help="coherent translation of a theory")
    p.add_argument("theory")
    p.add_argument("--intuitionistic", action="store_true")
    p.add_argument("--structure", help="also expand this model")
    p.add_argument("--proof", help="back-translate this proof over the extended signature")
    p.add_argument("--output", help="write the translated theory here")
    p = sub.add_parser("force", parents=[common], help="Kripke forcing")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--node")
    p.add_argument("--theory")
    p.add_argument("--assign")
    p = sub.add_parser("oracle", parents=[common], help="compare the solver with the oracles")
    p.add_argument("structure", nargs="?")
    p.add_argument("formula", nargs="?")
    p.add_argument("--count", type=int, default=50)
    p = sub.add_parser("play", parents=[common], help="play a game against the engine")
    p.add_argument("structure")
    p.add_argument("formula")
    p.add_argument("--side", choices=("forall", "exists"), default="forall")
    p.add_argument("--transcript")
    return ap


_INPUTS = {
    "check": ("files",),
    "eval": ("structure", "formula"),
    "solve": ("structure", "formula"),
    "extension": ("structure", "formula"),
    "certify": ("structure", "theory"),
    "prove": ("proof", "theory"),
    "morleyize": ("theory",),
    "force": ("model", "formula"),
    "oracle": ("structure", "formula"),
    "play": ("structure", "formula"),
}
_GLOBAL = {"command", "format", "seed", "max_positions", "mode", "cls", "timings"}


def config_from_args(ns) -> CommandConfig:
    d = vars(ns)
    keys = _INPUTS[ns.command]
    inputs = []
    for k in keys:
        v = d.get(k)
        if isinstance(v, list):
            inputs += v
        elif v is not None:
            inputs.append(v)
    opts = {k: v for k, v in d.items() if k not in _GLOBAL and k not in keys}
    return CommandConfig(ns.command, inputs, ns.format, ns.seed, ns.max_positions, ns.mode,
                         ns.cls, ns.timings, opts)


def run_command(cfg: CommandConfig) -> tuple:
    """Returns (exit status, report or None)."""
    sig = load_signature(cfg.options.get("sig"))
    clock = _Clock(cfg.timings)
    old = games.set_position_cap(cfg.max_positions)
    try:
        if cfg.subcommand == "play":
            return cmd_play(cfg, sig, clock), None
        r = COMMANDS[cfg.subcommand](cfg, sig, clock)
        r.timings = clock.result()
        return r.exit_code, r
    finally:
        games.set_position_cap(old)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        cfg = config_from_args(ns)
        code, report = run_command(cfg)
    except (UsageError, ParseError, SyntaxErrorHL, EvaluationError, KernelError,
            games.InstanceTooLarge) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    if report is not None:
        print(emit_report(report, cfg.fmt))
        for d in report.diagnostics:
            print(d, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
