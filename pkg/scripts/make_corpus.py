"""Regenerate the proof scripts, the expected reports and the manifest of ``corpus/``.

Structures, theories, formulas and Kripke models are written by hand; proofs
are assembled with the tactic builders and printed; expected reports are the
structured output of the command line at the time of generation.

    python3 scripts/make_corpus.py
"""
from __future__ import annotations

import contextlib
import io
import json
import os
import sys

from hetlogic import tactics as tk
from hetlogic.cli import main
from hetlogic.kernel import check_proof
from hetlogic.morley import key_of, morleyize_classical
from hetlogic.parser import parse_formula, parse_theory
from hetlogic.printer import print_proof
from hetlogic.proofs import ProofTree, RuleTag as R
from hetlogic.syntax import (
    PLAY_SORT, TOP, And, App, Atom, Eq, Exists, Forall, Implies, Or, PlayPayoff, PlayTails, Var,
    dual, first_move_vars, substitute, tail_block,
)

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "corpus")


def path(*parts):
    return os.path.join(ROOT, *parts)


def theory(name):
    with open(path("theories", name + ".thy")) as fh:
        return parse_theory(fh.read())


def formula(name, sig):
    with open(path("formulas", name + ".fml")) as fh:
        return parse_formula(fh.read(), sig)


x, y, z, w = (Var(n, "s") for n in "xyzw")
ONE = App("one", ())


def P(t):
    return Atom("P", (t,))


def Rl(a, b):
    return Atom("R", (a, b))


def ax(T, name):
    s = T.axiom(name)
    return ProofTree(R.TheoryAx, s, {"name": name}, ())


# ---------------------------------------------------------------- proofs over the source theories

def proofs():
    out = {}
    cc = theory("copycat")
    h = formula("copycat", cc.signature)
    g = dual(h)
    Y = Var("Y", PLAY_SORT)

    det = tk.node(R.DetAx, TOP, Or((h, g)))
    out["det"] = ("copycat", tk.pair(det, ax(cc, "copy")))

    a1 = tk.node(R.HetAx1, h, _forall_tail(h))
    out["hetax1"] = ("copycat", tk.forall_elim(tk.cut(ax(cc, "copy"), a1)))

    a2 = tk.node(R.HetAx2, g, Exists(tuple(first_move_vars(g)), tail_block(g, 1)))
    out["hetax2"] = ("copycat", tk.impl_intro(tk.cut(tk.proj(And((TOP, g)), 1), a2)))

    hg = Or((h, g))
    out["hetax34"] = ("copycat", tk.cases(
        hg, tk.cut(tk.node(R.HetAx3, h, h), tk.inj(h, hg, 0)),
        tk.cut(tk.node(R.HetAx4, g, g), tk.inj(g, hg, 1))))

    th, tg = PlayTails(h, Y), PlayTails(g, Y)
    both = And((th, tg))
    out["pres"] = ("copycat", tk.pair(
        tk.cut(tk.proj(both, 0), tk.node(R.PresAx1, th, PlayPayoff(h, Y))),
        tk.cut(tk.proj(both, 1), tk.node(R.PresAx2, tg, PlayPayoff(g, Y)))))

    fo = theory("fo")
    em = tk.node(R.ExcludedMiddle, TOP, Or((P(x), tk.nt(P(x)))))
    out["em"] = ("fo", tk.node(R.Substitution, TOP, Or((P(ONE), tk.nt(P(ONE)))), (em,),
                               params={"subst": {"x": "one"}}))

    out["eqrefl"] = ("fo", tk.pair(tk.node(R.EqRefl, TOP, Eq(x, x)), tk.truth(TOP)))
    out["eqsubst"] = ("fo", tk.node(R.EqSubst, And((Eq(x, y), Rl(x, ONE))), Rl(y, ONE)))

    ex_yx = Exists((y,), Rl(y, x))
    step = tk.cut(ax(fo, "sym"), tk.exists_intro_from(Rl(y, x), ex_yx))
    out["neighbour"] = ("fo", tk.cut(ax(fo, "nb"), tk.exists_elim(step, (y,))))

    imp = tk.impl_intro(tk.cut(tk.proj(And((TOP, Rl(x, y))), 1), ax(fo, "sym")))
    univ = tk.forall_intro(imp, (x, y))
    back = tk.forall_elim(univ)
    out["forall"] = ("fo", tk.impl_elim(back))

    out["tt"] = ("fo", _tt_proof())

    tk_th = theory("takeuti")
    out["takeuti"] = ("takeuti", tk.impl_elim(ax(tk_th, "t1")))

    it = theory("intu")
    step = tk.cut(ax(it, "sym"), tk.exists_intro_from(Rl(y, x), ex_yx))
    hi = formula("copycat", it.signature)
    out["intu_neighbour"] = ("intu", tk.cut(ax(it, "nb"), tk.exists_elim(step, (y,))))
    out["intu_copy"] = ("intu", tk.forall_elim(tk.cut(ax(it, "copy"),
                                                      tk.node(R.HetAx1, hi, _forall_tail(hi)))))

    bt = theory("bounded")
    hb = bt.axiom("bcopy").succedent
    x0 = tuple(first_move_vars(hb))
    bound = substitute(hb.block.bounds[0], dict(zip(hb.block.schedule[0], x0)))
    b1 = tk.node(R.HetAx1, hb, Forall(x0, Implies(bound, tail_block(hb, 1))))
    out["bounded"] = ("bounded", tk.cut(ax(bt, "bcopy"), b1))
    return out


def _forall_tail(h):
    return Forall(tuple(first_move_vars(h)), tail_block(h, 1))


def _tt_proof():
    ez = Exists((z,), P(z))
    ew = Exists((w,), Rl(z, w))
    # root T; children 0: P(z) [z], 1: not exists z P(z); node 0 splits on exists w R(z, w)
    em_root = tk.node(R.ExcludedMiddle, TOP, Or((ez, tk.nt(ez))))
    em_inner = tk.cut(tk.truth(P(z)), tk.node(R.ExcludedMiddle, TOP, Or((ew, tk.nt(ew)))))
    nodes = {
        "": {"phi": TOP, "x": []},
        "0": {"phi": P(z), "x": ["z:s"]},
        "1": {"phi": tk.nt(ez), "x": []},
        "0.0": {"phi": Rl(z, w), "x": ["w:s"]},
        "0.1": {"phi": tk.nt(ew), "x": []},
    }
    concl = Or((
        Exists((z, w), And((P(z), Rl(z, w)))),
        Exists((z,), And((P(z), tk.nt(ew)))),
        tk.nt(ez),
    ))
    return tk.node(R.TTRule, TOP, concl, (em_root, em_inner),
                   params={"gamma": 2, "nodes": nodes, "bar": ["0.0", "0.1", "1"]})


# ---------------------------------------------------------------- proofs over Morleyized theories

def _item(MT, clause, f=None, direction="", name=None):
    for it in MT.items:
        if it.clause != clause or it.direction != direction:
            continue
        if name is not None and it.extra == "theory" and it.formula == name:
            return it
        if f is not None and it.extra is None and key_of(it.formula) == key_of(f):
            return it
    raise KeyError((clause, f, direction, name))


def _leaf(MT, it):
    return ProofTree(R.TheoryAx, it.sequent, {"name": it.name}, ())


def sigma_proofs():
    out = {}
    fo = theory("fo")
    MT = morleyize_classical(fo)
    exr = Exists((y,), Rl(x, y))
    up = _leaf(MT, _item(MT, "iii", P(x), "bwd"))               # P(x) |- C_P(x)
    nb = _leaf(MT, _item(MT, "iv", name="nb"))                   # C_P(x) |- C_exists
    split = _leaf(MT, _item(MT, "viii", exr, "fwd"))             # C_exists |- exists y C_R(x, y)
    down = _leaf(MT, _item(MT, "iii", Rl(x, y), "fwd"))          # C_R(x, y) |- R(x, y)
    inner = tk.cut(down, tk.exists_intro_from(Rl(x, y), exr))
    out["fo_sigma"] = ("fo", MT, tk.chain(up, nb, split, tk.exists_elim(inner, (y,))))

    cc = theory("copycat")
    MC = morleyize_classical(cc)
    h = cc.axiom("copy").succedent
    xb = _leaf(MC, _item(MC, "x", h, "bwd"))                     # exists x0 D_tail |- D_h
    copy = _leaf(MC, _item(MC, "iv", name="copy"))               # C_T |- C_h
    split = _leaf(MC, _item(MC, "ii", TOP))                      # T |- or(C_T, D_T)
    d_top = _leaf(MC, _item(MC, "v", TOP, "fwd"))                # D_T |- F
    c_top = copy.conclusion.antecedent
    get = tk.cases(c_top, tk.identity(c_top), tk.cut(d_top, tk.absurd(c_top)))
    top = tk.chain(split, get, copy)                             # T |- C_h
    a = xb.conclusion.antecedent
    clash = _leaf(MC, _item(MC, "i", h))                         # and(C_h, D_h) |- F
    both = tk.pair(tk.cut(tk.truth(a), top), xb)
    out["copycat_sigma"] = ("copycat", MC, tk.cut(both, clash))
    return out


# ---------------------------------------------------------------- expected reports

def run(args):
    buf = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = main(args)
    return code, buf.getvalue()


def commands(proof_index):
    S = lambda n: "corpus/structures/%s.str" % n
    T = lambda n: "corpus/theories/%s.thy" % n
    F = lambda n: "@corpus/formulas/%s.fml" % n
    K = lambda n: "corpus/kripke/%s.krp" % n
    cmds = {}
    for n in ("m1", "m2", "m3", "m3sym"):
        cmds["check_%s" % n] = ["check", S(n)]
    for n in ("copycat", "reach_one", "fo", "intu", "takeuti", "bounded"):
        cmds["check_%s" % n] = ["check", T(n)]
    for n in ("em_chain", "single", "growing", "noncommuting"):
        cmds["check_%s" % n] = ["check", K(n)]
    for m in ("m1", "m2", "m3"):
        for f in ("copycat", "copycat_dual", "reach_one", "avoid_p", "em_one", "nb"):
            cmds["eval_%s_%s" % (f, m)] = ["eval", S(m), F(f)]
        cmds["extension_param_copy_%s" % m] = ["extension", S(m), F("param_copy")]
        for f in ("copycat", "reach_one", "avoid_p"):
            cmds["solve_%s_%s" % (f, m)] = ["solve", S(m), F(f)]
        for t in ("copycat", "reach_one", "bounded", "takeuti"):
            cmds["certify_%s_%s" % (m, t)] = ["certify", S(m), T(t)]
    cmds["certify_m2_reach_class"] = ["certify", S("m2"), T("copycat"), "--class",
                                      "corpus/classes/reach_one.cls"]
    for name, thy in proof_index:
        cmds["prove_%s" % name] = ["prove", "corpus/proofs/%s.prf" % name, T(thy)]
    cmds["prove_det_wrong_theory"] = ["prove", "corpus/proofs/det.prf", T("fo")]
    cmds["prove_em_intuitionistic"] = ["prove", "corpus/proofs/em.prf", T("fo"),
                                       "--mode", "intuitionistic"]
    cmds["morleyize_fo_m2"] = ["morleyize", T("fo"), "--structure", S("m2")]
    cmds["morleyize_fo_sigma"] = ["morleyize", T("fo"), "--proof", "corpus/proofs/fo_sigma.prf"]
    cmds["morleyize_copycat_sigma"] = ["morleyize", T("copycat"), "--structure", S("m3"),
                                       "--proof", "corpus/proofs/copycat_sigma.prf"]
    cmds["morleyize_intu"] = ["morleyize", T("intu"), "--intuitionistic"]
    cmds["morleyize_reach_m2"] = ["morleyize", T("reach_one"), "--structure", S("m2")]
    cmds["morleyize_bounded"] = ["morleyize", T("bounded")]
    cmds["force_em_root"] = ["force", K("em_chain"), F("em_one"), "--node", "root"]
    cmds["force_em_top"] = ["force", K("em_chain"), F("em_one"), "--node", "top"]
    cmds["force_copycat_growing"] = ["force", K("growing"), F("copycat"), "--node", "a",
                                     "--theory", T("intu")]
    cmds["force_nb_growing"] = ["force", K("growing"), F("nb"), "--node", "a"]
    cmds["force_noncommuting"] = ["force", K("noncommuting"), F("em_one")]
    cmds["oracle_random"] = ["oracle", "--seed", "7", "--count", "25"]
    cmds["oracle_m3_param_copy"] = ["oracle", S("m3"), F("param_copy")]
    cmds["usage_bad_formula"] = ["eval", S("m2"), "P(x"]
    cmds["usage_bad_extension"] = ["check", "corpus/base.txt"]
    return cmds


def main_build():
    os.chdir(os.path.join(ROOT, os.pardir))
    index = []
    for name, (thy, p) in sorted(proofs().items()):
        T = theory(thy)
        v = check_proof(p, T)
        if not v.ok:
            raise SystemExit("proof %s rejected: %s at %s" % (name, v.diagnostics, v.path))
        with open(path("proofs", name + ".prf"), "w") as fh:
            fh.write(print_proof(p) + "\n")
        index.append((name, thy))
    for name, (thy, MT, p) in sorted(sigma_proofs().items()):
        v = check_proof(p, MT.theory)
        if not v.ok:
            raise SystemExit("proof %s rejected: %s at %s" % (name, v.diagnostics, v.path))
        with open(path("proofs", name + ".prf"), "w") as fh:
            fh.write(print_proof(p) + "\n")
    manifest = []
    for key, args in sorted(commands(index).items()):
        full = args + ["--format", "structured"]
        code, out = run(full)
        rel = "expected/%s.json" % key
        with open(path(rel), "w") as fh:
            fh.write(out)
        manifest.append({"name": key, "args": full, "exit": code, "expected": rel})
    with open(path("manifest.json"), "w") as fh:
        json.dump({"proofs": [{"proof": "proofs/%s.prf" % n, "theory": "theories/%s.thy" % t}
                              for n, t in index],
                   "commands": manifest}, fh, indent=1)
        fh.write("\n")
    print("%d proofs, %d commands" % (len(index), len(manifest)))


if __name__ == "__main__":
    sys.exit(main_build())
