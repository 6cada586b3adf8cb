"""The seven acceptance criteria, each printing one PASS/FAIL line."""
import random
import time

import pytest

from hetlogic.games import (
    build_arena, check_preservation, class_games, check_well_determined, compile_monitor,
    eval_het, param_vars, solve_game,
)
from hetlogic.kernel import check_proof, parsed
from hetlogic.kripke import check_kripke_model, force, one_node
from hetlogic.morley import (
    back_translate_proof, expand_model, fv_order, key_of, lint, morleyize_classical,
    morleyize_intuitionistic, subformula_set,
)
from hetlogic.oracles import oracle_eval
from hetlogic.parser import parse_formula, parse_proof, parse_signature
from hetlogic.proofs import RuleTag
from hetlogic.random_instances import all_structures, random_het, random_kripke, random_structure
from hetlogic.structures import Structure, assignments, eval_tarski, sequent_holds
from hetlogic.syntax import (
    AE, BOTTOM, EA, TOP, And, Atom, Eq, Het, HetBlock, Implies, Reach, Safety, Var, dual, substitute,
)

from conftest import FORMULAS, STRUCTURES, formula, kripke, manifest, read, structure, theory
from mutations import mutants

BASE = parse_signature(read("base.sig"))
v0, v1, z = Var("v0", "s"), Var("v1", "s"), Var("z", "s")


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail, started):
        with capsys.disabled():
            print("\ncriterion %d %s: %s (%s; %.1fs)"
                  % (n, title, "PASS" if ok else "FAIL", detail, time.time() - started))
    return emit


def _with_base(M, rng):
    """Add the constant ``one`` so corpus-signature formulas can be read in M."""
    one = rng.choice(M.carrier("s"))
    return Structure(BASE, M.carriers, M.relations, {"one": {(): one}})


# ---------------------------------------------------------------- 1 determinacy

def _param_variant(h):
    # tie the payoff to a parameter z in the first template
    temps = list(h.payoff.templates)
    temps[0] = And((temps[0], Atom("R", (z, v0))))
    return Het(h.block, type(h.payoff)(h.payoff.window, tuple(temps)))


def test_criterion_1_determinacy(report):
    t0 = time.time()
    rng = random.Random(2024)
    games = positions = tuples = 0
    bad = []
    while games < 240:
        M = random_structure(rng, 4)
        h = random_het(rng, polarity=AE if games % 2 else EA)
        if rng.random() < 0.3:
            h = _param_variant(h)
        if compile_monitor(h, M, {v: M.carrier("s")[0] for v in param_vars(h)}).n_states > 6:
            continue
        games += 1
        for a in assignments(M, param_vars(h)):
            tuples += 1
            for g in (h, dual(h)):
                ar = build_arena(M, g, a)
                res = solve_game(ar)
                positions += ar.n_positions
                if not res.partitions(ar.n_positions):
                    bad.append(("partition", h, a))
            if eval_het(M, h, a) == eval_het(M, dual(h), a):
                bad.append(("xor", h, a))
    ok = not bad
    report(1, "determinacy", ok, "%d games, %d parameter tuples, %d positions, %d failures"
           % (games, tuples, positions, len(bad)), t0)
    assert ok, bad[:3]


# ---------------------------------------------------------------- 2 oracle equivalence

def _window_atoms(w):
    vs = [v0, v1][:w]
    out = [Atom("P", (v,)) for v in vs] + [Atom("R", (a, b)) for a in vs for b in vs]
    if w == 2:
        out.append(Eq(v0, v1))
    return out


def oracle_family():
    """Every block with period <= 2, window <= 2 and one or two literal templates."""
    for w in (1, 2):
        lits = _window_atoms(w) + [Implies(a, BOTTOM) for a in _window_atoms(w)]
        temps = [(l,) for l in lits] + [(TOP, l) for l in lits] + [(l, TOP) for l in lits]
        for t in temps:
            for period in (1, 2):
                sched = tuple((Var(n, "s"),) for n in "xy"[:period])
                for pol in (AE, EA):
                    for kind in (Safety, Reach):
                        yield Het(HetBlock(pol, None, sched), kind(w, t))


def test_criterion_2_oracle_equivalence(report):
    t0 = time.time()
    family = list(oracle_family())
    structs = [M for card in (1, 2) for M in all_structures(card)]
    checked = skipped = 0
    bad = []
    for M in structs:
        for h in family:
            if compile_monitor(h, M, {}).n_states > 4:
                skipped += 1
                continue
            want = eval_het(M, h, {})
            for mode in ("strategy-enum", "cover-semantics"):
                if oracle_eval(M, h, {}, mode) != want:
                    bad.append((mode, M, h))
            checked += 1
    ok = not bad and checked > 0
    report(2, "oracle equivalence", ok, "%d instances over %d structures x %d blocks, "
           "%d above the monitor bound, %d disagreements"
           % (checked, len(structs), len(family), skipped, len(bad)), t0)
    assert ok, bad[:3]


# ---------------------------------------------------------------- 3 well-determinedness dichotomy

REACH_ONE = "hetAE omega { sched: [[x:s]]; payoff: reach(1)[v0 = one] }"


def test_criterion_3_dichotomy(report):
    t0 = time.time()
    rng = random.Random(7)
    safety_cases = 0
    bad = []
    corpus = [structure(s) for s in STRUCTURES]
    pool = corpus + [_with_base(random_structure(rng, 4), rng) for _ in range(40)]
    for M in pool:
        for _ in range(6):
            h = random_het(rng, kind="safety")
            for g in (h, dual(dual(h))):
                safety_cases += 1
                if not check_preservation(M, g, from_all=True).passed:
                    bad.append(("safety", M, g))
    h = parse_formula(REACH_ONE, BASE)
    reach_cases = 0
    for card in (1, 2, 3, 4):
        elems = tuple(str(i) for i in range(card))
        for one in elems:
            for _ in range(3):
                base = random_structure(rng, card, min_card=card)
                M = Structure(BASE, {"s": elems}, base.relations, {"one": {(): one}})
                r = check_preservation(M, h)
                reach_cases += 1
                if card == 1:
                    if not r.passed:
                        bad.append(("reach singleton", M))
                    continue
                if r.passed or r.lasso is None:
                    bad.append(("reach no lasso", M))
                    continue
                moves = list(r.lasso.stem) + list(r.lasso.cycle)
                # the witness play never visits one yet stays winnable for the seeker
                if not r.lasso.cycle or any(mv == (one,) for mv in moves):
                    bad.append(("reach bad lasso", M, r.lasso))
    ok = not bad
    report(3, "well-determinedness dichotomy", ok,
           "%d safety checks, %d Reach(v0 = one) structures, %d failures"
           % (safety_cases, reach_cases, len(bad)), t0)
    assert ok, bad[:3]


# ---------------------------------------------------------------- 4 kernel soundness

def test_criterion_4_kernel(report):
    t0 = time.time()
    entries = manifest()["proofs"]
    tags, bad = set(), []
    n_mut = models = 0
    for e in entries:
        T = theory(e["theory"].split("/")[1][:-4])
        p = parsed(parse_proof(read(e["proof"])), T)
        tags |= p.tags()
        if not check_proof(p, T).ok:
            bad.append(("rejected", e["proof"]))
            continue
        for s in STRUCTURES:
            M = structure(s)
            if not all(sequent_holds(M, a.sequent) for a in T.axioms):
                continue
            if not check_well_determined(M, class_games(T))["well_determined"]:
                continue
            models += 1
            if not sequent_holds(M, p.conclusion):
                bad.append(("unsound", e["proof"], s))
        for label, m in mutants(p):
            n_mut += 1
            if check_proof(m, T).ok:
                bad.append(("mutant accepted", e["proof"], label))
    needed = {RuleTag.TTRule, RuleTag.HetAx1, RuleTag.HetAx2, RuleTag.HetAx3, RuleTag.HetAx4}
    ok = (not bad and len(entries) >= 10 and tags == set(RuleTag) and needed <= tags
          and n_mut >= 100)
    report(4, "kernel soundness", ok, "%d proofs, %d/%d rule tags, %d model checks, "
           "%d mutants rejected, %d failures"
           % (len(entries), len(tags), len(RuleTag), models, n_mut, len(bad)), t0)
    assert ok, bad[:3]


# ---------------------------------------------------------------- 5 Morleyization round trip

MORLEY_THEORIES = ("fo", "copycat", "takeuti", "reach_one", "intu")


def test_criterion_5_morleyization(report):
    t0 = time.time()
    bad = []
    pairs = skipped = checks = 0
    for name in MORLEY_THEORIES:
        T = theory(name)
        MT = morleyize_classical(T) if T.mode == "classical" else morleyize_intuitionistic(T)
        if lint(MT):
            bad.append(("lint", name, lint(MT)))
        for s in STRUCTURES:
            M = structure(s)
            if not all(sequent_holds(M, a.sequent) for a in T.axioms) or \
                    not check_well_determined(M, class_games(T))["well_determined"]:
                skipped += 1
                continue
            pairs += 1
            N = expand_model(M, MT)
            for f in subformula_set(T):
                c = MT.symbols[key_of(f)][0]
                vs = fv_order(f)
                for a in assignments(M, vs):
                    checks += 1
                    if eval_tarski(M, f, a) != eval_tarski(N, Atom(c, tuple(vs)), a):
                        bad.append(("round trip", name, s, f, a))
    for proof, name in (("fo_sigma", "fo"), ("copycat_sigma", "copycat")):
        T = theory(name)
        out = back_translate_proof(parse_proof(read("proofs", proof + ".prf")), morleyize_classical(T))
        if not check_proof(out, T).ok:
            bad.append(("back-translation", proof))
    ok = not bad and pairs > 0
    report(5, "Morleyization round trip", ok, "%d theory/model pairs (%d not models or not "
           "well-determined), %d evaluations, 2 back-translations, %d failures"
           % (pairs, skipped, checks, len(bad)), t0)
    assert ok, bad[:3]


# ---------------------------------------------------------------- 6 Kripke suite

def test_criterion_6_kripke(report):
    t0 = time.time()
    fs = [formula(n, BASE) for n in FORMULAS]
    rng = random.Random(99)
    accepted = tried = checks = 0
    bad = []
    while accepted < 60 and tried < 1000:
        tried += 1
        K = random_kripke(rng, max_nodes=4, sig=BASE)
        if not check_kripke_model(K, formulas=fs).ok:
            continue
        accepted += 1
        for f in fs:
            vs = sorted(f_vars(f), key=lambda v: v.name)
            for p in K.nodes:
                for a in assignments(K.structures[p], vs):
                    if not force(K, p, f, a):
                        continue
                    for q in K.above(p)[1:]:
                        checks += 1
                        if not force(K, q, f, K.transport(p, q, a)):
                            bad.append(("monotone", f, p, q))
    for s in STRUCTURES:
        M = structure(s)
        K = one_node(M)
        for f in fs:
            for a in assignments(M, sorted(f_vars(f), key=lambda v: v.name)):
                if force(K, "p", f, a) != eval_tarski(M, f, a):
                    bad.append(("collapse", s, f))
    K = kripke("em_chain")
    em = formula("em_one", BASE)
    if not (check_kripke_model(K).ok and not force(K, "root", em, {}) and force(K, "top", em, {})):
        bad.append(("excluded middle",))
    ok = not bad and accepted >= 50
    report(6, "Kripke suite", ok, "%d accepted models of %d tried, %d monotonicity checks, "
           "one-node collapse on %d structures, excluded middle fails at root, %d failures"
           % (accepted, tried, checks, len(STRUCTURES), len(bad)), t0)
    assert ok, bad[:3]


def f_vars(f):
    from hetlogic.syntax import free_vars
    return free_vars(f)


# ---------------------------------------------------------------- 7 bounded quantifiers

BOUND_SHAPES = (
    lambda x: Atom("P", (x,)),
    lambda x: Implies(Atom("P", (x,)), BOTTOM),
    lambda x: Atom("R", (x, x)),
    lambda x: Implies(Atom("R", (x, x)), BOTTOM),
)

BOUNDED_PAYOFFS = (
    Safety(2, (TOP, Eq(v0, v1))),
    Reach(2, (BOTTOM, Atom("R", (v0, v1)))),
    Safety(1, (Atom("P", (v0,)),)),
    Reach(1, (Implies(Atom("P", (v0,)), BOTTOM),)),
    Safety(2, (Atom("R", (v1, v0)),)),
)


def _restrict(M, keep):
    elems = tuple(e for e in M.carrier("s") if e in keep)
    rels = {n: frozenset(t for t in ts if all(e in keep for e in t)) for n, ts in M.relations.items()}
    return Structure(M.signature, {"s": elems}, rels, {})


def test_criterion_7_bounded(report):
    t0 = time.time()
    x = Var("x", "s")
    bad = []
    checks = 0
    structs = [M for card in (1, 2, 3) for M in all_structures(card)]
    free_values = {}
    for shape in BOUND_SHAPES:
        for period in (1, 2):
            sched = tuple((Var(n, "s"),) for n in "xy"[:period])
            bounds = tuple(substitute(shape(x), {x: blk[0]}) for blk in sched)
            for payoff in BOUNDED_PAYOFFS:
                for pol in (AE, EA):
                    bounded = Het(HetBlock(pol, None, sched, bounds), payoff)
                    free = Het(HetBlock(pol, None, sched), payoff)
                    for M in structs:
                        keep = {e for e in M.carrier("s") if eval_tarski(M, shape(x), {x: e})}
                        N = _restrict(M, keep)
                        key = (free, N.carriers["s"], tuple(sorted(N.relations.items())))
                        if key not in free_values:
                            free_values[key] = eval_het(N, free, {})
                        checks += 1
                        if eval_het(M, bounded, {}) != free_values[key]:
                            bad.append((M, bounded))
    ok = not bad
    report(7, "bounded quantifiers", ok, "%d comparisons over %d structures, %d failures"
           % (checks, len(structs), len(bad)), t0)
    assert ok, bad[:3]
