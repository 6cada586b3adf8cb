"""Node-by-node checker for derivations in the heterogeneous sequent calculus.

Formulas are compared up to renaming of bound variables.  A sequent's
context only has to cover the free variables of both sides; since carriers
are nonempty, adding or dropping unused context variables is harmless, so
contexts are not compared between premises and conclusions except through
the eigenvariable conditions of the quantifier rules.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .parser import ParseError, Parser, parse_sequent
from .proofs import AXIOM_TAGS, ProofTree, RuleTag
from .syntax import (
    AE, BOTTOM, EA, PLAY_SORT, TOP, And, Bottom, Eq, Exists, Forall, Formula, Het, Implies, Or,
    PlayPayoff, PlayTails, Sequent, SyntaxErrorHL, Theory, Top, Var, alpha_eq, 
    conj1, disj1, dual, first_move_vars, free_vars, het_admissible, substitute, tail_block,
)
from .wellformed import check_sequent


class KernelError(Exception):
    pass


@dataclass
class Verdict:
    ok: bool
    path: Optional[list] = None
    diagnostics: list = field(default_factory=list)
    rule: Optional[str] = None


# ---------------------------------------------------------------- parameter reading

def conclusion_of(node: ProofTree, T: Theory) -> Sequent:
    c = node.conclusion
    if isinstance(c, Sequent):
        return c
    try:
        return parse_sequent(c, T.signature)
    except ParseError as e:
        raise KernelError("conclusion does not parse: %s" % e)


def _scope(ctx) -> dict:
    return {v.name: v for v in ctx}


def read_formula(value, T: Theory, ctx) -> Formula:
    if isinstance(value, Formula):
        return value
    if not isinstance(value, str):
        raise KernelError("expected a formula parameter, got %r" % (value,))
    p = Parser(value, T.signature)
    try:
        f = p.formula(_scope(ctx))
        if p.tok.kind != "eof":
            p.error("trailing input")
    except ParseError as e:
        raise KernelError("formula parameter does not parse: %s" % e)
    return f


def read_term(value, T: Theory, ctx):
    if not isinstance(value, str):
        return value
    p = Parser(value, T.signature)
    try:
        t = p.term(_scope(ctx))
        if p.tok.kind != "eof":
            p.error("trailing input")
    except ParseError as e:
        raise KernelError("term parameter does not parse: %s" % e)
    return t


def read_vars(value, T: Theory) -> list:
    out = []
    for item in value or []:
        if isinstance(item, Var):
            out.append(item)
            continue
        name, _, sort = str(item).partition(":")
        if not sort or (sort != PLAY_SORT and sort not in T.signature.sorts):
            raise KernelError("bad variable declaration %r" % item)
        out.append(Var(name.strip(), sort.strip()))
    return out


def same(f, g) -> bool:
    return alpha_eq(f, g)


def _fv(s: Sequent) -> frozenset:
    return free_vars(s.antecedent) | free_vars(s.succedent)


# ---------------------------------------------------------------- axiom instances

def _class_gate(h: Het, T: Theory, want_polarity: str):
    if not isinstance(h, Het):
        raise KernelError("instance formula must be a heterogeneous block")
    if h.block.polarity != want_polarity:
        raise KernelError("schema needs a %s block" % want_polarity)
    if not het_admissible(h, T.classC):
        raise KernelError("payoff outside the admissible class")


def _ctx(*fs) -> tuple:
    fv = set()
    for f in fs:
        fv |= free_vars(f)
    return tuple(sorted(fv, key=lambda v: (v.name, v.sort)))


def axiom_instance(tag: RuleTag, data: dict, T: Theory) -> Sequent:
    """The sequent emitted by an axiom schema for the given instantiation data."""
    if tag == RuleTag.DetAx:
        h = data["phi"]
        _class_gate(h, T, AE)
        if not h.block.is_omega:
            raise KernelError("determinacy is stated for omega blocks")
        return Sequent(TOP, Or((h, dual(h))), _ctx(h))
    if tag in (RuleTag.HetAx1, RuleTag.HetAx2):
        h = data["phi"]
        _class_gate(h, T, AE if tag == RuleTag.HetAx1 else EA)
        x0 = first_move_vars(h)
        tail = tail_block(h, 1)
        b = h.block.bounds[0] if h.block.bounds is not None else None
        if b is not None:
            b = substitute(b, dict(zip(h.block.schedule[0], x0)))
        if tag == RuleTag.HetAx1:
            body = Implies(b, tail) if b is not None else tail
            succ = Forall(tuple(x0), body)
        else:
            body = And((b, tail)) if b is not None else tail
            succ = Exists(tuple(x0), body)
        return Sequent(h, succ, _ctx(h, succ))
    if tag in (RuleTag.HetAx3, RuleTag.HetAx4):
        h = data["phi"]
        _class_gate(h, T, AE if tag == RuleTag.HetAx3 else EA)
        beta = int(data.get("beta", 0))
        if not h.block.is_omega:
            raise KernelError("schema is stated for omega blocks")
        if beta != 0:
            raise KernelError("beta must be a limit ordinal below omega, i.e. 0")
        return Sequent(h, h, _ctx(h))
    if tag in (RuleTag.PresAx1, RuleTag.PresAx2):
        h = data["phi"]
        _class_gate(h, T, AE if tag == RuleTag.PresAx1 else EA)
        if not h.block.is_omega:
            raise KernelError("schema is stated for omega blocks")
        if h.block.bounds is not None:
            raise KernelError("no preservation schema for bounded blocks")
        y = data["stream"]
        if y.sort != PLAY_SORT:
            raise KernelError("the play variable must have sort %s" % PLAY_SORT)
        return Sequent(PlayTails(h, y), PlayPayoff(h, y), _ctx(h) + (y,))
    if tag == RuleTag.ExcludedMiddle:
        if T.mode != "classical":
            raise KernelError("excluded middle is only available in classical mode")
        f = data["phi"]
        return Sequent(TOP, Or((f, Implies(f, BOTTOM))), _ctx(f))
    if tag == RuleTag.TheoryAx:
        try:
            return T.axiom(data["name"])
        except KeyError:
            raise KernelError("no theory axiom named %s" % data["name"])
    raise KernelError("%s is not an axiom schema" % tag.value)


# ---------------------------------------------------------------- rule checks

def _expect(cond, msg):
    if not cond:
        raise KernelError(msg)


def _match_sequent(s: Sequent, t: Sequent, what="conclusion"):
    _expect(same(s.antecedent, t.antecedent) and same(s.succedent, t.succedent),
            "%s does not match the rule instance" % what)


def _multiset_match(needed: list, premises: list, what: str):
    """Each needed sequent is matched by a distinct premise (order-insensitive)."""
    free = list(range(len(premises)))
    _expect(len(needed) == len(premises), "%s: expected %d premises, got %d"
            % (what, len(needed), len(premises)))
    for s in needed:
        for k in free:
            p = premises[k]
            if same(p.antecedent, s.antecedent) and same(p.succedent, s.succedent):
                free.remove(k)
                break
        else:
            raise KernelError("%s: no premise of the form needed for %s"
                              % (what, _short(s)))


def _short(s: Sequent) -> str:
    from .printer import print_sequent
    return print_sequent(s)


def _arity(node, n):
    _expect(len(node.premises) == n, "%s takes %d premise(s), got %d"
            % (node.rule.value, n, len(node.premises)))


def check_step(node: ProofTree, T: Theory, premises: Optional[list] = None) -> list:
    """Diagnostics for one node; ``premises`` are the parsed premise conclusions."""
    try:
        c = conclusion_of(node, T)
        if premises is None:
            premises = [conclusion_of(p, T) for p in node.premises]
        errs = check_sequent(c, T.signature)
        if errs:
            return ["ill-formed conclusion: %s" % e for e in errs]
        _check_rule(node, c, premises, T)
    except KernelError as e:
        return [str(e)]
    except SyntaxErrorHL as e:
        return ["malformed instantiation: %s" % e]
    return []


def _check_rule(node, c: Sequent, prem: list, T: Theory):
    tag = node.rule
    P = node.params or {}
    A, S = c.antecedent, c.succedent
    if tag in AXIOM_TAGS:
        _arity(node, 0)

    if tag == RuleTag.Identity:
        _expect(same(A, S), "identity needs equal sides")
        return
    if tag == RuleTag.Substitution:
        _arity(node, 1)
        p = prem[0]
        if "subst" not in P or not isinstance(P["subst"], dict):
            raise KernelError("substitution needs an explicit subst map")
        by_name = {v.name: v for v in tuple(p.context) + tuple(_fv(p))}
        sigma = {}
        for name, t in P["subst"].items():
            if name not in by_name:
                raise KernelError("substituted variable %s not in the premise context" % name)
            term = read_term(t, T, c.context)
            v = by_name[name]
            from .wellformed import term_sort
            tmp = []
            srt = term.sort if isinstance(term, Var) else term_sort(term, T.signature, tmp)
            _expect(srt == v.sort, "substitution for %s changes its sort" % name)
            sigma[v] = term
        for v, t in sigma.items():
            if v.sort == PLAY_SORT:
                _expect(isinstance(t, Var), "a play variable can only be renamed")
        want = Sequent(substitute(p.antecedent, sigma), substitute(p.succedent, sigma), c.context)
        _match_sequent(c, want)
        return
    if tag == RuleTag.Cut:
        _arity(node, 2)
        p, q = prem
        _expect(same(p.succedent, q.antecedent), "cut formula differs between premises")
        _expect(same(A, p.antecedent) and same(S, q.succedent), "conclusion does not match the cut")
        return
    if tag == RuleTag.EqRefl:
        _expect(isinstance(A, Top) and isinstance(S, Eq) and S.left == S.right,
                "reflexivity is T |- t = t")
        return
    if tag == RuleTag.EqSubst:
        _expect(isinstance(A, And) and len(A.args) >= 2, "antecedent must be (x = y) and phi")
        eqs, phi = A.args[:-1], A.args[-1]
        sigma = {}
        for e in eqs:
            _expect(isinstance(e, Eq) and isinstance(e.left, Var) and isinstance(e.right, Var),
                    "equalities must be between variables")
            _expect(e.left.sort == e.right.sort, "x and y must have the same types")
            _expect(e.left not in sigma, "x repeats a variable")
            sigma[e.left] = e.right
        if "phi" in P:
            _expect(same(read_formula(P["phi"], T, c.context), phi), "phi parameter differs")
        _expect(same(S, substitute(phi, sigma)), "succedent must be phi[y/x]")
        return
    if tag == RuleTag.ConjAx:
        _expect(isinstance(A, And), "antecedent must be a conjunction")
        if "j" in P:
            j = int(P["j"])
            _expect(0 <= j < len(A.args) and same(A.args[j], S), "conjunct %s does not match" % j)
        else:
            _expect(any(same(g, S) for g in A.args), "succedent is not a conjunct")
        return
    if tag == RuleTag.ConjRule:
        if isinstance(S, Top):
            _arity(node, 0)
            return
        _expect(isinstance(S, And), "succedent must be a conjunction")
        _multiset_match([Sequent(A, g) for g in S.args], prem, "ConjRule")
        return
    if tag == RuleTag.DisjAx:
        _expect(isinstance(S, Or), "succedent must be a disjunction")
        if "j" in P:
            j = int(P["j"])
            _expect(0 <= j < len(S.args) and same(S.args[j], A), "disjunct %s does not match" % j)
        else:
            _expect(any(same(g, A) for g in S.args), "antecedent is not a disjunct")
        return
    if tag == RuleTag.DisjRule:
        if isinstance(A, Bottom):
            _arity(node, 0)
            return
        _expect(isinstance(A, Or), "antecedent must be a disjunction")
        _multiset_match([Sequent(g, S) for g in A.args], prem, "DisjRule")
        return
    if tag == RuleTag.ImplIntro:
        _arity(node, 1)
        p = prem[0]
        _expect(isinstance(S, Implies), "succedent must be an implication")
        want = Sequent(And((A, S.left)), S.right)
        _match_sequent(p, want, "premise")
        return
    if tag == RuleTag.ImplElim:
        _arity(node, 1)
        p = prem[0]
        _expect(isinstance(p.succedent, Implies), "premise succedent must be an implication")
        want = Sequent(And((p.antecedent, p.succedent.left)), p.succedent.right)
        _match_sequent(c, want)
        return
    if tag in (RuleTag.ExistsElim, RuleTag.ExistsIntro):
        _arity(node, 1)
        p = prem[0]
        # ExistsElim: phi |-_xy psi  over  exists y phi |-_x psi; ExistsIntro reverses it
        top, bottom = (p, c) if tag == RuleTag.ExistsElim else (c, p)
        q = bottom.antecedent
        _expect(isinstance(q, Exists), "existential side must be exists y phi")
        _expect(not (set(q.vars) & free_vars(bottom.succedent)),
                "side condition violated: a variable of y is free in psi")
        _expect(same(top.antecedent, q.body) and same(top.succedent, bottom.succedent),
                "premise and conclusion do not fit the existential rule")
        return
    if tag in (RuleTag.ForallIntro, RuleTag.ForallElim):
        _arity(node, 1)
        p = prem[0]
        top, bottom = (p, c) if tag == RuleTag.ForallIntro else (c, p)
        q = bottom.succedent
        _expect(isinstance(q, Forall), "universal side must be forall y psi")
        _expect(not (set(q.vars) & free_vars(bottom.antecedent)),
                "side condition violated: a variable of y is free in phi")
        _expect(same(top.succedent, q.body) and same(top.antecedent, bottom.antecedent),
                "premise and conclusion do not fit the universal rule")
        return
    if tag == RuleTag.TTRule:
        _check_tt(node, c, prem, T)
        return
    if tag in (RuleTag.HetAx1, RuleTag.HetAx3, RuleTag.PresAx1, RuleTag.PresAx2,
               RuleTag.HetAx2, RuleTag.HetAx4):
        if tag in (RuleTag.PresAx1, RuleTag.PresAx2):
            _expect(isinstance(A, PlayTails), "antecedent must be tails(Y, phi)")
            h = read_formula(P["phi"], T, c.context) if "phi" in P else A.het
            data = {"phi": h, "stream": A.stream}
        else:
            h = read_formula(P["phi"], T, c.context) if "phi" in P else A
            data = {"phi": h, "beta": P.get("beta", 0)}
        _match_sequent(c, axiom_instance(tag, data, T))
        return
    if tag == RuleTag.DetAx:
        if "phi" in P:
            h = read_formula(P["phi"], T, c.context)
        else:
            _expect(isinstance(S, Or) and S.args, "succedent must be a disjunction")
            h = S.args[0]
        _match_sequent(c, axiom_instance(tag, {"phi": h}, T))
        return
    if tag == RuleTag.ExcludedMiddle:
        if "phi" in P:
            f = read_formula(P["phi"], T, c.context)
        else:
            _expect(isinstance(S, Or) and S.args, "succedent must be phi or not phi")
            f = S.args[0]
        _match_sequent(c, axiom_instance(tag, {"phi": f}, T))
        return
    if tag == RuleTag.TheoryAx:
        _expect("name" in P, "theory axiom leaf needs a name")
        ax = axiom_instance(tag, {"name": P["name"]}, T)
        _match_sequent(c, ax)
        return
    raise KernelError("unknown rule %s" % tag)


def _check_tt(node, c: Sequent, prem: list, T: Theory):
    """Finite-depth, finite-bar transfinite transitivity.

    ``params``: ``gamma`` (branching), ``nodes`` mapping sequence keys
    ("" for the root, "0", "0.1", ...) to ``{"phi": ..., "x": ["v:s", ...]}``
    and ``bar`` (list of keys).  Below omega there are no limit levels, so the
    limit premise family is empty.
    """
    P = node.params or {}
    gamma = int(P.get("gamma", 0))
    _expect(gamma >= 1, "gamma must be positive")
    raw = P.get("nodes")
    _expect(isinstance(raw, dict) and "" in raw, "nodes must include the root")
    bar = [tuple(int(i) for i in str(k).split(".")) if str(k) else () for k in P.get("bar", [])]
    _expect(bar, "bar must be nonempty")

    def key(f):
        return ".".join(map(str, f))

    decl = {}
    for k, v in raw.items():
        decl[tuple(int(i) for i in k.split(".")) if k else ()] = read_vars(v.get("x", []), T)
    scope = list(c.context)
    for vs in decl.values():
        scope += vs
    phi = {f: read_formula(raw[key(f)]["phi"], T, scope) for f in decl}

    _expect(len(set(bar)) == len(bar), "bar repeats an element")
    for b in bar:
        _expect(b != (), "the root cannot be in the bar")
        _expect(all(0 <= i < gamma for i in b), "bar element %s outside gamma" % key(b))
        for b2 in bar:
            _expect(b == b2 or b2[:len(b)] != b, "bar elements must be minimal")
    internal = set()
    for b in bar:
        for n in range(len(b)):
            internal.add(b[:n])
    barset = set(bar)
    for f in internal:
        for i in range(gamma):
            g = f + (i,)
            _expect(g in internal or g in barset, "every branch must meet the bar (missing %s)" % key(g))
    for f in internal | barset:
        _expect(f in phi, "no formula for tree node %s" % (key(f) or "root"))
    _expect(same(c.antecedent, phi[()]), "antecedent must be the root formula")

    for f in sorted(internal | barset):
        if f == ():
            continue
        parent = f[:-1]
        xs = set(decl[f])
        fv_p = free_vars(phi[parent])
        _expect(free_vars(phi[f]) == fv_p | xs, "FV condition fails at %s" % key(f))
        _expect(not (xs & fv_p), "x_%s meets FV of the parent formula" % key(f))

    def ex(xs, body):
        return Exists(tuple(xs), body) if xs else body

    needed = []
    for f in sorted(internal):
        kids = [f + (i,) for i in range(gamma)]
        needed.append(Sequent(phi[f], disj1([ex(decl[g], phi[g]) for g in kids])))
    _multiset_match(needed, prem, "TTRule")

    disjuncts = []
    for b in bar:
        path = [b[:n + 1] for n in range(len(b))]
        xs = [v for g in path for v in decl[g]]
        disjuncts.append(ex(xs, conj1([phi[g] for g in path])))
    _expect(same(c.succedent, disj1(disjuncts)), "succedent must be the bar disjunction")


# ---------------------------------------------------------------- whole proofs

def check_proof(p: ProofTree, T: Theory) -> Verdict:
    """Bottom-up check; the first failing node (pre-order) is reported with its path."""
    return _check(p, T, [])


def _check(node: ProofTree, T: Theory, path: list) -> Verdict:
    for i, q in enumerate(node.premises):
        v = _check(q, T, path + [i])
        if not v.ok:
            return v
    if node.rule == RuleTag.ExcludedMiddle and T.mode != "classical":
        return Verdict(False, path, ["excluded middle is only available in classical mode"],
                       node.rule.value)
    errs = check_step(node, T)
    if errs:
        return Verdict(False, path, errs, node.rule.value)
    return Verdict(True)


def parsed(p: ProofTree, T: Theory) -> ProofTree:
    """The same tree with every conclusion parsed into a Sequent."""
    return ProofTree(p.rule, conclusion_of(p, T), p.params, tuple(parsed(q, T) for q in p.premises))
