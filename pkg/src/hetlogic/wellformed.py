"""Well-formedness of terms, formulas, sequents and theories against a signature."""
from __future__ import annotations

from .syntax import (
    PLAY_SORT, And, Atom, Body, Bottom, Eq, Exists, Forall, Het, Implies, Or,
    PlayPayoff, PlayTails, SyntaxErrorHL, Top, Var, free_vars,
    het_subformulas, is_placeholder, payoff_in_class, negate_payoff, placeholder_sorts,
)


def term_sort(t, sig, errs, where="") -> str | None:
    if isinstance(t, Var):
        return t.sort
    if t.fn not in sig.functions:
        errs.append("unknown function %s%s" % (t.fn, where))
        return None
    args, res = sig.functions[t.fn]
    if len(args) != len(t.args):
        errs.append("arity error: %s expects %d arguments, got %d" % (t.fn, len(args), len(t.args)))
        return res
    for s, a in zip(args, t.args):
        got = term_sort(a, sig, errs, where)
        if got is not None and got != s:
            errs.append("sort error: argument %s of %s has sort %s, expected %s" % (a, t.fn, got, s))
    return res


def _check_vars_in_scope(t, scope, errs, what):
    if isinstance(t, Var):
        if t not in scope:
            errs.append("variable %s:%s not in context (%s)" % (t.name, t.sort, what))
    else:
        for a in t.args:
            _check_vars_in_scope(a, scope, errs, what)


def well_formed(f, sig, ctx=()) -> list:
    """Diagnostics for ``f``; an empty list means the formula is accepted."""
    errs: list = []
    _wf(f, sig, frozenset(ctx), errs, allow_placeholders=False)
    for v in free_vars(f):
        if v not in set(ctx):
            errs.append("free variable %s:%s not in context" % (v.name, v.sort))
    return sorted(set(errs), key=errs.index)


def _wf(f, sig, scope, errs, allow_placeholders):
    if isinstance(f, Atom):
        if f.rel not in sig.relations:
            errs.append("unknown relation %s" % f.rel)
            return
        want = sig.relations[f.rel]
        if len(want) != len(f.args):
            errs.append("arity error: %s expects %d arguments, got %d in %s"
                        % (f.rel, len(want), len(f.args), f.rel))
            return
        for s, a in zip(want, f.args):
            got = term_sort(a, sig, errs)
            if got is not None and got != s:
                errs.append("sort error: argument %s of %s has sort %s, expected %s" % (a, f.rel, got, s))
        return
    if isinstance(f, Eq):
        a = term_sort(f.left, sig, errs)
        b = term_sort(f.right, sig, errs)
        if a is not None and b is not None and a != b:
            errs.append("sort error: equality between sorts %s and %s" % (a, b))
        return
    if isinstance(f, (Top, Bottom)):
        return
    if isinstance(f, (And, Or)):
        for g in f.args:
            _wf(g, sig, scope, errs, allow_placeholders)
        return
    if isinstance(f, Implies):
        _wf(f.left, sig, scope, errs, allow_placeholders)
        _wf(f.right, sig, scope, errs, allow_placeholders)
        return
    if isinstance(f, (Exists, Forall)):
        if len(set(f.vars)) != len(f.vars):
            errs.append("binder repeats a variable")
        for v in f.vars:
            _check_sort(v, sig, errs)
        _wf(f.body, sig, scope | set(f.vars), errs, allow_placeholders)
        return
    if isinstance(f, Het):
        _wf_het(f, sig, scope, errs)
        return
    if isinstance(f, (PlayTails, PlayPayoff)):
        if f.stream.sort != PLAY_SORT:
            errs.append("stream %s must have sort %s" % (f.stream.name, PLAY_SORT))
        if not f.het.block.is_omega:
            errs.append("play formulas need an omega block")
        if f.het.block.bounds is not None:
            errs.append("play formulas are not available for bounded blocks")
        _wf_het(f.het, sig, scope, errs)
        return
    errs.append("unknown formula node %r" % (f,))


def _check_sort(v, sig, errs):
    if v.sort not in sig.sorts:
        errs.append("unknown sort %s for variable %s" % (v.sort, v.name))
    if is_placeholder(v.name):
        errs.append("variable name %s is reserved for payoff windows" % v.name)


def _wf_het(h, sig, scope, errs):
    blk = h.block
    if blk.polarity not in ("AE", "EA"):
        errs.append("bad polarity %s" % blk.polarity)
    if not blk.schedule:
        errs.append("empty schedule")
        return
    seen = set()
    for b in blk.schedule:
        if not b:
            errs.append("empty variable block in schedule")
        for v in b:
            _check_sort(v, sig, errs)
            if v in seen or v.name in {u.name for u in seen}:
                errs.append("variable %s repeated across the block prefix" % v.name)
            seen.add(v)
    if blk.bounds is not None:
        if len(blk.bounds) != len(blk.schedule):
            errs.append("bounds must align one-to-one with the schedule")
        else:
            for b, vs in zip(blk.bounds, blk.schedule):
                _wf(b, sig, frozenset(vs), errs, False)
                extra = free_vars(b) - set(vs)
                if extra:
                    errs.append("bound mentions variables outside its block: %s"
                                % ", ".join(sorted(v.name for v in extra)))
    if blk.is_omega:
        if isinstance(h.payoff, Body):
            errs.append("ω-length requires safety/reach payoff")
            return
        w = h.payoff.window
        if w < 1:
            errs.append("payoff window must be positive")
            return
        if not h.payoff.templates:
            errs.append("payoff needs at least one template")
            return
        if len(h.prefix) > max(w - 1, 0):
            errs.append("prefix longer than window - 1")
        p = blk.period
        for j, pb in enumerate(h.prefix):
            stage = j - len(h.prefix)
            want = blk.schedule[stage % p]
            if len(pb) != len(want):
                errs.append("prefix move %d has wrong size" % j)
                continue
            for t, v in zip(pb, want):
                got = term_sort(t, sig, errs)
                if got is not None and got != v.sort:
                    errs.append("prefix move %d has sort %s, expected %s" % (j, got, v.sort))
                _check_vars_in_scope(t, scope, errs, "prefix")
        for k, t in enumerate(h.payoff.templates):
            try:
                sorts = placeholder_sorts(blk, w, len(h.payoff.templates), k)
            except SyntaxErrorHL as e:
                errs.append(str(e))
                continue
            if any(isinstance(g, Het) for g in het_subformulas(t)):
                errs.append("payoff templates must be heterogeneous-free")
            for v in free_vars(t):
                if is_placeholder(v.name):
                    if v.name not in sorts:
                        errs.append("template window exceeds declared w: %s" % v.name)
                    elif sorts[v.name] != v.sort:
                        errs.append("placeholder %s has sort %s, expected %s"
                                    % (v.name, v.sort, sorts[v.name]))
            inner_scope = scope | {Var(n, s) for n, s in sorts.items()}
            _wf(t, sig, inner_scope, errs, True)
    else:
        if not isinstance(h.payoff, Body):
            errs.append("finite blocks take a body payoff")
            return
        if blk.length != len(blk.schedule):
            errs.append("finite block of length %d needs exactly %d variable blocks"
                        % (blk.length, blk.length))
        if h.prefix:
            errs.append("finite blocks carry no prefix")
        _wf(h.payoff.formula, sig, scope | seen, errs, False)


def check_sequent(seq, sig) -> list:
    errs = []
    for v in seq.context:
        if v.sort != PLAY_SORT and v.sort not in sig.sorts:
            errs.append("unknown sort %s in context" % v.sort)
    if len(set(v.name for v in seq.context)) != len(seq.context):
        errs.append("context repeats a variable")
    errs += well_formed(seq.antecedent, sig, seq.context)
    errs += well_formed(seq.succedent, sig, seq.context)
    return errs


def check_theory(theory) -> list:
    errs = list(theory.signature.validate())
    if theory.mode not in ("classical", "intuitionistic"):
        errs.append("unknown mode %s" % theory.mode)
    names = set()
    for ax in theory.axioms:
        if ax.name in names:
            errs.append("duplicate axiom name %s" % ax.name)
        names.add(ax.name)
        for e in check_sequent(ax.sequent, theory.signature):
            errs.append("axiom %s: %s" % (ax.name, e))
        for f in (ax.sequent.antecedent, ax.sequent.succedent):
            for h in het_subformulas(f):
                if not h.block.is_omega:
                    continue
                if not (payoff_in_class(h.payoff, theory.classC)
                        or payoff_in_class(negate_payoff(h.payoff), theory.classC)):
                    errs.append("axiom %s: payoff outside the declared class" % ax.name)
    return errs
