"""Pretty printers producing text the parser reads back to equal objects."""
from __future__ import annotations

from .syntax import (
    And, App, Atom, Body, Bottom, Eq, Exists, Forall, Het, Implies, Or, PlayPayoff, PlayTails,
    Safety, Sequent, Signature, Theory, Top, Var,
)


def print_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.fn
    return "%s(%s)" % (t.fn, ", ".join(print_term(a) for a in t.args))


def _decls(vs) -> str:
    return ", ".join("%s:%s" % (v.name, v.sort) for v in vs)


def print_formula(f) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.rel
        return "%s(%s)" % (f.rel, ", ".join(print_term(a) for a in f.args))
    if isinstance(f, Eq):
        return "%s = %s" % (print_term(f.left), print_term(f.right))
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, And):
        return "and(%s)" % ", ".join(print_formula(g) for g in f.args)
    if isinstance(f, Or):
        return "or(%s)" % ", ".join(print_formula(g) for g in f.args)
    if isinstance(f, Implies):
        if isinstance(f.right, Bottom):
            return "not(%s)" % print_formula(f.left)
        return "implies(%s, %s)" % (print_formula(f.left), print_formula(f.right))
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        body = print_formula(f.body)
        if isinstance(f.body, Eq):
            body = "(%s)" % body
        return "%s [%s] %s" % (kw, _decls(f.vars), body)
    if isinstance(f, Het):
        return print_het(f)
    if isinstance(f, PlayTails):
        return "tails(%s, %s)" % (f.stream.name, print_het(f.het))
    if isinstance(f, PlayPayoff):
        return "payoff(%s, %s)" % (f.stream.name, print_het(f.het))
    raise TypeError(f)


def print_het(h: Het) -> str:
    blk = h.block
    parts = ["len: %s" % ("omega" if blk.is_omega else blk.length)]
    parts.append("sched: [%s]" % ", ".join("[%s]" % _decls(b) for b in blk.schedule))
    if blk.bounds is not None:
        parts.append("bounds: [%s]" % ", ".join(print_formula(b) for b in blk.bounds))
    p = h.payoff
    if isinstance(p, Body):
        parts.append("payoff: body %s" % print_formula(p.formula))
    else:
        kind = "safety" if isinstance(p, Safety) else "reach"
        parts.append("payoff: %s(%d)[%s]" % (kind, p.window, ", ".join(print_formula(t) for t in p.templates)))
    if h.prefix:
        parts.append("prefix: [%s]" % ", ".join(
            "[%s]" % ", ".join(print_term(t) for t in mv) for mv in h.prefix))
    return "het%s { %s }" % (blk.polarity, "; ".join(parts))


def print_ctx(ctx) -> str:
    return "[ctx %s]" % _decls(ctx)


def print_sequent(s: Sequent) -> str:
    out = "%s |- %s" % (print_formula(s.antecedent), print_formula(s.succedent))
    if s.context:
        out += " " + print_ctx(s.context)
    return out


def print_signature(sig: Signature) -> str:
    lines = []
    if sig.sorts:
        lines.append("sort %s;" % ", ".join(sig.sorts))
    for name, args in sig.relations.items():
        lines.append("rel %s(%s);" % (name, ", ".join(args)) if args else "rel %s;" % name)
    for name, (args, res) in sig.functions.items():
        if args:
            lines.append("fun %s(%s): %s;" % (name, ", ".join(args), res))
        else:
            lines.append("const %s: %s;" % (name, res))
    return "\n".join(lines) + "\n"


def print_class(cls) -> str:
    if cls.kind in ("safety", "clopen"):
        return "classC %s;" % cls.kind
    from .syntax import free_vars
    params = set()
    for m in cls.members:
        params |= free_vars(m)
    ctx = ""
    if params:
        ctx = print_ctx(sorted(params, key=lambda v: (v.name, v.sort))) + " "
    return "classC %s{%s};" % (ctx, ", ".join(print_formula(m) for m in cls.members))


def print_theory(t: Theory) -> str:
    out = print_signature(t.signature)
    for ax in t.axioms:
        out += "axiom %s: %s;\n" % (ax.name, print_sequent(ax.sequent))
    out += print_class(t.classC) + "\n"
    out += "mode %s;\n" % t.mode
    return out


def print_structure(M, with_signature: bool = True) -> str:
    out = print_signature(M.signature) if with_signature else ""
    for s in M.signature.sorts:
        out += "carrier %s = {%s};\n" % (s, ", ".join(M.carriers[s]))
    for name in M.signature.relations:
        tups = sorted(M.relations.get(name, ()))
        out += "table %s = {%s};\n" % (name, ", ".join("(%s)" % ", ".join(t) for t in tups))
    for name in M.signature.functions:
        table = M.functions[name]
        out += "fun %s = {%s};\n" % (name, ", ".join(
            "(%s)->%s" % (", ".join(k), v) for k, v in table.items()))
    return out


def _quote(s: str) -> str:
    return '"%s"' % s.replace("\\", "\\\\").replace('"', '\\"')


def print_value(v) -> str:
    from .syntax import Formula
    if isinstance(v, str):
        return _quote(v)
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Formula):
        return _quote(print_formula(v))
    if isinstance(v, Sequent):
        return _quote(print_sequent(v))
    if isinstance(v, (Var, App)):
        return _quote(print_term(v))
    if isinstance(v, (list, tuple)):
        return "[%s]" % ", ".join(print_value(x) for x in v)
    if isinstance(v, dict):
        return "{%s}" % ", ".join("%s: %s" % (_quote(str(k)), print_value(x)) for k, x in v.items())
    raise TypeError(v)


def print_proof(p, indent: int = 0) -> str:
    pad = "  " * indent
    concl = p.conclusion if isinstance(p.conclusion, str) else print_sequent(p.conclusion)
    out = "%s(rule %s conclusion %s" % (pad, p.rule.value, _quote(concl))
    if p.params:
        out += " params %s" % print_value(p.params)
    if p.premises:
        out += " premises [\n%s\n%s]" % (",\n".join(print_proof(q, indent + 1) for q in p.premises), pad)
    return out + ")"


def print_kripke(K) -> str:
    out = print_signature(K.signature)
    out += "node %s;\n" % ", ".join(K.nodes)
    for a, b in K.order:
        out += "order %s <= %s;\n" % (a, b)
    for n in K.nodes:
        body = print_structure(K.structures[n], with_signature=False)
        out += "structure %s {\n%s}\n" % (n, "".join("  " + ln + "\n" for ln in body.splitlines()))
    for (a, b), per_sort in K.maps.items():
        for s, table in per_sort.items():
            out += "map %s->%s : %s = {%s};\n" % (a, b, s, ", ".join("%s->%s" % kv for kv in table.items()))
    return out
