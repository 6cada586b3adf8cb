"""Recursive-descent parser for signatures, theories, structures, formulas, proofs and Kripke models.

Comments run from ``//`` to the end of the line.  Identifiers may contain
``#`` and ``'`` after the first character, so generated names such as
``C#3fa2`` and primed fresh variables read back unchanged.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    BOTTOM, PLAY_SORT, TOP, AE, EA, And, App, Atom, Axiom, Body, ClassSpec, Eq, Exists, Forall,
    Het, HetBlock, Implies, Or, PlayPayoff, PlayTails, Reach, Safety, Sequent, Signature,
    SyntaxErrorHL, Theory, Var, placeholder_sorts,
)

TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<turnstile>\|-)
  | (?P<arrow>->)
  | (?P<le><=)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_#']*)
  | (?P<punct>[;:,()\[\]{}=])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, msg, line=0, col=0, diagnostics=None):
        self.msg, self.line, self.col = msg, line, col
        self.diagnostics = diagnostics or ["%d:%d: %s" % (line, col, msg)]
        super().__init__(self.diagnostics[0])


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks = []
    pos, line, lstart = 0, 1, 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], line, pos - lstart + 1)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            val = s
            if kind == "str":
                val = bytes(s[1:-1], "utf-8").decode("unicode_escape")
            toks.append(Tok(kind if kind in ("str", "num", "ident") else "p", val, line, pos - lstart + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            lstart = pos + s.rfind("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - lstart + 1))
    return toks


class Parser:
    def __init__(self, text: str, sig: Signature | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sorts = list(sig.sorts) if sig else []
        self.relations = dict(sig.relations) if sig else {}
        self.functions = dict(sig.functions) if sig else {}

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.kind in ("p", "ident") and self.tok.text == text

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.error("expected %r, found %r" % (text, self.tok.text or "end of input"))

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("expected identifier, found %r" % (self.tok.text or "end of input"))
        t = self.tok.text
        self.i += 1
        return t

    def element(self) -> str:
        if self.tok.kind not in ("ident", "num"):
            self.error("expected element name")
        t = self.tok.text
        self.i += 1
        return t

    def number(self) -> int:
        if self.tok.kind != "num":
            self.error("expected number")
        n = int(self.tok.text)
        self.i += 1
        return n

    def signature(self) -> Signature:
        return Signature(tuple(self.sorts), dict(self.relations), dict(self.functions))

    # -- declarations
    def sort_name(self) -> str:
        tok = self.tok
        s = self.ident()
        if s != PLAY_SORT and s not in self.sorts:
            self.error("unknown sort %s" % s, tok)
        return s

    def declaration(self) -> bool:
        """Parse one signature declaration if present."""
        if self.accept("sort"):
            tok = self.tok
            names = [self.ident()]
            while self.accept(","):
                names.append(self.ident())
            for n in names:
                if n in self.sorts:
                    self.error("duplicate sort %s" % n, tok)
                if n == PLAY_SORT:
                    self.error("sort name %s is reserved" % n, tok)
                self.sorts.append(n)
            self.expect(";")
            return True
        if self.accept("rel"):
            tok = self.tok
            name = self.ident()
            args = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.sort_name())
                    while self.accept(","):
                        args.append(self.sort_name())
                self.expect(")")
            self._fresh_symbol(name, tok)
            self.relations[name] = tuple(args)
            self.expect(";")
            return True
        if self.accept("fun"):
            tok = self.tok
            name = self.ident()
            args = []
            self.expect("(")
            if not self.at(")"):
                args.append(self.sort_name())
                while self.accept(","):
                    args.append(self.sort_name())
            self.expect(")")
            self.expect(":")
            res = self.sort_name()
            self._fresh_symbol(name, tok)
            self.functions[name] = (tuple(args), res)
            self.expect(";")
            return True
        if self.accept("const"):
            tok = self.tok
            name = self.ident()
            self.expect(":")
            res = self.sort_name()
            self._fresh_symbol(name, tok)
            self.functions[name] = ((), res)
            self.expect(";")
            return True
        return False

    def _fresh_symbol(self, name, tok):
        if name in self.relations or name in self.functions:
            self.error("duplicate symbol %s" % name, tok)

    # -- variables and contexts
    def var_decls(self, close="]") -> list:
        out = []
        if self.at(close):
            return out
        while True:
            name = self.ident()
            self.expect(":")
            out.append(Var(name, self.sort_name()))
            if not self.accept(","):
                return out

    def ctx_block(self) -> list:
        """``[ctx x:s, ...]`` (the keyword is optional)."""
        self.expect("[")
        self.accept("ctx")
        vs = self.var_decls()
        self.expect("]")
        return vs

    # -- terms
    def term(self, scope: dict):
        tok = self.tok
        name = self.ident()
        if name in scope and not self.at("("):
            return scope[name]
        if name in self.functions:
            args = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.term(scope))
                    while self.accept(","):
                        args.append(self.term(scope))
                self.expect(")")
            want = len(self.functions[name][0])
            if len(args) != want:
                self.error("arity error: %s expects %d arguments, got %d" % (name, want, len(args)), tok)
            return App(name, tuple(args))
        self.error("unresolved name %s" % name, tok)

    # -- formulas
    def formula(self, scope: dict):
        tok = self.tok
        if self.accept("true"):
            return TOP
        if self.accept("false"):
            return BOTTOM
        if self.at("(") :
            self.i += 1
            f = self.formula(scope)
            self.expect(")")
            return f
        if self.tok.kind == "ident" and self.peek().text == "(" and self.tok.text in ("and", "or", "implies", "not", "tails", "payoff"):
            kw = self.ident()
            self.expect("(")
            if kw in ("tails", "payoff"):
                stok = self.tok
                sname = self.ident()
                stream = scope.get(sname)
                if stream is None or stream.sort != PLAY_SORT:
                    self.error("%s is not a play variable in scope" % sname, stok)
                self.expect(",")
                htok = self.tok
                h = self.formula(scope)
                if not isinstance(h, Het):
                    self.error("expected a heterogeneous block", htok)
                self.expect(")")
                return (PlayTails if kw == "tails" else PlayPayoff)(h, stream)
            args = []
            if not self.at(")"):
                args.append(self.formula(scope))
                while self.accept(","):
                    args.append(self.formula(scope))
            self.expect(")")
            if kw == "and":
                return And(tuple(args)) if args else TOP
            if kw == "or":
                return Or(tuple(args)) if args else BOTTOM
            if kw == "implies":
                if len(args) != 2:
                    self.error("implies takes two arguments", tok)
                return Implies(args[0], args[1])
            if len(args) != 1:
                self.error("not takes one argument", tok)
            return Implies(args[0], BOTTOM)
        if self.at("exists") or self.at("forall"):
            kw = self.ident()
            self.expect("[")
            vs = self.var_decls()
            self.expect("]")
            if not vs:
                self.error("empty quantifier block", tok)
            body = self.formula({**scope, **{v.name: v for v in vs}})
            return (Exists if kw == "exists" else Forall)(tuple(vs), body)
        if self.at("hetAE") or self.at("hetEA"):
            return self.het(scope)
        if self.tok.kind == "ident" and self.tok.text in self.relations and self.tok.text not in scope:
            name = self.ident()
            args = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.term(scope))
                    while self.accept(","):
                        args.append(self.term(scope))
                self.expect(")")
            want = len(self.relations[name])
            if len(args) != want:
                self.error("arity error: %s expects %d arguments, got %d" % (name, want, len(args)), tok)
            return Atom(name, tuple(args))
        left = self.term(scope)
        self.expect("=")
        right = self.term(scope)
        return Eq(left, right)

    def het(self, scope: dict):
        tok = self.tok
        pol = AE if self.ident() == "hetAE" else EA
        length = "unset"
        if self.accept("omega"):
            length = None
        elif self.tok.kind == "num":
            length = self.number()
        self.expect("{")
        sched = None
        bounds = None
        payoff = None
        prefix = ()
        while not self.at("}"):
            ftok = self.tok
            key = self.ident()
            self.expect(":")
            if key == "len":
                length = None if self.accept("omega") else self.number()
            elif key == "sched":
                self.expect("[")
                sched = []
                while True:
                    self.expect("[")
                    blk = self.var_decls()
                    self.expect("]")
                    if not blk:
                        self.error("empty variable block in schedule", ftok)
                    sched.append(tuple(blk))
                    if not self.accept(","):
                        break
                self.expect("]")
            elif key == "bounds":
                if sched is None:
                    self.error("bounds must follow sched", ftok)
                self.expect("[")
                bounds = []
                while True:
                    k = len(bounds)
                    if k >= len(sched):
                        self.error("bounds must align one-to-one with the schedule", ftok)
                    inner = {v.name: v for v in sched[k]}
                    bounds.append(self.formula({**scope, **inner}))
                    if not self.accept(","):
                        break
                self.expect("]")
                if len(bounds) != len(sched):
                    self.error("bounds must align one-to-one with the schedule", ftok)
                bounds = tuple(bounds)
            elif key == "payoff":
                payoff = self.payoff(scope, length, sched, ftok)
            elif key == "prefix":
                self.expect("[")
                pf = []
                if not self.at("]"):
                    while True:
                        self.expect("[")
                        mv = [self.term(scope)]
                        while self.accept(","):
                            mv.append(self.term(scope))
                        self.expect("]")
                        pf.append(tuple(mv))
                        if not self.accept(","):
                            break
                self.expect("]")
                prefix = tuple(pf)
            else:
                self.error("unknown block field %s" % key, ftok)
            if not self.accept(";"):
                break
        self.expect("}")
        if length == "unset":
            self.error("block length missing", tok)
        if payoff is None:
            self.error("block payoff missing", tok)
        if sched is None:
            self.error("block schedule missing", tok)
        return Het(HetBlock(pol, length, tuple(sched), bounds), payoff, prefix)

    def payoff(self, scope, length, sched, tok):
        kind = self.ident()
        if kind == "body":
            if length is None:
                self.error("ω-length requires safety/reach payoff", tok)
            if sched is None:
                self.error("payoff must follow sched", tok)
            inner = {v.name: v for blk in sched for v in blk}
            return Body(self.formula({**scope, **inner}))
        if kind not in ("safety", "reach"):
            self.error("payoff must be body, safety or reach", tok)
        if length not in (None, "unset"):
            self.error("finite blocks take a body payoff", tok)
        if sched is None:
            self.error("payoff must follow sched", tok)
        self.expect("(")
        w = self.number()
        self.expect(")")
        self.expect("[")
        # the number of templates is needed for placeholder sorts: scan ahead
        n_templates = self._count_items("]")
        block = HetBlock(AE, None, tuple(sched))
        temps = []
        while True:
            try:
                ps = placeholder_sorts(block, w, n_templates, len(temps))
            except SyntaxErrorHL as e:
                self.error(str(e), tok)
            inner = {n: Var(n, s) for n, s in ps.items()}
            temps.append(self.formula({**scope, **inner}))
            if not self.accept(","):
                break
        self.expect("]")
        return (Safety if kind == "safety" else Reach)(w, tuple(temps))

    def _count_items(self, close) -> int:
        depth, n, j = 0, 1, self.i
        opening = {"(": ")", "[": "]", "{": "}"}
        while j < len(self.toks):
            t = self.toks[j]
            if t.kind == "eof":
                break
            if t.kind == "p" and t.text in opening:
                depth += 1
            elif t.kind == "p" and t.text in (")", "]", "}"):
                if depth == 0:
                    return n
                depth -= 1
            elif t.kind == "p" and t.text == "," and depth == 0:
                n += 1
            j += 1
        return n

    # -- sequents
    def _lookahead_ctx(self):
        """Find a trailing ``[ctx ...]`` before the statement-ending ``;``."""
        depth, j = 0, self.i
        while j < len(self.toks):
            t = self.toks[j]
            if t.kind == "eof":
                return None
            if t.kind == "p":
                if t.text == "[" and depth == 0 and self.toks[j + 1].text == "ctx":
                    save = self.i
                    self.i = j
                    vs = self.ctx_block()
                    self.i = save
                    return vs
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth -= 1
                elif t.text == ";" and depth == 0:
                    return None
            j += 1
        return None

    def sequent(self, ctx=None) -> Sequent:
        if ctx is None:
            ctx = self._lookahead_ctx() or []
        scope = {v.name: v for v in ctx}
        ante = self.formula(scope)
        if not self.at("|-"):
            self.error("expected '|-'")
        self.i += 1
        succ = self.formula(scope)
        if self.at("["):
            self.ctx_block()
        return Sequent(ante, succ, tuple(ctx))

    # -- theories
    def theory(self) -> Theory:
        axioms = []
        cls = ClassSpec("safety")
        mode = "classical"
        while self.tok.kind != "eof":
            if self.declaration():
                continue
            tok = self.tok
            if self.accept("axiom"):
                name = self.ident()
                self.expect(":")
                axioms.append(Axiom(name, self.sequent()))
                self.expect(";")
            elif self.accept("classC"):
                cls = self.class_spec()
                self.expect(";")
            elif self.accept("mode"):
                mode = self.ident()
                if mode not in ("classical", "intuitionistic"):
                    self.error("unknown mode %s" % mode, tok)
                self.expect(";")
            else:
                self.error("unexpected %r" % (tok.text or "end of input"))
        return Theory(self.signature(), tuple(axioms), cls, mode)

    def class_spec(self) -> ClassSpec:
        if self.accept("safety"):
            return ClassSpec("safety")
        if self.accept("clopen"):
            return ClassSpec("clopen")
        ctx = self.ctx_block() if self.at("[") else []
        scope = {v.name: v for v in ctx}
        self.expect("{")
        members = []
        if not self.at("}"):
            while True:
                tok = self.tok
                h = self.formula(scope)
                if not isinstance(h, Het):
                    self.error("class members are heterogeneous blocks", tok)
                members.append(h)
                if not self.accept(","):
                    break
        self.expect("}")
        return ClassSpec("explicit", tuple(members))

    # -- structures
    def structure_body(self, sig: Signature, end=None):
        from .structures import Structure
        carriers, rels, funs = {}, {}, {}
        while self.tok.kind != "eof" and not (end and self.at(end)):
            tok = self.tok
            if self.accept("carrier"):
                s = self.sort_name()
                self.expect("=")
                carriers[s] = tuple(self._element_set())
            elif self.accept("table"):
                name = self.ident()
                if name not in sig.relations:
                    self.error("unknown relation %s" % name, tok)
                self.expect("=")
                self.expect("{")
                tups = []
                if not self.at("}"):
                    while True:
                        tups.append(self._tuple())
                        if not self.accept(","):
                            break
                self.expect("}")
                rels[name] = frozenset(tups)
            elif self.accept("fun"):
                name = self.ident()
                if name not in sig.functions:
                    self.error("unknown function %s" % name, tok)
                self.expect("=")
                self.expect("{")
                table = {}
                if not self.at("}"):
                    while True:
                        args = self._tuple()
                        if not self.at("->"):
                            self.error("expected '->'")
                        self.i += 1
                        table[args] = self.element()
                        if not self.accept(","):
                            break
                self.expect("}")
                funs[name] = table
            else:
                self.error("unexpected %r in structure" % (tok.text or "end of input"))
            self.expect(";")
        M = Structure(sig, carriers, rels, funs)
        errs = M.validate()
        if errs:
            raise ParseError(errs[0], self.tok.line, self.tok.col, errs)
        return M

    def _element_set(self) -> list:
        self.expect("{")
        out = []
        if not self.at("}"):
            while True:
                out.append(self.element())
                if not self.accept(","):
                    break
        self.expect("}")
        return out

    def _tuple(self) -> tuple:
        if self.accept("("):
            out = []
            if not self.at(")"):
                while True:
                    out.append(self.element())
                    if not self.accept(","):
                        break
            self.expect(")")
            return tuple(out)
        return (self.element(),)

    def structure(self):
        while self.declaration():
            pass
        return self.structure_body(self.signature())


# ---------------------------------------------------------------- entry points

def _run(text, sig, fn):
    p = Parser(text, sig)
    out = fn(p)
    if p.tok.kind != "eof":
        p.error("trailing input %r" % p.tok.text)
    return out


def parse_signature(text: str) -> Signature:
    def go(p):
        while p.tok.kind != "eof":
            if not p.declaration():
                p.error("expected a declaration")
        return p.signature()
    return _run(text, None, go)


def parse_theory(text: str, sig: Signature | None = None) -> Theory:
    return _run(text, sig, lambda p: p.theory())


def parse_structure(text: str, sig: Signature | None = None):
    return _run(text, sig, lambda p: p.structure())


def parse_formula(text: str, sig: Signature, ctx=()):
    return _run(text, sig, lambda p: p.formula({v.name: v for v in ctx}))


def parse_sequent(text: str, sig: Signature) -> Sequent:
    return _run(text, sig, lambda p: p.sequent())


def parse_term(text: str, sig: Signature, ctx=()):
    return _run(text, sig, lambda p: p.term({v.name: v for v in ctx}))


def parse_ctx(text: str, sig: Signature) -> list:
    return _run(text, sig, lambda p: p.ctx_block())


def parse_class(text: str, sig: Signature):
    """A class of payoffs: ``safety``, ``clopen`` or ``[ctx ...] {blocks}``, optionally after ``classC``."""
    def go(p):
        p.accept("classC")
        cls = p.class_spec()
        p.accept(";")
        return cls
    return _run(text, sig, go)


def parse_proof(text: str):
    """Proof script: nested ``(rule <tag> conclusion "<sequent>" params {...} premises [...])``.

    The conclusion and formula-valued parameters stay as strings here; the
    kernel reads them against the theory's signature.
    """
    return _run(text, None, _proof_node)


def _proof_node(p: Parser):
    from .proofs import ProofTree, RuleTag
    p.expect("(")
    p.expect("rule")
    tok = p.tok
    tag = p.ident()
    try:
        rule = RuleTag(tag)
    except ValueError:
        p.error("unknown rule tag %s" % tag, tok)
    p.expect("conclusion")
    if p.tok.kind != "str":
        p.error("conclusion must be a quoted sequent")
    concl = p.tok.text
    p.i += 1
    params = {}
    if p.accept("params"):
        params = _value(p)
        if not isinstance(params, dict):
            p.error("params must be a map")
    premises = []
    if p.accept("premises"):
        p.expect("[")
        if not p.at("]"):
            while True:
                premises.append(_proof_node(p))
                if not p.accept(","):
                    break
        p.expect("]")
    p.expect(")")
    return ProofTree(rule, concl, params, tuple(premises))


def _value(p: Parser):
    t = p.tok
    if t.kind == "str":
        p.i += 1
        return t.text
    if t.kind == "num":
        return p.number()
    if p.accept("["):
        out = []
        if not p.at("]"):
            while True:
                out.append(_value(p))
                if not p.accept(","):
                    break
        p.expect("]")
        return out
    if p.accept("{"):
        out = {}
        if not p.at("}"):
            while True:
                k = p.tok.text if p.tok.kind in ("str", "ident", "num") else p.error("expected key")
                p.i += 1
                p.expect(":")
                out[k] = _value(p)
                if not p.accept(","):
                    break
        p.expect("}")
        return out
    if t.kind == "ident":
        p.i += 1
        return t.text
    p.error("expected a parameter value")


def parse_kripke(text: str, sig: Signature | None = None):
    """Nodes, order generators, one structure per node and transition maps."""
    from .kripke import KripkeModel

    def go(p):
        while p.declaration():
            pass
        sig2 = p.signature()
        nodes, order, structs, maps = [], [], {}, {}
        while p.tok.kind != "eof":
            tok = p.tok
            if p.accept("node"):
                nodes.append(p.ident())
                while p.accept(","):
                    nodes.append(p.ident())
                p.expect(";")
            elif p.accept("order"):
                a = p.ident()
                if not p.at("<="):
                    p.error("expected '<='")
                p.i += 1
                b = p.ident()
                order.append((a, b))
                p.expect(";")
            elif p.accept("structure"):
                n = p.ident()
                p.expect("{")
                structs[n] = p.structure_body(sig2, end="}")
                p.expect("}")
            elif p.accept("map"):
                a = p.ident()
                if not p.at("->"):
                    p.error("expected '->'")
                p.i += 1
                b = p.ident()
                if p.accept(":"):
                    s = p.sort_name()
                elif len(sig2.sorts) == 1:
                    s = sig2.sorts[0]
                else:
                    p.error("map needs a sort", tok)
                p.expect("=")
                p.expect("{")
                table = {}
                if not p.at("}"):
                    while True:
                        x = p.element()
                        if not p.at("->"):
                            p.error("expected '->'")
                        p.i += 1
                        table[x] = p.element()
                        if not p.accept(","):
                            break
                p.expect("}")
                maps.setdefault((a, b), {})[s] = table
                p.expect(";")
            else:
                p.error("unexpected %r in Kripke model" % (tok.text or "end of input"))
        for n in structs:
            if n not in nodes:
                raise ParseError("structure for undeclared node %s" % n)
        return KripkeModel(sig2, tuple(nodes), tuple(order), structs, maps)

    return _run(text, sig, go)


def parse_source(text: str, kind: str, sig: Signature | None = None):
    """Dispatch on file kind (``sig``, ``thy``, ``str``, ``prf``, ``krp``, ``formula``)."""
    table = {
        "sig": lambda: parse_signature(text),
        "thy": lambda: parse_theory(text, sig),
        "str": lambda: parse_structure(text, sig),
        "prf": lambda: parse_proof(text),
        "krp": lambda: parse_kripke(text, sig),
        "formula": lambda: parse_formula(text, sig or Signature()),
    }
    if kind not in table:
        raise ValueError("unknown source kind %s" % kind)
    return table[kind]()
