"""Surface syntax for `.gl` files.

Items: `sig f :: T`, `assume f :: T`, `def f x y = e`, `template p`,
`measure m : List Int -> Int`. Refinements are written `{v:Int | p}` (or
`{Int | p}` with an anonymous binder); `?` and `??` both mark the unknown
part of a refinement, and `p && ?` carries a static part. Comments run from
`--` to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..syntax import (And, Arith, ArithOp, BaseType, Cmp, CmpOp, Diagnostic,
                      GPred, HoleRef, Iff, Imp, IntLit, MeasureApp, Not, Or,
                      PFalse, Pred, PTrue, PVar, RBase, RFun, RType, Span,
                      TVar, TRUE)

KEYWORDS = {
    "sig", "assume", "def", "template", "measure", "let", "in", "if", "then",
    "else", "match", "true", "false", "not", "Int", "Bool", "List", "len",
}

PUNCT = [
    "::", "<=>", "=>", "->", "&&", "||", "==", "/=", "<=", ">=", "??",
    "{", "}", "(", ")", "[", "]", "|", ",", ";", ":", "=", "<", ">", "+",
    "-", "*", "/", "?", "\\",
]


@dataclass
class Tok:
    kind: str  # 'name' | 'int' | 'punct' | 'eof'
    text: str
    span: Span


def lex(text: str, filename: str = "<input>") -> list[Tok]:
    toks: list[Tok] = []
    line, col, i = 1, 1, 0
    n = len(text)

    def here(w: int = 1) -> Span:
        return Span(filename, line, col, line, col + w)

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Tok("int", text[i:j], here(j - i)))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(Tok("name", text[i:j], here(j - i)))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                toks.append(Tok("punct", p, here(len(p))))
                col += len(p)
                i += len(p)
                break
        else:
            raise Diagnostic(f"unexpected character {ch!r}", here())
    toks.append(Tok("eof", "", Span(filename, line, col, line, col)))
    return toks


# --- surface expression tree -------------------------------------------------

@dataclass
class SExpr:
    span: Span


@dataclass
class SInt(SExpr):
    value: int


@dataclass
class SBool(SExpr):
    value: bool


@dataclass
class SVar(SExpr):
    name: str


@dataclass
class SApp(SExpr):
    fn: SExpr
    arg: SExpr


@dataclass
class SLam(SExpr):
    params: list[str]
    body: SExpr


@dataclass
class SIf(SExpr):
    guard: SExpr
    then: SExpr
    els: SExpr


@dataclass
class SLet(SExpr):
    name: str
    annot: Optional[RType]
    bound: SExpr
    body: SExpr


@dataclass
class SMatch(SExpr):
    scrutinee: SExpr
    nil_body: SExpr
    head: str
    tail: str
    cons_body: SExpr


@dataclass
class SList(SExpr):
    items: list[SExpr]


@dataclass
class Item:
    kind: str  # 'sig' | 'assume' | 'def' | 'template' | 'measure'
    name: str
    span: Span
    rtype: Optional[RType] = None
    params: list[str] = field(default_factory=list)
    body: Optional[SExpr] = None
    template: Optional[Pred] = None


@dataclass
class SourceProgram:
    items: list[Item]
    hole_spans: dict[int, Span]  # parser-local hole id -> span of the `?`


class Parser:
    def __init__(self, toks: list[Tok], measures: set[str] | None = None):
        self.toks = toks
        self.pos = 0
        self.measures = {"len"} | (measures or set())
        self.hole_spans: dict[int, Span] = {}
        self._next_hole = 0

    # -- plumbing --

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("punct", "name")

    def eat(self, text: str) -> Tok:
        if not self.at(text):
            t = self.peek()
            raise Diagnostic(f"expected {text!r}, found {t.text!r}", t.span)
        return self.next()

    def name(self) -> Tok:
        t = self.peek()
        if t.kind != "name" or t.text in KEYWORDS:
            raise Diagnostic(f"expected a name, found {t.text!r}", t.span)
        return self.next()

    def fresh_hole(self, span: Span) -> HoleRef:
        hid = self._next_hole
        self._next_hole += 1
        self.hole_spans[hid] = span
        return HoleRef(hid)

    # -- items --

    def program(self) -> SourceProgram:
        items: list[Item] = []
        seen_defs: set[str] = set()
        seen_sigs: set[str] = set()
        while self.peek().kind != "eof":
            t = self.peek()
            if self.at("measure"):
                self.next()
                nm = self.name()
                self.eat(":")
                a = self.base_type()
                self.eat("->")
                b = self.base_type()
                if a is not BaseType.LIST or b is not BaseType.INT:
                    raise Diagnostic("measures must have sort List Int -> Int", nm.span)
                self.measures.add(nm.text)
                items.append(Item("measure", nm.text, nm.span))
            elif self.at("template"):
                self.next()
                p, hole = self.pred_with_hole()
                if hole is not None:
                    raise Diagnostic("templates cannot contain `?`", t.span)
                items.append(Item("template", "", t.span, template=p))
            elif self.at("sig") or self.at("assume"):
                kw = self.next()
                nm = self.name()
                self.eat("::")
                rt = self.rtype()
                if kw.text == "sig":
                    if nm.text in seen_sigs:
                        raise Diagnostic(f"duplicate signature for `{nm.text}`", nm.span)
                    seen_sigs.add(nm.text)
                items.append(Item(kw.text, nm.text, nm.span, rtype=rt))
            elif self.at("def"):
                self.next()
                nm = self.name()
                if nm.text in seen_defs:
                    raise Diagnostic(f"duplicate definition of `{nm.text}`", nm.span)
                seen_defs.add(nm.text)
                params = []
                while self.peek().kind == "name" and self.peek().text not in KEYWORDS:
                    params.append(self.name().text)
                self.eat("=")
                body = self.expr()
                items.append(Item("def", nm.text, nm.span, params=params, body=body))
            else:
                raise Diagnostic(f"expected an item, found {t.text!r}", t.span)
        for it in items:
            if it.kind == "assume" and it.name in seen_defs:
                raise Diagnostic(f"`{it.name}` is both assumed and defined", it.span)
        return SourceProgram(items, self.hole_spans)

    # -- types --

    def base_type(self) -> BaseType:
        t = self.next()
        if t.text == "Int":
            return BaseType.INT
        if t.text == "Bool":
            return BaseType.BOOL
        if t.text == "List":
            self.eat("Int")
            return BaseType.LIST
        raise Diagnostic(f"expected a base type, found {t.text!r}", t.span)

    def rtype(self) -> RType:
        # binding: `x:{...} -> T` | `x:(T1) -> T` | rbase [-> T]
        if (self.peek().kind == "name" and self.peek().text not in KEYWORDS
                and self.peek(1).text == ":" and self.peek(1).kind == "punct"):
            arg_name = self.name().text
            self.eat(":")
            if self.at("("):
                self.next()
                arg_t = self.rtype()
                self.eat(")")
            else:
                arg_t = self.rbase(default_binder=arg_name)
            self.eat("->")
            return RFun(arg_name, arg_t, self.rtype())
        if self.at("("):
            self.next()
            t = self.rtype()
            self.eat(")")
            if self.at("->"):
                self.next()
                return RFun(self._anon(), t, self.rtype())
            return t
        t = self.rbase()
        if self.at("->"):
            self.next()
            return RFun(self._anon(), t, self.rtype())
        return t

    _anon_count = 0

    def _anon(self) -> str:
        Parser._anon_count += 1
        return f"_a{Parser._anon_count}"

    def rbase(self, default_binder: str | None = None) -> RBase:
        if self.at("{"):
            self.next()
            binder = None
            if (self.peek().kind == "name" and self.peek().text not in KEYWORDS
                    and self.peek(1).text == ":"):
                binder = self.name().text
                self.eat(":")
            base = self.base_type()
            self.eat("|")
            pred, hole = self.pred_with_hole()
            self.eat("}")
            if binder is None:
                binder = default_binder or "v"
            return RBase(binder, base, GPred(pred, hole))
        base = self.base_type()
        return RBase(default_binder or "v", base, GPred(TRUE))

    # -- predicates --

    def pred_with_hole(self) -> tuple[Pred, Optional[HoleRef]]:
        """A predicate where `?` may appear as a top-level conjunct (once)."""
        parts: list[tuple[Optional[Pred], Optional[Span]]] = []
        while True:
            if self.at("?") or self.at("??"):
                sp = self.next().span
                parts.append((None, sp))
            else:
                parts.append((self.pred_iff(no_and=True), None))
            if self.at("&&"):
                self.next()
                continue
            break
        hole: Optional[HoleRef] = None
        preds: list[Pred] = []
        for p, sp in parts:
            if p is None:
                if hole is not None:
                    raise Diagnostic("at most one `?` per refinement", sp)
                hole = self.fresh_hole(sp)
            else:
                preds.append(p)
        out = TRUE
        for p in reversed(preds):
            out = p if isinstance(out, PTrue) else And(p, out)
        return out, hole

    def pred(self) -> Pred:
        p, hole = self.pred_with_hole()
        if hole is not None:
            raise Diagnostic("`?` is not allowed here")
        return p

    def pred_iff(self, no_and: bool = False) -> Pred:
        lhs = self.pred_imp(no_and)
        while self.at("<=>"):
            self.next()
            lhs = Iff(lhs, self.pred_imp(no_and))
        return lhs

    def pred_imp(self, no_and: bool) -> Pred:
        lhs = self.pred_or(no_and)
        if self.at("=>"):
            self.next()
            return Imp(lhs, self.pred_imp(no_and))
        return lhs

    def pred_or(self, no_and: bool) -> Pred:
        lhs = self.pred_and(no_and)
        while self.at("||"):
            self.next()
            lhs = Or(lhs, self.pred_and(no_and))
        return lhs

    def pred_and(self, no_and: bool) -> Pred:
        lhs = self.pred_cmp()
        while not no_and and self.at("&&"):
            self.next()
            lhs = And(lhs, self.pred_cmp())
        return lhs

    def pred_cmp(self) -> Pred:
        lhs = self.term()
        ops = {"<": CmpOp.LT, "<=": CmpOp.LE, ">": CmpOp.GT, ">=": CmpOp.GE,
               "==": CmpOp.EQ, "=": CmpOp.EQ, "/=": CmpOp.NE}
        t = self.peek()
        if t.kind == "punct" and t.text in ops:
            self.next()
            rhs = self.term()
            return Cmp(ops[t.text], self._as_term(lhs, t.span), self._as_term(rhs, t.span))
        return self._as_pred(lhs, t.span)

    @staticmethod
    def _as_term(x, span: Span):
        if isinstance(x, Pred):
            if isinstance(x, PVar):
                return TVar(x.name)
            raise Diagnostic("expected an arithmetic term", span)
        return x

    @staticmethod
    def _as_pred(x, span: Span) -> Pred:
        if isinstance(x, Pred):
            return x
        if isinstance(x, TVar):
            return PVar(x.name)
        raise Diagnostic("expected a boolean predicate", span)

    def term(self):
        """An additive term; may resolve to a Pred for boolean atoms."""
        out = self.term_mul()
        while self.at("+") or self.at("-"):
            op = ArithOp.ADD if self.next().text == "+" else ArithOp.SUB
            rhs = self.term_mul()
            out = Arith(op, self._as_term(out, self.peek().span), self._as_term(rhs, self.peek().span))
        return out

    def term_mul(self):
        out = self.term_atom()
        while self.at("*"):
            self.next()
            rhs = self.term_atom()
            out = Arith(ArithOp.MUL, self._as_term(out, self.peek().span), self._as_term(rhs, self.peek().span))
        return out

    def term_atom(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text))
        if self.at("-"):
            self.next()
            inner = self.term_atom()
            return Arith(ArithOp.SUB, IntLit(0), self._as_term(inner, t.span))
        if self.at("("):
            self.next()
            p = self.pred_iff()
            self.eat(")")
            return p
        if self.at("not"):
            self.next()
            inner = self.term_atom()
            return Not(self._as_pred(inner, t.span))
        if self.at("true"):
            self.next()
            return PTrue()
        if self.at("false"):
            self.next()
            return PFalse()
        if t.kind == "name" and t.text in self.measures:
            self.next()
            arg = self.name()
            return MeasureApp(t.text, TVar(arg.text))
        if t.kind == "name" and t.text not in KEYWORDS:
            self.next()
            return TVar(t.text)
        raise Diagnostic(f"unexpected token {t.text!r} in predicate", t.span)

    # -- expressions --

    def expr(self) -> SExpr:
        t = self.peek()
        if self.at("\\"):
            self.next()
            params = [self.name().text]
            while self.peek().kind == "name" and self.peek().text not in KEYWORDS:
                params.append(self.name().text)
            self.eat("->")
            return SLam(t.span, params, self.expr())
        if self.at("let"):
            self.next()
            nm = self.name()
            annot = None
            if self.at("::"):
                self.next()
                annot = self.rtype()
            self.eat("=")
            bound = self.expr()
            self.eat("in")
            body = self.expr()
            return SLet(t.span, nm.text, annot, bound, body)
        if self.at("if"):
            self.next()
            g = self.expr()
            self.eat("then")
            e1 = self.expr()
            self.eat("else")
            e2 = self.expr()
            return SIf(t.span, g, e1, e2)
        if self.at("match"):
            self.next()
            scrut = self.expr()
            self.eat("{")
            self.eat("[")
            self.eat("]")
            self.eat("->")
            e1 = self.expr()
            self.eat(";")
            self.eat("(")
            h = self.name()
            self.eat(":")
            tl = self.name()
            self.eat(")")
            self.eat("->")
            e2 = self.expr()
            self.eat("}")
            return SMatch(t.span, scrut, e1, h.text, tl.text, e2)
        return self.expr_iff()

    def binop(self, span: Span, op: str, a: SExpr, b: SExpr) -> SExpr:
        return SApp(span, SApp(span, SVar(span, op), a), b)

    def expr_iff(self) -> SExpr:
        # no <=> at expression level; start at ||
        return self.expr_or()

    def expr_or(self) -> SExpr:
        out = self.expr_and()
        while self.at("||"):
            sp = self.next().span
            out = self.binop(sp, "||", out, self.expr_and())
        return out

    def expr_and(self) -> SExpr:
        out = self.expr_cmp()
        while self.at("&&"):
            sp = self.next().span
            out = self.binop(sp, "&&", out, self.expr_cmp())
        return out

    def expr_cmp(self) -> SExpr:
        out = self.expr_add()
        t = self.peek()
        if t.kind == "punct" and t.text in ("<", "<=", ">", ">=", "==", "/="):
            self.next()
            return self.binop(t.span, t.text, out, self.expr_add())
        return out

    def expr_add(self) -> SExpr:
        out = self.expr_mul()
        while self.at("+") or self.at("-"):
            tok = self.next()
            out = self.binop(tok.span, tok.text, out, self.expr_mul())
        return out

    def expr_mul(self) -> SExpr:
        out = self.expr_app()
        while self.at("*") or self.at("/"):
            tok = self.next()
            out = self.binop(tok.span, tok.text, out, self.expr_app())
        return out

    def expr_app(self) -> SExpr:
        out = self.expr_atom()
        while True:
            t = self.peek()
            if t.kind in ("int",) or (t.kind == "name" and t.text not in KEYWORDS) \
                    or t.text in ("(", "[") or t.text in ("true", "false"):
                arg = self.expr_atom()
                out = SApp(out.span, out, arg)
            else:
                return out

    def expr_atom(self) -> SExpr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return SInt(t.span, int(t.text))
        if self.at("true") or self.at("false"):
            self.next()
            return SBool(t.span, t.text == "true")
        if self.at("not"):
            self.next()
            inner = self.expr_atom()
            return SApp(t.span, SVar(t.span, "not"), inner)
        if self.at("-"):
            # unary minus in expressions: 0 - e
            self.next()
            inner = self.expr_atom()
            return self.binop(t.span, "-", SInt(t.span, 0), inner)
        if self.at("("):
            self.next()
            e = self.expr()
            self.eat(")")
            return e
        if self.at("["):
            self.next()
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.next()
                    items.append(self.expr())
            self.eat("]")
            return SList(t.span, items)
        if t.kind == "name" and t.text not in KEYWORDS:
            self.next()
            return SVar(t.span, t.text)
        raise Diagnostic(f"unexpected token {t.text!r} in expression", t.span)


def parse(text: str, filename: str = "<input>") -> SourceProgram:
    return Parser(lex(text, filename)).program()


def parse_predicate(text: str, measures: set[str] | None = None) -> Pred:
    """Parse a bare predicate (the report/service exchange format)."""
    p = Parser(lex(text, "<predicate>"), measures)
    out = p.pred()
    if p.peek().kind != "eof":
        raise Diagnostic(f"trailing input after predicate: {p.peek().text!r}", p.peek().span)
    return out
