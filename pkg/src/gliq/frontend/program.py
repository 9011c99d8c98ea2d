"""Resolved programs: builtins, name resolution, and the registry of gradual
refinement sources found in signatures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..syntax import (And, Arith, ArithOp, BaseType, Cmp, CmpOp, Diagnostic,
                      Env, Expr, GPred, HoleRef, Iff, IntLit, MeasureApp, Not,
                      Pred, PVar, RBase, RFun, RType, Sort, Span, TVar, TRUE,
                      NO_SPAN)
from .normalize import NameGen, normalize_expr
from .parser import Item, SourceProgram, parse


@dataclass
class GradualSource:
    """One syntactic `?` in a signature; identity for all its uses."""

    source_id: int
    owner: str            # item name the signature belongs to
    binder: str           # binder of the refined base position
    base: Sort
    static: Pred
    span: Span            # span of the `?` itself
    scope: tuple[tuple[str, Sort], ...]  # binders visible at the position

    def display(self) -> str:
        return f"{self.owner}.{self.binder}"


@dataclass
class Def:
    name: str
    params: list[str]
    body: Expr
    sig: Optional[RType]
    span: Span


@dataclass
class Program:
    file: str
    text: str
    defs: list[Def]
    assumes: dict[str, RType]
    sigs: dict[str, RType]
    user_templates: list[Pred]
    measures: dict[str, tuple[Sort, Sort]]
    sources: list[GradualSource]
    gen: NameGen = field(default_factory=NameGen)

    def source(self, source_id: int) -> GradualSource:
        return self.sources[source_id]


def builtin_env() -> Env:
    i, b, l = BaseType.INT, BaseType.BOOL, BaseType.LIST

    def base(bt: Sort, p: Pred = TRUE) -> RBase:
        return RBase("v", bt, GPred(p))

    def v() -> TVar:
        return TVar("v")

    def arith(op: ArithOp) -> RType:
        return RFun("x", base(i), RFun("y", base(i),
                    base(i, Cmp(CmpOp.EQ, v(), Arith(op, TVar("x"), TVar("y"))))))

    def rel(op: CmpOp) -> RType:
        return RFun("x", base(i), RFun("y", base(i),
                    base(b, Iff(PVar("v"), Cmp(op, TVar("x"), TVar("y"))))))

    env = Env()
    env = env.bind("+", arith(ArithOp.ADD))
    env = env.bind("-", arith(ArithOp.SUB))
    env = env.bind("*", arith(ArithOp.MUL))
    # division demands a provably positive divisor
    env = env.bind("/", RFun("x", base(i), RFun("y", RBase("v", i, GPred(Cmp(CmpOp.LT, IntLit(0), v()))), base(i))))
    env = env.bind("==", rel(CmpOp.EQ))
    env = env.bind("/=", rel(CmpOp.NE))
    env = env.bind("<", rel(CmpOp.LT))
    env = env.bind("<=", rel(CmpOp.LE))
    env = env.bind(">", rel(CmpOp.GT))
    env = env.bind(">=", rel(CmpOp.GE))
    env = env.bind("&&", RFun("x", base(b), RFun("y", base(b),
                   base(b, Iff(PVar("v"), And(PVar("x"), PVar("y")))))))
    env = env.bind("||", RFun("x", base(b), RFun("y", base(b),
                   base(b, Iff(PVar("v"), Not(And(Not(PVar("x")), Not(PVar("y")))))))))
    env = env.bind("not", RFun("x", base(b), base(b, Iff(PVar("v"), Not(PVar("x"))))))
    env = env.bind("cons", RFun("h", base(i), RFun("t", base(l),
                   base(l, Cmp(CmpOp.EQ, MeasureApp("len", v()),
                               Arith(ArithOp.ADD, IntLit(1), MeasureApp("len", TVar("t"))))))))
    env = env.bind("nil", base(l, Cmp(CmpOp.EQ, MeasureApp("len", v()), IntLit(0))))
    return env


def _renumber_holes(t: RType, mapping: dict[int, int]) -> RType:
    if isinstance(t, RBase):
        h = t.ref.hole
        if h is None:
            return t
        return RBase(t.binder, t.base, GPred(t.ref.static, HoleRef(mapping[h.source_id], h.subst)))
    assert isinstance(t, RFun)
    return RFun(t.arg_name, _renumber_holes(t.arg_type, mapping),
                _renumber_holes(t.res_type, mapping))


def _collect_sources(owner: str, t: RType, hole_spans: dict[int, Span],
                     mapping: dict[int, int], out: list[GradualSource],
                     scope: tuple[tuple[str, Sort], ...] = ()) -> None:
    if isinstance(t, RBase):
        h = t.ref.hole
        if h is not None:
            sid = len(out)
            mapping[h.source_id] = sid
            out.append(GradualSource(sid, owner, t.binder, t.base, t.ref.static,
                                     hole_spans[h.source_id], scope))
        return
    assert isinstance(t, RFun)
    _collect_sources(owner, t.arg_type, hole_spans, mapping, out, scope)
    if isinstance(t.arg_type, RBase):
        scope = scope + ((t.arg_name, t.arg_type.base),)
    _collect_sources(owner, t.res_type, hole_spans, mapping, out, scope)


def _forbid_holes(t: Optional[RType], what: str, span: Span) -> None:
    if t is None:
        return
    from ..syntax import rtype_holes
    if rtype_holes(t):
        raise Diagnostic(f"`?` is only allowed in top-level sig/assume ({what})", span)


def _check_expr_annots(e) -> None:
    from ..syntax import EApp, EIf, ELam, ELet, EMatch
    if isinstance(e, ELet):
        _forbid_holes(e.annot, "let annotation", e.span)
        _check_expr_annots(e.bound)
        _check_expr_annots(e.body)
    elif isinstance(e, ELam):
        _forbid_holes(e.arg_type, "lambda annotation", e.span)
        _check_expr_annots(e.body)
    elif isinstance(e, EApp):
        _check_expr_annots(e.fn)
    elif isinstance(e, EIf):
        _check_expr_annots(e.then)
        _check_expr_annots(e.els)
    elif isinstance(e, EMatch):
        _check_expr_annots(e.nil_body)
        _check_expr_annots(e.cons_body)


def resolve(sp: SourceProgram, text: str = "", filename: str = "<input>") -> Program:
    """Renumber holes, build source records, normalize bodies."""
    measures: dict[str, tuple[Sort, Sort]] = {"len": (BaseType.LIST, BaseType.INT)}
    sources: list[GradualSource] = []
    mapping: dict[int, int] = {}
    sigs: dict[str, RType] = {}
    assumes: dict[str, RType] = {}
    templates: list[Pred] = []
    gen = NameGen()
    defs: list[Def] = []

    for it in sp.items:
        if it.kind == "measure":
            measures[it.name] = (BaseType.LIST, BaseType.INT)
        elif it.kind == "template":
            assert it.template is not None
            templates.append(it.template)
        elif it.kind in ("sig", "assume"):
            assert it.rtype is not None
            _collect_sources(it.name, it.rtype, sp.hole_spans, mapping, sources)
            t = _renumber_holes(it.rtype, mapping)
            (sigs if it.kind == "sig" else assumes)[it.name] = t
        elif it.kind == "def":
            assert it.body is not None
            body = normalize_expr(it.body, gen)
            _check_expr_annots(body)
            defs.append(Def(it.name, it.params, body, None, it.span))

    for d in defs:
        d.sig = sigs.get(d.name)

    return Program(filename, text, defs, assumes, sigs, templates, measures, sources, gen)


def load_program(text: str, filename: str = "<input>") -> Program:
    return resolve(parse(text, filename), text, filename)
