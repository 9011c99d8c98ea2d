"""Constraint generation: shape inference, template types with fresh liquid
variables, syntax-directed subtyping/well-formedness constraints, and the
decomposition into base constraints."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .frontend.program import Def, Program, builtin_env
from .syntax import (And, BaseType, Cmp, CmpOp, Diagnostic, EApp, EBool, EIf,
                     EInt, ELam, ELet, EMatch, Env, EVar, Expr, GPred, Iff,
                     IntLit, Kappa, MeasureApp, Not, PVar, RBase, RFun, RType,
                     Shape, ShapeBase, ShapeFun, Sort, Span, SubC, TVar, TRUE,
                     WfC, rtype_subst, NO_SPAN)


# ---------------------------------------------------------------------------
# Shape inference (monomorphic unification)
# ---------------------------------------------------------------------------

class UVar:
    __slots__ = ("ref",)

    def __init__(self):
        self.ref = None


def _prune(s):
    while isinstance(s, UVar) and s.ref is not None:
        s = s.ref
    return s


def _unify(a, b, span: Span) -> None:
    a, b = _prune(a), _prune(b)
    if a is b:
        return
    if isinstance(a, UVar):
        a.ref = b
        return
    if isinstance(b, UVar):
        b.ref = a
        return
    if isinstance(a, ShapeBase) and isinstance(b, ShapeBase) and a.base is b.base:
        return
    if isinstance(a, ShapeFun) and isinstance(b, ShapeFun):
        _unify(a.arg, b.arg, span)
        _unify(a.res, b.res, span)
        return
    raise Diagnostic(f"shape mismatch: {_show(a)} vs {_show(b)}", span)


def _show(s) -> str:
    s = _prune(s)
    return "?" if isinstance(s, UVar) else str(s)


def _resolve(s, span: Span) -> Shape:
    s = _prune(s)
    if isinstance(s, UVar):
        raise Diagnostic("cannot determine the shape of this expression", span)
    if isinstance(s, ShapeFun):
        return ShapeFun(_resolve(s.arg, span), _resolve(s.res, span))
    return s


INT_S = ShapeBase(BaseType.INT)
BOOL_S = ShapeBase(BaseType.BOOL)
LIST_S = ShapeBase(BaseType.LIST)


def infer_shape(shapes: dict, e: Expr):
    if isinstance(e, EInt):
        return INT_S
    if isinstance(e, EBool):
        return BOOL_S
    if isinstance(e, EVar):
        s = shapes.get(e.name)
        if s is None:
            raise Diagnostic(f"unbound variable `{e.name}` (recursive definitions need a sig)", e.span)
        return s
    if isinstance(e, ELam):
        from .syntax import rtype_shape
        a = rtype_shape(e.arg_type) if e.arg_type is not None else UVar()
        inner = dict(shapes)
        inner[e.arg] = a
        return ShapeFun(a, infer_shape(inner, e.body))
    if isinstance(e, EApp):
        f = infer_shape(shapes, e.fn)
        a = shapes.get(e.arg)
        if a is None:
            raise Diagnostic(f"unbound variable `{e.arg}`", e.span)
        r = UVar()
        _unify(f, ShapeFun(a, r), e.span)
        return r
    if isinstance(e, EIf):
        g = shapes.get(e.guard)
        if g is None:
            raise Diagnostic(f"unbound variable `{e.guard}`", e.span)
        _unify(g, BOOL_S, e.span)
        s1 = infer_shape(shapes, e.then)
        s2 = infer_shape(shapes, e.els)
        _unify(s1, s2, e.span)
        return s1
    if isinstance(e, ELet):
        from .syntax import rtype_shape
        s1 = infer_shape(shapes, e.bound)
        if e.annot is not None:
            _unify(s1, rtype_shape(e.annot), e.span)
        inner = dict(shapes)
        inner[e.name] = s1
        return infer_shape(inner, e.body)
    if isinstance(e, EMatch):
        s = shapes.get(e.scrutinee)
        if s is None:
            raise Diagnostic(f"unbound variable `{e.scrutinee}`", e.span)
        _unify(s, LIST_S, e.span)
        s1 = infer_shape(shapes, e.nil_body)
        inner = dict(shapes)
        inner[e.head] = INT_S
        inner[e.tail] = LIST_S
        s2 = infer_shape(inner, e.cons_body)
        _unify(s1, s2, e.span)
        return s1
    raise AssertionError(e)


# ---------------------------------------------------------------------------
# Generation state
# ---------------------------------------------------------------------------

@dataclass
class KappaInfo:
    name: str
    base: Sort
    scope: tuple[tuple[str, Sort], ...]  # variables its qualifiers may mention


@dataclass
class GenOutput:
    constraints: list  # base constraints, in generation order
    templates: dict[str, RType]  # def name -> template type
    kappas: dict[str, KappaInfo]
    diagnostics: list[Diagnostic]


KAPPA_BINDER = "v!"


class Generator:
    def __init__(self, program: Program):
        self.program = program
        self.kappas: dict[str, KappaInfo] = {}
        self._kn = 0
        self._cn = 0
        self._xn = 0
        self.constraints: list = []

    # -- identifiers --

    def fresh_kappa(self, base: Sort, env: Env) -> GPred:
        self._kn += 1
        name = f"k{self._kn}"
        scope = tuple((n, t.base) for n, t in env.base_items())
        self.kappas[name] = KappaInfo(name, base, scope)
        return GPred(Kappa(name, ()))

    def fresh_name(self, base: str) -> str:
        self._xn += 1
        return f"{base}!g{self._xn}"

    def _cid(self) -> int:
        self._cn += 1
        return self._cn

    def sub(self, env: Env, lhs: RType, rhs: RType, span: Span, label: str) -> SubC:
        return SubC(self._cid(), env, lhs, rhs, span, label)

    def wf(self, env: Env, typ: RType, span: Span, label: str) -> WfC:
        return WfC(self._cid(), env, typ, span, label)

    # -- template types --

    def fresh_type(self, env: Env, shape: Shape) -> RType:
        if isinstance(shape, ShapeBase):
            return RBase(KAPPA_BINDER, shape.base, self.fresh_kappa(shape.base, env))
        assert isinstance(shape, ShapeFun)
        arg_t = self.fresh_type(env, shape.arg)
        x = self.fresh_name("x")
        env2 = env.bind(x, arg_t) if isinstance(arg_t, RBase) else env
        return RFun(x, arg_t, self.fresh_type(env2, shape.res))

    def fresh(self, env: Env, e: Expr) -> RType:
        shapes = {n: _rtype_shape(t) for n, t in env}
        shape = _resolve(infer_shape(shapes, e), e.span)
        return self.fresh_type(env, shape)

    # -- selfification --

    def selfify(self, name: str, t: RBase) -> RBase:
        v = KAPPA_BINDER
        if t.base is BaseType.INT:
            p = Cmp(CmpOp.EQ, TVar(v), TVar(name))
        elif t.base is BaseType.BOOL:
            p = Iff(PVar(v), PVar(name))
        else:
            parts = [Cmp(CmpOp.EQ, MeasureApp(m, TVar(v)), MeasureApp(m, TVar(name)))
                     for m in sorted(self.program.measures)]
            p = parts[0]
            for q in parts[1:]:
                p = And(p, q)
        return RBase(v, t.base, GPred(p))

    # -- the Gen clauses --

    def gen(self, env: Env, e: Expr) -> tuple[Optional[RType], list]:
        if isinstance(e, EVar):
            t = env.lookup(e.name)
            if t is None:
                raise Diagnostic(f"unbound variable `{e.name}` (recursive definitions need a sig)", e.span)
            if isinstance(t, RBase):
                return self.selfify(e.name, t), []
            return t, []

        if isinstance(e, EInt):
            return RBase(KAPPA_BINDER, BaseType.INT,
                         GPred(Cmp(CmpOp.EQ, TVar(KAPPA_BINDER), IntLit(e.value)))), []

        if isinstance(e, EBool):
            p = PVar(KAPPA_BINDER) if e.value else Not(PVar(KAPPA_BINDER))
            return RBase(KAPPA_BINDER, BaseType.BOOL, GPred(p)), []

        if isinstance(e, ELam):
            arrow = self.fresh(env, e)
            assert isinstance(arrow, RFun)
            arg_t = e.arg_type if e.arg_type is not None else arrow.arg_type
            env2 = env.bind(e.arg, arg_t)
            res_t = rtype_subst(arrow.res_type, {arrow.arg_name: TVar(e.arg)})
            t_body, c_body = self.gen(env2, e.body)
            cs = [self.wf(env, RFun(e.arg, arg_t, res_t), e.span, "lambda")]
            if t_body is not None:
                cs.append(self.sub(env2, t_body, res_t, e.body.span, "lambda-body"))
            return RFun(e.arg, arg_t, res_t), cs + c_body

        if isinstance(e, EApp):
            t_f, c1 = self.gen(env, e.fn)
            if not isinstance(t_f, RFun):
                raise Diagnostic("applying a non-function", e.span)
            t_y = env.lookup(e.arg)
            if t_y is None:
                raise Diagnostic(f"unbound variable `{e.arg}`", e.span)
            if isinstance(t_y, RBase):
                t_y = self.selfify(e.arg, t_y)
            arg_span = e.span
            c = self.sub(env, t_y, t_f.arg_type, arg_span, "app-arg")
            res = rtype_subst(t_f.res_type, {t_f.arg_name: TVar(e.arg)})
            return res, c1 + [c]

        if isinstance(e, EIf):
            gt = env.lookup(e.guard)
            if not isinstance(gt, RBase) or gt.base is not BaseType.BOOL:
                raise Diagnostic("conditional guard must be a boolean variable", e.span)
            t = self.fresh(env, e.then)
            env1 = env.bind(self.fresh_name("_g"),
                            RBase(KAPPA_BINDER, BaseType.BOOL, GPred(PVar(e.guard))))
            env2 = env.bind(self.fresh_name("_g"),
                            RBase(KAPPA_BINDER, BaseType.BOOL, GPred(Not(PVar(e.guard)))))
            t1, c1 = self.gen(env1, e.then)
            t2, c2 = self.gen(env2, e.els)
            cs = [self.wf(env, t, e.span, "if-join")]
            if t1 is not None:
                cs.append(self.sub(env1, t1, t, e.then.span, "if-then"))
            if t2 is not None:
                cs.append(self.sub(env2, t2, t, e.els.span, "if-else"))
            return t, c1 + c2 + cs

        if isinstance(e, ELet):
            t1, c1 = self.gen(env, e.bound)
            cs = list(c1)
            if e.annot is not None:
                cs.append(self.wf(env, e.annot, e.span, "let-annot"))
                if t1 is not None:
                    cs.append(self.sub(env, t1, e.annot, e.bound.span, "let-annot"))
                bound_t: RType = e.annot
            else:
                if t1 is None:
                    return None, cs
                bound_t = t1
            env2 = env.bind(e.name, bound_t)
            t = self.fresh(env, e)  # scoped to the outer env: x cannot escape
            t2, c2 = self.gen(env2, e.body)
            cs.append(self.wf(env, t, e.span, "let-res"))
            if t2 is not None:
                cs.append(self.sub(env2, t2, t, e.body.span, "let-body"))
            return t, cs + c2

        if isinstance(e, EMatch):
            st = env.lookup(e.scrutinee)
            if not isinstance(st, RBase) or st.base is not BaseType.LIST:
                raise Diagnostic("match scrutinee must be a list variable", e.span)
            t = self.fresh(env, e.nil_body)
            x = e.scrutinee
            env_nil = env.bind(self.fresh_name("_m"),
                               RBase(KAPPA_BINDER, BaseType.BOOL,
                                     GPred(Cmp(CmpOp.EQ, MeasureApp("len", TVar(x)), IntLit(0)))))
            env_cons = env.bind(e.head, RBase(KAPPA_BINDER, BaseType.INT, GPred(TRUE)))
            env_cons = env_cons.bind(e.tail, RBase(KAPPA_BINDER, BaseType.LIST, GPred(TRUE)))
            link = And(Cmp(CmpOp.EQ, MeasureApp("len", TVar(x)),
                           And_int := None or IntLit(0)), TRUE)  # placeholder, replaced below
            from .syntax import Arith, ArithOp
            link = And(
                Cmp(CmpOp.EQ, MeasureApp("len", TVar(x)),
                    Arith(ArithOp.ADD, IntLit(1), MeasureApp("len", TVar(e.tail)))),
                Cmp(CmpOp.LT, IntLit(0), MeasureApp("len", TVar(x))))
            env_cons = env_cons.bind(self.fresh_name("_m"),
                                     RBase(KAPPA_BINDER, BaseType.BOOL, GPred(link)))
            t1, c1 = self.gen(env_nil, e.nil_body)
            t2, c2 = self.gen(env_cons, e.cons_body)
            cs = [self.wf(env, t, e.span, "match-join")]
            if t1 is not None:
                cs.append(self.sub(env_nil, t1, t, e.nil_body.span, "match-nil"))
            if t2 is not None:
                cs.append(self.sub(env_cons, t2, t, e.cons_body.span, "match-cons"))
            return t, c1 + c2 + cs

        raise AssertionError(e)

    # -- split --

    def split(self, cs: list) -> list:
        out: list = []
        for c in cs:
            out.extend(self.split_one(c))
        return out

    def split_one(self, c) -> list:
        if isinstance(c, SubC):
            if isinstance(c.lhs, RBase) and isinstance(c.rhs, RBase):
                if c.lhs.base is not c.rhs.base:
                    raise Diagnostic(f"shape mismatch in subtyping: {c.lhs.base} vs {c.rhs.base}", c.span)
                return [c]
            if isinstance(c.lhs, RFun) and isinstance(c.rhs, RFun):
                # contravariant on arguments; result under the stronger argument
                arg = SubC(self._cid(), c.env, c.rhs.arg_type, c.lhs.arg_type, c.span, c.label)
                x = c.rhs.arg_name
                lres = rtype_subst(c.lhs.res_type, {c.lhs.arg_name: TVar(x)})
                env2 = c.env.bind(x, c.rhs.arg_type) if x not in c.env.names() else c.env
                res = SubC(self._cid(), env2, lres, c.rhs.res_type, c.span, c.label)
                return self.split_one(arg) + self.split_one(res)
            raise Diagnostic("shape mismatch in subtyping constraint", c.span)
        assert isinstance(c, WfC)
        if isinstance(c.typ, RBase):
            return [c]
        assert isinstance(c.typ, RFun)
        arg = WfC(self._cid(), c.env, c.typ.arg_type, c.span, c.label)
        env2 = (c.env.bind(c.typ.arg_name, c.typ.arg_type)
                if c.typ.arg_name not in c.env.names() else c.env)
        res = WfC(self._cid(), env2, c.typ.res_type, c.span, c.label)
        return self.split_one(arg) + self.split_one(res)

    def cons(self, env: Env, e: Expr) -> tuple[Optional[RType], list]:
        t, cs = self.gen(env, e)
        return t, self.split(cs)


def _rtype_shape(t: RType) -> Shape:
    from .syntax import rtype_shape
    return rtype_shape(t)


# ---------------------------------------------------------------------------
# Whole-program generation
# ---------------------------------------------------------------------------

def generate(program: Program) -> GenOutput:
    """Generate base constraints for every definition.

    All sigs and assumes are bound up front (recursion through sigs is fine);
    unsigned definitions contribute their template type to later ones.
    """
    g = Generator(program)
    env = builtin_env()
    diags: list[Diagnostic] = []
    for name, t in program.assumes.items():
        env = env.bind(name, t)
    for name, t in program.sigs.items():
        if name not in program.assumes:
            env = env.bind(name, t)
    templates: dict[str, RType] = {}

    for d in program.defs:
        try:
            if d.sig is not None:
                cs = [g.wf(env, d.sig, d.span, "sig")]
                env_local = env
                rest: RType = d.sig
                for p in d.params:
                    if not isinstance(rest, RFun):
                        raise Diagnostic(f"definition `{d.name}` has more parameters than its sig", d.span)
                    env_local = env_local.bind(p, rest.arg_type)
                    rest = rtype_subst(rest.res_type, {rest.arg_name: TVar(p)})
                t_body, c_body = g.gen(env_local, d.body)
                if t_body is not None:
                    cs.append(g.sub(env_local, t_body, rest, d.body.span, "body-result"))
                g.constraints.extend(g.split(cs + c_body))
                templates[d.name] = d.sig
            else:
                e: Expr = d.body
                for p in reversed(d.params):
                    e = ELam(d.span, p, None, e)
                t, cs = g.gen(env, e)
                g.constraints.extend(g.split(cs))
                if t is not None:
                    templates[d.name] = t
                    env = env.bind(d.name, t)
        except Diagnostic as diag:
            diags.append(diag)

    return GenOutput(g.constraints, templates, g.kappas, diags)
