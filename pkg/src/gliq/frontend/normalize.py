"""ANF normalization and alpha-renaming of surface expressions.

Every application argument and conditional guard becomes a variable (fresh
lets are inserted, inheriting the span of the expression they name), list
literals desugar to `cons`/`nil` chains, and all binders are made unique.
"""

from __future__ import annotations

from ..syntax import (EApp, EBool, EIf, EInt, ELam, ELet, EMatch, EVar, Expr,
                      RType, Span)
from .parser import (SApp, SBool, SExpr, SIf, SInt, SLam, SLet, SList, SMatch,
                     SVar)


class NameGen:
    def __init__(self):
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}!{self.counter}"


def display_name(name: str) -> str:
    return name.split("!", 1)[0]


def normalize_expr(e: SExpr, gen: NameGen) -> Expr:
    return _flatten(_rename(_anf(e, gen), {}, gen))


def _desugar_list(e: SList) -> SExpr:
    out: SExpr = SVar(e.span, "nil")
    for item in reversed(e.items):
        out = SApp(e.span, SApp(e.span, SVar(e.span, "cons"), item), out)
    return out


def _anf(e: SExpr, gen: NameGen) -> Expr:
    if isinstance(e, SInt):
        return EInt(e.span, e.value)
    if isinstance(e, SBool):
        return EBool(e.span, e.value)
    if isinstance(e, SVar):
        return EVar(e.span, e.name)
    if isinstance(e, SList):
        return _anf(_desugar_list(e), gen)
    if isinstance(e, SLam):
        body = _anf(e.body, gen)
        for p in reversed(e.params):
            body = ELam(e.span, p, None, body)
        return body
    if isinstance(e, SLet):
        return ELet(e.span, e.name, e.annot, _anf(e.bound, gen), _anf(e.body, gen))
    if isinstance(e, SIf):
        guard, wrap = _atomize(e.guard, gen)
        return wrap(EIf(e.span, guard, _anf(e.then, gen), _anf(e.els, gen)))
    if isinstance(e, SMatch):
        scrut, wrap = _atomize(e.scrutinee, gen)
        return wrap(EMatch(e.span, scrut, _anf(e.nil_body, gen), e.head, e.tail,
                           _anf(e.cons_body, gen)))
    if isinstance(e, SApp):
        # Flatten the application spine so argument bindings lift above the
        # whole application rather than nesting in function position.
        spine: list[SApp] = []
        cur: SExpr = e
        while isinstance(cur, SApp):
            spine.append(cur)
            cur = cur.fn
        spine.reverse()
        out: Expr = _anf(cur, gen)
        wraps = []
        for node in spine:
            arg, wrap = _atomize(node.arg, gen)
            wraps.append(wrap)
            out = EApp(node.span, out, arg)
        for wrap in reversed(wraps):
            out = wrap(out)
        return out
    raise AssertionError(e)


def _atomize(e: SExpr, gen: NameGen):
    """Return (variable name, wrapper inserting the binding if needed)."""
    if isinstance(e, SVar):
        return e.name, lambda body: body
    core = _anf(e, gen)
    name = gen.fresh("t")

    def wrap(body: Expr) -> Expr:
        return ELet(e.span, name, None, core, body)

    return name, wrap


def _rename(e: Expr, env: dict[str, str], gen: NameGen) -> Expr:
    if isinstance(e, (EInt, EBool)):
        return e
    if isinstance(e, EVar):
        return EVar(e.span, env.get(e.name, e.name))
    if isinstance(e, ELam):
        fresh = gen.fresh(e.arg)
        inner = dict(env)
        inner[e.arg] = fresh
        return ELam(e.span, fresh, e.arg_type, _rename(e.body, inner, gen))
    if isinstance(e, EApp):
        return EApp(e.span, _rename(e.fn, env, gen), env.get(e.arg, e.arg))
    if isinstance(e, EIf):
        return EIf(e.span, env.get(e.guard, e.guard), _rename(e.then, env, gen),
                   _rename(e.els, env, gen))
    if isinstance(e, ELet):
        bound = _rename(e.bound, env, gen)
        fresh = gen.fresh(e.name)
        inner = dict(env)
        inner[e.name] = fresh
        return ELet(e.span, fresh, e.annot, bound, _rename(e.body, inner, gen))
    if isinstance(e, EMatch):
        scrut = env.get(e.scrutinee, e.scrutinee)
        h = gen.fresh(e.head)
        t = gen.fresh(e.tail)
        inner = dict(env)
        inner[e.head] = h
        inner[e.tail] = t
        return EMatch(e.span, scrut, _rename(e.nil_body, env, gen), h, t,
                      _rename(e.cons_body, inner, gen))
    raise AssertionError(e)


def _flatten(e: Expr) -> Expr:
    """Hoist let-chains out of let-bound positions (safe: binders unique)."""
    if isinstance(e, ELet):
        bound = _flatten(e.bound)
        body = _flatten(e.body)
        chain = []
        while isinstance(bound, ELet):
            chain.append(bound)
            bound = bound.body
        out = ELet(e.span, e.name, e.annot, bound, body)
        for link in reversed(chain):
            out = ELet(link.span, link.name, link.annot, link.bound, out)
        return out
    if isinstance(e, ELam):
        return ELam(e.span, e.arg, e.arg_type, _flatten(e.body))
    if isinstance(e, EIf):
        return EIf(e.span, e.guard, _flatten(e.then), _flatten(e.els))
    if isinstance(e, EMatch):
        return EMatch(e.span, e.scrutinee, _flatten(e.nil_body), e.head, e.tail,
                      _flatten(e.cons_body))
    if isinstance(e, EApp):
        return EApp(e.span, _flatten(e.fn), e.arg)
    return e


def alpha_equal(a: Expr, b: Expr, env: dict[str, str] | None = None) -> bool:
    """Structural equality up to consistent binder renaming (spans ignored)."""
    env = env or {}
    if type(a) is not type(b):
        return False
    if isinstance(a, EInt):
        return a.value == b.value
    if isinstance(a, EBool):
        return a.value == b.value
    if isinstance(a, EVar):
        return env.get(a.name, a.name) == b.name
    if isinstance(a, ELam):
        return alpha_equal(a.body, b.body, {**env, a.arg: b.arg})
    if isinstance(a, EApp):
        return alpha_equal(a.fn, b.fn, env) and env.get(a.arg, a.arg) == b.arg
    if isinstance(a, EIf):
        return (env.get(a.guard, a.guard) == b.guard
                and alpha_equal(a.then, b.then, env)
                and alpha_equal(a.els, b.els, env))
    if isinstance(a, ELet):
        return (alpha_equal(a.bound, b.bound, env)
                and alpha_equal(a.body, b.body, {**env, a.name: b.name}))
    if isinstance(a, EMatch):
        return (env.get(a.scrutinee, a.scrutinee) == b.scrutinee
                and alpha_equal(a.nil_body, b.nil_body, env)
                and alpha_equal(a.cons_body, b.cons_body,
                                {**env, a.head: b.head, a.tail: b.tail}))
    raise AssertionError(a)
