"""Verification conditions and the SMT-backed checks.

A subtyping constraint embeds as `hyps => lhs => rhs`. Measure applications
are abstracted into per-variable integer symbols before any solver sees them
(`len xs` becomes the variable `len$xs`); this is exact here because the
predicate language has no list equality, so congruence never fires.
Multiplication of two non-literal operands is abstracted as an opaque symbol
to stay within linear arithmetic (conservative).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..syntax import (And, Arith, ArithOp, BaseType, Cmp, CmpOp, Diagnostic,
                      Env, GPred, Iff, Imp, IntLit, Kappa, MeasureApp, Not,
                      Or, PFalse, Pred, PTrue, PVar, RBase, RFun, Sort,
                      SortEnv, SubC, Term, TVar, WfC, is_true, pred_key,
                      pred_to_src, sort_of_pred, subst_pred)
from .session import SmtConfig, SmtSession

BINDER = "v!"


def measure_var(measure: str, var: str) -> str:
    return f"{measure}${var}"


def abstract_measures(t_or_p, acc: set[str] | None = None):
    """Replace every measure application `m x` by the integer variable `m$x`.
    Collects the introduced names into `acc` when given."""

    def go_t(t: Term) -> Term:
        if isinstance(t, Arith):
            return Arith(t.op, go_t(t.lhs), go_t(t.rhs))
        if isinstance(t, MeasureApp):
            arg = t.arg
            assert isinstance(arg, TVar), "measure argument must be a variable"
            name = measure_var(t.measure, arg.name)
            if acc is not None:
                acc.add(name)
            return TVar(name)
        return t

    def go(p: Pred) -> Pred:
        if isinstance(p, Not):
            return Not(go(p.arg))
        if isinstance(p, And):
            return And(go(p.lhs), go(p.rhs))
        if isinstance(p, Or):
            return Or(go(p.lhs), go(p.rhs))
        if isinstance(p, Iff):
            return Iff(go(p.lhs), go(p.rhs))
        if isinstance(p, Imp):
            return Imp(go(p.lhs), go(p.rhs))
        if isinstance(p, Cmp):
            return Cmp(p.op, go_t(p.lhs), go_t(p.rhs))
        if isinstance(p, Kappa):
            raise AssertionError("liquid variable reached the solver backend")
        return p

    return go(t_or_p)


@dataclass
class VC:
    """hyps => ante => cons, kappa-free and hole-free, with variable sorts."""

    hyps: list[Pred]
    ante: Pred
    cons: Pred
    sorts: dict[str, Sort]

    def key(self) -> str:
        """Canonical form: hypotheses sorted, variables renamed by first
        occurrence. Cached answers are keyed on this."""
        hyps = sorted(pred_key(p) for p in self.hyps)
        parts = hyps + [pred_key(self.ante), pred_key(self.cons)]
        rename: dict[str, str] = {}

        def tr(s: str) -> str:
            out = []
            i = 0
            while i < len(s):
                ch = s[i]
                if ch.isalpha() or ch == "_":
                    j = i
                    while j < len(s) and (s[j].isalnum() or s[j] in "_$!'"):
                        j += 1
                    word = s[i:j]
                    if word in ("true", "false", "not", "len"):
                        out.append(word)
                    else:
                        if word not in rename:
                            rename[word] = f"n{len(rename)}"
                        out.append(rename[word])
                    i = j
                else:
                    out.append(ch)
                    i += 1
            return "".join(out)

        return "|".join(tr(p) for p in parts)


def embed_sub(c: SubC, measures: Mapping[str, tuple[Sort, Sort]] | None = None) -> VC:
    """Build the VC of a base, kappa-free, hole-free subtyping constraint."""
    assert isinstance(c.lhs, RBase) and isinstance(c.rhs, RBase)
    assert c.lhs.base is c.rhs.base, f"shape mismatch in constraint {c.cid}"
    sorts: dict[str, Sort] = {}
    hyps: list[Pred] = []
    for x, t in c.env.base_items():
        sorts[x] = t.base
        ref = t.ref
        assert ref.hole is None, "hole reached VC embedding"
        p = subst_pred(ref.static, {t.binder: TVar(x)})
        if not is_true(p):
            hyps.append(p)
    sorts[BINDER] = c.lhs.base
    assert c.lhs.ref.hole is None and c.rhs.ref.hole is None
    ante = subst_pred(c.lhs.ref.static, {c.lhs.binder: TVar(BINDER)})
    cons = subst_pred(c.rhs.ref.static, {c.rhs.binder: TVar(BINDER)})
    vc = VC(hyps, ante, cons, sorts)
    return vc


def check_wf(c: WfC, measures: Mapping[str, tuple[Sort, Sort]] | None = None) -> bool:
    """Well-formedness of a base constraint is a sort check, no solver call.
    The unknown part of an imprecise refinement sorts trivially."""
    assert isinstance(c.typ, RBase)
    senv = c.env.sort_env(measures).with_var(c.typ.binder, c.typ.base)
    try:
        return sort_of_pred(c.typ.ref.static, senv) is BaseType.BOOL
    except Diagnostic:
        return False


# ---------------------------------------------------------------------------
# Lowering to SMT-LIB
# ---------------------------------------------------------------------------

class _Lowering:
    def __init__(self):
        self.int_vars: set[str] = set()
        self.bool_vars: set[str] = set()
        self.muls: dict[tuple[str, str], str] = {}

    def mul_name(self, a: str, b: str) -> str:
        key = (a, b) if a <= b else (b, a)
        if key not in self.muls:
            self.muls[key] = f"mul!{len(self.muls)}"
        return self.muls[key]

    def term(self, t: Term) -> str:
        if isinstance(t, IntLit):
            return str(t.value) if t.value >= 0 else f"(- {-t.value})"
        if isinstance(t, TVar):
            self.int_vars.add(t.name)
            return t.name
        if isinstance(t, Arith):
            a, b = self.term(t.lhs), self.term(t.rhs)
            if t.op is ArithOp.MUL and not isinstance(t.lhs, IntLit) and not isinstance(t.rhs, IntLit):
                name = self.mul_name(a, b)
                self.int_vars.add(name)
                return name
            op = {ArithOp.ADD: "+", ArithOp.SUB: "-", ArithOp.MUL: "*"}[t.op]
            return f"({op} {a} {b})"
        raise AssertionError(f"unlowered term {t}")

    def pred(self, p: Pred) -> str:
        if isinstance(p, PTrue):
            return "true"
        if isinstance(p, PFalse):
            return "false"
        if isinstance(p, PVar):
            self.bool_vars.add(p.name)
            return p.name
        if isinstance(p, Not):
            return f"(not {self.pred(p.arg)})"
        if isinstance(p, And):
            return f"(and {self.pred(p.lhs)} {self.pred(p.rhs)})"
        if isinstance(p, Or):
            return f"(or {self.pred(p.lhs)} {self.pred(p.rhs)})"
        if isinstance(p, Iff):
            return f"(= {self.pred(p.lhs)} {self.pred(p.rhs)})"
        if isinstance(p, Imp):
            return f"(=> {self.pred(p.lhs)} {self.pred(p.rhs)})"
        if isinstance(p, Cmp):
            op = {CmpOp.LT: "<", CmpOp.LE: "<=", CmpOp.GT: ">", CmpOp.GE: ">=",
                  CmpOp.EQ: "=", CmpOp.NE: "distinct"}[p.op]
            return f"({op} {self.term(p.lhs)} {self.term(p.rhs)})"
        raise AssertionError(f"unlowered predicate {p}")


def _declare(low: _Lowering, known_sorts: Mapping[str, Sort]) -> list[str]:
    decls = []
    for v in sorted(low.int_vars | low.bool_vars):
        if v in low.bool_vars and v not in low.int_vars:
            sort = "Bool"
        else:
            s = known_sorts.get(v)
            sort = "Bool" if s is BaseType.BOOL else "Int"
        decls.append(f"(declare-const {v} {sort})")
    return decls


# ---------------------------------------------------------------------------
# Backend facade
# ---------------------------------------------------------------------------

@dataclass
class BackendStats:
    valid_queries: int = 0
    local_queries: int = 0
    specific_queries: int = 0
    prefilter_hits: int = 0
    unknowns: int = 0


class SmtBackend:
    """Owns one solver session plus the finite-domain prefilter. Checks are
    conservative: `unknown` fails whatever property was being established."""

    def __init__(self, config: SmtConfig | None = None, cache: dict | None = None,
                 measures: Mapping[str, tuple[Sort, Sort]] | None = None,
                 prefilter: bool | None = None):
        self.session = SmtSession(config, cache)
        self.measures = dict(measures) if measures else {"len": (BaseType.LIST, BaseType.INT)}
        self.stats = BackendStats()
        if prefilter is None:
            from . import fasteval
            prefilter = fasteval.COMPILED
        self.prefilter = prefilter

    def close(self) -> None:
        self.session.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- validity --

    def check_vc(self, vc: VC) -> str:
        """'valid' | 'invalid' | 'unknown'."""
        self.stats.valid_queries += 1
        key = "V|" + vc.key()
        cached = self.session.cache.get(key)
        if cached is not None:
            self.session.cache_hits += 1
            return cached
        if self.prefilter:
            from . import fasteval
            counter = fasteval.vc_countermodel(vc)
            if counter is not None:
                self.stats.prefilter_hits += 1
                self.session.cache[key] = "invalid"
                return "invalid"
        low = _Lowering()
        hyps = [low.pred(abstract_measures(h)) for h in vc.hyps]
        ante = low.pred(abstract_measures(vc.ante))
        cons = low.pred(abstract_measures(vc.cons))
        lines = ["(push 1)"]
        lines += _declare(low, vc.sorts)
        for h in hyps:
            lines.append(f"(assert {h})")
        lines.append(f"(assert {ante})")
        lines.append(f"(assert (not {cons}))")
        lines.append("(check-sat)")
        lines.append("(pop 1)")
        res = self.session.raw_check("\n".join(lines) + "\n")
        out = {"unsat": "valid", "sat": "invalid"}.get(res, "unknown")
        if out == "unknown":
            self.stats.unknowns += 1
        else:
            self.session.cache[key] = out
        return out

    def valid(self, vc: VC) -> bool:
        return self.check_vc(vc) == "valid"

    def sub_valid(self, c: SubC) -> bool:
        return self.valid(embed_sub(c, self.measures))

    # -- locality --

    def is_local(self, binder: str, base: Sort, p: Pred, scope_sorts: Mapping[str, Sort]) -> bool:
        """Does `p` admit a witness for its binder under every closing
        substitution? Measure applications over the binder become fresh
        existentials; over other variables, fresh universals."""
        self.stats.local_queries += 1
        key = f"L|{binder}:{base.value}|" + pred_key(p) + "|" + ",".join(
            f"{k}:{v.value}" for k, v in sorted(scope_sorts.items()))
        cached = self.session.cache.get(key)
        if cached is not None:
            self.session.cache_hits += 1
            return cached == "local"

        names: set[str] = set()
        q = abstract_measures(p, names)
        exist_vars: list[tuple[str, str]] = []
        univ_vars: list[tuple[str, str]] = []
        if base in (BaseType.INT, BaseType.BOOL):
            exist_vars.append((binder, "Int" if base is BaseType.INT else "Bool"))
        for n in sorted(names):
            m, _, owner = n.partition("$")
            if owner == binder:
                exist_vars.append((n, "Int"))
            else:
                univ_vars.append((n, "Int"))
        from ..syntax import pred_free_vars
        for v in sorted(pred_free_vars(q)):
            if v == binder or any(v == e for e, _ in exist_vars) or any(v == u for u, _ in univ_vars):
                continue
            s = scope_sorts.get(v, BaseType.INT)
            if s is BaseType.LIST:
                continue  # bare list variables cannot occur in a lowered predicate
            univ_vars.append((v, "Bool" if s is BaseType.BOOL else "Int"))

        low = _Lowering()
        body = low.pred(q)
        if exist_vars:
            ex = " ".join(f"({n} {s})" for n, s in exist_vars)
            body = f"(exists ({ex}) {body})"
        if univ_vars:
            un = " ".join(f"({n} {s})" for n, s in univ_vars)
            body = f"(forall ({un}) {body})"
        lines = ["(push 1)", f"(assert (not {body}))", "(check-sat)", "(pop 1)"]
        res = self.session.raw_check("\n".join(lines) + "\n")
        if res == "unknown":
            self.stats.unknowns += 1
            return False  # conservative rejection
        local = res == "unsat"
        self.session.cache[key] = "local" if local else "nonlocal"
        return local

    # -- specificity --

    def is_specific(self, p_strong: Pred, p_weak: Pred, sorts: Mapping[str, Sort]) -> bool:
        """p_strong implies p_weak, free variables universal."""
        self.stats.specific_queries += 1
        if is_true(p_weak):
            return True
        key = "S|" + pred_key(p_strong) + "=>" + pred_key(p_weak)
        cached = self.session.cache.get(key)
        if cached is not None:
            self.session.cache_hits += 1
            return cached == "yes"
        low = _Lowering()
        a = low.pred(abstract_measures(p_strong))
        b = low.pred(abstract_measures(p_weak))
        lines = ["(push 1)"]
        lines += _declare(low, sorts)
        lines.append(f"(assert {a})")
        lines.append(f"(assert (not {b}))")
        lines.append("(check-sat)")
        lines.append("(pop 1)")
        res = self.session.raw_check("\n".join(lines) + "\n")
        if res == "unknown":
            self.stats.unknowns += 1
            return False
        out = res == "unsat"
        self.session.cache[key] = "yes" if out else "no"
        return out
