"""Core vocabulary: sorts, predicate formulas, refinement types, environments,
constraints, and solutions.

Everything here is an immutable value; construction is the only mutation point,
so instances are safe to share across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Union


class GliqError(Exception):
    """Base class for user-facing failures."""


@dataclass(frozen=True)
class Span:
    """Half-open source range: 1-based lines/cols, start inclusive, end exclusive."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        assert (self.start_line, self.start_col) <= (self.end_line, self.end_col)

    def to_json(self) -> dict:
        return {
            "file": self.file,
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }

    @staticmethod
    def from_json(d: dict) -> "Span":
        return Span(d["file"], d["start_line"], d["start_col"], d["end_line"], d["end_col"])


NO_SPAN = Span("<builtin>", 1, 1, 1, 1)


@dataclass(frozen=True)
class Diagnostic(GliqError):
    message: str
    span: Span = NO_SPAN
    severity: str = "error"

    def __str__(self) -> str:
        s = self.span
        return f"{s.file}:{s.start_line}:{s.start_col}: {self.severity}: {self.message}"


class BaseType(Enum):
    INT = "Int"
    BOOL = "Bool"
    LIST = "List Int"

    def __str__(self) -> str:
        return self.value


# Sorts coincide with base types in this language.
Sort = BaseType


# ---------------------------------------------------------------------------
# Terms and predicates
# ---------------------------------------------------------------------------

class CmpOp(Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    EQ = "="
    NE = "/="

    def flip(self) -> "CmpOp":
        return {
            CmpOp.LT: CmpOp.GT,
            CmpOp.LE: CmpOp.GE,
            CmpOp.GT: CmpOp.LT,
            CmpOp.GE: CmpOp.LE,
            CmpOp.EQ: CmpOp.EQ,
            CmpOp.NE: CmpOp.NE,
        }[self]


class ArithOp(Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class TVar(Term):
    name: str


@dataclass(frozen=True)
class Arith(Term):
    op: ArithOp
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class MeasureApp(Term):
    """Uninterpreted measure over a list-sorted term, e.g. ``len xs``."""

    measure: str
    arg: Term


@dataclass(frozen=True)
class Pred:
    pass


@dataclass(frozen=True)
class PTrue(Pred):
    pass


@dataclass(frozen=True)
class PFalse(Pred):
    pass


@dataclass(frozen=True)
class PVar(Pred):
    """A boolean-sorted program variable used as an atom."""

    name: str


@dataclass(frozen=True)
class Not(Pred):
    arg: Pred


@dataclass(frozen=True)
class And(Pred):
    lhs: Pred
    rhs: Pred


@dataclass(frozen=True)
class Or(Pred):
    lhs: Pred
    rhs: Pred


@dataclass(frozen=True)
class Iff(Pred):
    lhs: Pred
    rhs: Pred


@dataclass(frozen=True)
class Imp(Pred):
    lhs: Pred
    rhs: Pred


@dataclass(frozen=True)
class Cmp(Pred):
    op: CmpOp
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Kappa(Pred):
    """A liquid variable with its pending substitution, applied lazily when a
    solution replaces the variable by a qualifier conjunction."""

    name: str
    subst: tuple[tuple[str, Term], ...] = ()

    def subst_map(self) -> dict[str, Term]:
        return dict(self.subst)


TRUE = PTrue()
FALSE = PFalse()


def conj(preds: list[Pred]) -> Pred:
    """Right-nested conjunction; the empty list is ``true``."""
    preds = [p for p in preds if not isinstance(p, PTrue)]
    if not preds:
        return TRUE
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = And(p, out)
    return out


def conjuncts(p: Pred) -> list[Pred]:
    if isinstance(p, And):
        return conjuncts(p.lhs) + conjuncts(p.rhs)
    if isinstance(p, PTrue):
        return []
    return [p]


def is_true(p: Pred) -> bool:
    return isinstance(p, PTrue)


# --- traversal helpers ------------------------------------------------------

def term_free_vars(t: Term, acc: set[str]) -> None:
    if isinstance(t, TVar):
        acc.add(t.name)
    elif isinstance(t, Arith):
        term_free_vars(t.lhs, acc)
        term_free_vars(t.rhs, acc)
    elif isinstance(t, MeasureApp):
        term_free_vars(t.arg, acc)


def pred_free_vars(p: Pred) -> set[str]:
    acc: set[str] = set()
    _pred_free_vars(p, acc)
    return acc


def _pred_free_vars(p: Pred, acc: set[str]) -> None:
    if isinstance(p, PVar):
        acc.add(p.name)
    elif isinstance(p, Not):
        _pred_free_vars(p.arg, acc)
    elif isinstance(p, (And, Or, Iff, Imp)):
        _pred_free_vars(p.lhs, acc)
        _pred_free_vars(p.rhs, acc)
    elif isinstance(p, Cmp):
        term_free_vars(p.lhs, acc)
        term_free_vars(p.rhs, acc)
    elif isinstance(p, Kappa):
        # A pending substitution mentions the variables in its range.
        for _, t in p.subst:
            term_free_vars(t, acc)


def pred_kappas(p: Pred) -> set[str]:
    acc: set[str] = set()
    _pred_kappas(p, acc)
    return acc


def _pred_kappas(p: Pred, acc: set[str]) -> None:
    if isinstance(p, Kappa):
        acc.add(p.name)
    elif isinstance(p, Not):
        _pred_kappas(p.arg, acc)
    elif isinstance(p, (And, Or, Iff, Imp)):
        _pred_kappas(p.lhs, acc)
        _pred_kappas(p.rhs, acc)


def pred_measure_apps(p: Pred) -> list[MeasureApp]:
    out: list[MeasureApp] = []

    def go_t(t: Term) -> None:
        if isinstance(t, Arith):
            go_t(t.lhs)
            go_t(t.rhs)
        elif isinstance(t, MeasureApp):
            out.append(t)
            go_t(t.arg)

    def go(p: Pred) -> None:
        if isinstance(p, Not):
            go(p.arg)
        elif isinstance(p, (And, Or, Iff, Imp)):
            go(p.lhs)
            go(p.rhs)
        elif isinstance(p, Cmp):
            go_t(p.lhs)
            go_t(p.rhs)

    go(p)
    return out


# --- substitution -----------------------------------------------------------

Substitution = Mapping[str, Term]


def subst_term(t: Term, theta: Substitution) -> Term:
    if isinstance(t, TVar):
        return theta.get(t.name, t)
    if isinstance(t, Arith):
        return Arith(t.op, subst_term(t.lhs, theta), subst_term(t.rhs, theta))
    if isinstance(t, MeasureApp):
        arg = subst_term(t.arg, theta)
        if not isinstance(arg, TVar):
            raise Diagnostic(f"measure `{t.measure}` applied to a non-variable after substitution")
        return MeasureApp(t.measure, arg)
    return t


def subst_pred(p: Pred, theta: Substitution) -> Pred:
    """Capture-avoiding simultaneous substitution; pending substitutions on
    liquid variables compose."""
    if isinstance(p, PVar):
        t = theta.get(p.name)
        if t is None:
            return p
        if isinstance(t, TVar):
            return PVar(t.name)
        raise Diagnostic(f"cannot substitute an arithmetic term for boolean variable `{p.name}`")
    if isinstance(p, Not):
        return Not(subst_pred(p.arg, theta))
    if isinstance(p, And):
        return And(subst_pred(p.lhs, theta), subst_pred(p.rhs, theta))
    if isinstance(p, Or):
        return Or(subst_pred(p.lhs, theta), subst_pred(p.rhs, theta))
    if isinstance(p, Iff):
        return Iff(subst_pred(p.lhs, theta), subst_pred(p.rhs, theta))
    if isinstance(p, Imp):
        return Imp(subst_pred(p.lhs, theta), subst_pred(p.rhs, theta))
    if isinstance(p, Cmp):
        return Cmp(p.op, subst_term(p.lhs, theta), subst_term(p.rhs, theta))
    if isinstance(p, Kappa):
        return Kappa(p.name, compose_subst(p.subst, theta))
    return p


def compose_subst(pending: tuple[tuple[str, Term], ...], theta: Substitution) -> tuple[tuple[str, Term], ...]:
    """Compose a pending substitution with a newly applied one.

    Applying theta after the pending map means mapping theta over the pending
    range and recording theta's own entries for variables the pending map does
    not mention.
    """
    out: list[tuple[str, Term]] = []
    seen: set[str] = set()
    for v, t in pending:
        out.append((v, subst_term(t, theta)))
        seen.add(v)
    for v, t in theta.items():
        if v not in seen:
            out.append((v, t))
    return tuple(out)


# --- printing ---------------------------------------------------------------

def term_to_src(t: Term) -> str:
    if isinstance(t, IntLit):
        return str(t.value) if t.value >= 0 else f"(0 - {-t.value})"
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, Arith):
        return f"({term_to_src(t.lhs)} {t.op.value} {term_to_src(t.rhs)})"
    if isinstance(t, MeasureApp):
        return f"{t.measure} {term_to_src(t.arg)}"
    raise AssertionError(t)


def pred_to_src(p: Pred) -> str:
    """Render in the surface predicate grammar (re-parseable)."""
    if isinstance(p, PTrue):
        return "true"
    if isinstance(p, PFalse):
        return "false"
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, Not):
        return f"not ({pred_to_src(p.arg)})"
    if isinstance(p, And):
        return f"({pred_to_src(p.lhs)} && {pred_to_src(p.rhs)})"
    if isinstance(p, Or):
        return f"({pred_to_src(p.lhs)} || {pred_to_src(p.rhs)})"
    if isinstance(p, Iff):
        return f"({pred_to_src(p.lhs)} <=> {pred_to_src(p.rhs)})"
    if isinstance(p, Imp):
        return f"({pred_to_src(p.lhs)} => {pred_to_src(p.rhs)})"
    if isinstance(p, Cmp):
        op = "==" if p.op is CmpOp.EQ else p.op.value
        return f"{term_to_src(p.lhs)} {op} {term_to_src(p.rhs)}"
    if isinstance(p, Kappa):
        th = ", ".join(f"{v} := {term_to_src(t)}" for v, t in p.subst)
        return f"${p.name}[{th}]"
    raise AssertionError(p)


def pred_key(p: Pred) -> str:
    """Canonical structural key used for deduplication and caching."""
    return pred_to_src(p)


# ---------------------------------------------------------------------------
# Sort checking
# ---------------------------------------------------------------------------

class SortEnv:
    """Immutable-ish name -> sort map with the measure signature table."""

    def __init__(self, vars: Mapping[str, Sort], measures: Mapping[str, tuple[Sort, Sort]] | None = None):
        self.vars = dict(vars)
        self.measures = dict(measures) if measures else {"len": (BaseType.LIST, BaseType.INT)}

    def with_var(self, name: str, sort: Sort) -> "SortEnv":
        d = dict(self.vars)
        d[name] = sort
        return SortEnv(d, self.measures)


def sort_of_term(t: Term, env: SortEnv) -> Sort:
    if isinstance(t, IntLit):
        return BaseType.INT
    if isinstance(t, TVar):
        s = env.vars.get(t.name)
        if s is None:
            raise Diagnostic(f"unbound variable `{t.name}` in refinement")
        return s
    if isinstance(t, Arith):
        for side in (t.lhs, t.rhs):
            if sort_of_term(side, env) is not BaseType.INT:
                raise Diagnostic(f"arithmetic over a non-Int operand in `{term_to_src(t)}`")
        return BaseType.INT
    if isinstance(t, MeasureApp):
        sig = env.measures.get(t.measure)
        if sig is None:
            raise Diagnostic(f"unknown measure `{t.measure}`")
        if sort_of_term(t.arg, env) is not sig[0]:
            raise Diagnostic(f"measure `{t.measure}` applied to a {sort_of_term(t.arg, env)} argument")
        return sig[1]
    raise AssertionError(t)


def sort_of_pred(p: Pred, env: SortEnv) -> Sort:
    """Returns BOOL or raises; comparisons are Int-sorted only (list values are
    observed exclusively through measures, boolean equality is `<=>`)."""
    if isinstance(p, (PTrue, PFalse)):
        return BaseType.BOOL
    if isinstance(p, PVar):
        s = env.vars.get(p.name)
        if s is None:
            raise Diagnostic(f"unbound variable `{p.name}` in refinement")
        if s is not BaseType.BOOL:
            raise Diagnostic(f"variable `{p.name}` of sort {s} used as a boolean atom")
        return BaseType.BOOL
    if isinstance(p, Not):
        sort_of_pred(p.arg, env)
        return BaseType.BOOL
    if isinstance(p, (And, Or, Iff, Imp)):
        sort_of_pred(p.lhs, env)
        sort_of_pred(p.rhs, env)
        return BaseType.BOOL
    if isinstance(p, Cmp):
        for side in (p.lhs, p.rhs):
            if sort_of_term(side, env) is not BaseType.INT:
                raise Diagnostic(f"comparison over a non-Int operand in `{pred_to_src(p)}`")
        return BaseType.BOOL
    if isinstance(p, Kappa):
        return BaseType.BOOL
    raise AssertionError(p)


def pred_well_sorted(p: Pred, env: SortEnv) -> bool:
    try:
        return sort_of_pred(p, env) is BaseType.BOOL
    except Diagnostic:
        return False


# ---------------------------------------------------------------------------
# Gradual predicates and refinement types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HoleRef:
    """One use of a source `?`, with the substitution accumulated on the way
    from its declaration site into a constraint."""

    source_id: int
    subst: tuple[tuple[str, Term], ...] = ()


@dataclass(frozen=True)
class GPred:
    """A refinement: precise when `hole` is absent, imprecise `p && ?` when
    present."""

    static: Pred
    hole: Optional[HoleRef] = None

    @property
    def imprecise(self) -> bool:
        return self.hole is not None

    def subst(self, theta: Substitution) -> "GPred":
        hole = self.hole
        if hole is not None:
            hole = HoleRef(hole.source_id, compose_subst(hole.subst, theta))
        return GPred(subst_pred(self.static, theta), hole)

    def to_src(self) -> str:
        if self.hole is None:
            return pred_to_src(self.static)
        if is_true(self.static):
            return "?"
        return f"{pred_to_src(self.static)} && ?"


GTRUE = GPred(TRUE)


@dataclass(frozen=True)
class RType:
    pass


@dataclass(frozen=True)
class RBase(RType):
    binder: str
    base: BaseType
    ref: GPred

    def subst(self, theta: Substitution) -> "RBase":
        # The binder shadows any outer variable of the same name.
        theta = {k: v for k, v in theta.items() if k != self.binder}
        return RBase(self.binder, self.base, self.ref.subst(theta))

    def to_src(self) -> str:
        if self.ref.hole is None and is_true(self.ref.static):
            return str(self.base)
        return f"{{{self.binder}:{self.base} | {self.ref.to_src()}}}"


@dataclass(frozen=True)
class RFun(RType):
    arg_name: str
    arg_type: RType
    res_type: RType

    def subst(self, theta: Substitution) -> "RFun":
        arg = rtype_subst(self.arg_type, theta)
        theta2 = {k: v for k, v in theta.items() if k != self.arg_name}
        return RFun(self.arg_name, arg, rtype_subst(self.res_type, theta2))

    def to_src(self) -> str:
        a = self.arg_type.to_src() if isinstance(self.arg_type, RBase) else f"({self.arg_type.to_src()})"
        return f"{self.arg_name}:{a} -> {self.res_type.to_src()}"


def rtype_subst(t: RType, theta: Substitution) -> RType:
    return t.subst(theta)  # type: ignore[union-attr]


def rtype_kappas(t: RType) -> set[str]:
    if isinstance(t, RBase):
        return pred_kappas(t.ref.static)
    assert isinstance(t, RFun)
    return rtype_kappas(t.arg_type) | rtype_kappas(t.res_type)


def rtype_holes(t: RType) -> list[HoleRef]:
    if isinstance(t, RBase):
        return [t.ref.hole] if t.ref.hole is not None else []
    assert isinstance(t, RFun)
    return rtype_holes(t.arg_type) + rtype_holes(t.res_type)


def rtype_shape(t: RType) -> "Shape":
    if isinstance(t, RBase):
        return ShapeBase(t.base)
    assert isinstance(t, RFun)
    return ShapeFun(rtype_shape(t.arg_type), rtype_shape(t.res_type))


@dataclass(frozen=True)
class Shape:
    pass


@dataclass(frozen=True)
class ShapeBase(Shape):
    base: BaseType

    def __str__(self) -> str:
        return str(self.base)


@dataclass(frozen=True)
class ShapeFun(Shape):
    arg: Shape
    res: Shape

    def __str__(self) -> str:
        a = f"({self.arg})" if isinstance(self.arg, ShapeFun) else str(self.arg)
        return f"{a} -> {self.res}"


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Env:
    """Ordered binding sequence; order matters for hypothesis embedding."""

    bindings: tuple[tuple[str, RType], ...] = ()

    def bind(self, name: str, typ: RType) -> "Env":
        assert name not in {n for n, _ in self.bindings}, f"duplicate binder {name}"
        return Env(self.bindings + ((name, typ),))

    def lookup(self, name: str) -> Optional[RType]:
        for n, t in reversed(self.bindings):
            if n == name:
                return t
        return None

    def names(self) -> list[str]:
        return [n for n, _ in self.bindings]

    def base_items(self) -> Iterator[tuple[str, RBase]]:
        for n, t in self.bindings:
            if isinstance(t, RBase):
                yield n, t

    def sort_env(self, measures: Mapping[str, tuple[Sort, Sort]] | None = None) -> SortEnv:
        return SortEnv({n: t.base for n, t in self.base_items()}, measures)

    def __iter__(self):
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)


# ---------------------------------------------------------------------------
# Constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    pass


@dataclass(frozen=True)
class SubC(Constraint):
    cid: int
    env: Env
    lhs: RType
    rhs: RType
    span: Span
    label: str = ""

    def is_base(self) -> bool:
        return isinstance(self.lhs, RBase) and isinstance(self.rhs, RBase)


@dataclass(frozen=True)
class WfC(Constraint):
    cid: int
    env: Env
    typ: RType
    span: Span
    label: str = ""

    def is_base(self) -> bool:
        return isinstance(self.typ, RBase)


def constraint_kappas(c: Constraint) -> set[str]:
    acc: set[str] = set()
    if isinstance(c, SubC):
        acc |= rtype_kappas(c.lhs) | rtype_kappas(c.rhs)
        env = c.env
    else:
        assert isinstance(c, WfC)
        acc |= rtype_kappas(c.typ)
        env = c.env
    for _, t in env:
        acc |= rtype_kappas(t)
    return acc


def constraint_holes(c: Constraint) -> list[HoleRef]:
    """All hole uses in the constraint, environment first, then sides."""
    out: list[HoleRef] = []
    env = c.env
    for _, t in env:
        out.extend(rtype_holes(t))
    if isinstance(c, SubC):
        out.extend(rtype_holes(c.lhs))
        out.extend(rtype_holes(c.rhs))
    else:
        assert isinstance(c, WfC)
        out.extend(rtype_holes(c.typ))
    return out


def constraint_hole_sources(c: Constraint) -> list[int]:
    """Distinct source ids in first-use order."""
    seen: list[int] = []
    for h in constraint_holes(c):
        if h.source_id not in seen:
            seen.append(h.source_id)
    return seen


# ---------------------------------------------------------------------------
# Solutions
# ---------------------------------------------------------------------------

@dataclass
class Solution:
    """Total map from liquid variables to sets of instantiated qualifiers.

    The mapping stores qualifiers as ordered tuples (deterministic iteration);
    an empty tuple denotes `true`.
    """

    mapping: dict[str, tuple[Pred, ...]] = field(default_factory=dict)

    def copy(self) -> "Solution":
        return Solution(dict(self.mapping))

    def get(self, kappa: str) -> tuple[Pred, ...]:
        if kappa not in self.mapping:
            raise KeyError(f"liquid variable {kappa} missing from solution (generation bug)")
        return self.mapping[kappa]

    def set(self, kappa: str, quals: tuple[Pred, ...]) -> None:
        self.mapping[kappa] = quals

    def restrict(self, kappas: set[str]) -> "Solution":
        return Solution({k: v for k, v in self.mapping.items() if k in kappas})


def apply_solution_pred(sol: Solution, p: Pred) -> Pred:
    """Replace each kappa by the pending-substituted conjunction of its set."""
    if isinstance(p, Kappa):
        quals = sol.get(p.name)
        theta = p.subst_map()
        return conj([subst_pred(q, theta) for q in quals])
    if isinstance(p, Not):
        return Not(apply_solution_pred(sol, p.arg))
    if isinstance(p, And):
        return And(apply_solution_pred(sol, p.lhs), apply_solution_pred(sol, p.rhs))
    if isinstance(p, Or):
        return Or(apply_solution_pred(sol, p.lhs), apply_solution_pred(sol, p.rhs))
    if isinstance(p, Iff):
        return Iff(apply_solution_pred(sol, p.lhs), apply_solution_pred(sol, p.rhs))
    if isinstance(p, Imp):
        return Imp(apply_solution_pred(sol, p.lhs), apply_solution_pred(sol, p.rhs))
    return p


def apply_solution_gpred(sol: Solution, g: GPred) -> GPred:
    # `?` holes are preserved untouched.
    return GPred(apply_solution_pred(sol, g.static), g.hole)


def apply_solution_rtype(sol: Solution, t: RType) -> RType:
    if isinstance(t, RBase):
        return RBase(t.binder, t.base, apply_solution_gpred(sol, t.ref))
    assert isinstance(t, RFun)
    return RFun(t.arg_name, apply_solution_rtype(sol, t.arg_type), apply_solution_rtype(sol, t.res_type))


def apply_solution_env(sol: Solution, env: Env) -> Env:
    return Env(tuple((n, apply_solution_rtype(sol, t)) for n, t in env))


def apply_solution_constraint(sol: Solution, c: Constraint):
    if isinstance(c, SubC):
        return SubC(c.cid, apply_solution_env(sol, c.env), apply_solution_rtype(sol, c.lhs),
                    apply_solution_rtype(sol, c.rhs), c.span, c.label)
    assert isinstance(c, WfC)
    return WfC(c.cid, apply_solution_env(sol, c.env), apply_solution_rtype(sol, c.typ), c.span, c.label)


def apply_solution(sol: Solution, item: Union[Pred, GPred, RType, Env, Constraint]):
    if isinstance(item, Pred):
        return apply_solution_pred(sol, item)
    if isinstance(item, GPred):
        return apply_solution_gpred(sol, item)
    if isinstance(item, RType):
        return apply_solution_rtype(sol, item)
    if isinstance(item, Env):
        return apply_solution_env(sol, item)
    if isinstance(item, Constraint):
        return apply_solution_constraint(sol, item)
    raise TypeError(type(item))


# ---------------------------------------------------------------------------
# Core expressions (ANF after normalization)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    span: Span


@dataclass(frozen=True)
class EInt(Expr):
    value: int


@dataclass(frozen=True)
class EBool(Expr):
    value: bool


@dataclass(frozen=True)
class EVar(Expr):
    name: str


@dataclass(frozen=True)
class ELam(Expr):
    arg: str
    arg_type: Optional[RType]
    body: Expr


@dataclass(frozen=True)
class EApp(Expr):
    fn: Expr
    arg: str  # ANF: argument is a variable


@dataclass(frozen=True)
class EIf(Expr):
    guard: str  # ANF: guard is a variable
    then: Expr
    els: Expr


@dataclass(frozen=True)
class ELet(Expr):
    name: str
    annot: Optional[RType]
    bound: Expr
    body: Expr


@dataclass(frozen=True)
class EMatch(Expr):
    scrutinee: str
    nil_body: Expr
    head: str
    tail: str
    cons_body: Expr


def expr_is_anf(e: Expr) -> bool:
    """Machine-checkable grammar restriction: application arguments and guards
    are variables."""
    if isinstance(e, (EInt, EBool, EVar)):
        return True
    if isinstance(e, ELam):
        return expr_is_anf(e.body)
    if isinstance(e, EApp):
        return expr_is_anf(e.fn)
    if isinstance(e, EIf):
        return expr_is_anf(e.then) and expr_is_anf(e.els)
    if isinstance(e, ELet):
        return expr_is_anf(e.bound) and expr_is_anf(e.body)
    if isinstance(e, EMatch):
        return expr_is_anf(e.nil_body) and expr_is_anf(e.cons_body)
    raise AssertionError(e)
