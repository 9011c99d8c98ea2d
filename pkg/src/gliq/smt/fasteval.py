"""Finite-domain evaluation of verification conditions.

Used two ways: as the independent brute-force oracle in the test suites, and
as a countermodel prefilter in front of the solver (a countermodel in the
sampled box refutes validity without a solver round trip; measures are
evaluated as plain integers, which only ever strengthens the refutation).

Predicates compile to a small stack bytecode; the inner loop that sweeps the
assignment box lives in a compiled extension when available, with a
pure-Python twin selected at import time otherwise.
"""

from __future__ import annotations

from typing import Optional

from ..syntax import (And, Arith, ArithOp, Cmp, CmpOp, Iff, Imp, IntLit,
                      MeasureApp, Not, Or, PFalse, Pred, PTrue, PVar, TVar,
                      BaseType, Sort, Term)
from .embed import VC, abstract_measures

OP_PUSHC = 0
OP_LOAD = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_LT = 5
OP_LE = 6
OP_EQ = 7
OP_NE = 8
OP_NOT = 9
OP_AND = 10
OP_OR = 11
OP_IFF = 12
OP_IMP = 13

KIND_INT = 0
KIND_BOOL = 1
KIND_LEN = 2


class Compiler:
    def __init__(self):
        self.ops: list[int] = []
        self.args: list[int] = []
        self.vars: dict[str, int] = {}
        self.kinds: list[int] = []

    def slot(self, name: str, kind: int) -> int:
        if name not in self.vars:
            self.vars[name] = len(self.kinds)
            self.kinds.append(kind)
        return self.vars[name]

    def emit(self, op: int, arg: int = 0) -> None:
        self.ops.append(op)
        self.args.append(arg)

    def term(self, t: Term, sorts) -> None:
        if isinstance(t, IntLit):
            self.emit(OP_PUSHC, t.value)
        elif isinstance(t, TVar):
            kind = KIND_LEN if "$" in t.name else KIND_INT
            self.emit(OP_LOAD, self.slot(t.name, kind))
        elif isinstance(t, Arith):
            self.term(t.lhs, sorts)
            self.term(t.rhs, sorts)
            self.emit({ArithOp.ADD: OP_ADD, ArithOp.SUB: OP_SUB, ArithOp.MUL: OP_MUL}[t.op])
        elif isinstance(t, MeasureApp):
            raise AssertionError("measures must be abstracted before compilation")
        else:
            raise AssertionError(t)

    def pred(self, p: Pred, sorts) -> None:
        if isinstance(p, PTrue):
            self.emit(OP_PUSHC, 1)
        elif isinstance(p, PFalse):
            self.emit(OP_PUSHC, 0)
        elif isinstance(p, PVar):
            self.emit(OP_LOAD, self.slot(p.name, KIND_BOOL))
        elif isinstance(p, Not):
            self.pred(p.arg, sorts)
            self.emit(OP_NOT)
        elif isinstance(p, (And, Or, Iff, Imp)):
            self.pred(p.lhs, sorts)
            self.pred(p.rhs, sorts)
            self.emit({And: OP_AND, Or: OP_OR, Iff: OP_IFF, Imp: OP_IMP}[type(p)])
        elif isinstance(p, Cmp):
            if p.op in (CmpOp.GT, CmpOp.GE):
                self.term(p.rhs, sorts)
                self.term(p.lhs, sorts)
                self.emit(OP_LT if p.op is CmpOp.GT else OP_LE)
            else:
                self.term(p.lhs, sorts)
                self.term(p.rhs, sorts)
                self.emit({CmpOp.LT: OP_LT, CmpOp.LE: OP_LE, CmpOp.EQ: OP_EQ,
                           CmpOp.NE: OP_NE}[p.op])
        else:
            raise AssertionError(p)


def compile_vc(vc: VC):
    """Compile `hyps and ante and not cons` (true = countermodel) to bytecode."""
    c = Compiler()
    sorts = vc.sorts
    # pre-register bool variables so kinds are right
    for name, sort in sorts.items():
        if sort is BaseType.BOOL:
            c.slot(name, KIND_BOOL)
    n = 0
    for h in vc.hyps:
        c.pred(abstract_measures(h), sorts)
        n += 1
    c.pred(abstract_measures(vc.ante), sorts)
    n += 1
    c.pred(abstract_measures(vc.cons), sorts)
    c.emit(OP_NOT)
    n += 1
    for _ in range(n - 1):
        c.emit(OP_AND)
    return c.ops, c.args, c.kinds, list(c.vars)


def eval_program_py(ops, args, values) -> int:
    """Pure-Python twin of the compiled evaluator's single-assignment step."""
    stack: list[int] = []
    push = stack.append
    pop = stack.pop
    for op, a in zip(ops, args):
        if op == OP_PUSHC:
            push(a)
        elif op == OP_LOAD:
            push(values[a])
        elif op == OP_ADD:
            b = pop(); push(pop() + b)
        elif op == OP_SUB:
            b = pop(); push(pop() - b)
        elif op == OP_MUL:
            b = pop(); push(pop() * b)
        elif op == OP_LT:
            b = pop(); push(1 if pop() < b else 0)
        elif op == OP_LE:
            b = pop(); push(1 if pop() <= b else 0)
        elif op == OP_EQ:
            b = pop(); push(1 if pop() == b else 0)
        elif op == OP_NE:
            b = pop(); push(1 if pop() != b else 0)
        elif op == OP_NOT:
            push(0 if pop() else 1)
        elif op == OP_AND:
            b = pop(); push(1 if (pop() and b) else 0)
        elif op == OP_OR:
            b = pop(); push(1 if (pop() or b) else 0)
        elif op == OP_IFF:
            b = pop(); push(1 if bool(pop()) == bool(b) else 0)
        elif op == OP_IMP:
            b = pop(); push(1 if (b or not pop()) else 0)
        else:
            raise AssertionError(op)
    return stack[-1]


def search_py(ops, args, kinds, lo: int, hi: int, len_hi: int) -> Optional[list[int]]:
    """Sweep the assignment box; return the first satisfying assignment."""
    nvars = len(kinds)
    los = [0] * nvars
    his = [0] * nvars
    for i, k in enumerate(kinds):
        if k == KIND_BOOL:
            los[i], his[i] = 0, 1
        elif k == KIND_LEN:
            los[i], his[i] = 0, len_hi
        else:
            los[i], his[i] = lo, hi
    values = list(los)
    while True:
        if eval_program_py(ops, args, values):
            return list(values)
        i = 0
        while i < nvars:
            if values[i] < his[i]:
                values[i] += 1
                break
            values[i] = los[i]
            i += 1
        if i == nvars:
            return None


try:
    from . import _fasteval  # compiled twin

    COMPILED = True

    def search(ops, args, kinds, lo: int = -3, hi: int = 3, len_hi: int = 3):
        return _fasteval.search(list(ops), list(args), list(kinds), lo, hi, len_hi)
except ImportError:  # pragma: no cover - depends on build environment
    COMPILED = False

    def search(ops, args, kinds, lo: int = -3, hi: int = 3, len_hi: int = 3):
        return search_py(ops, args, kinds, lo, hi, len_hi)


# A box of 7 values per int variable: cap the sweep so a query never stalls.
MAX_VARS_COMPILED = 6
MAX_VARS_PY = 4


def vc_countermodel(vc: VC, lo: int = -3, hi: int = 3, len_hi: int = 3):
    """Assignment refuting the VC inside the box, or None. None proves
    nothing; a hit proves invalidity."""
    ops, args, kinds, names = compile_vc(vc)
    cap = MAX_VARS_COMPILED if COMPILED else MAX_VARS_PY
    if len(kinds) > cap:
        return None
    found = search(ops, args, kinds, lo, hi, len_hi)
    if found is None:
        return None
    return dict(zip(names, found))
