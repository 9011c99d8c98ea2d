"""SMT-LIB v2 text front end for the built-in solver.

Speaks enough of the standard over stdin/stdout to serve as a drop-in
`--smt-cmd` target: set-logic/set-option/set-info, declare-const, 0-ary
declare-fun, assert, push/pop, check-sat, reset, echo, exit. Quantifiers
(forall/exists over Int and Bool) are supported in assertions.

Run as `python -m gliq.smt.server` or via the `gliq-smt` entry point.
"""

from __future__ import annotations

import sys

from . import core
from .core import (FALSE, TRUE, f_and, f_dvd, f_eq0, f_iff, f_imp, f_le,
                   f_lt, f_not, f_or, lin_add, lin_const, lin_neg, lin_scale,
                   lin_sub, lin_var)


class SmtError(Exception):
    pass


# --- s-expression reader ----------------------------------------------------

def tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            yield text[i:j + 1]
            i = j + 1
        elif ch == "|":
            j = i + 1
            while j < n and text[j] != "|":
                j += 1
            yield text[i:j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();\"|":
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) < 2:
                raise SmtError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SmtError("unbalanced '('")
    return stack[0]


# --- term translation -------------------------------------------------------

class Scope:
    def __init__(self):
        self.sorts: dict[str, str] = {}

    def copy(self) -> "Scope":
        s = Scope()
        s.sorts = dict(self.sorts)
        return s


def _sort_name(s) -> str:
    if isinstance(s, str) and s in ("Int", "Bool"):
        return s
    raise SmtError(f"unsupported sort {s}")


def to_int(e, scope: Scope):
    """Translate an s-expression into a linear expression."""
    if isinstance(e, str):
        if e.lstrip("-").isdigit():
            return lin_const(int(e))
        sort = scope.sorts.get(e)
        if sort is None:
            raise SmtError(f"undeclared symbol {e}")
        if sort != "Int":
            raise SmtError(f"symbol {e} is not Int")
        return lin_var(e)
    if not e:
        raise SmtError("empty term")
    head, args = e[0], e[1:]
    if head == "+":
        out = lin_const(0)
        for a in args:
            out = lin_add(out, to_int(a, scope))
        return out
    if head == "-":
        if len(args) == 1:
            return lin_neg(to_int(args[0], scope))
        out = to_int(args[0], scope)
        for a in args[1:]:
            out = lin_sub(out, to_int(a, scope))
        return out
    if head == "*":
        lins = [to_int(a, scope) for a in args]
        consts = [l for l in lins if not l[1]]
        others = [l for l in lins if l[1]]
        if len(others) > 1:
            raise SmtError("nonlinear multiplication")
        k = 1
        for c in consts:
            k *= c[0]
        return lin_scale(others[0], k) if others else lin_const(k)
    raise SmtError(f"unsupported Int term {e}")


def to_formula(e, scope: Scope):
    if isinstance(e, str):
        if e == "true":
            return TRUE
        if e == "false":
            return FALSE
        sort = scope.sorts.get(e)
        if sort == "Bool":
            return ("bvar", e)
        raise SmtError(f"undeclared boolean symbol {e}")
    if not e:
        raise SmtError("empty formula")
    head, args = e[0], e[1:]
    if head == "and":
        return f_and([to_formula(a, scope) for a in args])
    if head == "or":
        return f_or([to_formula(a, scope) for a in args])
    if head == "not":
        return f_not(to_formula(args[0], scope))
    if head == "=>":
        out = to_formula(args[-1], scope)
        for a in reversed(args[:-1]):
            out = f_imp(to_formula(a, scope), out)
        return out
    if head in ("<", "<=", ">", ">="):
        a, b = to_int(args[0], scope), to_int(args[1], scope)
        if head == "<":
            return f_lt(a, b)
        if head == "<=":
            return f_le(lin_sub(a, b))
        if head == ">":
            return f_lt(b, a)
        return f_le(lin_sub(b, a))
    if head in ("=", "distinct"):
        # booleans or integers, by inspection
        def is_bool(x) -> bool:
            if isinstance(x, str):
                return x in ("true", "false") or scope.sorts.get(x) == "Bool"
            return x and x[0] in ("and", "or", "not", "=>", "<", "<=", ">", ">=", "=", "distinct",
                                  "forall", "exists")
        if is_bool(args[0]):
            f = f_iff(to_formula(args[0], scope), to_formula(args[1], scope))
        else:
            f = f_eq0(lin_sub(to_int(args[0], scope), to_int(args[1], scope)))
        return f if head == "=" else f_not(f)
    if head == "divisible":
        return f_dvd(int(args[0]), to_int(args[1], scope))
    if head in ("forall", "exists"):
        binders = []
        inner = scope.copy()
        for b in args[0]:
            name, sort = b[0], _sort_name(b[1])
            binders.append((name, sort))
            inner.sorts[name] = sort
        return (head, tuple(binders), to_formula(args[1], inner))
    raise SmtError(f"unsupported formula {e}")


# --- command loop -----------------------------------------------------------

class Session:
    def __init__(self):
        self.stack: list[tuple[list, Scope]] = [([], Scope())]

    @property
    def assertions(self) -> list:
        return self.stack[-1][0]

    @property
    def scope(self) -> Scope:
        return self.stack[-1][1]

    def run(self, cmd) -> str | None:
        head = cmd[0]
        if head in ("set-logic", "set-option", "set-info"):
            return None
        if head == "declare-const":
            self.scope.sorts[cmd[1]] = _sort_name(cmd[2])
            return None
        if head == "declare-fun":
            if cmd[2]:
                raise SmtError("only 0-ary declare-fun is supported")
            self.scope.sorts[cmd[1]] = _sort_name(cmd[3])
            return None
        if head == "assert":
            self.assertions.append(to_formula(cmd[1], self.scope))
            return None
        if head == "push":
            n = int(cmd[1]) if len(cmd) > 1 else 1
            for _ in range(n):
                self.stack.append((list(self.assertions), self.scope.copy()))
            return None
        if head == "pop":
            n = int(cmd[1]) if len(cmd) > 1 else 1
            for _ in range(n):
                if len(self.stack) == 1:
                    raise SmtError("pop on empty stack")
                self.stack.pop()
            return None
        if head == "reset":
            self.stack = [([], Scope())]
            return None
        if head == "check-sat":
            return core.check_sat(f_and(self.assertions))
        if head == "echo":
            return cmd[1].strip('"')
        if head == "exit":
            raise SystemExit(0)
        raise SmtError(f"unsupported command {head}")


def main() -> None:
    session = Session()
    buf = ""
    out = sys.stdout
    for line in sys.stdin:
        buf += line
        # A command is complete once parens balance; batch per line group.
        if buf.count("(") > buf.count(")"):
            continue
        try:
            cmds = parse_sexprs(buf)
        except SmtError:
            continue  # wait for more input
        buf = ""
        for cmd in cmds:
            try:
                resp = session.run(cmd)
            except SystemExit:
                return
            except SmtError as e:
                print(f'(error "{e}")', file=out, flush=True)
                continue
            except Exception as e:  # internal: report, stay alive
                print(f'(error "internal: {e}")', file=out, flush=True)
                continue
            if resp is not None:
                print(resp, file=out, flush=True)


if __name__ == "__main__":
    main()
