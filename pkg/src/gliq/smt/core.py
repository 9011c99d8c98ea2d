"""Decision procedure for linear integer arithmetic with booleans.

Formulas are nested tuples:

    ('true',) | ('false',)
    ('bvar', name)
    ('le', lin)            -- lin <= 0
    ('dvd', d, lin)        -- d divides lin (d > 0)
    ('not', f) | ('and', f1, ..) | ('or', f1, ..)
    ('exists', ((name, 'Int'|'Bool'), ..), f)
    ('forall', ((name, sort), ..), f)

`lin` is a linear expression: (const, ((var, coeff), .. sorted by var)).

Satisfiability goes through quantifier elimination (Cooper's method for the
integer existentials, expansion for booleans) followed by a DPLL search over
the atoms with an exact integer feasibility check (Fourier-Motzkin with
gcd tightening, dark shadow and splintering for the inexact cases).

All searches are budgeted; exceeding the budget raises SolverBudget which the
caller reports as `unknown`.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd

Lin = tuple  # (const, ((var, coeff), ...))
Formula = tuple

TRUE: Formula = ("true",)
FALSE: Formula = ("false",)

MAX_NODES = 400_000
MAX_DVD = 64


class SolverBudget(Exception):
    pass


# ---------------------------------------------------------------------------
# Linear expressions
# ---------------------------------------------------------------------------

def lin_const(k: int) -> Lin:
    return (k, ())


def lin_var(name: str, coeff: int = 1) -> Lin:
    if coeff == 0:
        return (0, ())
    return (0, ((name, coeff),))


def lin_add(a: Lin, b: Lin) -> Lin:
    terms = dict(a[1])
    for v, c in b[1]:
        c2 = terms.get(v, 0) + c
        if c2 == 0:
            terms.pop(v, None)
        else:
            terms[v] = c2
    return (a[0] + b[0], tuple(sorted(terms.items())))


def lin_scale(a: Lin, k: int) -> Lin:
    if k == 0:
        return (0, ())
    return (a[0] * k, tuple((v, c * k) for v, c in a[1]))


def lin_neg(a: Lin) -> Lin:
    return lin_scale(a, -1)


def lin_sub(a: Lin, b: Lin) -> Lin:
    return lin_add(a, lin_neg(b))


def lin_coeff(a: Lin, var: str) -> int:
    for v, c in a[1]:
        if v == var:
            return c
    return 0


def lin_drop(a: Lin, var: str) -> Lin:
    return (a[0], tuple((v, c) for v, c in a[1] if v != var))


def lin_subst(a: Lin, var: str, replacement: Lin) -> Lin:
    c = lin_coeff(a, var)
    if c == 0:
        return a
    return lin_add(lin_drop(a, var), lin_scale(replacement, c))


def lin_vars(a: Lin) -> tuple:
    return tuple(v for v, _ in a[1])


# ---------------------------------------------------------------------------
# Formula construction and simplification
# ---------------------------------------------------------------------------

def f_le(lin: Lin) -> Formula:
    """lin <= 0 with gcd tightening."""
    if not lin[1]:
        return TRUE if lin[0] <= 0 else FALSE
    g = 0
    for _, c in lin[1]:
        g = gcd(g, abs(c))
    if g > 1:
        k = lin[0]
        # sum c_i x_i <= -k  ->  sum (c_i/g) x_i <= floor(-k/g)
        new_terms = tuple((v, c // g) for v, c in lin[1])
        new_const = -((-k) // g)
        lin = (new_const, new_terms)
    return ("le", lin)


def f_dvd(d: int, lin: Lin) -> Formula:
    d = abs(d)
    if d == 0:
        return f_eq0(lin)
    if d == 1:
        return TRUE
    if not lin[1]:
        return TRUE if lin[0] % d == 0 else FALSE
    g = d
    for _, c in lin[1]:
        g = gcd(g, abs(c))
    g = gcd(g, abs(lin[0])) if lin[0] else g
    if g > 1 and lin[0] % g == 0:
        d2 = d // g
        if d2 == 1:
            return TRUE
        return ("dvd", d2, (lin[0] // g, tuple((v, c // g) for v, c in lin[1])))
    # A common factor of the variable part that does not divide the constant
    # while dividing d means unsatisfiable congruence.
    gv = 0
    for _, c in lin[1]:
        gv = gcd(gv, abs(c))
    gg = gcd(gv, d)
    if gg > 1 and lin[0] % gg != 0:
        return FALSE
    return ("dvd", d, lin)


def f_eq0(lin: Lin) -> Formula:
    return f_and([f_le(lin), f_le(lin_neg(lin))])


def f_lt(a: Lin, b: Lin) -> Formula:
    # a < b over Z  <=>  a - b + 1 <= 0
    return f_le(lin_add(lin_sub(a, b), lin_const(1)))


def f_not(f: Formula) -> Formula:
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if f[0] == "not":
        return f[1]
    return ("not", f)


def f_and(fs) -> Formula:
    flat = []
    seen = set()
    for f in fs:
        if f == TRUE:
            continue
        if f == FALSE:
            return FALSE
        if f[0] == "and":
            sub = f[1:]
        else:
            sub = (f,)
        for s in sub:
            if s == FALSE:
                return FALSE
            if s not in seen:
                seen.add(s)
                flat.append(s)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return ("and", *flat)


def f_or(fs) -> Formula:
    flat = []
    seen = set()
    for f in fs:
        if f == FALSE:
            continue
        if f == TRUE:
            return TRUE
        if f[0] == "or":
            sub = f[1:]
        else:
            sub = (f,)
        for s in sub:
            if s == TRUE:
                return TRUE
            if s not in seen:
                seen.add(s)
                flat.append(s)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return ("or", *flat)


def f_imp(a: Formula, b: Formula) -> Formula:
    return f_or([f_not(a), b])


def f_iff(a: Formula, b: Formula) -> Formula:
    return f_and([f_imp(a, b), f_imp(b, a)])


def formula_size(f: Formula) -> int:
    if f[0] in ("true", "false", "bvar", "le", "dvd"):
        return 1
    if f[0] == "not":
        return 1 + formula_size(f[1])
    if f[0] in ("and", "or"):
        return 1 + sum(formula_size(g) for g in f[1:])
    if f[0] in ("exists", "forall"):
        return 1 + formula_size(f[2])
    raise AssertionError(f)


# ---------------------------------------------------------------------------
# NNF (negations pushed onto atoms; negated atoms rewritten away)
# ---------------------------------------------------------------------------

def nnf(f: Formula, positive: bool = True) -> Formula:
    tag = f[0]
    if tag == "true":
        return TRUE if positive else FALSE
    if tag == "false":
        return FALSE if positive else TRUE
    if tag == "bvar":
        return f if positive else ("not", f)
    if tag == "le":
        if positive:
            return f
        # not (lin <= 0)  <=>  -lin + 1 <= 0
        return f_le(lin_add(lin_neg(f[1]), lin_const(1)))
    if tag == "dvd":
        if positive:
            return f
        d = f[1]
        if d > MAX_DVD:
            raise SolverBudget("divisor too large")
        # not (d | e)  <=>  exists r in 1..d-1 with d | e - r
        return f_or([f_dvd(d, lin_add(f[2], lin_const(-r))) for r in range(1, d)])
    if tag == "not":
        return nnf(f[1], not positive)
    if tag == "and":
        parts = [nnf(g, positive) for g in f[1:]]
        return f_and(parts) if positive else f_or(parts)
    if tag == "or":
        parts = [nnf(g, positive) for g in f[1:]]
        return f_or(parts) if positive else f_and(parts)
    if tag == "exists":
        inner = nnf(f[2], positive)
        return (("exists" if positive else "forall"), f[1], inner)
    if tag == "forall":
        inner = nnf(f[2], positive)
        return (("forall" if positive else "exists"), f[1], inner)
    raise AssertionError(f)


def subst_formula(f: Formula, var: str, replacement: Lin) -> Formula:
    tag = f[0]
    if tag in ("true", "false", "bvar"):
        return f
    if tag == "le":
        return f_le(lin_subst(f[1], var, replacement))
    if tag == "dvd":
        return f_dvd(f[1], lin_subst(f[2], var, replacement))
    if tag == "not":
        return f_not(subst_formula(f[1], var, replacement))
    if tag == "and":
        return f_and([subst_formula(g, var, replacement) for g in f[1:]])
    if tag == "or":
        return f_or([subst_formula(g, var, replacement) for g in f[1:]])
    if tag in ("exists", "forall"):
        if any(v == var for v, _ in f[1]):
            return f
        return (tag, f[1], subst_formula(f[2], var, replacement))
    raise AssertionError(f)


def subst_bool(f: Formula, var: str, value: bool) -> Formula:
    tag = f[0]
    if tag == "bvar":
        return TRUE if (f[1] == var and value) else (FALSE if f[1] == var else f)
    if tag in ("true", "false", "le", "dvd"):
        return f
    if tag == "not":
        return f_not(subst_bool(f[1], var, value))
    if tag == "and":
        return f_and([subst_bool(g, var, value) for g in f[1:]])
    if tag == "or":
        return f_or([subst_bool(g, var, value) for g in f[1:]])
    if tag in ("exists", "forall"):
        if any(v == var for v, _ in f[1]):
            return f
        return (tag, f[1], subst_bool(f[2], var, value))
    raise AssertionError(f)


# ---------------------------------------------------------------------------
# Cooper's quantifier elimination
# ---------------------------------------------------------------------------

def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def eliminate_exists_int(var: str, f: Formula) -> Formula:
    """Eliminate `exists var:Int` from a quantifier-free NNF formula."""
    # Collect the lcm of the var's coefficients.
    delta = 1
    found = False

    def scan(g: Formula) -> None:
        nonlocal delta, found
        tag = g[0]
        if tag == "le":
            c = lin_coeff(g[1], var)
            if c:
                found = True
                delta = _lcm(delta, abs(c))
        elif tag == "dvd":
            c = lin_coeff(g[2], var)
            if c:
                found = True
                delta = _lcm(delta, abs(c))
        elif tag == "not":
            scan(g[1])
        elif tag in ("and", "or"):
            for h in g[1:]:
                scan(h)

    scan(f)
    if not found:
        return f

    # Scale every atom so the var's coefficient is +-1 (on a virtual
    # variable delta*var), then add the divisibility constraint delta | var'.
    def scale(g: Formula) -> Formula:
        tag = g[0]
        if tag == "le":
            c = lin_coeff(g[1], var)
            if not c:
                return g
            k = delta // abs(c)
            lin = lin_scale(g[1], k)
            # normalize the var coefficient to +-1, keeping the atom exact
            new_terms = tuple((v, (cc // delta if v == var else cc)) for v, cc in lin[1])
            return ("le", (lin[0], new_terms))
        if tag == "dvd":
            c = lin_coeff(g[2], var)
            if not c:
                return g
            k = delta // abs(c)
            lin = lin_scale(g[2], k)
            new_terms = tuple((v, (cc // delta if v == var else cc)) for v, cc in lin[1])
            return ("dvd", g[1] * k, (lin[0], new_terms))
        if tag == "not":
            return ("not", scale(g[1]))
        if tag in ("and", "or"):
            return (tag, *[scale(h) for h in g[1:]])
        return g

    body = scale(f)
    if delta > 1:
        body = f_and([body, ("dvd", delta, lin_var(var))])
        if body == FALSE:
            return FALSE

    # Divisor lcm and lower-bound terms.
    dstar = 1
    lowers: list[Lin] = []

    def scan2(g: Formula) -> None:
        nonlocal dstar
        tag = g[0]
        if tag == "le":
            c = lin_coeff(g[1], var)
            if c == -1:
                # -var + r <= 0  <=>  r <= var : lower bound term r
                lowers.append(lin_drop(g[1], var))
            elif c not in (0, 1, -1):
                raise AssertionError("unscaled atom")
        elif tag == "dvd":
            if lin_coeff(g[2], var):
                dstar = _lcm(dstar, g[1])
        elif tag == "not":
            scan2(g[1])
        elif tag in ("and", "or"):
            for h in g[1:]:
                scan2(h)

    scan2(body)
    if dstar > MAX_DVD:
        raise SolverBudget("divisor lcm too large")

    def minus_inf(g: Formula) -> Formula:
        tag = g[0]
        if tag == "le":
            c = lin_coeff(g[1], var)
            if c == 1:
                return TRUE
            if c == -1:
                return FALSE
            return g
        if tag == "not":
            return f_not(minus_inf(g[1]))
        if tag == "and":
            return f_and([minus_inf(h) for h in g[1:]])
        if tag == "or":
            return f_or([minus_inf(h) for h in g[1:]])
        return g

    fminf = minus_inf(body)
    parts: list[Formula] = []
    for j in range(1, dstar + 1):
        parts.append(subst_formula(fminf, var, lin_const(j)))
    for low in lowers:
        for j in range(1, dstar + 1):
            # non-strict lower bound r <= var: candidates r + (j-1)
            parts.append(subst_formula(body, var, lin_add(low, lin_const(j - 1))))
    out = f_or(parts)
    if formula_size(out) > MAX_NODES:
        raise SolverBudget("elimination blowup")
    return out


def eliminate_exists(variables, f: Formula) -> Formula:
    """Eliminate a block of existentials from an NNF, quantifier-free body."""
    out = f
    for name, sort in reversed(list(variables)):
        if sort == "Bool":
            out = f_or([subst_bool(out, name, True), subst_bool(out, name, False)])
        else:
            out = eliminate_exists_int(name, out)
    return out


def remove_quantifiers(f: Formula) -> Formula:
    tag = f[0]
    if tag in ("true", "false", "bvar", "le", "dvd"):
        return f
    if tag == "not":
        return f_not(remove_quantifiers(f[1]))
    if tag == "and":
        return f_and([remove_quantifiers(g) for g in f[1:]])
    if tag == "or":
        return f_or([remove_quantifiers(g) for g in f[1:]])
    if tag == "exists":
        body = nnf(remove_quantifiers(f[2]))
        return eliminate_exists(f[1], body)
    if tag == "forall":
        body = nnf(f_not(remove_quantifiers(f[2])))
        return f_not(eliminate_exists(f[1], body))
    raise AssertionError(f)


# ---------------------------------------------------------------------------
# Integer feasibility of conjunctions (Omega-style exact test)
# ---------------------------------------------------------------------------

_fresh_counter = 0


def _fresh(prefix: str) -> str:
    global _fresh_counter
    _fresh_counter += 1
    return f"{prefix}!{_fresh_counter}"


def feasible(les: tuple, dvds: tuple, depth: int = 0) -> bool:
    """Is the conjunction of `lin <= 0` and `d | lin` literals satisfiable
    over the integers? Exact."""
    if depth > 60:
        raise SolverBudget("feasibility recursion too deep")

    # Normalize and constant-check.
    work_les = []
    for lin in les:
        a = f_le(lin)
        if a == FALSE:
            return False
        if a == TRUE:
            continue
        work_les.append(a[1])

    work_dvds = []
    for d, lin in dvds:
        a = f_dvd(d, lin)
        if a == FALSE:
            return False
        if a == TRUE:
            continue
        work_dvds.append((a[1], a[2]))

    # Eliminate congruences first.
    if work_dvds:
        d, lin = work_dvds[0]
        rest_dvds = tuple(work_dvds[1:])
        if not lin[1]:
            if lin[0] % d != 0:
                return False
            return feasible(tuple(work_les), rest_dvds, depth + 1)
        # Pick a variable with a unit coefficient if possible.
        unit = None
        for v, c in lin[1]:
            if abs(c) == 1:
                unit = (v, c)
                break
        if unit is not None:
            v, c = unit
            # c*v + rest ≡ 0 (mod d), c = ±1  =>  v = -c*rest + d*k
            rest = lin_drop(lin, v)
            repl = lin_add(lin_scale(rest, -c), lin_var(_fresh("k"), d))
            new_les = tuple(lin_subst(l, v, repl) for l in work_les)
            new_dvds = tuple((dd, lin_subst(ll, v, repl)) for dd, ll in rest_dvds)
            return feasible(new_les, new_dvds, depth + 1)
        # No unit coefficient: split the first variable over residues mod d.
        if d > MAX_DVD:
            raise SolverBudget("divisor too large in feasibility")
        v = lin[1][0][0]
        for r in range(d):
            repl = lin_add(lin_var(_fresh("q"), d), lin_const(r))
            new_les = tuple(lin_subst(l, v, repl) for l in work_les)
            new_dvds = tuple((dd, lin_subst(ll, v, repl)) for dd, ll in [(d, lin)] + list(rest_dvds))
            if feasible(new_les, new_dvds, depth + 1):
                return True
        return False

    # Pure inequalities: eliminate variables.
    les_t = work_les
    while True:
        if not les_t:
            return True
        for lin in les_t:
            if not lin[1] and lin[0] > 0:
                return False
        vars_here: dict[str, list[int]] = {}
        for lin in les_t:
            for v, c in lin[1]:
                vars_here.setdefault(v, []).append(c)
        if not vars_here:
            return all(lin[0] <= 0 for lin in les_t)

        # Unbounded variables project away exactly.
        dropped = False
        for v, cs in vars_here.items():
            if all(c > 0 for c in cs) or all(c < 0 for c in cs):
                les_t = [lin for lin in les_t if lin_coeff(lin, v) == 0]
                dropped = True
                break
        if dropped:
            continue

        # Choose the variable minimizing the pair product.
        def cost(v: str) -> tuple:
            lo = sum(1 for c in vars_here[v] if c < 0)
            hi = sum(1 for c in vars_here[v] if c > 0)
            return (lo * hi, v)

        v = min(vars_here, key=cost)
        lowers = []   # (a, l): l <= a*v
        uppers = []   # (b, u): b*v <= u
        rest = []
        for lin in les_t:
            c = lin_coeff(lin, v)
            if c == 0:
                rest.append(lin)
            elif c > 0:
                uppers.append((c, lin_neg(lin_drop(lin, v))))
            else:
                lowers.append((-c, lin_drop(lin, v)))

        exact = all(a == 1 or b == 1 for a, _ in lowers for b, _ in uppers)
        if exact:
            for a, l in lowers:
                for b, u in uppers:
                    rest.append(f_le_lin(lin_sub(lin_scale(l, b), lin_scale(u, a))))
            les_t = [l for l in rest if l is not None]
            continue

        # Inexact: dark shadow, else real shadow, else splinters.
        dark = list(rest)
        real = list(rest)
        ok = True
        for a, l in lowers:
            for b, u in uppers:
                base = lin_sub(lin_scale(l, b), lin_scale(u, a))
                real.append(base)
                dark.append(lin_add(base, lin_const((a - 1) * (b - 1))))
        if feasible(tuple(x for x in dark if x is not None), (), depth + 1):
            return True
        if not feasible(tuple(x for x in real if x is not None), (), depth + 1):
            return False
        maxb = max(b for b, _ in uppers)
        for a, l in lowers:
            bound = (a * maxb - a - maxb) // maxb
            for j in range(bound + 1):
                # a*v = l + j: substitute v and record the congruence.
                target = lin_add(l, lin_const(j))
                new_les = []
                for lin in les_t:
                    c = lin_coeff(lin, v)
                    if c == 0:
                        new_les.append(lin)
                    else:
                        # multiply by a (positive) and substitute a*v -> target
                        scaled = lin_scale(lin_drop(lin, v), a)
                        new_les.append(lin_add(scaled, lin_scale(target, c)))
                if feasible(tuple(new_les), ((a, target),), depth + 1):
                    return True
        return False


def f_le_lin(lin: Lin):
    a = f_le(lin)
    if a == TRUE:
        return None
    if a == FALSE:
        return (1, ())  # contradiction marker: 1 <= 0
    return a[1]


# ---------------------------------------------------------------------------
# DPLL over the boolean structure
# ---------------------------------------------------------------------------

def _first_atom(f: Formula):
    tag = f[0]
    if tag in ("bvar", "le", "dvd"):
        return f
    if tag == "not":
        return _first_atom(f[1])
    if tag in ("and", "or"):
        for g in f[1:]:
            a = _first_atom(g)
            if a is not None:
                return a
    return None


def _assume(f: Formula, atom: Formula, value: bool) -> Formula:
    tag = f[0]
    if f == atom:
        return TRUE if value else FALSE
    if tag in ("true", "false", "bvar", "le", "dvd"):
        return f
    if tag == "not":
        return f_not(_assume(f[1], atom, value))
    if tag == "and":
        return f_and([_assume(g, atom, value) for g in f[1:]])
    if tag == "or":
        return f_or([_assume(g, atom, value) for g in f[1:]])
    raise AssertionError(f)


def sat(f: Formula, budget: int = 2_000_000) -> bool:
    """Satisfiability of a quantifier-free formula."""
    f = nnf(f)
    steps = [0]

    def go(g: Formula, les: tuple, dvds: tuple) -> bool:
        steps[0] += 1
        if steps[0] > budget:
            raise SolverBudget("sat search budget exceeded")
        if g == FALSE:
            return False
        if not feasible(les, dvds):
            return False
        if g == TRUE:
            return True
        atom = _first_atom(g)
        assert atom is not None, g
        for value in (True, False):
            g2 = _assume(g, atom, value)
            les2, dvds2 = les, dvds
            if atom[0] == "le":
                if value:
                    les2 = les + (atom[1],)
                else:
                    les2 = les + (lin_add(lin_neg(atom[1]), lin_const(1)),)
            elif atom[0] == "dvd":
                if value:
                    dvds2 = dvds + ((atom[1], atom[2]),)
                else:
                    d = atom[1]
                    if d > MAX_DVD:
                        raise SolverBudget("divisor too large")
                    # replace by explicit residue disjunction
                    g2 = f_and([g2, f_or([f_dvd(d, lin_add(atom[2], lin_const(-r)))
                                          for r in range(1, d)])])
            if go(g2, les2, dvds2):
                return True
        return False

    return go(f, (), ())


def check_sat(f: Formula) -> str:
    """'sat' | 'unsat' | 'unknown' for a formula possibly with quantifiers."""
    try:
        g = remove_quantifiers(f)
        g = nnf(g)
        return "sat" if sat(g) else "unsat"
    except SolverBudget:
        return "unknown"
    except RecursionError:
        return "unknown"
