# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the finite-domain bytecode evaluator."""

from libc.stdlib cimport free, malloc


def search(list ops_l, list args_l, list kinds_l, int lo, int hi, int len_hi):
    cdef int n = len(ops_l)
    cdef int nvars = len(kinds_l)
    cdef int *ops = <int *> malloc(n * sizeof(int))
    cdef int *args = <int *> malloc(n * sizeof(int))
    cdef long *values = <long *> malloc((nvars if nvars else 1) * sizeof(long))
    cdef long *los = <long *> malloc((nvars if nvars else 1) * sizeof(long))
    cdef long *his = <long *> malloc((nvars if nvars else 1) * sizeof(long))
    cdef long *stack = <long *> malloc((n + 1) * sizeof(long))
    if not ops or not args or not values or not los or not his or not stack:
        raise MemoryError()
    cdef int i, k, sp, op
    cdef long a, b
    cdef bint found = False
    try:
        for i in range(n):
            ops[i] = ops_l[i]
            args[i] = args_l[i]
        for i in range(nvars):
            k = kinds_l[i]
            if k == 1:      # bool
                los[i] = 0; his[i] = 1
            elif k == 2:    # measure value, non-negative
                los[i] = 0; his[i] = len_hi
            else:
                los[i] = lo; his[i] = hi
            values[i] = los[i]

        while True:
            sp = 0
            for i in range(n):
                op = ops[i]
                if op == 0:     # PUSHC
                    stack[sp] = args[i]; sp += 1
                elif op == 1:   # LOAD
                    stack[sp] = values[args[i]]; sp += 1
                elif op == 2:   # ADD
                    sp -= 1; stack[sp - 1] = stack[sp - 1] + stack[sp]
                elif op == 3:   # SUB
                    sp -= 1; stack[sp - 1] = stack[sp - 1] - stack[sp]
                elif op == 4:   # MUL
                    sp -= 1; stack[sp - 1] = stack[sp - 1] * stack[sp]
                elif op == 5:   # LT
                    sp -= 1; stack[sp - 1] = 1 if stack[sp - 1] < stack[sp] else 0
                elif op == 6:   # LE
                    sp -= 1; stack[sp - 1] = 1 if stack[sp - 1] <= stack[sp] else 0
                elif op == 7:   # EQ
                    sp -= 1; stack[sp - 1] = 1 if stack[sp - 1] == stack[sp] else 0
                elif op == 8:   # NE
                    sp -= 1; stack[sp - 1] = 1 if stack[sp - 1] != stack[sp] else 0
                elif op == 9:   # NOT
                    stack[sp - 1] = 0 if stack[sp - 1] else 1
                elif op == 10:  # AND
                    sp -= 1; stack[sp - 1] = 1 if (stack[sp - 1] and stack[sp]) else 0
                elif op == 11:  # OR
                    sp -= 1; stack[sp - 1] = 1 if (stack[sp - 1] or stack[sp]) else 0
                elif op == 12:  # IFF
                    sp -= 1; stack[sp - 1] = 1 if (stack[sp - 1] != 0) == (stack[sp] != 0) else 0
                else:           # IMP
                    sp -= 1; stack[sp - 1] = 1 if (stack[sp] or not stack[sp - 1]) else 0
            if stack[0]:
                found = True
                break
            i = 0
            while i < nvars:
                if values[i] < his[i]:
                    values[i] += 1
                    break
                values[i] = los[i]
                i += 1
            if i == nvars:
                break
        if not found:
            return None
        return [values[i] for i in range(nvars)]
    finally:
        free(ops); free(args); free(values); free(los); free(his); free(stack)
