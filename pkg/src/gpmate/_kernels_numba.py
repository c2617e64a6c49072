"""Numba-jitted tree kernels (the default backend).

Same contracts as `_kernels_numpy`; see that module for the semantics.
Kernels are cached to disk so worker processes pay the compile cost once.
"""

import math

import numpy as np
from numba import njit

from .symbols import ARITY, EXP_ARG_LIMIT, VALUE_LIMIT

NAME = "numba"

_ARITY = ARITY  # frozen into the compiled kernels


@njit(cache=True)
def _tree_scan(codes):
    n = codes.shape[0]
    ends = np.empty(n, dtype=np.int32)
    depths = np.empty(n, dtype=np.int32)
    stack_idx = np.empty(n, dtype=np.int32)
    stack_rem = np.empty(n, dtype=np.int32)
    sp = 0
    for i in range(n):
        depths[i] = sp + 1
        a = _ARITY[codes[i]]
        if a > 0:
            stack_idx[sp] = i
            stack_rem[sp] = a
            sp += 1
        else:
            ends[i] = i + 1
            while sp > 0:
                stack_rem[sp - 1] -= 1
                if stack_rem[sp - 1] == 0:
                    sp -= 1
                    ends[stack_idx[sp]] = i + 1
                else:
                    break
    return ends, depths


def tree_scan(codes):
    return _tree_scan(codes)


@njit(cache=True)
def _eval_tree_values(codes, X):
    n = codes.shape[0]
    npts = X.shape[0]
    out = np.empty(npts, dtype=np.float64)
    stack = np.empty(n, dtype=np.float64)
    for p in range(npts):
        sp = 0
        for k in range(n - 1, -1, -1):
            c = codes[k]
            if c <= 1:
                stack[sp] = X[p, c]
                sp += 1
            else:
                if c <= 5:
                    a = stack[sp - 1]
                    b = stack[sp - 2]
                    sp -= 2
                    if c == 2:
                        r = a + b
                    elif c == 3:
                        r = a - b
                    elif c == 4:
                        r = a * b
                    else:
                        r = 1.0 if b == 0.0 else a / b
                else:
                    a = stack[sp - 1]
                    sp -= 1
                    if c == 6:
                        r = math.sin(a)
                    elif c == 7:
                        r = math.cos(a)
                    elif c == 8:
                        if a > EXP_ARG_LIMIT:
                            a = EXP_ARG_LIMIT
                        elif a < -EXP_ARG_LIMIT:
                            a = -EXP_ARG_LIMIT
                        r = math.exp(a)
                    else:
                        r = 0.0 if a == 0.0 else math.log(abs(a))
                if r > VALUE_LIMIT:
                    r = VALUE_LIMIT
                elif r < -VALUE_LIMIT:
                    r = -VALUE_LIMIT
                stack[sp] = r
                sp += 1
        out[p] = stack[0]
    return out


def eval_tree_values(codes, X):
    return _eval_tree_values(codes, X)


@njit(cache=True)
def _common_region_pairs(codes_a, ends_a, codes_b, ends_b):
    cap = min(codes_a.shape[0], codes_b.shape[0])
    out_a = np.empty(cap, dtype=np.int32)
    out_b = np.empty(cap, dtype=np.int32)
    stack_a = np.empty(cap, dtype=np.int32)
    stack_b = np.empty(cap, dtype=np.int32)
    stack_a[0] = 0
    stack_b[0] = 0
    sp = 1
    count = 0
    while sp > 0:
        sp -= 1
        ia = stack_a[sp]
        ib = stack_b[sp]
        out_a[count] = ia
        out_b[count] = ib
        count += 1
        aa = _ARITY[codes_a[ia]]
        ab = _ARITY[codes_b[ib]]
        if aa == ab and aa > 0:
            ca = ia + 1
            cb = ib + 1
            if aa == 1:
                stack_a[sp] = ca
                stack_b[sp] = cb
                sp += 1
            else:
                stack_a[sp] = ends_a[ca]
                stack_b[sp] = ends_b[cb]
                stack_a[sp + 1] = ca
                stack_b[sp + 1] = cb
                sp += 2
    return out_a[:count], out_b[:count]


def common_region_pairs(codes_a, ends_a, codes_b, ends_b):
    return _common_region_pairs(codes_a, ends_a, codes_b, ends_b)
