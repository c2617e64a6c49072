"""Pure NumPy/Python implementations of the hot tree kernels.

This is the fallback path selected with GPMATE_BACKEND=numpy (or when
numba is not importable). Semantics match `_kernels_numba` exactly; the
only tolerated divergence is last-ulp rounding of the vectorized
transcendentals versus libm scalars.
"""

import numpy as np

from .symbols import ARITY, EXP_ARG_LIMIT, VALUE_LIMIT

NAME = "numpy"


def tree_scan(codes):
    """Single pass over a preorder opcode array.

    Returns (ends, depths): ends[i] is one past the subtree rooted at
    preorder index i, depths[i] is the node's depth with the root at 1.
    Assumes `codes` encodes exactly one complete tree.
    """
    n = len(codes)
    ends = np.empty(n, dtype=np.int32)
    depths = np.empty(n, dtype=np.int32)
    stack_idx = [0] * n
    stack_rem = [0] * n
    sp = 0
    for i in range(n):
        depths[i] = sp + 1
        a = int(ARITY[codes[i]])
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


def _clamp(values):
    return np.clip(values, -VALUE_LIMIT, VALUE_LIMIT)


def eval_tree_values(codes, X):
    """Evaluate a preorder opcode array on every row of X (points x vars).

    Protected semantics: division by exactly 0 yields 1, log is ln|a| with
    ln|0| = 0, exp clamps its argument to ±EXP_ARG_LIMIT, and every
    function output saturates at ±VALUE_LIMIT.
    """
    stack = []
    for k in range(len(codes) - 1, -1, -1):
        c = int(codes[k])
        if c <= 1:
            stack.append(X[:, c])
        elif c <= 5:
            a = stack.pop()
            b = stack.pop()
            if c == 2:
                r = a + b
            elif c == 3:
                r = a - b
            elif c == 4:
                r = a * b
            else:
                zero = b == 0.0
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = a / b
                if zero.any():
                    r = np.where(zero, 1.0, r)
            stack.append(_clamp(r))
        else:
            a = stack.pop()
            if c == 6:
                r = np.sin(a)
            elif c == 7:
                r = np.cos(a)
            elif c == 8:
                r = np.exp(np.clip(a, -EXP_ARG_LIMIT, EXP_ARG_LIMIT))
            else:
                zero = a == 0.0
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = np.log(np.abs(a))
                if zero.any():
                    r = np.where(zero, 0.0, r)
            stack.append(_clamp(r))
    out = stack[0]
    # a bare-terminal tree leaves a view of X on the stack
    return np.array(out, dtype=np.float64, copy=True) if out.base is not None else out


def common_region_pairs(codes_a, ends_a, codes_b, ends_b):
    """Paired preorder indices of the common upper structure of two trees.

    The root pair is always first; a node's children are descended into
    iff the corresponding nodes have equal arity. Pairs are emitted in
    simultaneous preorder (depth-first, left-to-right) order.
    """
    cap = min(len(codes_a), len(codes_b))
    out_a = np.empty(cap, dtype=np.int32)
    out_b = np.empty(cap, dtype=np.int32)
    stack = [(0, 0)]
    count = 0
    while stack:
        ia, ib = stack.pop()
        out_a[count] = ia
        out_b[count] = ib
        count += 1
        aa = int(ARITY[codes_a[ia]])
        ab = int(ARITY[codes_b[ib]])
        if aa == ab and aa > 0:
            ca = ia + 1
            cb = ib + 1
            if aa == 1:
                stack.append((ca, cb))
            else:
                stack.append((int(ends_a[ca]), int(ends_b[cb])))
                stack.append((ca, cb))
    return out_a[:count], out_b[:count]
