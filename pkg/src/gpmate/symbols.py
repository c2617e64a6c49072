"""Primitive-set tables shared by the tree code and the evaluation kernels.

Trees are flat preorder arrays of opcodes. The opcode layout is fixed:
terminals first (x, y), then the four binary functions, then the four
unary ones, so kernels can branch on simple code ranges.
"""

import numpy as np

CODE_X = 0
CODE_Y = 1
CODE_ADD = 2
CODE_SUB = 3
CODE_MUL = 4
CODE_PDIV = 5
CODE_SIN = 6
CODE_COS = 7
CODE_EXP = 8
CODE_PLOG = 9

TERMINAL_NAMES = ("x", "y")
FUNCTION_NAMES = ("add", "sub", "mul", "pdiv", "sin", "cos", "exp", "plog")
NAMES = TERMINAL_NAMES + FUNCTION_NAMES
CODE_OF = {name: code for code, name in enumerate(NAMES)}

N_FUNCTIONS = len(FUNCTION_NAMES)
FIRST_FUNCTION = CODE_ADD
FIRST_UNARY = CODE_SIN

# arity per opcode, indexable by code
ARITY = np.array([0, 0, 2, 2, 2, 2, 1, 1, 1, 1], dtype=np.int8)

FUNCTION_ARITY = {name: int(ARITY[CODE_OF[name]]) for name in FUNCTION_NAMES}

# Protected-evaluation constants. Every function output saturates at
# ±VALUE_LIMIT so that squared errors (and their sums) stay finite;
# exp() additionally clamps its argument so the exponential itself
# cannot overflow before the output clamp is applied.
VALUE_LIMIT = 1e150
EXP_ARG_LIMIT = 700.0


def terminal_names(n_vars):
    """Terminal set for an n_vars-variable problem ("x", optionally "y")."""
    if n_vars not in (1, 2):
        raise ValueError(f"n_vars must be 1 or 2, got {n_vars}")
    return TERMINAL_NAMES[:n_vars]
