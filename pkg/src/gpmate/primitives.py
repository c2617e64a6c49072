"""Expression trees over the shared regression primitive set.

A tree is a flat preorder array of opcodes (see `symbols`): eight fixed
function symbols (add, sub, mul, pdiv, sin, cos, exp, plog) and variable
terminals only; there are no constants. The same representation serves
both chromosomes of an individual.

Evaluation is total ("protected"): pdiv returns 1 when the divisor is
exactly 0, plog is ln|a| with ln|0| = 0, exp clamps its argument to
±700, and every function output saturates at ±1e150 so mean-squared
errors stay finite for any tree up to the depth cap.
"""

import numpy as np

from . import backend
from .symbols import (
    ARITY,
    CODE_OF,
    FUNCTION_ARITY,
    FUNCTION_NAMES,
    NAMES,
    TERMINAL_NAMES,
)

__all__ = [
    "ExprTree",
    "ParseError",
    "FUNCTION_ARITY",
    "FUNCTION_NAMES",
    "TERMINAL_NAMES",
    "parse",
    "serialize",
    "depth",
    "size",
    "eval_tree",
    "eval_many",
]


class ParseError(ValueError):
    """Malformed prefix-notation input; `position` is the 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprTree:
    """Immutable expression tree stored as a preorder opcode array.

    Nodes are addressed by preorder index (root = 0). `ends[i]` is one
    past the last index of the subtree rooted at i, so `codes[i:ends[i]]`
    is that subtree's own preorder array; `node_depths[i]` is node i's
    depth with the root at 1. Subtree extraction and replacement derive
    the new arrays arithmetically instead of rescanning.
    """

    __slots__ = ("codes", "ends", "node_depths", "depth", "_n_vars", "_hash")

    def __init__(self, codes):
        codes = np.array(codes, dtype=np.int8, order="C")  # private copy
        if codes.ndim != 1 or len(codes) == 0:
            raise ValueError("codes must be a non-empty 1-d opcode array")
        if codes.min() < 0 or codes.max() >= len(NAMES):
            raise ValueError("codes contain an unknown opcode")
        slack = np.cumsum(1 - ARITY[codes].astype(np.int64))
        if slack[-1] != 1 or (len(slack) > 1 and slack[:-1].max() >= 1):
            raise ValueError("codes do not encode exactly one complete tree")
        ends, depths = backend.kernels().tree_scan(codes)
        self._init_from(codes, ends, depths, int(depths.max()))

    def _init_from(self, codes, ends, depths, depth):
        codes.setflags(write=False)
        ends.setflags(write=False)
        depths.setflags(write=False)
        self.codes = codes
        self.ends = ends
        self.node_depths = depths
        self.depth = depth
        self._n_vars = None
        self._hash = None

    @classmethod
    def _assemble(cls, codes, ends, depths, depth):
        tree = cls.__new__(cls)
        tree._init_from(codes, ends, depths, depth)
        return tree

    @property
    def size(self):
        return len(self.codes)

    @property
    def n_vars(self):
        """Highest variable index in use + 1 (1 for x-only, 2 if y occurs)."""
        if self._n_vars is None:
            self._n_vars = 2 if bool((self.codes == CODE_OF["y"]).any()) else 1
        return self._n_vars

    @property
    def root_symbol(self):
        return NAMES[self.codes[0]]

    def subtree(self, index):
        """The subtree rooted at preorder index `index`, as a new tree."""
        if not 0 <= index < self.size:
            raise IndexError(f"node index {index} out of range")
        if index == 0:
            return self
        end = int(self.ends[index])
        depths = self.node_depths[index:end] - (self.node_depths[index] - 1)
        return ExprTree._assemble(
            self.codes[index:end],
            self.ends[index:end] - index,
            depths,
            int(depths.max()),
        )

    def replace_subtree(self, index, replacement):
        """A new tree with the subtree at `index` swapped for `replacement`."""
        if not 0 <= index < self.size:
            raise IndexError(f"node index {index} out of range")
        if index == 0:
            return replacement
        end = int(self.ends[index])
        shift = replacement.size - (end - index)
        head_ends = self.ends[:index]
        # ancestors of the splice close at or after `end`; everything else
        # in the prefix closes at or before `index` and keeps its end
        codes = np.concatenate(
            (self.codes[:index], replacement.codes, self.codes[end:])
        )
        ends = np.concatenate(
            (
                np.where(head_ends >= end, head_ends + shift, head_ends),
                replacement.ends + index,
                self.ends[end:] + shift,
            )
        ).astype(np.int32, copy=False)
        graft_base = int(self.node_depths[index]) - 1
        depths = np.concatenate(
            (
                self.node_depths[:index],
                replacement.node_depths + graft_base,
                self.node_depths[end:],
            )
        ).astype(np.int32, copy=False)
        return ExprTree._assemble(codes, ends, depths, int(depths.max()))

    def serialize(self):
        return serialize(self)

    def __eq__(self, other):
        if not isinstance(other, ExprTree):
            return NotImplemented
        return np.array_equal(self.codes, other.codes)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.codes.tobytes())
        return self._hash

    def __repr__(self):
        return f"ExprTree({serialize(self)!r})"


def size(tree):
    """Total node count."""
    return tree.size


def depth(tree):
    """Longest root-to-leaf node count; a single node has depth 1."""
    return tree.depth


def serialize(tree):
    """Canonical prefix form: ``(symbol child1 ... childN)``, terminals bare."""
    codes = tree.codes
    out = []

    def emit(i):
        c = codes[i]
        if ARITY[c] == 0:
            out.append(NAMES[c])
            return i + 1
        out.append("(")
        out.append(NAMES[c])
        j = i + 1
        for _ in range(ARITY[c]):
            out.append(" ")
            j = emit(j)
        out.append(")")
        return j

    emit(0)
    return "".join(out)


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append(("sym", text[i:j], i))
            i = j
    return tokens


def parse(text):
    """Parse canonical prefix notation back into an ExprTree.

    Raises ParseError (with the offending position) on unknown symbols,
    arity mismatches, unbalanced parentheses, or trailing input.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)
    codes = []

    def expect(kind_pos):
        if kind_pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        return tokens[kind_pos]

    def parse_expr(pos):
        kind, value, at = expect(pos)
        if kind == "sym":
            code = CODE_OF.get(value)
            if code is None:
                raise ParseError(f"unknown symbol {value!r}", at)
            if ARITY[code] != 0:
                raise ParseError(
                    f"function {value!r} must be written as ({value} ...)", at
                )
            codes.append(code)
            return pos + 1
        if kind == "(":
            kind2, value2, at2 = expect(pos + 1)
            if kind2 != "sym" or CODE_OF.get(value2) is None:
                raise ParseError("expected a function symbol after '('", at2)
            code = CODE_OF[value2]
            arity = int(ARITY[code])
            if arity == 0:
                raise ParseError(f"terminal {value2!r} takes no parentheses", at2)
            codes.append(code)
            cur = pos + 2
            for _ in range(arity):
                kind3, _, at3 = expect(cur)
                if kind3 == ")":
                    raise ParseError(
                        f"arity mismatch: {value2!r} needs {arity} children", at3
                    )
                cur = parse_expr(cur)
            kind4, _, at4 = expect(cur)
            if kind4 != ")":
                raise ParseError(
                    f"arity mismatch: {value2!r} takes only {arity} children", at4
                )
            return cur + 1
        raise ParseError("unexpected ')'", at)

    end = parse_expr(0)
    if end != len(tokens):
        raise ParseError("trailing input after expression", tokens[end][2])
    return ExprTree(np.array(codes, dtype=np.int8))


def eval_many(tree, points):
    """Evaluate `tree` at every row of `points` (n_points x n_vars).

    Always returns finite float64 values for finite inputs. Raises
    ValueError when the tree references a variable the points do not
    supply.
    """
    X = np.ascontiguousarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("points must be a 2-d (n_points, n_vars) array")
    if tree.n_vars > X.shape[1]:
        raise ValueError(
            f"tree references variable 'y' but points supply "
            f"{X.shape[1]} value(s) per row"
        )
    return backend.kernels().eval_tree_values(tree.codes, X)


def eval_tree(tree, point):
    """Evaluate `tree` at a single point (scalar or sequence of values)."""
    vec = np.atleast_1d(np.asarray(point, dtype=np.float64))
    return float(eval_many(tree, vec.reshape(1, -1))[0])
