import math

import numpy as np
import pytest

from gpmate.individual import full_tree, grow_tree
from gpmate.primitives import (
    ExprTree,
    ParseError,
    depth,
    eval_many,
    eval_tree,
    parse,
    serialize,
    size,
)
from gpmate.symbols import FUNCTION_ARITY, FUNCTION_NAMES, VALUE_LIMIT


def random_tree(rng, max_depth=6, n_vars=1):
    builder = grow_tree if rng.random() < 0.5 else full_tree
    return builder(1 + int(rng.integers(max_depth)), n_vars, rng)


def numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def test_function_set_is_exactly_the_eight_symbols():
    assert set(FUNCTION_NAMES) == {
        "add", "sub", "mul", "pdiv", "sin", "cos", "exp", "plog",
    }
    assert FUNCTION_ARITY == {
        "add": 2, "sub": 2, "mul": 2, "pdiv": 2,
        "sin": 1, "cos": 1, "exp": 1, "plog": 1,
    }


def test_eval_basic_arithmetic():
    assert eval_tree(parse("(add x (mul x x))"), 2.0) == 6.0


def test_protected_division_returns_one_on_zero_divisor():
    assert eval_tree(parse("(pdiv x (sub x x))"), 3.0) == 1.0


def test_protected_log_at_zero():
    assert eval_tree(parse("(plog x)"), 0.0) == 0.0
    assert eval_tree(parse("(plog x)"), -math.e) == pytest.approx(1.0)


def test_exp_saturates_instead_of_overflowing():
    value = eval_tree(parse("(exp x)"), 1000.0)
    assert math.isfinite(value)
    assert value == VALUE_LIMIT


def test_products_of_huge_values_stay_finite():
    tree = parse("(mul (exp x) (exp x))")
    assert math.isfinite(eval_tree(tree, 1000.0))


@pytest.mark.parametrize(
    "text,expected_depth,expected_size",
    [("x", 1, 1), ("(add x x)", 2, 3), ("(sin (sin (sin x)))", 4, 4)],
)
def test_depth_and_size(text, expected_depth, expected_size):
    tree = parse(text)
    assert depth(tree) == expected_depth
    assert size(tree) == expected_size


def test_serialize_exact_forms():
    assert serialize(parse("(add x x)")) == "(add x x)"
    assert serialize(parse("x")) == "x"
    assert serialize(parse("  ( add  x ( sin y ) ) ")) == "(add x (sin y))"


def test_round_trip_on_random_trees():
    rng = np.random.default_rng(1234)
    for _ in range(300):
        tree = random_tree(rng, n_vars=1 + int(rng.integers(2)))
        again = parse(serialize(tree))
        assert again == tree
        assert serialize(again) == serialize(tree)


@pytest.mark.parametrize(
    "text",
    ["(sin)", "(add x)", "(add x x x)", "(sin x x)", "x y", "(", ")",
     "(frobnicate x)", "(x x)", "sin", "", "(add x x) y"],
)
def test_parse_rejects_malformed_input(text):
    with pytest.raises(ParseError) as excinfo:
        parse(text)
    assert excinfo.value.position >= 0


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as excinfo:
        parse("(add x (frob x))")
    assert excinfo.value.position == 8


def test_eval_totality_on_random_trees_and_points():
    rng = np.random.default_rng(99)
    points = np.concatenate(
        [rng.uniform(-1e10, 1e10, size=50), [0.0, 1.0, -1.0, 1e-300, 700.0]]
    ).reshape(-1, 1)
    for _ in range(200):
        tree = random_tree(rng, max_depth=8)
        out = eval_many(tree, points)
        assert np.isfinite(out).all()


def test_eval_is_pure():
    rng = np.random.default_rng(5)
    tree = random_tree(rng, max_depth=8)
    points = rng.uniform(-5, 5, size=(64, 1))
    first = eval_many(tree, points)
    for _ in range(3):
        assert np.array_equal(eval_many(tree, points), first)


def test_eval_unknown_variable_is_an_error():
    tree = parse("(add x y)")
    with pytest.raises(ValueError, match="variable"):
        eval_tree(tree, 1.0)
    # supplying both variables works
    assert eval_tree(tree, (1.0, 2.0)) == 3.0


def test_codes_are_immutable():
    tree = parse("(add x x)")
    with pytest.raises(ValueError):
        tree.codes[0] = 0


def test_constructor_rejects_incomplete_code_arrays():
    with pytest.raises(ValueError):
        ExprTree(np.array([2, 0], dtype=np.int8))  # add with one child
    with pytest.raises(ValueError):
        ExprTree(np.array([0, 0], dtype=np.int8))  # two roots
    with pytest.raises(ValueError):
        ExprTree(np.array([], dtype=np.int8))
    with pytest.raises(ValueError):
        ExprTree(np.array([77], dtype=np.int8))


def test_subtree_and_replace_match_fresh_scans():
    # the derived ends/depths arrays must agree with a from-scratch build
    rng = np.random.default_rng(31)
    for _ in range(200):
        tree = random_tree(rng, max_depth=7, n_vars=2)
        idx = int(rng.integers(tree.size))
        sub = tree.subtree(idx)
        rebuilt = ExprTree(sub.codes)
        assert np.array_equal(sub.ends, rebuilt.ends)
        assert np.array_equal(sub.node_depths, rebuilt.node_depths)
        assert sub.depth == rebuilt.depth

        donor = random_tree(rng, max_depth=5, n_vars=2)
        if idx > 0:
            grafted = tree.replace_subtree(idx, donor)
            rebuilt = ExprTree(grafted.codes)
            assert np.array_equal(grafted.ends, rebuilt.ends)
            assert np.array_equal(grafted.node_depths, rebuilt.node_depths)
            assert grafted.depth == rebuilt.depth


def test_replace_subtree_at_root_returns_replacement():
    tree = parse("(add x x)")
    donor = parse("(sin x)")
    assert tree.replace_subtree(0, donor) == donor


def arithmetic_tree(rng, max_depth):
    # add/sub/mul/pdiv only: both backends must agree bit for bit
    codes = []

    def build(level):
        if level == max_depth or rng.random() < 0.3:
            codes.append(int(rng.integers(2)))
            return
        codes.append(2 + int(rng.integers(4)))
        build(level + 1)
        build(level + 1)

    build(1)
    return ExprTree(np.array(codes, dtype=np.int8))


@pytest.mark.skipif(not numba_available(), reason="numba backend unavailable")
def test_backends_agree_exactly_on_protected_arithmetic():
    from gpmate import _kernels_numba, _kernels_numpy

    rng = np.random.default_rng(7)
    points = np.ascontiguousarray(
        np.concatenate(
            [rng.uniform(-5, 5, size=(60, 2)), [[0.0, 0.0], [1e-300, -1e150]]]
        )
    )
    for _ in range(300):
        tree = arithmetic_tree(rng, 8)
        nb = _kernels_numba.eval_tree_values(tree.codes, points)
        np_ = _kernels_numpy.eval_tree_values(tree.codes, points)
        assert np.array_equal(nb, np_)


@pytest.mark.skipif(not numba_available(), reason="numba backend unavailable")
def test_backends_agree_closely_on_shallow_mixed_trees():
    # transcendentals may differ in the last ulps between the vectorized
    # and libm paths; shallow trees keep their arguments well-conditioned
    from gpmate import _kernels_numba, _kernels_numpy

    rng = np.random.default_rng(8)
    points = np.ascontiguousarray(rng.uniform(-2, 2, size=(50, 2)))
    for _ in range(300):
        tree = random_tree(rng, max_depth=4, n_vars=2)
        nb = _kernels_numba.eval_tree_values(tree.codes, points)
        np_ = _kernels_numpy.eval_tree_values(tree.codes, points)
        assert np.allclose(nb, np_, rtol=1e-9, atol=1e-300)


@pytest.mark.skipif(not numba_available(), reason="numba backend unavailable")
def test_backends_integer_kernels_are_identical():
    from gpmate import _kernels_numba, _kernels_numpy

    rng = np.random.default_rng(9)
    for _ in range(200):
        a = random_tree(rng, max_depth=8, n_vars=2)
        b = random_tree(rng, max_depth=8, n_vars=2)
        ends_nb = _kernels_numba.tree_scan(a.codes)
        ends_np = _kernels_numpy.tree_scan(a.codes)
        assert np.array_equal(ends_nb[0], ends_np[0])
        assert np.array_equal(ends_nb[1], ends_np[1])

        pairs_nb = _kernels_numba.common_region_pairs(a.codes, a.ends, b.codes, b.ends)
        pairs_np = _kernels_numpy.common_region_pairs(a.codes, a.ends, b.codes, b.ends)
        assert np.array_equal(pairs_nb[0], pairs_np[0])
        assert np.array_equal(pairs_nb[1], pairs_np[1])
