import numpy as np
import pytest

from gpmate.individual import Individual, full_tree, grow_tree
from gpmate.primitives import parse, serialize
from gpmate.symbols import ARITY
from gpmate.variation import (
    VariationConfig,
    common_region,
    crossover_pair,
    one_point_crossover,
    subtree_mutation,
)


def random_tree(rng, max_depth=6, n_vars=1):
    builder = grow_tree if rng.random() < 0.5 else full_tree
    return builder(1 + int(rng.integers(max_depth)), n_vars, rng)


def random_individual(rng, max_depth=6, n_vars=1):
    return Individual(
        random_tree(rng, max_depth, n_vars), random_tree(rng, max_depth, n_vars)
    )


def oracle_common_region(a, b):
    """Independent recursive formulation of the arity-matching descent."""

    def walk(ia, ib):
        pairs = [(ia, ib)]
        arity_a = int(ARITY[a.codes[ia]])
        arity_b = int(ARITY[b.codes[ib]])
        if arity_a == arity_b and arity_a > 0:
            ca, cb = ia + 1, ib + 1
            for _ in range(arity_a):
                pairs.extend(walk(ca, cb))
                ca, cb = int(a.ends[ca]), int(b.ends[cb])
        return pairs

    return walk(0, 0)


def test_common_region_of_identical_trees_is_whole_tree():
    tree = parse("(add (sin x) (mul x (cos x)))")
    assert common_region(tree, tree) == [(i, i) for i in range(tree.size)]


def test_common_region_with_terminal_is_root_only():
    assert common_region(parse("x"), parse("(add x x)")) == [(0, 0)]
    assert common_region(parse("(add x x)"), parse("x")) == [(0, 0)]


def test_common_region_spec_trace():
    # arity mismatch stops the descent below both children: the region is
    # root plus the two child slots (child 1 sits at preorder 2 in a but
    # preorder 3 in b)
    a = parse("(add x (sin x))")
    b = parse("(mul (sin x) x)")
    assert common_region(a, b) == [(0, 0), (1, 1), (2, 3)]


def test_common_region_matches_recursive_oracle():
    rng = np.random.default_rng(10)
    for _ in range(300):
        a = random_tree(rng, 6, 2)
        b = random_tree(rng, 6, 2)
        assert common_region(a, b) == oracle_common_region(a, b)


def test_common_region_is_symmetric():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = random_tree(rng, 6)
        b = random_tree(rng, 6)
        forward = common_region(a, b)
        backward = common_region(b, a)
        assert [(j, i) for i, j in forward] == backward


@pytest.fixture(params=["subtree", "common_region"])
def cfg(request):
    return VariationConfig(crossover_operator=request.param)


def test_crossover_keeps_parent1_root(cfg):
    rng = np.random.default_rng(12)
    for _ in range(200):
        p1 = random_individual(rng)
        p2 = random_individual(rng)
        child = one_point_crossover(p1, p2, cfg, rng)
        assert child.solution.root_symbol == p1.solution.root_symbol
        assert child.preference.root_symbol == p1.preference.root_symbol
        assert child.fitness is None


def test_crossover_pair_roots_follow_their_base_parents(cfg):
    rng = np.random.default_rng(13)
    for _ in range(200):
        p1 = random_individual(rng)
        p2 = random_individual(rng)
        c1, c2 = crossover_pair(p1, p2, cfg, rng)
        assert c1.solution.root_symbol == p1.solution.root_symbol
        assert c2.solution.root_symbol == p2.solution.root_symbol
        assert c1.preference.root_symbol == p1.preference.root_symbol
        assert c2.preference.root_symbol == p2.preference.root_symbol


def test_common_region_crossover_of_identical_parents_is_identity():
    cfg = VariationConfig(crossover_operator="common_region", crossover_prob=1.0)
    rng = np.random.default_rng(14)
    for _ in range(100):
        tree = random_tree(rng, 6)
        pref = random_tree(rng, 6)
        p1 = Individual(tree, pref)
        p2 = Individual(tree, pref)
        child = one_point_crossover(p1, p2, cfg, rng)
        assert child.solution == tree
        assert child.preference == pref


def test_crossover_between_single_terminals_copies_parent1(cfg):
    rng = np.random.default_rng(15)
    p1 = Individual(parse("x"), parse("x"))
    p2 = Individual(parse("x"), parse("x"))
    child = one_point_crossover(
        p1, p2, VariationConfig(crossover_prob=1.0,
                                crossover_operator=cfg.crossover_operator), rng
    )
    assert child.solution == p1.solution
    assert child.preference == p1.preference


def test_crossover_prob_zero_copies_parent1_exactly(cfg):
    rng = np.random.default_rng(16)
    zero = VariationConfig(
        crossover_prob=0.0, crossover_operator=cfg.crossover_operator
    )
    for _ in range(50):
        p1 = random_individual(rng)
        p2 = random_individual(rng)
        child = one_point_crossover(p1, p2, zero, rng)
        assert child.solution == p1.solution
        assert child.preference == p1.preference


def test_mutation_prob_zero_is_identity():
    rng = np.random.default_rng(17)
    cfg = VariationConfig(mutation_prob=0.0)
    ind = random_individual(rng)
    assert subtree_mutation(ind, cfg, rng) is ind


def test_mutation_never_touches_single_node_chromosome():
    rng = np.random.default_rng(18)
    cfg = VariationConfig(mutation_prob=1.0)
    ind = Individual(parse("x"), parse("x"))
    for _ in range(50):
        out = subtree_mutation(ind, cfg, rng)
        assert out.solution == ind.solution
        assert out.preference == ind.preference


def test_mutation_keeps_root():
    rng = np.random.default_rng(19)
    cfg = VariationConfig(mutation_prob=1.0)
    for _ in range(200):
        ind = random_individual(rng)
        out = subtree_mutation(ind, cfg, rng)
        assert out.solution.root_symbol == ind.solution.root_symbol
        assert out.preference.root_symbol == ind.preference.root_symbol


def test_mutation_depth_cap_reverts_chromosome():
    rng = np.random.default_rng(20)
    # max_depth equal to the current depth: any deepening must be discarded
    cfg = VariationConfig(
        mutation_prob=1.0, max_depth=3, mutation_subtree_depth=(6, 6)
    )
    base = parse("(add (sin x) x)")
    ind = Individual(base, base)
    for _ in range(50):
        out = subtree_mutation(ind, cfg, rng)
        assert out.solution.depth <= 3
        assert out.preference.depth <= 3


def test_operator_applications_respect_depth_cap():
    # bulk property check across both operators and both mechanics
    rng = np.random.default_rng(21)
    for operator in ("subtree", "common_region"):
        cfg = VariationConfig(
            crossover_prob=1.0, mutation_prob=1.0, crossover_operator=operator
        )
        population = [random_individual(rng, max_depth=8, n_vars=2) for _ in range(60)]
        count = 0
        while count < 50_000:
            i, j = rng.integers(len(population), size=2)
            c1, c2 = crossover_pair(
                population[int(i)], population[int(j)], cfg, rng
            )
            single = one_point_crossover(
                population[int(i)], population[int(j)], cfg, rng
            )
            for child in (c1, c2, subtree_mutation(single, cfg, rng)):
                assert child.solution.depth <= 17
                assert child.preference.depth <= 17
                count += 1
            population[int(rng.integers(len(population)))] = c1


def test_variation_config_validation():
    with pytest.raises(ValueError):
        VariationConfig(crossover_prob=1.5)
    with pytest.raises(ValueError):
        VariationConfig(mutation_prob=-0.1)
    with pytest.raises(ValueError):
        VariationConfig(max_depth=0)
    with pytest.raises(ValueError):
        VariationConfig(mutation_subtree_depth=(4, 2))
    with pytest.raises(ValueError):
        VariationConfig(crossover_operator="bogus")
