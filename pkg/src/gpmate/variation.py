"""Crossover and subtree mutation with root-point exclusion.

Both operators act on both chromosomes once their per-offspring
probability fires, pick their points independently per chromosome, never
touch the root (so a root symbol can be lost but never created), and
revert a chromosome to the first parent's copy whenever the result would
exceed the depth cap.

Two crossover mechanics are provided:

* "subtree" (default): one non-root point is drawn per parent and
  parent2's subtree is grafted onto parent1's point. Offspring stay
  rooted in parent1 but self-recombination still creates novelty, which
  is what keeps populations from collapsing into clones.
* "common_region": the crossover point is a single address drawn from
  the common upper structure of both parents (minus the root) and the
  swap happens at that shared address. Structurally conservative; a
  cloned couple always reproduces itself exactly.
"""

from dataclasses import dataclass

from . import backend
from .individual import Individual, grow_tree

__all__ = [
    "VariationConfig",
    "CROSSOVER_OPERATORS",
    "common_region",
    "one_point_crossover",
    "exchange_crossover",
    "crossover_pair",
    "subtree_mutation",
    "mutate_individual",
]

CROSSOVER_OPERATORS = ("subtree", "common_region")


@dataclass(frozen=True)
class VariationConfig:
    crossover_prob: float = 0.9
    mutation_prob: float = 0.05
    max_depth: int = 17
    mutation_subtree_depth: tuple = (2, 6)
    n_vars: int = 1
    crossover_operator: str = "subtree"

    def __post_init__(self):
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        low, high = self.mutation_subtree_depth
        if not 1 <= low <= high:
            raise ValueError("mutation_subtree_depth must satisfy 1 <= low <= high")
        if self.crossover_operator not in CROSSOVER_OPERATORS:
            raise ValueError(
                f"crossover_operator must be one of {CROSSOVER_OPERATORS}"
            )


def _common_pairs(a, b):
    return backend.kernels().common_region_pairs(a.codes, a.ends, b.codes, b.ends)


def common_region(a, b):
    """Paired node addresses of the largest common upper structure.

    The root pair (0, 0) is always present; descent continues through
    children whose nodes have equal arity in both trees. Pairs are listed
    in simultaneous preorder order, which is also the order crossover
    points are drawn from.
    """
    idx_a, idx_b = _common_pairs(a, b)
    return list(zip(idx_a.tolist(), idx_b.tolist()))


def _crossover_common_region(first, second, max_depth, rng):
    # one uniform draw over the common region minus the root; no draw
    # when the region is degenerate (both single nodes)
    idx_a, idx_b = _common_pairs(first, second)
    choices = len(idx_a) - 1
    if choices == 0:
        return first
    pick = 1 + int(rng.integers(choices))
    child = first.replace_subtree(
        int(idx_a[pick]), second.subtree(int(idx_b[pick]))
    )
    return child if child.depth <= max_depth else first


def _crossover_subtree(first, second, max_depth, rng):
    # independent non-root points (receiver first, then donor); no draws
    # when either parent has no non-root node
    if first.size == 1 or second.size == 1:
        return first
    point = 1 + int(rng.integers(first.size - 1))
    donor = 1 + int(rng.integers(second.size - 1))
    child = first.replace_subtree(point, second.subtree(donor))
    return child if child.depth <= max_depth else first


def one_point_crossover(parent1, parent2, cfg, rng):
    """Single offspring rooted in parent1 (the chooser).

    A single Bernoulli draw gates the whole operator; when it fires, each
    chromosome is recombined independently with the configured mechanics
    (see the module docstring). Draw order: gate, solution point(s),
    preference point(s). The offspring's fitness is left unevaluated.
    """
    if rng.random() >= cfg.crossover_prob:
        return Individual(parent1.solution, parent1.preference)
    cross = (
        _crossover_subtree
        if cfg.crossover_operator == "subtree"
        else _crossover_common_region
    )
    solution = cross(parent1.solution, parent2.solution, cfg.max_depth, rng)
    preference = cross(parent1.preference, parent2.preference, cfg.max_depth, rng)
    return Individual(solution, preference)


def _exchange_subtree(a, b, max_depth, rng):
    # same two grafting sites serve both children (material exchange)
    if a.size == 1 or b.size == 1:
        return a, b
    pa = 1 + int(rng.integers(a.size - 1))
    pb = 1 + int(rng.integers(b.size - 1))
    child_a = a.replace_subtree(pa, b.subtree(pb))
    child_b = b.replace_subtree(pb, a.subtree(pa))
    return (
        child_a if child_a.depth <= max_depth else a,
        child_b if child_b.depth <= max_depth else b,
    )


def _exchange_common_region(a, b, max_depth, rng):
    idx_a, idx_b = _common_pairs(a, b)
    choices = len(idx_a) - 1
    if choices == 0:
        return a, b
    pick = 1 + int(rng.integers(choices))
    pa, pb = int(idx_a[pick]), int(idx_b[pick])
    child_a = a.replace_subtree(pa, b.subtree(pb))
    child_b = b.replace_subtree(pb, a.subtree(pa))
    return (
        child_a if child_a.depth <= max_depth else a,
        child_b if child_b.depth <= max_depth else b,
    )


def exchange_crossover(parent1, parent2, cfg, rng):
    """Two offspring from one couple: the subtree exchange both ways.

    Child 1 is rooted in parent1 (the chooser), child 2 in parent2 (the
    courter), so the fitness-blind parent's lineage enters the next
    generation whole rather than only as donated subtrees. Per chromosome
    a single pair of points is drawn and each child's depth cap reverts
    that child alone. No probability gate: the caller decides whether the
    operator fires.
    """
    exchange = (
        _exchange_subtree
        if cfg.crossover_operator == "subtree"
        else _exchange_common_region
    )
    sol_a, sol_b = exchange(parent1.solution, parent2.solution, cfg.max_depth, rng)
    pref_a, pref_b = exchange(
        parent1.preference, parent2.preference, cfg.max_depth, rng
    )
    return Individual(sol_a, pref_a), Individual(sol_b, pref_b)


def crossover_pair(parent1, parent2, cfg, rng):
    """Gated two-offspring crossover (copies both parents when the
    crossover_prob draw does not fire)."""
    if rng.random() >= cfg.crossover_prob:
        return (
            Individual(parent1.solution, parent1.preference),
            Individual(parent2.solution, parent2.preference),
        )
    return exchange_crossover(parent1, parent2, cfg, rng)


def _mutate_chromosome(tree, cfg, rng):
    # single-node chromosomes have no non-root point and are never mutated
    if tree.size == 1:
        return tree
    point = 1 + int(rng.integers(tree.size - 1))
    low, high = cfg.mutation_subtree_depth
    sub_depth = low + int(rng.integers(high - low + 1))
    child = tree.replace_subtree(point, grow_tree(sub_depth, cfg.n_vars, rng))
    return child if child.depth <= cfg.max_depth else tree


def mutate_individual(individual, cfg, rng):
    """Subtree-mutate both chromosomes unconditionally (solution first).

    Draw order per chromosome: point, regrow depth, then the grow draws.
    Used directly by mutation slots in operator-exclusive pipelines.
    """
    solution = _mutate_chromosome(individual.solution, cfg, rng)
    preference = _mutate_chromosome(individual.preference, cfg, rng)
    return Individual(solution, preference)


def subtree_mutation(individual, cfg, rng):
    """Replace a uniformly chosen non-root subtree with a fresh grown one.

    One Bernoulli draw per individual; when it fires, both chromosomes
    mutate independently (solution first).
    """
    if rng.random() >= cfg.mutation_prob:
        return individual
    return mutate_individual(individual, cfg, rng)
