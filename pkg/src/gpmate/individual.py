"""Dual-chromosome individuals and population construction.

Every individual carries two trees built from the same primitive set: the
solution (what gets scored against the fitness cases) and a preference
tree describing its ideal mate. Fitness depends on the solution only;
regimes that ignore preferences simply never read them.
"""

from dataclasses import dataclass, field

import numpy as np

from .benchmarks import PROBLEMS
from .primitives import ExprTree, eval_many, parse, serialize
from .symbols import ARITY, FIRST_FUNCTION, N_FUNCTIONS

__all__ = [
    "Individual",
    "Population",
    "grow_tree",
    "full_tree",
    "ramped_half_and_half",
    "init_population",
    "evaluate",
    "mean_squared_error",
    "write_snapshot",
    "read_snapshot",
]


@dataclass(eq=False)
class Individual:
    solution: ExprTree
    preference: ExprTree
    fitness: float = field(default=None)


def grow_tree(max_depth, n_vars, rng):
    """Koza grow: below `max_depth` each node is a terminal with
    probability n_terminals/(n_terminals + n_functions), else a uniform
    function; at `max_depth` terminals are forced. Depth counts nodes,
    so max_depth=1 always yields a bare terminal."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    p_terminal = n_vars / (n_vars + N_FUNCTIONS)
    codes = []

    def build(level):
        if level == max_depth or rng.random() < p_terminal:
            codes.append(int(rng.integers(n_vars)))
            return
        func = FIRST_FUNCTION + int(rng.integers(N_FUNCTIONS))
        codes.append(func)
        for _ in range(int(ARITY[func])):
            build(level + 1)

    build(1)
    return ExprTree(np.array(codes, dtype=np.int8))


def full_tree(max_depth, n_vars, rng):
    """Koza full: functions at every level below `max_depth`, terminals
    on the last one."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    codes = []

    def build(level):
        if level == max_depth:
            codes.append(int(rng.integers(n_vars)))
            return
        func = FIRST_FUNCTION + int(rng.integers(N_FUNCTIONS))
        codes.append(func)
        for _ in range(int(ARITY[func])):
            build(level + 1)

    build(1)
    return ExprTree(np.array(codes, dtype=np.int8))


def ramped_half_and_half(count, depth_low, depth_high, rng, n_vars=1, unique=False):
    """`count` trees, each with its own max depth drawn uniformly from
    [depth_low, depth_high]; even indices use full, odd use grow, giving
    an exact 50/50 method split under deterministic seeding.

    With `unique=True` duplicate trees are redrawn (the classic ramped
    half-and-half duplicate check), giving up after 20 * count attempts
    so degenerate settings (for example a depth-1 ramp over one terminal)
    still terminate.
    """
    if not 1 <= depth_low <= depth_high:
        raise ValueError("need 1 <= depth_low <= depth_high")
    span = depth_high - depth_low + 1
    trees = []
    seen = set()
    attempts = 0
    limit = 20 * count
    index = 0
    while len(trees) < count:
        max_depth = depth_low + int(rng.integers(span))
        builder = full_tree if index % 2 == 0 else grow_tree
        tree = builder(max_depth, n_vars, rng)
        attempts += 1
        if unique and attempts < limit:
            key = tree.codes.tobytes()
            if key in seen:
                continue
            seen.add(key)
        trees.append(tree)
        index += 1
    return trees


class Population:
    """Ordered, size-fixed collection of individuals plus evaluation caches.

    `evaluate_all` computes fitness for every member in index order and
    keeps each solution's output vector so selection can reuse it;
    preference outputs are computed lazily, per member, only when a
    preference-aware regime asks for them.
    """

    def __init__(self, members):
        self.members = list(members)
        if not self.members:
            raise ValueError("population must not be empty")
        self._fitness = None
        self._solution_outputs = None
        self._pref_outputs = None
        self._pref_ready = None

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def fitness(self):
        if self._fitness is None:
            raise RuntimeError("population has not been evaluated")
        return self._fitness

    @property
    def evaluated(self):
        return self._fitness is not None

    def evaluate_all(self, cases):
        if self._fitness is not None:
            return self._fitness
        n = len(self.members)
        outputs = np.empty((n, len(cases)), dtype=np.float64)
        fitness = np.empty(n, dtype=np.float64)
        for i, ind in enumerate(self.members):
            outputs[i] = eval_many(ind.solution, cases.points)
            fitness[i] = mean_squared_error(outputs[i], cases.targets)
            ind.fitness = float(fitness[i])
        cases.n_solution_evals += n
        self._solution_outputs = outputs
        self._fitness = fitness
        return fitness

    def solution_outputs(self, index):
        if self._solution_outputs is None:
            raise RuntimeError("population has not been evaluated")
        return self._solution_outputs[index]

    def preference_outputs(self, index, cases):
        if self._pref_outputs is None:
            self._pref_outputs = np.empty(
                (len(self.members), len(cases)), dtype=np.float64
            )
            self._pref_ready = np.zeros(len(self.members), dtype=bool)
        if not self._pref_ready[index]:
            self._pref_outputs[index] = eval_many(
                self.members[index].preference, cases.points
            )
            self._pref_ready[index] = True
            cases.n_preference_evals += 1
        return self._pref_outputs[index]


def mean_squared_error(outputs, targets):
    """Shared MSE reduction; both fitness and preference distance use it
    so the two quantities are bit-comparable."""
    diff = outputs - targets
    return float(diff @ diff) / len(diff)


def evaluate(individual, cases):
    """MSE of the solution chromosome against the cases; cached on the
    individual. The preference chromosome plays no part."""
    if individual.fitness is None:
        outputs = eval_many(individual.solution, cases.points)
        cases.n_solution_evals += 1
        individual.fitness = mean_squared_error(outputs, cases.targets)
    return individual.fitness


def init_population(config, rng_solutions, rng_preferences):
    """Generation-0 population from two independent streams.

    Solution chromosomes are drawn exclusively from `rng_solutions` and
    preferences exclusively from `rng_preferences`, so for a fixed run
    seed the solution population is identical no matter which selection
    approach later runs (approaches that never read preferences still
    carry them). Solutions honor the config's duplicate check; the
    preference pool keeps its natural duplicates.
    """
    n_vars = PROBLEMS[config.problem].arity
    low, high = config.init_depth
    solutions = ramped_half_and_half(
        config.population_size, low, high, rng_solutions, n_vars,
        unique=getattr(config, "init_unique_solutions", False),
    )
    preferences = ramped_half_and_half(
        config.population_size, low, high, rng_preferences, n_vars
    )
    return Population(
        [Individual(s, p) for s, p in zip(solutions, preferences)]
    )


def write_snapshot(population, path):
    """One member per line: solution TAB preference TAB fitness."""
    with open(path, "w") as fh:
        for ind in population.members:
            fit = "unevaluated" if ind.fitness is None else repr(ind.fitness)
            fh.write(f"{serialize(ind.solution)}\t{serialize(ind.preference)}\t{fit}\n")


def read_snapshot(path):
    members = []
    with open(path) as fh:
        for line in fh:
            sol, pref, fit = line.rstrip("\n").split("\t")
            ind = Individual(parse(sol), parse(pref))
            if fit != "unevaluated":
                ind.fitness = float(fit)
            members.append(ind)
    return Population(members)
