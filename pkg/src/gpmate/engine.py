"""Generational evolutionary loop with per-run metrics.

Each generation breeds exactly population_size offspring and replaces
the population wholesale; there is no elitism, so a solution found early
can be lost again. Two breeding pipelines are available:

* "exclusive" (default): every breeding event draws one operator --
  crossover (both-ways subtree exchange, two children, one rooted in
  each parent), mutation (a tournament parent with both chromosomes
  subtree-mutated), or reproduction (a tournament copy) -- with
  probabilities crossover_prob, mutation_prob and the remainder. Letting
  courter-rooted children through whole is what keeps the fitness-blind
  lineages alive.
* "sequential": select a couple, apply gated crossover, then gated
  subtree mutation to the offspring (offspring_per_couple picks one
  chooser-rooted child or the two-children exchange).

All randomness comes from named substreams of the run seed, which makes
a whole run a pure function of its RunConfig. Stream layout:
init-solutions, init-preferences and fitness-cases hang directly off the
run seed; breeding uses one substream per (generation, event index) so
any parallel schedule reproduces the sequential result.
"""

import json
from dataclasses import asdict, dataclass, field, fields

from .benchmarks import PROBLEMS, make_cases
from .individual import Individual, Population, init_population, serialize
from .primitives import parse
from .seeding import substream
from .selection import APPROACHES, CoupleRecord, SelectionConfig, select_couple, tournament
from .variation import (
    CROSSOVER_OPERATORS,
    VariationConfig,
    crossover_pair,
    exchange_crossover,
    mutate_individual,
    one_point_crossover,
    subtree_mutation,
)

__all__ = [
    "RunConfig",
    "RoleTally",
    "MetricsLog",
    "BestOfRun",
    "SUCCESS_THRESHOLD",
    "substream",
    "run",
    "unique_solutions",
    "root_converged",
    "tally_roles",
    "best_of_run",
    "write_run_log",
]

SUCCESS_THRESHOLD = 1e-4

# named stream tags under the run seed
STREAM_INIT_SOLUTIONS = 0
STREAM_INIT_PREFERENCES = 1
STREAM_FITNESS_CASES = 2
STREAM_BREEDING = 3


@dataclass(frozen=True)
class RunConfig:
    approach: str
    problem: str
    mutation_prob: float = 0.05
    crossover_prob: float = 0.9
    population_size: int = 100
    generations: int = 1500
    tournament_size: int = 5
    candidate_set_size: int = 5
    max_depth: int = 17
    init_depth: tuple = (2, 6)
    mutation_subtree_depth: tuple = (2, 6)
    run_seed: int = 0
    metrics_interval: int = 100
    crossover_operator: str = "subtree"
    pipeline: str = "exclusive"
    offspring_per_couple: int = 2
    init_unique_solutions: bool = True

    def validate(self):
        if self.approach not in APPROACHES:
            raise ValueError(f"unknown approach {self.approach!r}")
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must be in [0, 1]")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must be in [0, 1]")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must be in [1, population_size]")
        if not 1 <= self.candidate_set_size <= self.population_size - 1:
            raise ValueError("candidate_set_size must be in [1, population_size - 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        low, high = self.init_depth
        if not 1 <= low <= high:
            raise ValueError("init_depth must satisfy 1 <= low <= high")
        if self.metrics_interval < 1:
            raise ValueError("metrics_interval must be >= 1")
        if self.crossover_operator not in CROSSOVER_OPERATORS:
            raise ValueError(f"crossover_operator must be one of {CROSSOVER_OPERATORS}")
        if self.pipeline not in ("exclusive", "sequential"):
            raise ValueError("pipeline must be 'exclusive' or 'sequential'")
        if self.pipeline == "exclusive":
            if self.crossover_prob + self.mutation_prob > 1.0 + 1e-12:
                raise ValueError(
                    "exclusive pipeline needs crossover_prob + mutation_prob <= 1"
                )
        if self.offspring_per_couple not in (1, 2):
            raise ValueError("offspring_per_couple must be 1 or 2")
        if self.population_size % self.offspring_per_couple:
            raise ValueError(
                "population_size must be divisible by offspring_per_couple"
            )

    def overrides(self):
        """Names of fields that differ from the defaults (recorded in the
        run log metadata so non-standard runs are self-describing)."""
        out = []
        for f in fields(self):
            if f.default is not None and getattr(self, f.name) != f.default:
                if f.name in ("approach", "problem", "run_seed"):
                    continue
                out.append(f.name)
        return out


@dataclass(frozen=True)
class RoleTally:
    """Distinct selected individuals of one generation, partitioned into
    chooser-only / courter-only / both, with the best and mean fitness
    inside each class (None for empty classes)."""

    generation: int
    choosers_only: int
    courters_only: int
    both: int
    best_choosers: float = None
    best_courters: float = None
    best_both: float = None
    mean_choosers: float = None
    mean_courters: float = None
    mean_both: float = None


@dataclass
class MetricsLog:
    config: dict
    best_fitness: list = field(default_factory=list)
    unique_counts: dict = field(default_factory=dict)
    root_census: list = field(default_factory=list)
    role_tallies: list = field(default_factory=list)
    snapshot_initial: list = field(default_factory=list)
    snapshot_final: list = field(default_factory=list)
    best_ever: float = float("inf")
    couples: list = None

    @property
    def generations(self):
        return len(self.best_fitness) - 1

    @property
    def final_best(self):
        return self.best_fitness[-1]

    @property
    def success(self):
        return self.best_ever < SUCCESS_THRESHOLD

    @property
    def final_unique(self):
        return self.unique_counts[self.generations]

    @property
    def root_converged(self):
        return len(self.root_census[-1]) == 1

    def to_jsonl(self):
        lines = [_dump({"type": "meta", **self.config})]
        for g, best in enumerate(self.best_fitness):
            record = {
                "type": "gen",
                "gen": g,
                "best": best,
                "roots": self.root_census[g],
                "unique": self.unique_counts.get(g),
                "roles": None if g == 0 else asdict(self.role_tallies[g - 1]),
            }
            lines.append(_dump(record))
        summary = {
            "type": "summary",
            "final_best": self.final_best,
            "ever_best": self.best_ever,
            "success": self.success,
            "final_unique": self.final_unique,
            "root_converged": self.root_converged,
            "generations": self.generations,
        }
        lines.append(_dump(summary))
        return "\n".join(lines) + "\n"


def _dump(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def write_run_log(log, path):
    with open(path, "w") as fh:
        fh.write(log.to_jsonl())


def write_couples_jsonl(couples, fh):
    """Couple log: one {"gen", "chooser", "courter"} object per line."""
    for c in couples:
        fh.write(
            _dump({"gen": c.generation, "chooser": c.chooser, "courter": c.courter})
        )
        fh.write("\n")


def unique_solutions(pop):
    """Number of distinct solution serializations (preferences ignored).

    Opcode arrays are the canonical serialization's pre-image, byte for
    byte, so hashing them counts the same classes.
    """
    return len({ind.solution.codes.tobytes() for ind in pop.members})


def root_converged(pop):
    """True iff every solution chromosome shares one root symbol."""
    if len(pop) == 0:
        raise ValueError("empty population")
    first = pop.members[0].solution.codes[0]
    return all(ind.solution.codes[0] == first for ind in pop.members)


def _root_census(pop):
    census = {}
    for ind in pop.members:
        sym = ind.solution.root_symbol
        census[sym] = census.get(sym, 0) + 1
    return census


def _group_stats(indices, fitness):
    if not indices:
        return None, None
    values = fitness[sorted(indices)]
    return float(values.min()), float(values.mean())


def tally_roles(couples, pop, generation):
    """Partition the generation's distinct selected indices by role.

    An individual that was picked as chooser in one couple and courter in
    another (or the same) counts once, as "both".
    """
    for c in couples:
        if c.generation != generation:
            raise ValueError(
                f"couple from generation {c.generation} in tally for {generation}"
            )
    chooser_set = {c.chooser for c in couples}
    courter_set = {c.courter for c in couples}
    both = chooser_set & courter_set
    chooser_only = chooser_set - both
    courter_only = courter_set - both
    fitness = pop.fitness
    best_ch, mean_ch = _group_stats(chooser_only, fitness)
    best_co, mean_co = _group_stats(courter_only, fitness)
    best_bo, mean_bo = _group_stats(both, fitness)
    return RoleTally(
        generation=generation,
        choosers_only=len(chooser_only),
        courters_only=len(courter_only),
        both=len(both),
        best_choosers=best_ch,
        best_courters=best_co,
        best_both=best_bo,
        mean_choosers=mean_ch,
        mean_courters=mean_co,
        mean_both=mean_bo,
    )


def _snapshot_entries(pop):
    return [
        (serialize(ind.solution), serialize(ind.preference), ind.fitness)
        for ind in pop.members
    ]


def _exclusive_generation(pop, config, selection_cfg, variation_cfg, cases, seed, gen):
    """Operator-exclusive slots: crossover / mutation / reproduction, one
    draw per breeding event; crossover fills two slots when room allows."""
    size = config.population_size
    mutation_cut = config.crossover_prob + config.mutation_prob
    offspring = []
    couples = []
    event = 0
    while len(offspring) < size:
        rng = substream(seed, STREAM_BREEDING, gen, event)
        event += 1
        draw = rng.random()
        if draw < config.crossover_prob:
            chooser, courter = select_couple(pop, selection_cfg, cases, rng)
            couples.append(CoupleRecord(gen, chooser, courter))
            child1, child2 = exchange_crossover(
                pop.members[chooser], pop.members[courter], variation_cfg, rng
            )
            offspring.append(child1)
            if len(offspring) < size:
                offspring.append(child2)
        elif draw < mutation_cut:
            parent = pop.members[tournament(pop, config.tournament_size, rng)]
            offspring.append(mutate_individual(parent, variation_cfg, rng))
        else:
            parent = pop.members[tournament(pop, config.tournament_size, rng)]
            offspring.append(Individual(parent.solution, parent.preference))
    return offspring, couples


def _sequential_generation(pop, config, selection_cfg, variation_cfg, cases, seed, gen):
    """Couple-per-slot pipeline: select, gated crossover, gated mutation."""
    n_couples = config.population_size // config.offspring_per_couple
    paired = config.offspring_per_couple == 2
    offspring = []
    couples = []
    for i in range(n_couples):
        rng = substream(seed, STREAM_BREEDING, gen, i)
        chooser, courter = select_couple(pop, selection_cfg, cases, rng)
        couples.append(CoupleRecord(gen, chooser, courter))
        parent1 = pop.members[chooser]
        parent2 = pop.members[courter]
        if paired:
            child1, child2 = crossover_pair(parent1, parent2, variation_cfg, rng)
            offspring.append(subtree_mutation(child1, variation_cfg, rng))
            offspring.append(subtree_mutation(child2, variation_cfg, rng))
        else:
            child = one_point_crossover(parent1, parent2, variation_cfg, rng)
            offspring.append(subtree_mutation(child, variation_cfg, rng))
    return offspring, couples


def run(config, record_couples=False):
    """Execute one full run; the result is a pure function of `config`.

    Returns a MetricsLog with per-generation best fitness and root
    census, unique-solution counts every metrics_interval generations
    (plus the final one), role tallies for every breeding generation, and
    population snapshots at generation 0 and the end.
    """
    config.validate()
    seed = config.run_seed
    n_vars = PROBLEMS[config.problem].arity
    cases = make_cases(config.problem, substream(seed, STREAM_FITNESS_CASES))
    pop = init_population(
        config,
        substream(seed, STREAM_INIT_SOLUTIONS),
        substream(seed, STREAM_INIT_PREFERENCES),
    )
    pop.evaluate_all(cases)

    selection_cfg = SelectionConfig(
        config.approach, config.tournament_size, config.candidate_set_size
    )
    variation_cfg = VariationConfig(
        crossover_prob=config.crossover_prob,
        mutation_prob=config.mutation_prob,
        max_depth=config.max_depth,
        mutation_subtree_depth=config.mutation_subtree_depth,
        n_vars=n_vars,
        crossover_operator=config.crossover_operator,
    )

    meta = asdict(config)
    meta["init_depth"] = list(config.init_depth)
    meta["mutation_subtree_depth"] = list(config.mutation_subtree_depth)
    meta["overrides"] = config.overrides()
    log = MetricsLog(config=meta, couples=[] if record_couples else None)

    census = _root_census(pop)
    best = float(pop.fitness.min())
    log.best_fitness.append(best)
    log.root_census.append(census)
    log.unique_counts[0] = unique_solutions(pop)
    log.snapshot_initial = _snapshot_entries(pop)
    log.best_ever = best

    breed = _exclusive_generation if config.pipeline == "exclusive" else _sequential_generation
    for gen in range(1, config.generations + 1):
        offspring, couples = breed(
            pop, config, selection_cfg, variation_cfg, cases, seed, gen
        )
        log.role_tallies.append(tally_roles(couples, pop, gen))
        if record_couples:
            log.couples.extend(couples)

        pop = Population(offspring)
        pop.evaluate_all(cases)
        new_census = _root_census(pop)
        if not set(new_census) <= set(census):
            raise RuntimeError(
                f"root census gained symbols at generation {gen}: "
                f"{sorted(set(new_census) - set(census))}"
            )
        census = new_census

        best = float(pop.fitness.min())
        log.best_fitness.append(best)
        log.root_census.append(census)
        if gen % config.metrics_interval == 0 or gen == config.generations:
            log.unique_counts[gen] = unique_solutions(pop)
        if best < log.best_ever:
            log.best_ever = best

    if config.generations == 0:
        log.snapshot_final = log.snapshot_initial
    else:
        log.snapshot_final = _snapshot_entries(pop)
    return log


@dataclass(frozen=True)
class BestOfRun:
    final_fitness: float
    final_tree: object
    ever_fitness: float
    success: bool


def best_of_run(log):
    """Both flavors of "best": the final population's best (the MBF
    contribution) and the best seen in any generation, which defines
    success (strictly below the 1e-4 threshold)."""
    entries = log.snapshot_final
    best_idx = min(range(len(entries)), key=lambda i: entries[i][2])
    return BestOfRun(
        final_fitness=log.final_best,
        final_tree=parse(entries[best_idx][0]),
        ever_fitness=log.best_ever,
        success=log.success,
    )
