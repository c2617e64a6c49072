"""The three parent-selection regimes.

* standard -- both parents from independent fitness tournaments.
* random   -- chooser from a tournament, courter uniform among the rest.
* pimp     -- chooser from a tournament; a small uniform candidate set is
  scored against the chooser's preference chromosome exactly the way a
  solution is scored against the fitness cases, and the closest candidate
  becomes the courter. Mate choice is blind to candidate fitness.

All sampling is without replacement, the chooser can never court itself,
and every tie breaks toward the earliest sampled position so outcomes are
a pure function of the supplied random stream.
"""

from dataclasses import dataclass

import numpy as np

from .individual import mean_squared_error
from .primitives import eval_many

__all__ = [
    "APPROACHES",
    "SelectionConfig",
    "CoupleRecord",
    "tournament",
    "preference_distance",
    "select_courter",
    "select_couple",
]

APPROACHES = ("pimp", "random", "standard")


@dataclass(frozen=True)
class SelectionConfig:
    approach: str
    tournament_size: int = 5
    candidate_set_size: int = 5

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise ValueError(
                f"unknown approach {self.approach!r}; expected one of {APPROACHES}"
            )
        if self.tournament_size < 1 or self.candidate_set_size < 1:
            raise ValueError("tournament and candidate set sizes must be >= 1")


@dataclass(frozen=True)
class CoupleRecord:
    generation: int
    chooser: int
    courter: int


def _sample_without_replacement(n, k, rng):
    # partial Fisher-Yates fed by one block of k uniform doubles
    # (u < 1 guarantees j + floor(u * (n - j)) stays below n), spelled
    # out here so the draw sequence is pinned by this code alone
    pool = np.arange(n, dtype=np.int64)
    uniforms = rng.random(k)
    for j in range(k):
        swap = j + int(uniforms[j] * (n - j))
        pool[j], pool[swap] = pool[swap], pool[j]
    return pool[:k]


def tournament(pop, k, rng):
    """Index of the fittest of k members sampled without replacement
    (lowest MSE wins; ties go to the earliest sampled)."""
    if not 1 <= k <= len(pop):
        raise ValueError("tournament size must be in [1, population size]")
    sampled = _sample_without_replacement(len(pop), k, rng)
    return int(sampled[np.argmin(pop.fitness[sampled])])


def preference_distance(chooser, candidate, cases):
    """MSE between the candidate's solution outputs and the chooser's
    preference outputs over the case points: the preference tree's
    outputs stand in for the targets. Independent of both fitness values
    and of the candidate's own preference."""
    candidate_out = eval_many(candidate.solution, cases.points)
    cases.n_solution_evals += 1
    preference_out = eval_many(chooser.preference, cases.points)
    cases.n_preference_evals += 1
    return mean_squared_error(candidate_out, preference_out)


def _excluding(indices, excluded):
    # map draws over n-1 values onto range(n) minus `excluded`
    return indices + (indices >= excluded)


def select_courter(pop, chooser, cfg, cases, rng):
    """Second-parent choice for the mate-choice regimes.

    random: uniform over everyone but the chooser. pimp: sample
    `candidate_set_size` distinct non-chooser indices, return the one
    whose solution is closest to the chooser's preference (first sampled
    wins ties). Fitness values are never consulted.
    """
    n = len(pop)
    if cfg.approach == "random":
        return int(_excluding(rng.integers(n - 1), chooser))
    if cfg.approach != "pimp":
        raise ValueError(f"no courter stage in approach {cfg.approach!r}")
    if cfg.candidate_set_size > n - 1:
        raise ValueError("candidate set cannot exceed population size - 1")
    candidates = _excluding(
        _sample_without_replacement(n - 1, cfg.candidate_set_size, rng), chooser
    )
    preference_out = pop.preference_outputs(chooser, cases)
    distances = [
        mean_squared_error(pop.solution_outputs(int(c)), preference_out)
        for c in candidates
    ]
    return int(candidates[int(np.argmin(distances))])


def select_couple(pop, cfg, cases, rng):
    """(chooser, courter) indices for one breeding event.

    Draw order on `rng`: chooser tournament first, then the courter stage
    (second tournament for standard, courter sampling otherwise).
    """
    chooser = tournament(pop, cfg.tournament_size, rng)
    if cfg.approach == "standard":
        return chooser, tournament(pop, cfg.tournament_size, rng)
    return chooser, select_courter(pop, chooser, cfg, cases, rng)
