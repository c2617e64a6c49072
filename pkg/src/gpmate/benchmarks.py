"""Symbolic-regression instances and their fitness cases.

Three instances share one function set: koza1 and nguyen6 sample 20
uniform points on [-1, 1]; pagie1 uses the full -5..5 grid with step 0.4
in each variable (26 x 26 = 676 points, never touching 0).
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FitnessCases",
    "Problem",
    "PROBLEMS",
    "PROBLEM_NAMES",
    "koza1",
    "nguyen6",
    "pagie1",
    "make_cases",
    "write_cases_csv",
]


def koza1(x):
    """x^4 + x^3 + x^2 + x"""
    x = np.asarray(x, dtype=np.float64)
    return x**4 + x**3 + x**2 + x


def nguyen6(x):
    """sin(x) + sin(x + x^2)"""
    x = np.asarray(x, dtype=np.float64)
    return np.sin(x) + np.sin(x + x**2)


def pagie1(x, y):
    """1/(1 + x^-4) + 1/(1 + y^-4); undefined at zero coordinates."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(x == 0.0) or np.any(y == 0.0):
        raise ValueError("pagie1 is undefined at zero coordinates")
    return 1.0 / (1.0 + x**-4) + 1.0 / (1.0 + y**-4)


class FitnessCases:
    """Input points and targets for one benchmark instance.

    Also carries evaluation counters so callers can observe how many
    solution/preference chromosome evaluations were performed against
    these cases (used to verify that fitness-only selection regimes
    never touch preference chromosomes).
    """

    def __init__(self, points, targets):
        points = np.ascontiguousarray(points, dtype=np.float64)
        targets = np.ascontiguousarray(targets, dtype=np.float64)
        if points.ndim != 2 or len(points) == 0:
            raise ValueError("points must be a non-empty (n, arity) array")
        if points.shape[1] not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        if targets.shape != (len(points),):
            raise ValueError("targets must match points one-to-one")
        if not np.isfinite(points).all() or not np.isfinite(targets).all():
            raise ValueError("points and targets must be finite")
        points.setflags(write=False)
        targets.setflags(write=False)
        self.points = points
        self.targets = targets
        self.n_solution_evals = 0
        self.n_preference_evals = 0

    @property
    def arity(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)


def _koza1_cases(rng):
    x = rng.uniform(-1.0, 1.0, size=20)
    return FitnessCases(x.reshape(-1, 1), koza1(x))


def _nguyen6_cases(rng):
    x = rng.uniform(-1.0, 1.0, size=20)
    return FitnessCases(x.reshape(-1, 1), nguyen6(x))


def _pagie1_cases(rng):
    # fixed grid; the rng stream is accepted for interface uniformity
    # but deliberately not consumed
    axis = np.linspace(-5.0, 5.0, 26)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack((xx.ravel(), yy.ravel()))
    return FitnessCases(points, pagie1(points[:, 0], points[:, 1]))


@dataclass(frozen=True)
class Problem:
    name: str
    arity: int
    func: callable
    sampler: callable


PROBLEMS = {
    "koza1": Problem("koza1", 1, koza1, _koza1_cases),
    "nguyen6": Problem("nguyen6", 1, nguyen6, _nguyen6_cases),
    "pagie1": Problem("pagie1", 2, pagie1, _pagie1_cases),
}

PROBLEM_NAMES = tuple(PROBLEMS)


def make_cases(problem, rng):
    """Fitness cases for `problem`, drawn from the run's dedicated stream.

    Cases are fixed for a whole run and depend only on the stream state,
    never on the selection approach.
    """
    spec = PROBLEMS.get(problem)
    if spec is None:
        raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEM_NAMES}")
    return spec.sampler(rng)


def write_cases_csv(cases, path):
    """Export cases as CSV with columns x[,y],target for external checks."""
    header = ["x", "y"][: cases.arity] + ["target"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for point, target in zip(cases.points, cases.targets):
            writer.writerow([repr(float(v)) for v in point] + [repr(float(target))])
