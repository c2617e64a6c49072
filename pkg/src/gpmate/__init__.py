"""gpmate: tree GP with preference-driven mate choice.

Core pieces: protected expression trees (`primitives`), dual-chromosome
individuals (`individual`), root-preserving operators (`variation`),
three parent-selection regimes (`selection`), symbolic-regression
instances (`benchmarks`), the generational engine with diversity/role
metrics (`engine`), paired nonparametric tests (`stats`), and the
deterministic experiment harness (`harness`, `plots`, `cli`).
"""

from .benchmarks import FitnessCases, make_cases
from .engine import MetricsLog, RunConfig, run
from .harness import ExperimentPlan, run_experiment
from .individual import Individual, Population, ramped_half_and_half
from .primitives import ExprTree, eval_tree, parse, serialize
from .selection import SelectionConfig, select_couple
from .variation import VariationConfig, one_point_crossover, subtree_mutation

__version__ = "0.1.0"

__all__ = [
    "ExprTree",
    "eval_tree",
    "parse",
    "serialize",
    "Individual",
    "Population",
    "ramped_half_and_half",
    "FitnessCases",
    "make_cases",
    "SelectionConfig",
    "select_couple",
    "VariationConfig",
    "one_point_crossover",
    "subtree_mutation",
    "RunConfig",
    "MetricsLog",
    "run",
    "ExperimentPlan",
    "run_experiment",
    "__version__",
]
