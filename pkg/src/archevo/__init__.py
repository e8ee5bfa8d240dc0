"""archevo: surrogate-assisted many-objective search over integer
architecture encodings, with archive-driven supernet adaptation."""

__version__ = "0.1.0"

from .encoding import (
    CostModel,
    DEFAULT_COST,
    DEFAULT_SPACE,
    GenomeError,
    NetworkSpec,
    SearchSpaceConfig,
    decode,
    encode,
    madds,
    params,
    sample_uniform,
)
from .operators import VariationConfig, binary_tournament, crossover, mutate
from .selection import das_dennis, dominates, non_dominated_sort, survive
from .surrogate import RbfEnsemble, RbfModel, build_ensemble, fit_rbf, spearman
from .search import SearchConfig, evolve
from .loop import Archive, RunConfig, RunHistory, run
from .distribution import (
    AdaptationDistribution,
    estimate_distribution,
    sample_subnet,
    uniform_distribution,
)
from .evaluators import (
    Evaluator,
    SyntheticSupernet,
    SyntheticSupernetConfig,
    dtlz1,
    rosenbrock,
    rosenbrock_demo,
)
from .external import ExternalEvaluator
from .metrics import hypervolume, igd, trade_off_scores

__all__ = [
    "AdaptationDistribution",
    "Archive",
    "CostModel",
    "DEFAULT_COST",
    "DEFAULT_SPACE",
    "Evaluator",
    "ExternalEvaluator",
    "GenomeError",
    "NetworkSpec",
    "RbfEnsemble",
    "RbfModel",
    "RunConfig",
    "RunHistory",
    "SearchConfig",
    "SearchSpaceConfig",
    "SyntheticSupernet",
    "SyntheticSupernetConfig",
    "VariationConfig",
    "binary_tournament",
    "build_ensemble",
    "crossover",
    "das_dennis",
    "decode",
    "dominates",
    "dtlz1",
    "encode",
    "estimate_distribution",
    "evolve",
    "fit_rbf",
    "hypervolume",
    "igd",
    "madds",
    "mutate",
    "non_dominated_sort",
    "params",
    "rosenbrock",
    "rosenbrock_demo",
    "run",
    "sample_subnet",
    "sample_uniform",
    "spearman",
    "survive",
    "trade_off_scores",
    "uniform_distribution",
]
