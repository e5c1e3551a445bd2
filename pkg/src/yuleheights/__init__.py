"""Exact and simulated moments of Yule tree heights and pair coalescent times."""

from .closed_forms import (
    REGISTRY,
    StatisticId,
    all_statistics,
    asymptote,
    cophenetic_index,
    indicator_cross_moment,
    indicator_second_moment,
    indicator_variance,
    pair_coalescent_pmf,
    statistic,
)
from .harmonic import HarmonicCache, b_factor, finite_sum, harmonic
from .harness import ExperimentConfig, VerificationRow, emit_report, run_experiment
from .moments import (
    coefficient,
    height_moment,
    laplace_height,
    laplace_tau,
    partitions,
    shared_moment,
    tau_moment,
)
from .numeric import FLOAT, RATIONAL, Surd, UndefinedAtN
from .oracle import enumerate_histories, oracle_indicator_moments, oracle_statistic
from .yule import RngStream, YuleTree, generate_tree

__version__ = "0.1.0"

__all__ = [
    "FLOAT", "RATIONAL", "Surd", "UndefinedAtN",
    "HarmonicCache", "harmonic", "b_factor", "finite_sum",
    "partitions", "coefficient", "height_moment", "tau_moment", "shared_moment",
    "laplace_height", "laplace_tau",
    "StatisticId", "REGISTRY", "statistic", "all_statistics", "asymptote",
    "pair_coalescent_pmf", "indicator_second_moment", "indicator_cross_moment",
    "indicator_variance", "cophenetic_index",
    "RngStream", "YuleTree", "generate_tree",
    "enumerate_histories", "oracle_indicator_moments", "oracle_statistic",
    "ExperimentConfig", "VerificationRow", "run_experiment", "emit_report",
]
