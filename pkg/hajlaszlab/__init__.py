# -*- coding: utf-8 -*-

from hajlaszlab.space import (
    HajlaszLabError,
    SpaceError,
    ParameterError,
    MetricMeasureSpace,
    WeightedSubset,
    FunctionOnSpace,
    generate,
    load_space,
    save_space,
    validate,
    ball,
)
from hajlaszlab.median import gamma_median, integral_average
from hajlaszlab.covering import BallCovering, PartitionOfUnity, build_covering, partition_of_unity
from hajlaszlab.smoothing import (
    ScaleRange,
    CoveringLadder,
    discrete_convolution,
    discrete_median_convolution,
    discrete_median_maximal,
    median_maximal,
)
from hajlaszlab.activeset import OracleError
from hajlaszlab.norms import NormParams, FractionalGradient, SolverError, UpperBoundWarning, min_norm_gradient, \
    full_norm, oracle_min_norm
from hajlaszlab.capacity import CapacityProblem, capacity, capacity_oracle, r_subadditivity_check, weak_type_ratio
from hajlaszlab.harness import ExperimentConfig, ExperimentResult, run_experiment

__all__ = (
    "HajlaszLabError",
    "SpaceError",
    "ParameterError",
    "SolverError",
    "OracleError",
    "UpperBoundWarning",
    "MetricMeasureSpace",
    "WeightedSubset",
    "FunctionOnSpace",
    "generate",
    "load_space",
    "save_space",
    "validate",
    "ball",
    "gamma_median",
    "integral_average",
    "BallCovering",
    "PartitionOfUnity",
    "build_covering",
    "partition_of_unity",
    "ScaleRange",
    "CoveringLadder",
    "discrete_convolution",
    "discrete_median_convolution",
    "discrete_median_maximal",
    "median_maximal",
    "NormParams",
    "FractionalGradient",
    "min_norm_gradient",
    "full_norm",
    "oracle_min_norm",
    "CapacityProblem",
    "capacity",
    "capacity_oracle",
    "r_subadditivity_check",
    "weak_type_ratio",
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
)

__version__ = "0.1.0"
