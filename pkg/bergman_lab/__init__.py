import logging

from bergman_lab._version import __version__
from bergman_lab.compop import (
    CriterionReport,
    SelfMap,
    boundedness_profile,
    difference_criterion,
    parse_map,
)
from bergman_lab.exceptions import (
    BergmanLabError,
    BoundaryTouchError,
    DomainError,
    GeodesicError,
    HypothesisError,
    QuadratureError,
    SelfMapError,
    SpecParseError,
    TruncationError,
    WeightClassError,
)
from bergman_lab.hilbert_schmidt import (
    HSResult,
    hs_diff_basis_sum,
    hs_diff_integral,
    hs_norm_integral,
    path_experiment,
)
from bergman_lab.kernel import KernelValue, MomentTable, compute_moments, kernel
from bergman_lab.lab import BergmanLab
from bergman_lab.metric import GeodesicResult, d_tau, rho_tau, skwarczynski
from bergman_lab.quad import QuadResult
from bergman_lab.weights import TauConstants, WeightSpec, parse_weight, validate_class_W

# Library convention: consumers choose where log records go.
logging.getLogger("bergman_lab").addHandler(logging.NullHandler())

__all__ = [
    "__version__",
    "BergmanLab",
    # Weights
    "WeightSpec",
    "TauConstants",
    "parse_weight",
    "validate_class_W",
    # Kernel
    "MomentTable",
    "KernelValue",
    "compute_moments",
    "kernel",
    # Metric
    "GeodesicResult",
    "d_tau",
    "rho_tau",
    "skwarczynski",
    # Operators
    "SelfMap",
    "CriterionReport",
    "parse_map",
    "boundedness_profile",
    "difference_criterion",
    # Hilbert-Schmidt
    "HSResult",
    "hs_norm_integral",
    "hs_diff_integral",
    "hs_diff_basis_sum",
    "path_experiment",
    # Quadrature
    "QuadResult",
    # Exceptions
    "BergmanLabError",
    "DomainError",
    "WeightClassError",
    "QuadratureError",
    "TruncationError",
    "GeodesicError",
    "SelfMapError",
    "BoundaryTouchError",
    "HypothesisError",
    "SpecParseError",
]
