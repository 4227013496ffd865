"""Stable plane-wave approximation of Helmholtz solutions on the disk and beyond.

Evanescent plane waves are sampled from a Christoffel-type density, assembled
into a boundary collocation system and solved with a truncated SVD.
"""

from .estimators import ChristoffelSampler, PlaneWaveRegressor, truncation_rule
from .exceptions import ConfigError, DomainError, NumericalError, SolverError, WaveOverflowError
from .geometry import CircularMode, FundamentalSolution, RandomSurrogate, Triangle, UnitDisk, make_geometry, trace_eval
from .modal import CylinderPoint, DiskContext, ModalVector, cached_context
from .sampling import DensityModel, NodeSet, sample_nodes
from .scenarios import ExperimentConfig, Table
from .solver import RegularizedPseudoInverse, SolveReport, WaveSet, assemble, solve_regularized
from .special import bessel_j, bessel_j_derivative, bessel_y, hankel1_0
from .waves import epw_eval, epw_modal_coefficients, ppw_eval

__version__ = "0.1.0"

__all__ = [
    "ChristoffelSampler",
    "CircularMode",
    "ConfigError",
    "CylinderPoint",
    "DensityModel",
    "DiskContext",
    "DomainError",
    "ExperimentConfig",
    "FundamentalSolution",
    "ModalVector",
    "NodeSet",
    "NumericalError",
    "PlaneWaveRegressor",
    "RandomSurrogate",
    "RegularizedPseudoInverse",
    "SolveReport",
    "SolverError",
    "Table",
    "Triangle",
    "UnitDisk",
    "WaveOverflowError",
    "WaveSet",
    "assemble",
    "bessel_j",
    "bessel_j_derivative",
    "bessel_y",
    "cached_context",
    "epw_eval",
    "epw_modal_coefficients",
    "hankel1_0",
    "make_geometry",
    "ppw_eval",
    "sample_nodes",
    "solve_regularized",
    "trace_eval",
    "truncation_rule",
]
