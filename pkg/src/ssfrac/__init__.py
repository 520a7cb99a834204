"""Generalized Mittag-Leffler functions, self-similar convolution operators,
inverse self-similar subordinators and spectral solvers for the associated
time-fractional Cauchy problems."""

from .bernstein import (BernsteinSpec, BoldPhi, Custom, Drift, PoissonQ, StableLamperti,
                        bold_phi, membership, parse_spec, phi_alpha)
from .errors import (ConfigError, ContourError, DomainError, HorizonError, NonConvergence,
                     NotInB, QuadratureError, RadiusError, SSFracError, Unsupported)
from .functions import SmoothFn
from .gml import EvalReport, GMLEvaluator
from .quadrature import Kernel, QuadConfig
from .ssconv import ConvOperator, base_operator, bold_operator, char_operator
from .stoch import McEstimate, SimConfig
from .wphi import WEvaluator

__version__ = "0.1.0"

__all__ = [
    "BernsteinSpec", "Drift", "StableLamperti", "PoissonQ", "Custom", "BoldPhi",
    "bold_phi", "membership", "parse_spec", "phi_alpha",
    "SSFracError", "DomainError", "QuadratureError", "NotInB", "RadiusError",
    "NonConvergence", "Unsupported", "ContourError", "HorizonError", "ConfigError",
    "SmoothFn", "EvalReport", "GMLEvaluator", "Kernel", "QuadConfig",
    "ConvOperator", "base_operator", "bold_operator", "char_operator",
    "McEstimate", "SimConfig", "WEvaluator",
]
