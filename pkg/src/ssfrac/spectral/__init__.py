"""Spectral solvers for self-similar Cauchy problems."""

from .bessel import HankelDemo, bessel_kernel, bessel_solve, bessel_solve_adaptive, drift_closed_form
from .models import GenJacobi, GenLaguerre, Jacobi, Laguerre, SpectralModel, parse_model
from .solver import CauchyResidual, cauchy_residual, expand, solve, time_factors

__all__ = [
    "SpectralModel",
    "Laguerre",
    "Jacobi",
    "GenLaguerre",
    "GenJacobi",
    "parse_model",
    "expand",
    "solve",
    "time_factors",
    "cauchy_residual",
    "CauchyResidual",
    "HankelDemo",
    "bessel_kernel",
    "bessel_solve",
    "bessel_solve_adaptive",
    "drift_closed_form",
]
