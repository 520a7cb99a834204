"""Eigenexpansion solver for the self-similar Cauchy problem

    D_t u = L u,   u(0, .) = f,

where ``D_t`` is the time operator of a Bernstein function and ``L`` the
generator of a catalog model.  The solution is

    u(t, x) = sum_n E(-lambda_n t**alpha) <f, V_n>_nu P_n(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from ..errors import QuadratureError
from ..functions import SmoothFn
from ..gml import GMLEvaluator
from ..quadrature import QuadConfig
from ..ssconv import ConvOperator, bold_operator
from .models import SpectralModel

__all__ = ["expand", "solve", "time_factors", "CauchyResidual", "cauchy_residual", "mode_function"]


def mode_function(model: SpectralModel, k: int) -> SmoothFn:
    """Initial datum equal to the ``k``-th eigenfunction."""
    return model.mode(k)


def expand(model: SpectralModel, f: Callable, N: int, tol: float = 1e-10) -> np.ndarray:
    """Coefficients ``c_n = <f, V_n>_nu`` for ``n = 0..N``.

    The Gauss rule is doubled once; a disagreement above ``tol`` (relative
    to the largest coefficient) raises :class:`QuadratureError`.
    """
    def coeffs(nodes):
        x, w = model.quadrature(nodes)
        return model.V_all(N, x) @ (w * np.asarray(f(x), dtype=float))

    c1 = coeffs(model.nodes)
    c2 = coeffs(2 * model.nodes)
    scale = max(1.0, float(np.max(np.abs(c2))))
    if not np.all(np.isfinite(c2)) or np.max(np.abs(c1 - c2)) > tol * scale:
        raise QuadratureError("expansion coefficients did not settle under node doubling")
    return c2


def time_factors(model: SpectralModel, evaluator: GMLEvaluator, N: int, t, derivative: bool = False):
    """``E(-lambda_n t**alpha)`` (or its ``t``-derivative), shape ``(len(t), N+1)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam = model.eigenvalue(np.arange(N + 1))
    a = evaluator.alpha
    z = -np.outer(t**a, lam)
    vals = evaluator.values(z.ravel(), derivative=derivative).reshape(z.shape)
    if derivative:
        vals = vals * (-lam) * (a * t ** (a - 1.0))[:, None]
    return vals


def solve(model: SpectralModel, evaluator: GMLEvaluator, f: Union[Callable, np.ndarray], t, x,
          N: int = 32) -> np.ndarray:
    """Solution grid ``u(t_i, x_j)``.

    ``f`` is either a callable initial datum or a precomputed coefficient
    vector (length ``N + 1``).  Returns an array of shape ``(len(t), len(x))``
    (squeezed for scalar input).
    """
    c = np.asarray(f, dtype=float) if not callable(f) else expand(model, f, N)
    N = len(c) - 1
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < model.T) or np.any(t_arr < 0):
        raise ValueError("solution times must be nonnegative and beyond the model's T")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    active = np.flatnonzero(c)
    out = np.zeros((t_arr.size, x_arr.size))
    if active.size:
        top = int(active.max())
        fac = time_factors(model, evaluator, top, t_arr)
        modes = model.P_all(top, x_arr)
        out = (fac * c[: top + 1]) @ modes
    if np.ndim(t) == 0 and np.ndim(x) == 0:
        return float(out[0, 0])
    if np.ndim(t) == 0:
        return out[0]
    if np.ndim(x) == 0:
        return out[:, 0]
    return out


@dataclass(frozen=True)
class CauchyResidual:
    """Residuals of ``D_t u = L u`` at one point.

    ``modewise`` applies the time operator through the eigenrelation of each
    time factor; ``direct`` applies it by quadrature to ``t -> u(t, x)``.
    """

    modewise: float
    direct: float
    scale: float

    @property
    def value(self) -> float:
        return max(self.modewise, self.direct)


def cauchy_residual(model: SpectralModel, evaluator: GMLEvaluator, f: Union[Callable, np.ndarray],
                    t: float, x: float, N: int = 32, op: Optional[ConvOperator] = None,
                    quad: Optional[QuadConfig] = None) -> CauchyResidual:
    """Residual of the Cauchy equation for the truncated expansion of ``f``."""
    c = np.asarray(f, dtype=float) if not callable(f) else expand(model, f, N)
    N = len(c) - 1
    lam = model.eigenvalue(np.arange(N + 1))
    fac = time_factors(model, evaluator, N, t)[0]
    a_t = c * fac
    lu = float(model.generator_apply(model.combination(a_t), np.array([x]))[0])
    p_x = model.P_all(N, np.array([x]))[:, 0]
    # each time factor solves D_t F = -lambda_n F
    modewise = float(np.dot(-lam * a_t, p_x))

    if op is None:
        op = bold_operator(evaluator.spec, evaluator.alpha, quad)

    def u_of_t(s):
        s = np.asarray(s, dtype=float)
        return (time_factors(model, evaluator, N, s.ravel()) * c) @ p_x

    def du_of_t(s):
        s = np.asarray(s, dtype=float)
        vals = (time_factors(model, evaluator, N, s.ravel(), derivative=True) * c) @ p_x
        return vals.reshape(s.shape)

    direct = float(op.apply(SmoothFn(lambda s: u_of_t(s).reshape(np.shape(s)), du_of_t), t))
    return CauchyResidual(abs(modewise - lu), abs(direct - lu), max(1.0, abs(lu)))
