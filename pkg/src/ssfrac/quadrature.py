"""Quadrature rules used across the package.

Two building blocks are provided:

* a double-exponential (tanh-sinh) rule on a finite interval, robust to
  algebraic endpoint singularities of unknown strength;
* Gauss-Jacobi rules (nodes from :func:`scipy.special.roots_jacobi`) for
  integrands that carry a known ``(1 - r)**c`` factor.

:func:`kernel_integral` combines them to integrate ``G(r) m(r)`` over the
support of a convolution kernel ``m`` on ``(0, 1)``.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import QuadratureError

__all__ = [
    "QuadConfig",
    "Kernel",
    "tanh_sinh",
    "gauss_jacobi",
    "kernel_integral",
]


@dataclass(frozen=True)
class QuadConfig:
    """Settings for singular-kernel quadrature.

    Parameters
    ----------
    rule : {"auto", "gauss_jacobi", "tanh_sinh"}
        Rule for the piece of the interval touching ``r = 1``.  ``"auto"``
        uses Gauss-Jacobi when the kernel declares an endpoint exponent.
    nodes : int
        Initial node count of the Gauss rules; doubled until converged.
    tol : float
        Relative tolerance on successive refinements.
    max_doublings : int
        Refinement budget before :class:`QuadratureError` is raised.
    """

    rule: str = "auto"
    nodes: int = 32
    tol: float = 1e-12
    max_doublings: int = 3

    def __post_init__(self):
        if self.rule not in ("auto", "gauss_jacobi", "tanh_sinh"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.nodes < 2:
            raise ValueError("nodes must be >= 2")


@dataclass(frozen=True)
class Kernel:
    """Convolution kernel ``m(r) = (1 - r)**right_exp * smooth(r)`` on ``[lo, 1)``.

    ``m`` vanishes on ``(0, lo)``.  ``smooth`` may still be singular at
    ``r = 0`` (for instance ``r**alpha``); the left piece is integrated with
    tanh-sinh, which tolerates that.
    """

    smooth: Callable[[np.ndarray], np.ndarray]
    right_exp: float = 0.0
    lo: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = (r >= self.lo) & (r < 1.0)
        rr = r[inside]
        out[inside] = (1.0 - rr) ** self.right_exp * self.smooth(rr)
        return out


@lru_cache(maxsize=64)
def _ts_nodes(level: int, tmax: float = 6.5):
    """Tanh-sinh abscissae on (0, 1) at step ``2**-level``.

    Returns ``(x, one_minus_x, w)`` with the complement computed without
    cancellation.
    """
    h = 2.0 ** (-level)
    k = np.arange(-int(tmax / h), int(tmax / h) + 1)
    t = k * h
    u = 0.5 * np.pi * np.sinh(t)
    x = special.expit(2.0 * u)
    xc = special.expit(-2.0 * u)
    w = h * np.pi * np.cosh(t) * x * xc
    keep = (x > 0.0) & (xc > 0.0) & (w > 0.0)
    return x[keep], xc[keep], w[keep]


def tanh_sinh(f, a: float, b: float, tol: float = 1e-12, max_level: int = 8,
              min_level: int = 3):
    """Integrate ``f`` over ``[a, b]`` with the tanh-sinh rule.

    ``f`` is evaluated on a vector of abscissae measured from ``a`` so that
    singular behaviour at ``a`` is resolved to full relative precision.

    Returns
    -------
    value, est_error : float, float

    Raises
    ------
    QuadratureError
        If two successive levels do not agree to ``tol``.
    """
    width = b - a
    prev = None
    change = math.nan
    for level in range(1, max_level + 1):
        x, _, w = _ts_nodes(level)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            vals = np.asarray(f(a + width * x))
        # abscissae within ~1e-300 of the endpoint may overflow an integrable
        # singularity; their weights are negligible
        vals = np.where(np.isfinite(vals), vals, 0.0)
        total = width * np.sum(w * vals)
        if prev is not None:
            change = abs(total - prev)
        if prev is not None and level >= min_level:
            err = change
            if err <= tol * max(1.0, abs(total)):
                return total, err
        prev = total
    raise QuadratureError(
        f"tanh-sinh did not converge on [{a}, {b}] (last change {change:.3e})"
    )


@lru_cache(maxsize=128)
def _gj_rule(n: int, alpha: float, beta: float):
    x, w = special.roots_jacobi(n, alpha, beta)
    return x, w


def gauss_jacobi(n: int, alpha: float, beta: float):
    """Nodes and weights for ``(1 - x)**alpha (1 + x)**beta`` on ``[-1, 1]``."""
    return _gj_rule(int(n), float(alpha), float(beta))


def _right_piece(G, kernel: Kernel, c: float, cfg: QuadConfig):
    """``int_c^1 G(r) m(r) dr`` using the declared exponent at ``r = 1``."""
    half = 0.5 * (1.0 - c)
    use_gj = cfg.rule == "gauss_jacobi" or (cfg.rule == "auto" and kernel.right_exp != 0.0)
    if not use_gj:
        # integrate in s = 1 - r so the endpoint is resolved from the left
        def integrand(s):
            r = 1.0 - s
            return G(r) * s ** kernel.right_exp * kernel.smooth(r)

        return tanh_sinh(integrand, 0.0, 1.0 - c, tol=cfg.tol)
    a = kernel.right_exp
    prev = None
    n = cfg.nodes
    for _ in range(cfg.max_doublings + 1):
        x, w = gauss_jacobi(n, a, 0.0)
        s = half * (1.0 - x)
        r = 1.0 - s
        total = half ** (a + 1.0) * np.sum(w * G(r) * kernel.smooth(r))
        if prev is not None:
            err = abs(total - prev)
            if err <= cfg.tol * max(1.0, abs(total)):
                return total, err
        prev = total
        n *= 2
    raise QuadratureError(f"Gauss-Jacobi did not converge (change {abs(total - prev):.3e})")


def _left_piece(G, kernel: Kernel, c: float, cfg: QuadConfig):
    """``int_lo^c G(r) m(r) dr``; tanh-sinh when the piece touches 0."""

    def integrand(r):
        return G(r) * (1.0 - r) ** kernel.right_exp * kernel.smooth(r)

    if kernel.lo <= 0.0:
        return tanh_sinh(integrand, 0.0, c, tol=cfg.tol)
    prev = None
    n = max(16, cfg.nodes // 4)
    half = 0.5 * (c - kernel.lo)
    mid = 0.5 * (c + kernel.lo)
    for _ in range(cfg.max_doublings + 1):
        x, w = gauss_jacobi(n, 0.0, 0.0)
        total = half * np.sum(w * integrand(mid + half * x))
        if prev is not None:
            err = abs(total - prev)
            if err <= cfg.tol * max(1.0, abs(total)):
                return total, err
        prev = total
        n *= 2
    raise QuadratureError("Gauss-Legendre did not converge on the kernel support")


def kernel_integral(G, kernel: Kernel, cfg: Optional[QuadConfig] = None):
    """Compute ``int_0^1 G(r) m(r) dr`` for a :class:`Kernel` ``m``.

    The support ``[lo, 1)`` is split at its midpoint.  The right half uses a
    Gauss-Jacobi rule carrying the ``(1 - r)**right_exp`` factor (or
    tanh-sinh in the variable ``1 - r``); the left half uses tanh-sinh if it
    reaches ``r = 0`` and Gauss-Legendre otherwise.

    Returns
    -------
    value, est_error : float, float
    """
    cfg = cfg or QuadConfig()
    c = 0.5 * (kernel.lo + 1.0)
    vr, er = _right_piece(G, kernel, c, cfg)
    vl, el = _left_piece(G, kernel, c, cfg)
    return vr + vl, er + el
