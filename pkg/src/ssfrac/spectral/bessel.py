"""Squared-Bessel semigroup through a Hankel pair.

With the kernel ``J(z) = sum_n (-z)**n / (n!)**2 = J0(2 sqrt(z))`` the
transform ``H f(lam) = int_0^inf J(lam x) f(x) dx`` is an involution that
diagonalizes the squared-Bessel generator ``x f''``.  The time-changed
semigroup acts as

    u(t, x) = int_0^inf E(-lam t**alpha) H f(lam) J(lam x) dlam.

The built-in pair is ``f(x) = e**-x``, ``H f(lam) = e**-lam``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from ..errors import QuadratureError
from ..gml import GMLEvaluator

__all__ = ["bessel_kernel", "bessel_kernel_series", "HankelDemo", "bessel_solve",
           "bessel_solve_adaptive", "drift_closed_form"]


def bessel_kernel(z):
    """``J(z) = J0(2 sqrt(z))`` for ``z >= 0``."""
    z = np.asarray(z, dtype=float)
    return special.j0(2.0 * np.sqrt(z))


def bessel_kernel_series(z, terms: int = 200):
    """``sum_n (-z)**n / (n!)**2`` summed with a term recurrence (small ``z`` only)."""
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    for n in range(1, terms):
        term = term * (-z) / (n * n)
        total = total + term
    return total


@dataclass(frozen=True)
class HankelDemo:
    """A function with a closed-form Hankel transform.

    The transform is assumed to carry a factor ``e**-lam``; ``rest`` is the
    remaining factor so that ``H f(lam) = e**-lam rest(lam)``.  Integrals in
    ``lam`` use Gauss-Laguerre rules for that weight.
    """

    f: Callable = lambda x: np.exp(-np.asarray(x, dtype=float))
    rest: Callable = lambda lam: np.ones_like(np.asarray(lam, dtype=float))
    nodes: int = 96

    def transform(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.exp(-lam) * self.rest(lam)

    def inverse(self, x, nodes: int = 0):
        """``int J(lam x) H f(lam) dlam``; reproduces ``f``."""
        return bessel_solve(self, None, 0.0, x, nodes)


def _laguerre_integral(demo: HankelDemo, factor: Callable, x, nodes: int):
    lam, w = special.roots_laguerre(nodes)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = factor(lam) * demo.rest(lam)
    return (w * vals) @ bessel_kernel(np.outer(lam, x))


def bessel_solve(demo: HankelDemo, evaluator: GMLEvaluator | None, t: float, x, nodes: int = 0):
    """Time-changed squared-Bessel semigroup applied to ``demo.f``.

    Gauss-Laguerre in ``lam`` at ``nodes`` and ``2 nodes``; raises
    :class:`QuadratureError` when the two disagree beyond ``1e-9``.
    """
    n = nodes or demo.nodes
    if t == 0 or evaluator is None:
        def factor(lam):
            return np.ones_like(lam)
    else:
        ta = t**evaluator.alpha

        def factor(lam):
            return evaluator.values(-lam * ta)

    coarse = _laguerre_integral(demo, factor, x, n)
    fine = _laguerre_integral(demo, factor, x, 2 * n)
    if np.max(np.abs(coarse - fine)) > 1e-9 * max(1.0, float(np.max(np.abs(fine)))):
        raise QuadratureError("Hankel integral not resolved; reduce x or raise the node count")
    return fine[0] if np.ndim(x) == 0 else fine


def bessel_solve_adaptive(demo: HankelDemo, evaluator: GMLEvaluator, t: float, x: float,
                          tol: float = 1e-11) -> float:
    """Same integral by adaptive QUADPACK on ``(0, inf)`` with pointwise ``E``."""
    ta = t**evaluator.alpha

    def integrand(lam):
        e = evaluator.eval(-lam * ta).value if lam > 0 else 1.0
        return float(np.real(e)) * float(demo.transform(lam)) * float(bessel_kernel(lam * x))

    val, err = integrate.quad(integrand, 0.0, math.inf, epsabs=tol, epsrel=tol, limit=400)
    if not err < 1e3 * tol:
        raise QuadratureError(f"adaptive Hankel integral error estimate {err:.3g}")
    return val


def drift_closed_form(b: float, alpha: float, t: float, x):
    """Solution for ``phi(u) = b u`` and ``f = e**-x``: ``exp(-x/(1+s))/(1+s)``
    with ``s = t**alpha / (b alpha)``."""
    s = t**alpha / (b * alpha)
    x = np.asarray(x, dtype=float)
    return np.exp(-x / (1.0 + s)) / (1.0 + s)
