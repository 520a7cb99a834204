"""Classical orthogonal polynomials by three-term recurrence.

All evaluators return every degree ``0..n`` at once, as an array of shape
``(n + 1,) + x.shape``.  The explicit finite sums are kept for
cross-checking low degrees.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = [
    "laguerre_all",
    "laguerre_explicit",
    "jacobi_all",
    "jacobi_explicit",
    "shifted_jacobi_all",
    "shifted_jacobi_deriv_all",
]


def laguerre_all(n: int, a: float, x):
    """Generalized Laguerre polynomials ``L_k^(a)(x)`` for ``k = 0..n``.

    Uses ``(k + 1) L_{k+1} = (2k + 1 + a - x) L_k - (k + a) L_{k-1}``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 1.0 + a - x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1)
    return out


def laguerre_explicit(n: int, a: float, x):
    """``sum_k (-1)**k binom(n + a, n - k) x**k / k!`` (reference only)."""
    x = np.asarray(x, dtype=float)
    k = np.arange(n + 1)
    c = (-1.0) ** k * special.binom(n + a, n - k) / special.factorial(k)
    return np.polynomial.polynomial.polyval(x, c)


def jacobi_all(n: int, a: float, b: float, y):
    """Jacobi polynomials ``P_k^(a,b)(y)`` on ``[-1, 1]`` for ``k = 0..n``."""
    y = np.asarray(y, dtype=float)
    out = np.empty((n + 1,) + y.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = (a + 1.0) + 0.5 * (a + b + 2.0) * (y - 1.0)
    for k in range(1, n):
        s = 2 * k + a + b
        c1 = 2.0 * (k + 1) * (k + a + b + 1) * s
        c2 = (s + 1) * (s + 2) * s
        c3 = (s + 1) * (a * a - b * b)
        c4 = 2.0 * (k + a) * (k + b) * (s + 2)
        out[k + 1] = ((c2 * y + c3) * out[k] - c4 * out[k - 1]) / c1
    return out


def jacobi_explicit(n: int, a: float, b: float, y):
    """``sum_s binom(n+a, n-s) binom(n+b, s) ((y-1)/2)**s ((y+1)/2)**(n-s)``."""
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y)
    for s in range(n + 1):
        total = total + special.binom(n + a, n - s) * special.binom(n + b, s) \
            * (0.5 * (y - 1.0)) ** s * (0.5 * (y + 1.0)) ** (n - s)
    return total


def shifted_jacobi_all(n: int, a: float, b: float, x):
    """``P_k^(a,b)(2x - 1)`` on ``[0, 1]``; orthogonal for ``x**b (1-x)**a``."""
    return jacobi_all(n, a, b, 2.0 * np.asarray(x, dtype=float) - 1.0)


def shifted_jacobi_deriv_all(n: int, a: float, b: float, x, order: int = 1):
    """Derivatives in ``x`` of ``P_k^(a,b)(2x - 1)`` for ``k = 0..n``.

    ``d/dx P_k^(a,b)(2x-1) = (k + a + b + 1) P_{k-1}^(a+1,b+1)(2x-1)``.
    """
    x = np.asarray(x, dtype=float)
    if order == 0:
        return shifted_jacobi_all(n, a, b, x)
    out = np.zeros((n + 1,) + x.shape)
    if n >= 1:
        lower = shifted_jacobi_deriv_all(n - 1, a + 1.0, b + 1.0, x, order - 1)
        k = np.arange(1, n + 1).reshape((-1,) + (1,) * x.ndim)
        out[1:] = (k + a + b + 1.0) * lower
    return out
