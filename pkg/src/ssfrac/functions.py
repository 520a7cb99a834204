"""Test functions carrying their derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = ["SmoothFn", "power", "exponential", "polynomial", "eigenfunction_of_time"]


@dataclass(frozen=True)
class SmoothFn:
    """A vectorized function with (optional) first and second derivatives."""

    f: Callable
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def derivative(self, x, h: float = 1e-5):
        x = np.asarray(x, dtype=float)
        if self.df is not None:
            return self.df(x)
        return (self.f(x + h) - self.f(x - h)) / (2 * h)

    def second_derivative(self, x, h: float = 1e-4):
        x = np.asarray(x, dtype=float)
        if self.d2f is not None:
            return self.d2f(x)
        if self.df is not None:
            return (self.df(x + h) - self.df(x - h)) / (2 * h)
        return (self.f(x + h) - 2 * self.f(x) + self.f(x - h)) / h**2


def power(z: float) -> SmoothFn:
    """``t -> t**z`` on ``t > 0``."""
    return SmoothFn(lambda t: t**z, lambda t: z * t ** (z - 1.0),
                    lambda t: z * (z - 1.0) * t ** (z - 2.0))


def exponential(c: float = 1.0) -> SmoothFn:
    """``t -> exp(c t)``."""
    return SmoothFn(lambda t: np.exp(c * t), lambda t: c * np.exp(c * t),
                    lambda t: c * c * np.exp(c * t))


def polynomial(coeffs) -> SmoothFn:
    """Polynomial with coefficients in increasing degree."""
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    d1 = p.deriv()
    d2 = d1.deriv()
    return SmoothFn(p, d1, d2)


def eigenfunction_of_time(evaluator, q: float) -> SmoothFn:
    """``t -> E(q t**alpha)`` for a :class:`~ssfrac.gml.GMLEvaluator`."""
    a = evaluator.alpha

    def f(t):
        t = np.asarray(t, dtype=float)
        return evaluator.values(q * t**a).reshape(t.shape)

    def df(t):
        t = np.asarray(t, dtype=float)
        e1 = evaluator.values(q * t**a, derivative=True).reshape(t.shape)
        return e1 * q * a * t ** (a - 1.0)

    return SmoothFn(f, df)
