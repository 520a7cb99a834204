"""Markov semigroups with discrete spectrum and their time-changed versions.

Each model carries a generator ``L``, its invariant probability density
``nu`` and a biorthogonal system ``(P_n, V_n)`` with ``L P_n = -lambda_n P_n``
and ``<P_m, V_n>_nu = delta_mn``.  The classical semigroup is

    P_s f = sum_n exp(-lambda_n s) <f, V_n> P_n

and the time-changed solution replaces ``exp(-lambda_n s)`` by
``E(-lambda_n t**alpha)`` for a generalized Mittag-Leffler function ``E``.

Four models are provided:

* ``Laguerre``: ``x f'' + (1 - x) f'`` on the half-line, ``nu = e**-x``;
* ``Jacobi(lam1, mu)``: ``x(1-x) f'' - (lam1 x - mu) f'`` on ``(0, 1)``;
* ``GenLaguerre(m)``: a nonlocal perturbation of a Laguerre generator;
* ``GenJacobi(lam1, m)``: a nonlocal perturbation of a Jacobi generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from ..errors import ConfigError, DomainError, QuadratureError
from ..functions import SmoothFn
from .polys import laguerre_all, shifted_jacobi_all, shifted_jacobi_deriv_all

__all__ = [
    "SpectralModel",
    "Laguerre",
    "Jacobi",
    "GenLaguerre",
    "GenJacobi",
    "parse_model",
    "jacobi_norm_sq",
]


def jacobi_norm_sq(n, lam1: float, mu: float):
    """Normalizing constants making ``P_n^(lam1-mu-1, mu-1)(2x-1)`` orthonormal
    for the beta law with parameters ``(mu, lam1 - mu)``.

    ``C_n = (2n + lam1 - 1) n! (lam1)_{n-1} / ((mu)_n (lam1 - mu)_n)``, ``C_0 = 1``.
    """
    n = np.asarray(n, dtype=float)
    safe = np.maximum(n, 1.0)
    log_c = (np.log(2 * safe + lam1 - 1) + special.gammaln(safe + 1)
             + special.gammaln(lam1 + safe - 1) - special.gammaln(lam1)
             - special.gammaln(mu + safe) + special.gammaln(mu)
             - special.gammaln(lam1 - mu + safe) + special.gammaln(lam1 - mu))
    return np.where(n == 0, 1.0, np.exp(log_c))


def _column(v, ndim):
    return np.asarray(v, dtype=float).reshape((-1,) + (1,) * ndim)


def _shift(arr, k):
    """Rows ``n -> arr[n - k]`` with zeros for ``n < k``."""
    out = np.zeros_like(arr)
    if k < arr.shape[0]:
        out[k:] = arr[: arr.shape[0] - k]
    return out


@dataclass(frozen=True)
class SpectralModel:
    """Base class; subclasses fill in the model-specific pieces.

    Attributes
    ----------
    nodes : int
        Gauss rule size for inner products (doubled once to estimate error).
    T : float
        Time after which the eigenexpansion is known to converge.  Zero for
        all catalog models.
    """

    nodes: int = field(default=128, kw_only=True)
    T: float = field(default=0.0, kw_only=True)

    name = "model"
    self_adjoint = True

    # -- to override ------------------------------------------------------
    def eigenvalue(self, n):
        raise NotImplementedError

    def P_all(self, n_max: int, x, order: int = 0):
        """Eigenfunctions (or their ``order``-th derivative), rows ``0..n_max``."""
        raise NotImplementedError

    def V_all(self, n_max: int, x):
        """Co-eigenfunctions, rows ``0..n_max``."""
        return self.P_all(n_max, x)

    def density(self, x):
        raise NotImplementedError

    def _rule(self, n: int):
        """Nodes and weights with ``sum w g(x) = int g nu``."""
        raise NotImplementedError

    def local_part(self, f: SmoothFn, x):
        raise NotImplementedError

    def nonlocal_part(self, f: SmoothFn, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    @property
    def params(self) -> dict:
        return {}

    # -- generic ----------------------------------------------------------
    def to_string(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v!r}" for k, v in self.params.items())

    def quadrature(self, n: Optional[int] = None):
        return self._rule(int(n or self.nodes))

    def P(self, n: int, x):
        return self.P_all(n, x)[n]

    def V(self, n: int, x):
        return self.V_all(n, x)[n]

    def mode(self, k: int) -> SmoothFn:
        """The ``k``-th eigenfunction with exact derivatives."""
        return SmoothFn(lambda x: self.P_all(k, x)[k],
                        lambda x: self.P_all(k, x, 1)[k],
                        lambda x: self.P_all(k, x, 2)[k])

    def combination(self, coeffs) -> SmoothFn:
        """``x -> sum_n coeffs[n] P_n(x)`` with exact derivatives."""
        c = np.asarray(coeffs, dtype=float)
        n = len(c) - 1

        def make(order):
            def g(x):
                x = np.asarray(x, dtype=float)
                return np.tensordot(c, self.P_all(n, x, order), axes=1)
            return g

        return SmoothFn(make(0), make(1), make(2))

    def inner(self, f: Callable, g: Callable, n: Optional[int] = None) -> float:
        """``<f, g>_nu`` by the model's Gauss rule."""
        x, w = self.quadrature(n)
        return float(np.sum(w * f(x) * g(x)))

    def gram(self, n_max: int, nodes: Optional[int] = None):
        """Matrix ``<P_i, V_j>_nu`` for ``i, j <= n_max``."""
        x, w = self.quadrature(nodes)
        p = self.P_all(n_max, x)
        v = self.V_all(n_max, x)
        return (p * w) @ v.T

    def generator_apply(self, f: Union[SmoothFn, Callable], x):
        """``L f(x)``; local derivatives from ``f`` (finite differences if
        ``f`` carries none), nonlocal part by Gauss quadrature."""
        if not isinstance(f, SmoothFn):
            f = SmoothFn(f)
        x = np.asarray(x, dtype=float)
        return self.local_part(f, x) + self.nonlocal_part(f, x)

    def semigroup(self, coeffs, s: float, x):
        """Classical semigroup ``sum_n exp(-lambda_n s) c_n P_n(x)``."""
        c = np.asarray(coeffs, dtype=float)
        lam = self.eigenvalue(np.arange(len(c)))
        return np.tensordot(c * np.exp(-lam * s), self.P_all(len(c) - 1, x), axes=1)


@dataclass(frozen=True)
class Laguerre(SpectralModel):
    """Laguerre diffusion of order 0; eigenfunctions are ``L_n``."""

    name = "laguerre"

    def eigenvalue(self, n):
        return np.asarray(n, dtype=float)

    def P_all(self, n_max, x, order=0):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return laguerre_all(n_max, 0.0, x)
        # d/dx L_n^(a) = -L_{n-1}^(a+1)
        return (-1.0) ** order * _shift(laguerre_all(n_max, float(order), x), order)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, np.exp(-x), 0.0)

    def _rule(self, n):
        return special.roots_laguerre(n)

    def local_part(self, f, x):
        return x * f.second_derivative(x) + (1.0 - x) * f.derivative(x)


@dataclass(frozen=True)
class Jacobi(SpectralModel):
    """Jacobi diffusion on ``(0, 1)`` with beta(``mu``, ``lam1 - mu``) invariant law."""

    lam1: float = 3.0
    mu: float = 1.0
    name = "jacobi"

    def __post_init__(self):
        if not self.lam1 > self.mu > 0:
            raise DomainError("jacobi requires lam1 > mu > 0")

    @property
    def params(self):
        return {"lam1": self.lam1, "mu": self.mu}

    def eigenvalue(self, n):
        n = np.asarray(n, dtype=float)
        return n * (n - 1.0) + self.lam1 * n

    def P_all(self, n_max, x, order=0):
        x = np.asarray(x, dtype=float)
        a, b = self.lam1 - self.mu - 1.0, self.mu - 1.0
        raw = shifted_jacobi_deriv_all(n_max, a, b, x, order)
        return _column(np.sqrt(jacobi_norm_sq(np.arange(n_max + 1), self.lam1, self.mu)), x.ndim) * raw

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.mu, self.lam1 - self.mu
        inside = (x > 0) & (x < 1)
        xc = np.clip(x, 1e-300, 1 - 1e-16)
        return np.where(inside, np.exp((a - 1) * np.log(xc) + (b - 1) * np.log1p(-xc) - special.betaln(a, b)), 0.0)

    def _rule(self, n):
        y, w = special.roots_jacobi(n, self.lam1 - self.mu - 1.0, self.mu - 1.0)
        return 0.5 * (y + 1.0), w / w.sum()

    def local_part(self, f, x):
        return x * (1.0 - x) * f.second_derivative(x) - (self.lam1 * x - self.mu) * f.derivative(x)


@dataclass(frozen=True)
class GenLaguerre(SpectralModel):
    """Nonlocal, non-self-adjoint Laguerre-type generator

    ``x f'' + ((m**2 - 1)/m + 1 - x) f'
    + int_0^inf (f(e**-y x) - f(x) + y x f'(x)) m e**(-m y) / x dy``.

    Invariant density ``(1 + x) x**(m-1) e**-x / ((m + 1) Gamma(m))``.
    """

    m: float = 2.0
    name = "gen_laguerre"
    self_adjoint = False

    def __post_init__(self):
        if not self.m >= 1.0:
            raise DomainError("gen_laguerre requires m >= 1")

    @property
    def params(self):
        return {"m": self.m}

    def eigenvalue(self, n):
        return np.asarray(n, dtype=float)

    def _scale(self, n_max):
        n = np.arange(n_max + 1)
        m = self.m
        return np.exp(special.gammaln(n + 1) + special.gammaln(m + 2) - special.gammaln(n + m + 2))

    def P_all(self, n_max, x, order=0):
        # P_n = c_n (L_n^(m+1) - (x/m) L_{n-1}^(m+2)),  c_n = n! Gamma(m+2)/Gamma(n+m+2)
        x = np.asarray(x, dtype=float)
        m = self.m
        c = _column(self._scale(n_max), x.ndim)

        def lag(shift):
            # rows n -> L_{n-shift}^(m+1+shift)
            return _shift(laguerre_all(n_max, m + 1.0 + shift, x), shift)

        if order == 0:
            body = lag(0) - (x / m) * lag(1)
        elif order == 1:
            body = -(1.0 + 1.0 / m) * lag(1) + (x / m) * lag(2)
        elif order == 2:
            body = (1.0 + 2.0 / m) * lag(2) - (x / m) * lag(3)
        else:
            raise ValueError("order must be 0, 1 or 2")
        return c * body

    def V_all(self, n_max, x):
        x = np.asarray(x, dtype=float)
        m = self.m
        return (laguerre_all(n_max, m - 1.0, x) + x * laguerre_all(n_max, m, x)) / (x + 1.0)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        m = self.m
        xc = np.maximum(x, 1e-300)
        val = (1.0 + xc) / (m + 1.0) * np.exp((m - 1.0) * np.log(xc) - xc - special.gammaln(m))
        return np.where(x > 0, val, 0.0)

    def _rule(self, n):
        x, w = special.roots_genlaguerre(n, self.m - 1.0)
        return x, w * (1.0 + x) / ((self.m + 1.0) * math.gamma(self.m))

    def local_part(self, f, x):
        m = self.m
        return x * f.second_derivative(x) + ((m * m - 1.0) / m + 1.0 - x) * f.derivative(x)

    def nonlocal_part(self, f, x):
        # with s = e^-y:  (1/x) [ int_0^1 (f(s x) - f(x)) m s^(m-1) ds + x f'(x) / m ]
        m = self.m
        s, w = _gauss_jacobi_unit(self.nodes // 2, m - 1.0)
        x = np.asarray(x, dtype=float)
        xs = x[..., None] * s
        fx = f(x)
        integral = m * np.sum(w * (f(xs) - fx[..., None]), axis=-1)
        return (integral + x * f.derivative(x) / m) / x


@dataclass(frozen=True)
class GenJacobi(SpectralModel):
    """Nonlocal, non-self-adjoint Jacobi-type generator on ``(0, 1)``

    ``x(1-x) f'' - (lam1 x - m - 1) f' - x**-(m+1) int_0^x f'(r) r**m dr``.

    Invariant density proportional to ``((lam1-m-2) x + 1) x**(m-1) (1-x)**(lam1-m-2)``.
    """

    lam1: float = 5.5
    m: float = 2.5
    name = "gen_jacobi"
    self_adjoint = False

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError("gen_jacobi requires m > 0")
        if not self.lam1 > self.m + 1.0:
            raise DomainError("gen_jacobi requires lam1 > m + 1")

    @property
    def params(self):
        return {"lam1": self.lam1, "m": self.m}

    def eigenvalue(self, n):
        n = np.asarray(n, dtype=float)
        return n * (n - 1.0) + self.lam1 * n

    @property
    def _tilt(self):
        return self.lam1 - self.m - 2.0

    def _p_scale(self, n_max):
        n = np.arange(n_max + 1)
        m = self.m
        log_poch = special.gammaln(m + 2 + n) - special.gammaln(m + 2)
        return np.exp(special.gammaln(n + 1) - log_poch) * np.sqrt(jacobi_norm_sq(n, self.lam1, 1.0))

    def P_all(self, n_max, x, order=0):
        # P_n = n!/(m+2)_n sqrt(C_n(1)) (J_n + (x/m) J_n'),
        # J_n = P_n^(lam1-m-3, m+1)(2x-1)
        x = np.asarray(x, dtype=float)
        m = self.m
        a, b = self.lam1 - m - 3.0, m + 1.0
        d = [shifted_jacobi_deriv_all(n_max, a, b, x, k) for k in range(order + 2)]
        body = (1.0 + order / m) * d[order] + (x / m) * d[order + 1]
        return _column(self._p_scale(n_max), x.ndim) * body

    def _beta_jacobi(self, n_max, x, order=0):
        a, b = self.lam1 - self.m - 1.0, self.m - 1.0
        raw = shifted_jacobi_deriv_all(n_max, a, b, x, order)
        return _column(np.sqrt(jacobi_norm_sq(np.arange(n_max + 1), self.lam1, self.m)), x.ndim) * raw

    def _v_scale(self, n_max):
        # 1 / <P_n, u_n>_beta with u_n the unnormalized co-eigenfunction below
        n = np.arange(n_max + 1)
        m = self.m
        lead_ratio = self._p_scale(n_max) * (1.0 + n / m) / np.sqrt(jacobi_norm_sq(n, self.lam1, m))
        return (m + 1.0) / ((n + m + 1.0) * lead_ratio)

    def V_all(self, n_max, x):
        # V_n = k_n (Q_n - x(1-x) Q_n' / (1 + (lam1-m-2) x)),  Q_n orthonormal for beta(m, lam1-m)
        x = np.asarray(x, dtype=float)
        q = self._beta_jacobi(n_max, x)
        dq = self._beta_jacobi(n_max, x, 1)
        u = q - x * (1.0 - x) * dq / (1.0 + self._tilt * x)
        return _column(self._v_scale(n_max), x.ndim) * u

    def _norm(self):
        return 1.0 + self._tilt * self.m / (self.lam1 - 1.0)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.m, self.lam1 - self.m - 1.0
        inside = (x > 0) & (x < 1)
        xc = np.clip(x, 1e-300, 1 - 1e-16)
        base = np.exp((a - 1) * np.log(xc) + (b - 1) * np.log1p(-xc) - special.betaln(a, b))
        return np.where(inside, base * (1.0 + self._tilt * xc) / self._norm(), 0.0)

    def _rule(self, n):
        y, w = special.roots_jacobi(n, self.lam1 - self.m - 2.0, self.m - 1.0)
        x = 0.5 * (y + 1.0)
        return x, w / w.sum() * (1.0 + self._tilt * x) / self._norm()

    def local_part(self, f, x):
        return x * (1.0 - x) * f.second_derivative(x) - (self.lam1 * x - self.m - 1.0) * f.derivative(x)

    def nonlocal_part(self, f, x):
        # x^-(m+1) int_0^x f'(r) r^m dr = int_0^1 f'(x s) s^m ds
        s, w = _gauss_jacobi_unit(self.nodes // 2, self.m)
        x = np.asarray(x, dtype=float)
        return -np.sum(w * f.derivative(x[..., None] * s), axis=-1)


def _gauss_jacobi_unit(n: int, power: float):
    """Gauss rule on ``(0, 1)`` for the weight ``s**power``."""
    y, w = special.roots_jacobi(n, 0.0, power)
    return 0.5 * (y + 1.0), w * 0.5 ** (power + 1.0)


_MODELS = {
    "laguerre": (Laguerre, {}),
    "jacobi": (Jacobi, {"lam1": float, "mu": float}),
    "gen_laguerre": (GenLaguerre, {"m": float}),
    "gen_jacobi": (GenJacobi, {"lam1": float, "m": float}),
}


def parse_model(text: str, nodes: int = 128) -> SpectralModel:
    """Build a model from ``name[:key=value,...]``.

    Examples: ``laguerre``, ``jacobi:lam1=3,mu=1``, ``gen_laguerre:m=2``,
    ``gen_jacobi:lam1=5.5,m=2.5``.
    """
    name, _, rest = text.strip().partition(":")
    if name not in _MODELS:
        raise ConfigError(f"unknown model {name!r}; choose from {sorted(_MODELS)}")
    cls, keys = _MODELS[name]
    kwargs = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in keys:
            raise ConfigError(f"bad parameter {item!r} for model {name!r}")
        try:
            kwargs[key] = keys[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value in {item!r}") from exc
    try:
        return cls(**kwargs, nodes=nodes)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
