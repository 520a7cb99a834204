"""The function ``W`` solving ``W(z + 1) = phi(z) W(z)``, ``W(1) = 1``.

Integer values come from the product ``W(n) = prod_{k<n} phi(k)``, kept
in log space and memoized.  Complex values are available for catalog
entries whose ``W`` has a closed form:

* ``StableGamma``: ``phi(u) = Gamma(a u + a) / Gamma(a u)`` gives
  ``W(z) = Gamma(a z) / Gamma(a)``;
* ``DriftGamma``: ``phi(u) = c u`` gives ``W(z) = c**(z - 1) Gamma(z)``;
* ``QPochhammer``: ``phi(u) = 1 - p**u`` gives
  ``W(z) = (p; p)_inf / (p**z; p)_inf``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy import special

from ._special import loggamma
from .bernstein import BernsteinSpec, Drift, PoissonQ, StableLamperti
from .errors import DomainError, Unsupported

__all__ = ["WEvaluator", "log_qpochhammer"]


def log_qpochhammer(a, p: float, tol: float = 1e-18):
    """``log (a; p)_inf = sum_k log(1 - a p**k)`` for complex ``a``.

    The sum of principal logarithms is returned; its exponential is the
    infinite product.
    """
    a = np.asarray(a, dtype=complex)
    amax = float(np.max(np.abs(a))) if a.size else 1.0
    lp = math.log(p)
    n_terms = int(math.ceil((math.log(tol) - math.log(max(amax, 1e-300))) / lp)) + 1
    n_terms = max(n_terms, 1)
    k = np.arange(n_terms)
    pk = np.exp(k * lp)
    factors = a[..., None] * pk
    return np.sum(np.log1p(-factors), axis=-1)


class WEvaluator:
    """Evaluate ``W`` for a (dilated) Bernstein function.

    Parameters
    ----------
    spec : BernsteinSpec
        The function appearing in the functional equation, typically
        ``phi_alpha(base, alpha)``.
    max_n : int
        Soft bound of the integer cache.
    """

    def __init__(self, spec: BernsteinSpec, max_n: int = 512):
        self.spec = spec
        self.max_n = int(max_n)
        self._logs = np.zeros(1)  # _logs[n-1] = log W(n)
        self.closed_form = self._detect_closed_form()

    def _detect_closed_form(self) -> Optional[str]:
        s = self.spec
        if isinstance(s, StableLamperti) and abs(s.scale - s.alpha) <= 1e-14 * s.alpha:
            return "StableGamma"
        if isinstance(s, Drift):
            return "DriftGamma"
        if isinstance(s, PoissonQ):
            return "QPochhammer"
        return None

    # -- integers --------------------------------------------------------
    def _extend(self, n: int):
        have = self._logs.size
        if n <= have:
            return
        k = np.arange(have, n, dtype=float)
        steps = np.asarray(self.spec.log_phi(k), dtype=float)
        self._logs = np.concatenate([self._logs, self._logs[-1] + np.cumsum(steps)])

    def w_log_integer(self, n):
        """``log W(n)`` for integers ``n >= 1`` (array-valued)."""
        n_arr = np.asarray(n)
        if np.any(n_arr < 1) or np.any(n_arr != np.floor(n_arr)):
            raise DomainError("integer W requires n >= 1")
        top = int(np.max(n_arr)) if n_arr.size else 1
        self._extend(top)
        return self._logs[n_arr.astype(int) - 1]

    def w_integer(self, n):
        """``W(n) = prod_{k=1}^{n-1} phi(k)``."""
        return np.exp(self.w_log_integer(n))

    # -- complex ---------------------------------------------------------
    def log_w_complex(self, z):
        """``log W(z)`` via the closed form; principal branches summed."""
        z = np.asarray(z, dtype=complex)
        s = self.spec
        cf = self.closed_form
        if cf == "StableGamma":
            a = s.alpha
            return loggamma(a * z) - special.gammaln(a)
        if cf == "DriftGamma":
            c = s.drift
            return (z - 1.0) * math.log(c) + loggamma(z)
        if cf == "QPochhammer":
            p = s.q**s.scale
            pz = np.exp(z * math.log(p))
            return log_qpochhammer(p, p) - log_qpochhammer(pz, p)
        raise Unsupported(f"no closed form of W for {s.to_string()}")

    def w_complex(self, z):
        """Evaluate ``W(z)`` for complex ``z`` away from its poles.

        Raises
        ------
        Unsupported
            No closed form is known for this Bernstein function.
        DomainError
            ``z`` sits on a pole of ``W``.
        """
        z_arr = np.asarray(z, dtype=complex)
        if self.closed_form is None:
            raise Unsupported(f"no closed form of W for {self.spec.to_string()}")
        poles = self._near_pole(z_arr)
        if np.any(poles):
            raise DomainError("W evaluated at a pole")
        return np.exp(self.log_w_complex(z_arr))

    def _near_pole(self, z):
        cf = self.closed_form
        if cf == "StableGamma":
            w = self.spec.alpha * z
        elif cf == "DriftGamma":
            w = z
        else:
            w = z  # (p^z; p)_inf vanishes at z = -k (real part of the lattice)
            lp = math.log(self.spec.q**self.spec.scale)
            period = 2.0 * math.pi / abs(lp)
            im = np.mod(w.imag + 0.5 * period, period) - 0.5 * period
            w = w.real + 1j * im
        near_int = np.abs(w - np.round(w.real)) < 1e-12
        return near_int & (np.round(w.real) <= 0)
