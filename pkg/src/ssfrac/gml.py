"""Generalized Mittag-Leffler function attached to a Bernstein function.

For ``phi`` and ``0 < alpha <= 1`` put ``phi_a(u) = phi(alpha u)`` and let
``W`` solve ``W(z + 1) = phi_a(z) W(z)``.  The function evaluated here is

    E(z) = 1 + 1/phi_a'(0+) * sum_{n >= 1} z**n / (n W(n)).

Three routes are available:

* the power series, inside ``|z| < phi(inf)``;
* a Mellin-Barnes integral for ``E(-q)``, ``q > 0``, on a vertical line
  ``Re xi = c`` with ``0 < c < |abscissa|``; it needs ``W`` at complex
  arguments;
* a one-term large-``q`` expansion driven by the leading pole of the
  Mellin-Barnes integrand.

With ``phi(u) = Gamma(u + alpha)/Gamma(u)`` this is the classical
``sum z**n / Gamma(alpha n + 1)``; with ``phi(u) = b u`` it reduces to
``exp(z / (b alpha))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special

from ._special import loggamma
from .bernstein import BernsteinSpec, PoissonQ, phi_alpha
from .errors import ContourError, DomainError, NonConvergence, RadiusError, Unsupported
from .wphi import WEvaluator, log_qpochhammer

__all__ = ["EvalReport", "GMLEvaluator", "circle_limit"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalReport:
    """Value of ``E`` together with how it was obtained."""

    value: complex
    method: str
    terms: int
    est_error: float


def circle_limit(f, radius: float = 0.25, n: int = 64):
    """Value at 0 of a function analytic in a punctured disc with a removable
    singularity, computed as the mean over a circle."""
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    pts = radius * np.exp(1j * theta)
    return np.mean(f(pts))


class GMLEvaluator:
    """Evaluate ``E`` for a Bernstein function and an index ``alpha``.

    Parameters
    ----------
    spec : BernsteinSpec
        Undilated Bernstein function ``phi``.
    alpha : float
        Index in ``(0, 1]``.
    tol : float
        Target relative accuracy used by the dispatcher.
    max_terms : int
        Series budget (also the bound of the integer ``W`` cache).
    pole : tuple, optional
        ``(p, C_p)`` for the large-argument expansion.  ``C_p`` may be
        ``None`` for integer ``p``, in which case it is computed from ``W``.
        The stable family registers ``(1, None)`` automatically.
    """

    def __init__(self, spec: BernsteinSpec, alpha: float, tol: float = 1e-12,
                 max_terms: int = 512, pole: Optional[Tuple[float, Optional[float]]] = None):
        self.spec = spec
        self.alpha = float(alpha)
        self.phi_a = phi_alpha(spec, alpha)
        self.w = WEvaluator(self.phi_a, max_n=max_terms)
        self.prime0 = float(self.phi_a.prime_at_zero)
        if not math.isfinite(self.prime0) or self.prime0 <= 0:
            raise DomainError("phi'(0+) must be finite and positive")
        self.radius = float(spec.phi_inf)
        self.abscissa = max(self.phi_a.abscissa, -1.0)
        self.tol = float(tol)
        self.max_terms = int(max_terms)
        if pole is None and self.w.closed_form == "StableGamma":
            pole = (1, None)
        self.pole = pole
        self.z_asym = 1e8
        n = np.arange(1, self.max_terms + 1)
        self._n = n
        self._logc = -math.log(self.prime0) - np.log(n) - self.w.w_log_integer(n)

    # ------------------------------------------------------------------
    # series
    # ------------------------------------------------------------------
    def coefficients(self, n_max: int):
        """Series coefficients ``1 / (phi_a'(0+) n W(n))`` for ``n = 1..n_max``."""
        if n_max > self.max_terms:
            raise NonConvergence("coefficient request beyond the term budget")
        return np.exp(self._logc[:n_max])

    def _series_core(self, z, derivative: bool = False):
        """Vectorized partial sums.

        Returns ``values, terms, est_error, converged``.  With
        ``derivative=True`` the series of ``E'`` is summed instead.
        """
        z = np.atleast_1d(np.asarray(z))
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return self._series_terms(z, derivative)

    def _series_terms(self, z, derivative):
        cplx = np.iscomplexobj(z)
        zc = z.astype(complex)
        absz = np.abs(zc)
        n = self._n
        logabs = np.log(absz)
        logc = self._logc + (np.log(n) if derivative else 0.0)
        powers = n if not derivative else n - 1
        logmag = logc[:, None] + powers[:, None] * logabs[None, :]
        logmag = np.where(absz[None, :] == 0, np.where(powers[:, None] == 0, logc[:, None], -np.inf), logmag)
        phase = np.exp(1j * powers[:, None] * np.angle(zc)[None, :])
        terms = np.exp(logmag) * phase
        mag = np.exp(logmag)
        # convergence index: first n past the peak with negligible terms
        cum_abs = np.cumsum(mag, axis=0) + (0.0 if derivative else 1.0)
        small = mag <= 1e-3 * self.tol * cum_abs
        past_peak = np.vstack([np.zeros((1, z.size), bool), np.diff(logmag, axis=0) < 0])
        small &= past_peak | (mag == 0)
        converged = small.any(axis=0)
        idx = np.where(converged, small.argmax(axis=0), self.max_terms - 1)
        mask = np.arange(self.max_terms)[:, None] <= idx[None, :]
        total = np.sum(np.where(mask, terms, 0.0), axis=0)
        abs_total = np.sum(np.where(mask, mag, 0.0), axis=0)
        values = (0.0 if derivative else 1.0) + total
        err = 4.0 * _EPS * (1.0 + abs_total) + mag[idx, np.arange(z.size)]
        if not cplx:
            values = values.real
        return values, idx + 1, err, converged, abs_total

    def _poisson_tail(self, z, nterms, derivative=False):
        """Analytic remainder for the Poisson family beyond ``nterms``.

        Uses ``1 / W(n) = (p**n; p)_inf / (p; p)_inf`` and replaces
        ``(p**n; p)_inf`` by 1 in the tail.
        """
        p = self.phi_a.q ** self.phi_a.scale
        poch = math.exp(float(np.real(log_qpochhammer(p, p))))
        n = np.arange(1, nterms + 1)
        zc = np.asarray(z, dtype=complex)
        if derivative:
            # sum_{n > N} z**(n-1) = z**N / (1 - z)
            tail = zc**nterms / (1.0 - zc)
        else:
            head = np.sum(zc[None, :] ** n[:, None] / n[:, None], axis=0)
            tail = -np.log1p(-zc) - head
        return tail / (self.prime0 * poch)

    def eval_series_array(self, z, derivative: bool = False):
        """Vectorized series for ``E`` (or ``E'``); values only.

        Raises
        ------
        RadiusError, NonConvergence
        """
        z = np.atleast_1d(np.asarray(z))
        if np.any(np.abs(z) >= self.radius):
            raise RadiusError(f"|z| must be below phi(inf) = {self.radius}")
        values, terms, err, conv, _ = self._series_core(z, derivative)
        if not np.all(conv):
            if isinstance(self.phi_a, PoissonQ):
                p = self.phi_a.q ** self.phi_a.scale
                nt = self.max_terms
                zabs = np.abs(z)
                bound = (zabs * p) ** nt / ((1.0 - p) * (1.0 - zabs * p)) / (1.0 - zabs)
                if np.all(bound[~conv] < self.tol):
                    full = self._full_sum(z, derivative)
                    extra = self._poisson_tail(z[~conv], nt, derivative)
                    if not np.iscomplexobj(z):
                        extra = extra.real
                    values = values.copy()
                    values[~conv] = full[~conv] + extra
                    return values
            raise NonConvergence(
                f"series did not reach tolerance within {self.max_terms} terms"
            )
        return values

    def _full_sum(self, z, derivative):
        zc = np.asarray(z, dtype=complex)
        n = self._n
        logc = self._logc + (np.log(n) if derivative else 0.0)
        powers = n if not derivative else n - 1
        terms = np.exp(logc)[:, None] * zc[None, :] ** powers[:, None]
        out = (0.0 if derivative else 1.0) + terms.sum(axis=0)
        return out if np.iscomplexobj(z) else out.real

    def eval_series(self, z) -> EvalReport:
        """Sum the power series at a single point.

        Raises
        ------
        RadiusError
            ``|z| >= phi(inf)``.
        NonConvergence
            The term budget was exhausted.
        """
        z0 = np.asarray(z)
        if np.abs(z0) >= self.radius:
            raise RadiusError(f"|z| must be below phi(inf) = {self.radius}")
        values, terms, err, conv, _ = self._series_core(z0)
        if conv[0]:
            return EvalReport(values[0], "series", int(terms[0]), float(err[0]))
        v = self.eval_series_array(z0)
        return EvalReport(v[0], "series", self.max_terms, float(self.tol))

    # ------------------------------------------------------------------
    # Mellin-Barnes
    # ------------------------------------------------------------------
    def contour_abscissa(self) -> float:
        """Real part of the integration line, ``min(|a|/2, 0.45)``."""
        if not self.abscissa < 0:
            raise ContourError("no admissible contour: abscissa is not negative")
        return min(0.5 * abs(self.abscissa), 0.45)

    def _mb_core(self, q, derivative=False, tol=None):
        tol = self.tol if tol is None else tol
        if self.w.closed_form is None:
            raise Unsupported("Mellin-Barnes needs W at complex arguments")
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if np.any(q <= 0):
            raise DomainError("Mellin-Barnes route needs q > 0")
        c = self.contour_abscissa()
        logq = np.log(q)
        d = min(c, 1.0 - c)
        spread = float(np.max(np.abs(logq))) if q.size else 0.0
        h = 2.0 * math.pi * d / (math.log(1.0 / tol) + 8.0 + d * spread)

        def base(b):
            xi = c + 1j * b
            return loggamma(xi) + loggamma(-xi) - self.w.log_w_complex(-xi), xi

        # truncation: grow B until the q-independent envelope is negligible
        big_b = 8.0
        while True:
            lb, _ = base(np.array([0.0, big_b]))
            env = np.real(lb[1]) - np.real(lb[0]) + c * spread
            if env < math.log(tol) - 6.0 or big_b > 4096:
                break
            big_b *= 1.5
        nodes = int(math.ceil(big_b / (0.5 * h)))
        b = 0.5 * h * np.arange(nodes + 1)
        lb, xi = base(b)
        logf = lb[:, None] - xi[:, None] * logq[None, :]
        vals = np.exp(logf)
        if derivative:
            vals = vals * (-xi[:, None] / q[None, :])
        vals = vals.real
        wts = np.ones(nodes + 1)
        wts[0] = 0.5
        fine = 0.5 * h * (wts[:, None] * vals).sum(axis=0)
        coarse_vals = vals[::2]
        wc = np.ones(coarse_vals.shape[0])
        wc[0] = 0.5
        coarse = h * (wc[:, None] * coarse_vals).sum(axis=0)
        scale = 1.0 / (math.pi * self.prime0)
        abs_int = 0.5 * h * (wts[:, None] * np.abs(vals)).sum(axis=0)
        err = scale * (np.abs(fine - coarse) + 8 * _EPS * abs_int)
        return scale * fine, err, nodes + 1

    def eval_mb_array(self, q, derivative: bool = False):
        """Vectorized ``E(-q)`` (or ``E'(-q)``) by the Mellin-Barnes route."""
        vals, _, _ = self._mb_core(q, derivative)
        return vals

    def eval_mellin_barnes(self, q, tol: Optional[float] = None) -> EvalReport:
        """``E(-q)`` for ``q > 0`` from the vertical-line integral.

        Raises
        ------
        Unsupported
            ``W`` is not available at complex arguments.
        ContourError
            The abscissa of ``phi_a`` is not negative.
        """
        vals, err, nodes = self._mb_core(np.array([q], dtype=float), tol=tol)
        return EvalReport(float(vals[0]), "mellin_barnes", int(nodes), float(err[0]))

    # ------------------------------------------------------------------
    # large-argument expansion
    # ------------------------------------------------------------------
    def pole_coefficient(self, p: float, c_p: Optional[float] = None) -> float:
        """Coefficient ``C`` in ``E(-q) ~ C q**(-p) / phi_a'(0+)``."""
        if float(p).is_integer():
            k = int(p)
            if k < 1:
                raise DomainError("pole order must be positive")
            ks = np.arange(k + 1)

            def prod(xi):
                return np.prod(self.phi_a.phi_continued(xi[:, None] - ks[None, :]), axis=1)

            w_minus = 1.0 / complex(circle_limit(prod))
            return float(np.real((-1) ** k / (k * w_minus)))
        if c_p is None:
            raise DomainError("non-integer pole order needs its residue constant")
        w1 = complex(self.w.w_complex(1.0 - p))
        return float(np.real(special.gamma(p) * special.gamma(-p) * c_p / w1))

    def eval_asymptotic(self, q, pole: Optional[Tuple[float, Optional[float]]] = None) -> EvalReport:
        """One-term expansion ``C q**(-p) / phi_a'(0+)`` for large ``q``."""
        pole = pole or self.pole
        if pole is None:
            raise Unsupported("no pole data registered for the large-q expansion")
        p, c_p = pole
        coef = self.pole_coefficient(p, c_p)
        val = coef * float(q) ** (-p) / self.prime0
        return EvalReport(val, "asymptotic", 1, abs(val) / float(q))

    # ------------------------------------------------------------------
    # dispatch
    # ------------------------------------------------------------------
    def _series_ok(self, z):
        z = np.atleast_1d(np.asarray(z))
        inside = np.abs(z) < self.radius
        ok = np.zeros(z.shape, bool)
        if np.any(inside):
            vals, _, err, conv, abs_total = self._series_core(z[inside])
            good = conv & (err <= self.tol * np.maximum(1.0, np.abs(vals)))
            ok[inside] = good
        return ok

    def eval(self, z) -> EvalReport:
        """Evaluate ``E(z)`` by the most appropriate route.

        The series is used when it converges within the budget without
        losing more than the target accuracy to cancellation.  Otherwise,
        for negative real ``z``, the Mellin-Barnes integral (or, beyond
        ``z_asym`` and with pole data, the one-term expansion) is used.
        """
        z = complex(z) if np.iscomplexobj(np.asarray(z)) else float(z)
        if z == 0:
            return EvalReport(1.0, "series", 0, 0.0)
        if self._series_ok(z)[0]:
            return self.eval_series(z)
        if isinstance(z, float) and z < 0:
            q = -z
            if self.pole is not None and q >= self.z_asym:
                return self.eval_asymptotic(q)
            if self.w.closed_form is not None and self.abscissa < 0:
                return self.eval_mellin_barnes(q)
        if abs(z) >= self.radius:
            raise RadiusError(f"|z| = {abs(z)} outside the disc of radius {self.radius}")
        if self.pole is not None and isinstance(z, float) and z < 0:
            return self.eval_asymptotic(-z)
        return self.eval_series(z)

    def values(self, z, derivative: bool = False):
        """Vectorized real evaluation of ``E`` (or ``E'``) on real input."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.empty(z.shape)
        ok = self._series_ok(z) if not derivative else self._series_ok(z)
        if np.any(ok):
            out[ok] = self.eval_series_array(z[ok], derivative)
        rest = ~ok
        if np.any(rest):
            if np.any(z[rest] >= 0):
                zz = z[rest][z[rest] >= 0]
                if np.any(np.abs(zz) >= self.radius):
                    raise RadiusError("argument outside the disc of convergence")
                out_pos = self.eval_series_array(zz, derivative)
                sel = np.where(rest)[0][z[rest] >= 0]
                out[sel] = out_pos
            neg = rest & (z < 0)
            if np.any(neg):
                q = -z[neg]
                v = self.eval_mb_array(q, derivative)
                # E'(z) = dE/dz and the route computes d/dq E(-q) = -E'(-q)
                out[neg] = -v if derivative else v
        return out

    def mellin_of_inverse(self, z, t: float = 1.0):
        """``E[zeta_t**z] = t**(z alpha) Gamma(z) / (phi_a'(0+) W(z))``."""
        zc = np.asarray(z)
        if np.any(np.real(zc) <= 0):
            raise DomainError("moment order must have positive real part")
        if self.w.closed_form is not None:
            logw = self.w.log_w_complex(zc)
        elif np.all(np.isreal(zc)) and np.all(np.real(zc) == np.round(np.real(zc))):
            logw = self.w.w_log_integer(np.real(zc).astype(int))
        else:
            raise Unsupported("W at non-integer arguments is not available")
        out = np.exp(zc * self.alpha * math.log(t) + loggamma(zc) - logw) / self.prime0
        if not np.iscomplexobj(zc):
            out = out.real
        return out
