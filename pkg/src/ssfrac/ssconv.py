"""Self-similar convolution operators on the half-line.

For drift ``b``, kernel ``m`` on ``(0, 1)`` and index ``alpha`` the operator

    D f(t) = b t**(1 - alpha) f'(t) + t**(-alpha) int_0^t f'(y) m(y / t) dy

maps ``t**z`` to ``Phi(z) t**(z - alpha)`` where
``Phi(z) = b z + z int_0^1 r**(z - 1) m(r) dr``.  Two instances matter:

* the base operator, built from ``phi`` itself;
* the time operator, built from the kernel ``r**(-alpha) m(r)``.  Its
  eigenfunctions are ``t -> E(q t**alpha)``.  For the stable family it is
  the Caputo derivative.

The characteristic operator ``A`` of the associated self-similar Markov
process and the inversion identity linking it with the base operator are
also provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .bernstein import BernsteinSpec, PoissonQ, bold_phi
from .errors import DomainError, RadiusError
from .functions import SmoothFn, eigenfunction_of_time
from .gml import GMLEvaluator
from .quadrature import Kernel, QuadConfig, gauss_jacobi, kernel_integral

__all__ = [
    "ConvOperator",
    "base_operator",
    "bold_operator",
    "power_action",
    "scaling_check",
    "eigen_residual",
    "poisson_closed_form",
    "char_operator",
    "intertwining_residual",
]


@dataclass(frozen=True)
class ConvOperator:
    """A self-similar convolution operator.

    Attributes
    ----------
    alpha : float
        Degree of self-similarity.
    b : float
        Drift coefficient (local part).
    kernel : Kernel or None
        Nonlocal part; ``None`` for a pure drift.
    symbol : callable
        ``z -> Phi(z)``, the action on powers.
    quad : QuadConfig
        Quadrature settings.
    """

    alpha: float
    b: float
    kernel: Optional[Kernel]
    symbol: Callable
    quad: QuadConfig = field(default_factory=QuadConfig)
    label: str = ""

    def apply_with_error(self, g: SmoothFn, t: float):
        """Return ``(D g(t), estimated quadrature error)``."""
        t = float(t)
        if not t > 0:
            raise DomainError("operators act on t > 0")
        local = self.b * t * g.derivative(t) if self.b else 0.0
        if self.kernel is None:
            return float(t ** (-self.alpha) * local), 0.0
        integral, err = kernel_integral(lambda r: g.derivative(t * r), self.kernel, self.quad)
        scale = t ** (1.0 - self.alpha)
        return float(t ** (-self.alpha) * local + scale * integral), float(scale * err)

    def apply(self, g: SmoothFn, t):
        """Evaluate ``D g`` at ``t`` (scalar or array)."""
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return self.apply_with_error(g, float(t_arr))[0]
        return np.array([self.apply_with_error(g, ti)[0] for ti in t_arr.ravel()]).reshape(t_arr.shape)


def _kernel_or_none(spec_kernel: Kernel, has_jumps: bool):
    return spec_kernel if has_jumps else None


def base_operator(spec: BernsteinSpec, alpha: float, quad: Optional[QuadConfig] = None) -> ConvOperator:
    """Operator with the kernel of ``phi`` itself (symbol ``phi``)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if spec.scale != 1.0:
        raise DomainError("pass the undilated Bernstein function")
    has_jumps = spec.name != "drift"
    return ConvOperator(alpha, spec.drift, _kernel_or_none(spec.kernel(), has_jumps),
                        spec.phi_continued, quad or QuadConfig(), f"base[{spec.to_string()}]")


def bold_operator(spec: BernsteinSpec, alpha: float, quad: Optional[QuadConfig] = None) -> ConvOperator:
    """Time operator with kernel ``r**(-alpha) m(r)``.

    For ``phi(u) = Gamma(u + alpha)/Gamma(u)`` this is the Caputo derivative
    of order ``alpha``; for ``phi(u) = b u`` it is ``b t**(1-alpha) f'``.
    """
    bp = bold_phi(spec, alpha)
    has_jumps = spec.name != "drift"
    return ConvOperator(alpha, bp.drift, _kernel_or_none(bp.kernel(), has_jumps), bp,
                        quad or QuadConfig(), f"bold[{spec.to_string()}]")


def power_action(op: ConvOperator, z: float, t: float):
    """Return ``(quadrature value, Phi(z) t**(z - alpha))`` for ``g = t**z``."""
    from .functions import power

    num = op.apply(power(z), t)
    exact = float(np.real(op.symbol(z))) * t ** (z - op.alpha)
    return num, exact


def scaling_check(op: ConvOperator, g: SmoothFn, c: float, t: float) -> float:
    """``|D(g(c .))(t) - c**alpha (D g)(c t)|``."""
    dil = SmoothFn(lambda s: g(c * np.asarray(s)), lambda s: c * g.derivative(c * np.asarray(s)))
    lhs = op.apply(dil, t)
    rhs = c**op.alpha * op.apply(g, c * t)
    return abs(lhs - rhs)


def poisson_closed_form(spec: PoissonQ, alpha: float, g: SmoothFn, t: float) -> float:
    """Time operator of the Poisson family without derivatives of ``g``:

    ``t**-a g(t) - (q t)**-a g(q t) + a int_{qt}^t g(y) y**(-a-1) dy``.
    """
    q = spec.q
    x, w = gauss_jacobi(64, 0.0, 0.0)
    lo, hi = q * t, t
    y = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    integral = 0.5 * (hi - lo) * np.sum(w * g(y) * y ** (-alpha - 1.0))
    return float(t ** (-alpha) * g(t) - (q * t) ** (-alpha) * g(q * t) + alpha * integral)


def eigen_residual(spec: BernsteinSpec, alpha: float, q: float, t: float,
                   route: str = "quadrature", evaluator: Optional[GMLEvaluator] = None,
                   quad: Optional[QuadConfig] = None) -> float:
    """Relative residual of ``D F_q = q F_q`` with ``F_q(t) = E(q t**alpha)``.

    ``route="closed_form"`` uses :func:`poisson_closed_form` (Poisson
    family only).

    Raises
    ------
    RadiusError
        For a bounded ``phi`` when ``|q| t**alpha >= phi(inf)``.
    """
    if math.isfinite(spec.phi_inf) and abs(q) * t**alpha >= spec.phi_inf:
        raise RadiusError("eigenrelation is checked inside the disc of convergence only")
    ev = evaluator or GMLEvaluator(spec, alpha)
    fq = eigenfunction_of_time(ev, q)
    if route == "closed_form":
        if not isinstance(spec, PoissonQ):
            raise DomainError("closed-form route exists for the Poisson family only")
        lhs = poisson_closed_form(spec, alpha, fq, t)
    else:
        lhs = bold_operator(spec, alpha, quad).apply(fq, t)
    rhs = q * float(fq(t))
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def char_operator(spec: BernsteinSpec, alpha: float, g: SmoothFn, t: float,
                  tol: float = 1e-13) -> float:
    """Characteristic operator of the self-similar Markov process:

    ``A g(t) = t**-alpha (b t g'(t) + int_t^inf g'(r) m(t / r) dr)``.

    ``g`` and ``t g'`` must be bounded and ``g'`` integrable at infinity.
    The jump part is integrated in the logarithmic variable ``r = t e**y``
    with QUADPACK, using the algebraic weight ``y**c`` for a kernel that
    behaves like ``(1 - r)**c`` at ``r = 1``.
    """
    t = float(t)
    local = spec.drift * t * float(g.derivative(t))
    if spec.name == "drift":
        return t ** (-alpha) * local
    k = spec.kernel()
    c = k.right_exp

    def body(y):
        if y > 700.0:
            return 0.0  # r g'(r) is assumed to vanish at infinity
        r = math.exp(-y)
        # (1 - e^-y)^c = y^c * ((1 - e^-y)/y)^c ; the y^c factor is the weight
        ratio = -math.expm1(-y) / y if y > 0 else 1.0
        return float(g.derivative(t * math.exp(y))) * t * math.exp(y) * \
            float(k.smooth(np.array([r]))[0]) * ratio**c

    y_max = -math.log(k.lo) if k.lo > 0 else math.inf
    split = min(1.0, y_max)
    opts = dict(epsabs=tol, epsrel=tol, limit=400)
    near, _ = integrate.quad(body, 0.0, split, weight="alg", wvar=(c, 0.0), **opts)
    far = 0.0
    if y_max > split:
        far, _ = integrate.quad(lambda y: body(y) * y**c, split, y_max, **opts)
    return t ** (-alpha) * (local + near + far)


def intertwining_residual(spec: BernsteinSpec, alpha: float, g: SmoothFn, t: float,
                          quad: Optional[QuadConfig] = None) -> float:
    """``|D(g o inv)(t) + t**(-2 alpha) (A g)(1/t)|`` for the base operator."""
    inv = SmoothFn(lambda y: g(1.0 / np.asarray(y)),
                   lambda y: -g.derivative(1.0 / np.asarray(y)) / np.asarray(y) ** 2)
    lhs = base_operator(spec, alpha, quad).apply(inv, t)
    rhs = -t ** (-2.0 * alpha) * char_operator(spec, alpha, g, 1.0 / t)
    return abs(lhs - rhs)
