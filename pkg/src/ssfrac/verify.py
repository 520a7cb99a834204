"""Property suites with measured residuals.

Each suite returns a list of :class:`Check` rows.  Deterministic checks
compare a residual with a tolerance; Monte Carlo checks compare a deviation
with a multiple of the standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy import special

from .bernstein import Drift, PoissonQ, StableLamperti
from .functions import exponential, power
from .gml import GMLEvaluator
from .ssconv import base_operator, bold_operator, eigen_residual, intertwining_residual, power_action, scaling_check
from .stoch import SimConfig, mc_expectation
from .spectral import GenJacobi, GenLaguerre, Jacobi, Laguerre, cauchy_residual, solve

__all__ = ["Check", "SUITES", "run_suite", "format_table"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)


def _tol(default: float, override: Optional[float]) -> float:
    return default if override is None else override


def suite_power(tol: Optional[float] = None, **_) -> List[Check]:
    out = []
    specs = [StableLamperti(alpha=0.5), PoissonQ(q=0.5), Drift(b=1.0)]
    for spec in specs:
        for label, make in (("base", base_operator), ("bold", bold_operator)):
            op = make(spec, 0.5)
            worst = 0.0
            for z in (0.5, 1.0, 2.0, 3.5):
                for t in (0.5, 1.0, 2.0):
                    num, exact = power_action(op, z, t)
                    worst = max(worst, abs(num - exact) / max(1.0, abs(exact)))
            out.append(Check("power", f"{label} {spec.to_string()}", worst, _tol(1e-8, tol)))
    return out


def suite_scaling(tol: Optional[float] = None, **_) -> List[Check]:
    op = bold_operator(StableLamperti(alpha=0.5), 0.5)
    out = [
        Check("scaling", "exp, c=1.5, t=0.8", scaling_check(op, exponential(1.0), 1.5, 0.8), _tol(1e-7, tol)),
        Check("scaling", "t^2, c=2, t=1", scaling_check(op, power(2.0), 2.0, 1.0), _tol(1e-10, tol)),
        Check("scaling", "c=1", scaling_check(op, exponential(1.0), 1.0, 1.3), _tol(1e-14, tol)),
    ]
    inter = max(intertwining_residual(StableLamperti(alpha=0.5), 0.5, power(w), t)
                for w in (-0.25, -0.5) for t in (0.5, 2.0))
    out.append(Check("scaling", "inversion identity on powers", inter, _tol(1e-7, tol)))
    return out


def suite_eigen(tol: Optional[float] = None, **_) -> List[Check]:
    out = []
    for spec in (StableLamperti(alpha=0.5), Drift(b=1.0)):
        ev = GMLEvaluator(spec, 0.5)
        worst = max(eigen_residual(spec, 0.5, q, t, evaluator=ev)
                    for q in (-2.0, -1.0, 1.0) for t in (0.5, 1.0, 2.0))
        out.append(Check("eigen", f"time operator, {spec.to_string()}", worst, _tol(1e-6, tol)))
    spec = PoissonQ(q=0.5)
    ev = GMLEvaluator(spec, 0.5)
    worst = max(eigen_residual(spec, 0.5, q, t, route="closed_form", evaluator=ev)
                for q in (-0.9, -0.5, 0.5, 0.9) for t in (0.25, 1.0) if abs(q) * t**0.5 <= 0.9)
    out.append(Check("eigen", "time operator, poisson closed form", worst, _tol(1e-6, tol)))
    for model in _models():
        xs = _probe(model)
        worst = 0.0
        for k in range(6):
            lhs = model.generator_apply(model.mode(k), xs)
            rhs = -model.eigenvalue(k) * model.P(k, xs)
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs)))))
        out.append(Check("eigen", f"generator, {model.to_string()}", worst, _tol(1e-7, tol)))
    return out


def _models():
    return [Laguerre(), Jacobi(lam1=3.0, mu=1.0), GenLaguerre(m=2.0), GenJacobi(lam1=5.5, m=2.5)]


def _probe(model):
    if "jacobi" in model.name:
        return np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    return np.array([0.5, 1.0, 2.0, 4.0])


def suite_biorth(tol: Optional[float] = None, **_) -> List[Check]:
    out = []
    for model in (GenLaguerre(m=2.0), GenJacobi(lam1=5.5, m=2.5)):
        err = float(np.max(np.abs(model.gram(10) - np.eye(11))))
        out.append(Check("biorth", f"gram 0..10, {model.to_string()}", err, _tol(1e-8, tol)))
    return out


def suite_cauchy(tol: Optional[float] = None, **_) -> List[Check]:
    out = []
    stable = GMLEvaluator(StableLamperti(alpha=0.5), 0.5)
    drift = GMLEvaluator(Drift(b=1.0), 0.5)
    limits = {"laguerre": 1e-6, "jacobi": 1e-6, "gen_laguerre": 1e-5, "gen_jacobi": 1e-5}
    for model in _models():
        x = 0.5 if "jacobi" not in model.name else 0.3
        worst = max(cauchy_residual(model, stable, np.eye(4)[k], 1.0, x).value for k in range(4))
        out.append(Check("cauchy", f"single modes, stable, {model.to_string()}", worst,
                         _tol(limits[model.name], tol)))
        coeffs = np.array([0.3, -1.0, 0.5, 0.25])
        worst = cauchy_residual(model, drift, coeffs, 1.0, x).value
        out.append(Check("cauchy", f"mixed modes, drift, {model.to_string()}", worst, _tol(1e-8, tol)))
        xs = _probe(model)
        s = 1.0 / 0.5
        eq = float(np.max(np.abs(solve(model, drift, coeffs, 1.0, xs) - model.semigroup(coeffs, s, xs))))
        out.append(Check("cauchy", f"drift equals classical at t^a/a, {model.to_string()}", eq,
                         _tol(1e-10, tol)))
    return out


def suite_mc(seed: int = 42, n: int = 100_000, n_path: int = 10_000, **_) -> List[Check]:
    spec = StableLamperti(alpha=0.5)
    cfg = SimConfig(seed=seed, n_samples=n)
    out = []
    targets = [
        ("mean zeta_1", lambda z: z, 1.0 / math.gamma(1.5)),
        ("mean exp(-zeta_1)", lambda z: np.exp(-z), float(special.erfcx(1.0))),
        ("second moment", lambda z: z * z, 2.0),
    ]
    for name, f, exact in targets:
        est = mc_expectation(f, spec, 0.5, 1.0, cfg)
        out.append(Check("mc", f"exact sampler {name} (|dev|/SE)", abs(est.mean - exact) / est.std_error, 4.0))
    pcfg = SimConfig(seed=seed, n_samples=n_path)
    ex = mc_expectation(lambda z: z, spec, 0.5, 1.0, pcfg)
    pa = mc_expectation(lambda z: z, spec, 0.5, 1.0, pcfg, sampler="path")
    se = math.hypot(ex.std_error, pa.std_error)
    out.append(Check("mc", "path vs exact mean (|dev|/SE)", abs(ex.mean - pa.mean) / se, 5.0))
    return out


SUITES: Dict[str, Callable[..., List[Check]]] = {
    "eigen": suite_eigen,
    "power": suite_power,
    "scaling": suite_scaling,
    "biorth": suite_biorth,
    "mc": suite_mc,
    "cauchy": suite_cauchy,
}


def run_suite(name: str, tol: Optional[float] = None, seed: int = 42) -> List[Check]:
    """Run one suite or ``"all"``."""
    names = list(SUITES) if name == "all" else [name]
    rows: List[Check] = []
    for n in names:
        rows.extend(SUITES[n](tol=tol, seed=seed))
    return rows


def format_table(rows: List[Check]) -> str:
    width = max([len(r.name) for r in rows] + [5])
    lines = [f"{'suite':8} {'check':{width}} {'residual':>12} {'tol':>10}  status"]
    for r in rows:
        lines.append(f"{r.suite:8} {r.name:{width}} {r.residual:12.3e} {r.tol:10.1e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
