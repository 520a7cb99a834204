"""Monte Carlo for the inverse of a self-similar increasing process.

The increasing self-similar Markov process attached to ``(phi, alpha)`` is
obtained from a subordinator ``T`` with Laplace exponent ``phi`` through
the Lamperti time change.  Its first-passage time above ``t`` is the
random clock ``zeta_t`` whose Laplace transform is ``E(-q t**alpha)``.

Two samplers are provided.

``sample_inverse_exact``
    Closed-form laws: ``zeta_t = (t / S)**alpha`` with ``S`` positive
    ``alpha``-stable (Kanter's representation) for the matched stable
    family, and the deterministic ``t**alpha / (b alpha)`` for a drift.

``sample_inverse_path``
    Generic path construction.  Jumps of ``T`` above ``delta`` form a
    compound Poisson process and those below are replaced by their mean.
    Starting the process at ``eps``, ``zeta_t = eps**alpha int_0^tau
    exp(alpha T_r) dr`` where ``tau`` is the passage time of ``T`` above
    ``log(t / eps)``.  The integral is exact between grid points.  The
    bias is of order ``eps**alpha``; estimators remove its leading term by
    Richardson extrapolation of ``E f(zeta)`` from runs at ``eps`` and
    ``eps / 2`` on the same paths.  (Extrapolating the samples themselves
    would keep the mean but distort the law.)

Random numbers come from Philox streams keyed by ``(seed, block index)``,
so results do not depend on how blocks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .bernstein import BernsteinSpec, Drift, PoissonQ, StableLamperti
from .errors import ConfigError, DomainError, HorizonError, Unsupported
from .quadrature import tanh_sinh

__all__ = [
    "SimConfig",
    "McEstimate",
    "block_rng",
    "sample_inverse_exact",
    "sample_inverse_path",
    "sample_inverse_path_pair",
    "mc_expectation",
    "mc_laplace",
    "mc_moment",
    "summarize",
    "LevyTail",
]


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo settings.

    Parameters
    ----------
    seed : int
        Root seed of the counter-based streams.
    n_samples : int
        Number of samples.
    dt : float
        Grid step of the subordinator clock (path sampler).
    delta : float or None
        Small-jump cutoff; chosen automatically when ``None`` so that the
        neglected jump variance per unit time stays below ``1e-6``.
    eps : float
        Starting level of the Lamperti process (path sampler).
    horizon : float
        Largest subordinator clock time simulated before giving up.
    block : int
        Samples per random stream.
    workers : int
        Thread count; results are identical for any value.
    richardson : bool
        Estimators built on the path sampler extrapolate ``eps -> 0`` from
        runs at ``eps`` and ``eps / 2`` on shared paths.
    jitter : float or None
        Width of a uniform random shift of ``log(eps)``.  Needed when the
        jumps live on a lattice, where the passage overshoot otherwise
        remembers the starting phase.  ``None`` picks the lattice span for
        the Poisson family and 0 otherwise.
    """

    seed: int = 0
    n_samples: int = 10_000
    dt: float = 1e-3
    delta: Optional[float] = None
    eps: float = 1e-4
    horizon: float = 1e4
    block: int = 4096
    workers: int = 1
    richardson: bool = True
    jitter: Optional[float] = None

    def __post_init__(self):
        if int(self.n_samples) <= 0:
            raise ConfigError("n_samples must be positive")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not 0 < self.eps:
            raise ConfigError("eps must be positive")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError("delta must be positive")
        if int(self.block) <= 0 or int(self.workers) <= 0:
            raise ConfigError("block and workers must be positive")
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error."""

    mean: float
    std_error: float
    n: int
    seed: int

    def to_dict(self):
        return {"mean": self.mean, "std_error": self.std_error, "n": self.n, "seed": self.seed}


def block_rng(seed: int, index: int) -> np.random.Generator:
    """Philox generator for block ``index`` of the stream rooted at ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def _run_blocks(fn: Callable[[np.random.Generator, int], np.ndarray], cfg: SimConfig) -> np.ndarray:
    n = int(cfg.n_samples)
    sizes = [min(cfg.block, n - s) for s in range(0, n, cfg.block)]

    def job(i):
        return fn(block_rng(cfg.seed, i), sizes[i])

    if cfg.workers == 1:
        parts = [job(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    return np.concatenate(parts)


# ----------------------------------------------------------------------
# exact laws
# ----------------------------------------------------------------------
def positive_stable(rng: np.random.Generator, alpha: float, size: int) -> np.ndarray:
    """Positive stable variables with ``E exp(-l S) = exp(-l**alpha)``.

    Kanter's representation of the Chambers-Mallows-Stuck method.
    """
    u = rng.uniform(0.0, np.pi, size)
    e = rng.exponential(1.0, size)
    a = alpha
    part1 = np.sin(a * u) / np.sin(u) ** (1.0 / a)
    part2 = (np.sin((1.0 - a) * u) / e) ** ((1.0 - a) / a)
    return part1 * part2


def sample_inverse_exact(spec: BernsteinSpec, alpha: float, t: float, cfg: SimConfig) -> np.ndarray:
    """Samples of ``zeta_t`` from a closed-form law.

    Raises
    ------
    Unsupported
        No closed-form law is known for this pair.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if isinstance(spec, Drift) and spec.scale == 1.0:
        value = t**alpha / (spec.b * alpha)
        return np.full(int(cfg.n_samples), value)
    if isinstance(spec, StableLamperti) and spec.scale == 1.0 and abs(spec.alpha - alpha) < 1e-14:
        def draw(rng, size):
            s = positive_stable(rng, alpha, size)
            return (t / s) ** alpha

        return _run_blocks(draw, cfg)
    raise Unsupported(f"no exact sampler for {spec.to_string()} with alpha={alpha}")


# ----------------------------------------------------------------------
# path construction
# ----------------------------------------------------------------------
class LevyTail:
    """Tail ``nu_bar(y) = m(exp(-y))`` of the Levy measure of ``T``."""

    def __init__(self, spec: BernsteinSpec):
        if spec.scale != 1.0:
            raise DomainError("pass the undilated Bernstein function")
        self.spec = spec
        if spec.name != "drift" and float(spec.tail(np.array([1e-200]))[0]) > 1e-10:
            raise ConfigError("kernel with m(0+) > 0 describes a killed subordinator")

    def __call__(self, y):
        return self.spec.levy_tail(y)

    @property
    def has_jumps(self) -> bool:
        return self.spec.name != "drift"

    def support_top(self) -> float:
        """Largest jump size (``inf`` if unbounded)."""
        if isinstance(self.spec, PoissonQ):
            return -math.log(self.spec.q)
        return math.inf

    def small_jump_mean(self, delta: float) -> float:
        """``int_0^delta y nu(dy) = int_0^delta nu_bar - delta nu_bar(delta)``."""
        integral, _ = tanh_sinh(self, 0.0, delta)
        return float(integral - delta * self(delta))

    def small_jump_variance(self, delta: float) -> float:
        """``int_0^delta y**2 nu(dy)``."""
        integral, _ = tanh_sinh(lambda y: 2.0 * y * self(y), 0.0, delta)
        return float(integral - delta**2 * self(delta))

    def choose_delta(self, target: float = 1e-6, cap: float = 0.1) -> float:
        top = self.support_top()
        hi = min(cap, 0.5 * top)
        if self.small_jump_variance(hi) <= target:
            return hi
        lo = hi
        while self.small_jump_variance(lo) > target:
            lo *= 0.1
        for _ in range(60):
            mid = math.sqrt(lo * hi)
            if self.small_jump_variance(mid) <= target:
                lo = mid
            else:
                hi = mid
        return lo

    def sample_jumps(self, rng: np.random.Generator, delta: float, size: int) -> np.ndarray:
        """Jump sizes with ``P(J > y) = nu_bar(y) / nu_bar(delta)``, ``y >= delta``."""
        u = rng.uniform(0.0, 1.0, size)
        s = self.spec
        if isinstance(s, StableLamperti):
            return np.log1p(np.expm1(delta) * u ** (-1.0 / s.alpha))
        if isinstance(s, PoissonQ):
            return np.full(size, -math.log(s.q))
        target = u * self(delta)
        lo = np.full(size, delta)
        hi = np.full(size, delta + 1.0)
        while np.any(self(hi) > target):
            grow = self(hi) > target
            hi[grow] = delta + 2.0 * (hi[grow] - delta)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            above = self(mid) > target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return 0.5 * (lo + hi)


def _exp_integral(ad: float, x):
    """``int_0^x exp(ad u) du``."""
    if ad == 0.0:
        return np.asarray(x, dtype=float)
    return np.expm1(ad * np.asarray(x)) / ad


def _path_block(rng, size, *, alpha, t, levels, drift, rate, tail, delta, cfg, jitter):
    """Passage integrals ``int_0^tau_L exp(alpha T_r) dr`` for each level.

    ``T`` starts at ``-V`` with ``V`` uniform on ``[0, jitter]``.
    """
    dt = cfg.dt
    ad = alpha * drift
    n_levels = len(levels)
    out = np.full((n_levels, size), np.nan)
    T = -rng.uniform(0.0, jitter, size) if jitter > 0 else np.zeros(size)
    S = np.zeros(size)
    alive = np.arange(size)
    level_idx = np.zeros(size, dtype=int)  # next level to record per path
    clock = 0.0
    speed = drift + rate * 1.0
    chunk = 256 if speed == 0 else int(min(4096, max(64, levels[-1] / (max(speed, 1e-3) * dt) / 4)))
    i_full = _exp_integral(ad, dt)
    while alive.size:
        if clock > cfg.horizon:
            raise HorizonError(f"{alive.size} paths did not pass level {levels[-1]:.3f} "
                               f"before clock time {cfg.horizon}")
        p = alive.size
        k = chunk
        if rate > 0:
            counts = rng.poisson(rate * dt, size=(p, k))
            jumps = np.zeros((p, k))
            total = int(counts.sum())
            if total:
                sizes = tail.sample_jumps(rng, delta, total)
                cells = np.repeat(np.arange(p * k), counts.ravel())
                np.add.at(jumps.ravel(), cells, sizes)
            pos = rng.uniform(0.0, 1.0, size=(p, k)) * dt
        else:
            jumps = np.zeros((p, k))
            pos = np.zeros((p, k))
        incr = drift * dt + jumps
        t_end = T[:, None] + np.cumsum(incr, axis=1)
        t_start = t_end - incr
        i_pos = _exp_integral(ad, pos)
        cell = np.exp(alpha * t_start) * (i_pos + np.exp(alpha * jumps) * (i_full - i_pos))
        s_end = S[:, None] + np.cumsum(cell, axis=1)
        s_start = s_end - cell
        rows = np.arange(p)
        # record every level crossed inside this chunk
        while True:
            lvl_pos = level_idx[alive]
            pending = lvl_pos < n_levels
            if not np.any(pending):
                break
            L = np.array(levels)[np.minimum(lvl_pos, n_levels - 1)]
            crossed = t_end > L[:, None]
            hit = crossed.any(axis=1) & pending
            if not np.any(hit):
                break
            j = crossed.argmax(axis=1)
            r = rows[hit]
            jj = j[hit]
            L_h = L[hit]
            t0 = t_start[r, jj]
            u0 = pos[r, jj]
            jmp = jumps[r, jj]
            pre = t0 + drift * u0
            with np.errstate(divide="ignore", invalid="ignore"):
                u_drift = np.where(drift > 0, (L_h - t0) / drift, np.inf)
                u_after = np.where(drift > 0, (L_h - t0 - jmp) / drift, np.inf)
            by_drift = pre >= L_h
            by_jump = (~by_drift) & (pre + jmp > L_h)
            e0 = np.exp(alpha * t0)
            part = np.where(
                by_drift,
                e0 * _exp_integral(ad, np.where(by_drift, u_drift, 0.0)),
                np.where(
                    by_jump,
                    e0 * _exp_integral(ad, u0),
                    e0 * (_exp_integral(ad, u0) + np.exp(alpha * jmp)
                          * (_exp_integral(ad, np.where(by_drift | by_jump, u0, u_after))
                             - _exp_integral(ad, u0))),
                ),
            )
            ids = alive[r]
            out[lvl_pos[hit], ids] = s_start[r, jj] + part
            level_idx[ids] += 1
        T = t_end[:, -1]
        S = s_end[:, -1]
        keep = level_idx[alive] < n_levels
        alive = alive[keep]
        T = T[keep]
        S = S[keep]
        clock += k * dt
    return out


def sample_inverse_path_pair(spec: BernsteinSpec, alpha: float, t: float, cfg: SimConfig):
    """Samples of ``zeta_t`` started at ``eps`` and ``eps / 2`` on shared paths.

    Returns
    -------
    z_eps, z_half : ndarray

    Raises
    ------
    ConfigError
        Bad ``eps`` / ``delta`` (``delta`` must lie below the largest jump).
    HorizonError
        Some path did not reach the passage level within ``cfg.horizon``.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not t > 0:
        raise DomainError("t must be positive")
    if not cfg.eps < t:
        raise ConfigError("eps must be smaller than t")
    tail = LevyTail(spec)
    drift = spec.drift
    if tail.has_jumps:
        delta = cfg.delta if cfg.delta is not None else tail.choose_delta()
        if delta >= tail.support_top():
            raise ConfigError("delta lies outside the support of the jump measure")
        rate = float(tail(delta))
        drift = drift + tail.small_jump_mean(delta)
    else:
        delta, rate = math.inf, 0.0
    if drift <= 0 and rate <= 0:
        raise ConfigError("degenerate subordinator")
    jitter = cfg.jitter
    if jitter is None:
        jitter = tail.support_top() if isinstance(spec, PoissonQ) else 0.0
    levels = [math.log(t / cfg.eps), math.log(2.0 * t / cfg.eps)]

    def draw(rng, size):
        ints = _path_block(rng, size, alpha=alpha, t=t, levels=levels, drift=drift,
                           rate=rate, tail=tail, delta=delta, cfg=cfg, jitter=jitter)
        return np.stack([cfg.eps**alpha * ints[0], (0.5 * cfg.eps) ** alpha * ints[1]])

    both = _run_blocks(lambda rng, size: draw(rng, size).T, cfg)
    return both[:, 0], both[:, 1]


def sample_inverse_path(spec: BernsteinSpec, alpha: float, t: float, cfg: SimConfig) -> np.ndarray:
    """Samples of ``zeta_t`` from simulated paths started at ``cfg.eps``.

    The law carries a bias of order ``eps**alpha``; use the estimators
    (:func:`mc_laplace`, :func:`mc_moment`) for extrapolated expectations.
    """
    return sample_inverse_path_pair(spec, alpha, t, cfg)[0]


# ----------------------------------------------------------------------
# estimators
# ----------------------------------------------------------------------
def summarize(values: np.ndarray, seed: int) -> McEstimate:
    values = np.asarray(values, dtype=float)
    n = values.size
    return McEstimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(n)), n, int(seed))


def mc_expectation(f, spec, alpha, t, cfg: SimConfig, sampler: str = "exact") -> McEstimate:
    """Estimate ``E f(zeta_t)``.

    With ``sampler="path"`` and ``cfg.richardson`` the per-path values
    ``(f(z_half) - 2**-alpha f(z_eps)) / (1 - 2**-alpha)`` are averaged,
    which cancels the leading ``eps**alpha`` bias.
    """
    if sampler == "exact":
        return summarize(f(sample_inverse_exact(spec, alpha, t, cfg)), cfg.seed)
    if sampler != "path":
        raise ConfigError(f"unknown sampler {sampler!r}")
    z1, z2 = sample_inverse_path_pair(spec, alpha, t, cfg)
    if not cfg.richardson:
        return summarize(f(z1), cfg.seed)
    ratio = 2.0 ** (-alpha)
    return summarize((f(z2) - ratio * f(z1)) / (1.0 - ratio), cfg.seed)


def mc_laplace(spec, alpha, q, t, cfg: SimConfig, sampler: str = "exact") -> McEstimate:
    """Estimate ``E exp(-q zeta_t)``."""
    return mc_expectation(lambda z: np.exp(-q * z), spec, alpha, t, cfg, sampler)


def mc_moment(spec, alpha, z, t, cfg: SimConfig, sampler: str = "exact") -> McEstimate:
    """Estimate ``E zeta_t**z``."""
    return mc_expectation(lambda v: v**z, spec, alpha, t, cfg, sampler)
