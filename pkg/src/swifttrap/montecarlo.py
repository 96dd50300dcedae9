"""Stochastic ensemble verification of stiffness schedules.

Two Euler-Maruyama simulations share one diffusion constant D:

* classical: an overdamped bead in the driven trap,
  dx = -(kbar(t)/gamma) x dt + sqrt(2 D) dW;
* wavepacket-matched diffusion: particles ride the drift
  b(x, t) = (hbar/m)(2 alpha(t) - 1/(2 s(t))) x built from an integrated
  wavepacket record, and their ensemble density should track the Born
  density N(0, s(t)) at all times.

Checkpoint statistics come back as EnsembleStats; verify_born turns them
into z-scores against a reference variance curve (variance against the
Gaussian standard error s*sqrt(2/(N-1)), excess kurtosis against
sqrt(24/N)).

Randomness is a counter-based Philox stream keyed by the seed.  The draw
order is fixed (initial positions, then one row of increments per step),
so results are a pure function of (inputs, seed, particle count); no
execution schedule can reorder them.  The simulate functions accept a
pre-drawn increment array so refinement studies can reuse one Brownian
path across step sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import TrajectoryRecord
from .model import EnsembleStats, PhysConsts, TimeProtocol

__all__ = [
    "BornReport",
    "McConfig",
    "simulate_classical",
    "simulate_nelson",
    "verify_born",
]


@dataclass
class McConfig:
    """Ensemble size, step, seed and observation times."""

    n_particles: int
    seed: int
    checkpoints: np.ndarray
    dt: float | None = None

    def __post_init__(self):
        if self.n_particles < 100:
            raise ValueError("need at least 100 particles for moment estimates")
        self.checkpoints = np.asarray(self.checkpoints, dtype=float)
        if self.checkpoints.ndim != 1 or self.checkpoints.size == 0:
            raise ValueError("checkpoints must be a non-empty 1-d array")
        if np.any(np.diff(self.checkpoints) <= 0.0):
            raise ValueError("checkpoints must be strictly increasing")
        if self.dt is not None and self.dt <= 0.0:
            raise ValueError("dt must be positive")


def _resolve_dt(cfg: McConfig, rate_bound: float, span: float) -> float:
    """Default step: a tenth of min(stability bound, span/10^4)."""
    if cfg.dt is not None:
        return float(cfg.dt)
    return min(rate_bound, span / 1.0e4) / 10.0


def _checkpoint_steps(cfg: McConfig, t0: float, h: float, n_steps: int) -> np.ndarray:
    idx = np.rint((cfg.checkpoints - t0) / h).astype(int)
    if np.any(idx < 0) or np.any(idx > n_steps):
        raise ValueError("checkpoints must lie within the protocol support")
    return idx


def _moments(x: np.ndarray) -> tuple[float, float, float]:
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d * d))
    m4 = float(np.mean(d**4))
    n = x.size
    var = m2 * n / (n - 1)
    kurt = m4 / (m2 * m2) - 3.0
    return mean, var, kurt


def _run_em(rates: np.ndarray, h: float, t0: float, s_start: float,
            cfg: McConfig, c: PhysConsts, n_steps: int,
            increments: np.ndarray | None) -> EnsembleStats:
    """Shared Euler-Maruyama driver: x <- (1 + rate_k h) x + sqrt(2 D h) xi."""
    if increments is not None:
        increments = np.asarray(increments)
        if increments.shape != (n_steps, cfg.n_particles):
            raise ValueError("increments must have shape (n_steps, n_particles)")
    idx = _checkpoint_steps(cfg, t0, h, n_steps)
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    x = np.sqrt(s_start) * rng.standard_normal(cfg.n_particles)

    growth = 1.0 + rates * h
    noise_scale = np.sqrt(2.0 * c.D * h)

    n_cp = idx.size
    mean = np.empty(n_cp)
    var = np.empty(n_cp)
    kurt = np.empty(n_cp)
    # checkpoints are sorted, so walk them with a cursor
    cursor = 0
    while cursor < n_cp and idx[cursor] == 0:
        mean[cursor], var[cursor], kurt[cursor] = _moments(x)
        cursor += 1
    for k in range(n_steps):
        xi = increments[k] if increments is not None else rng.standard_normal(cfg.n_particles)
        x = growth[k] * x + noise_scale * xi
        while cursor < n_cp and idx[cursor] == k + 1:
            mean[cursor], var[cursor], kurt[cursor] = _moments(x)
            cursor += 1

    stderr = var * np.sqrt(2.0 / (cfg.n_particles - 1))
    return EnsembleStats(times=t0 + idx * h, mean=mean, variance=var,
                         excess_kurtosis=kurt, stderr_variance=stderr,
                         n_particles=cfg.n_particles)


def simulate_classical(kbar_t: TimeProtocol, s_start: float, cfg: McConfig,
                       c: PhysConsts,
                       increments: np.ndarray | None = None) -> EnsembleStats:
    """Euler-Maruyama ensemble under the classical trap schedule."""
    if kbar_t.kind != "classical":
        raise ValueError("expected a classical schedule")
    if s_start <= 0.0:
        raise ValueError("starting variance must be positive")
    t0, t1 = kbar_t.span
    span = t1 - t0
    kmax = float(np.max(np.abs(kbar_t.values)))
    bound = c.gamma / kmax if kmax > 0.0 else np.inf
    dt = _resolve_dt(cfg, bound, span)
    if dt >= bound:
        raise ValueError(f"dt={dt:.3g} violates the stability bound gamma/|kbar|max={bound:.3g}")
    n_steps = max(1, int(round(span / dt)))
    h = span / n_steps
    kb = np.interp(t0 + h * np.arange(n_steps), kbar_t.t_nodes, kbar_t.values)
    rates = -kb / c.gamma
    return _run_em(rates, h, t0, s_start, cfg, c, n_steps, increments)


def simulate_nelson(run: TrajectoryRecord, cfg: McConfig, c: PhysConsts,
                    increments: np.ndarray | None = None) -> EnsembleStats:
    """Euler-Maruyama ensemble riding the wavepacket drift of a record."""
    t0 = float(run.t[0])
    span = float(run.t[-1] - run.t[0])
    rate_nodes = (c.hbar / c.m) * (2.0 * run.alpha - 0.5 / run.s)
    rmax = float(np.max(np.abs(rate_nodes)))
    bound = 1.0 / rmax if rmax > 0.0 else np.inf
    dt = _resolve_dt(cfg, bound, span)
    if dt >= bound:
        raise ValueError(f"dt={dt:.3g} violates the stability bound 1/|drift rate|max={bound:.3g}")
    n_steps = max(1, int(round(span / dt)))
    h = span / n_steps
    rates = np.interp(t0 + h * np.arange(n_steps), run.t, rate_nodes)
    return _run_em(rates, h, t0, float(run.s[0]), cfg, c, n_steps, increments)


@dataclass
class BornReport:
    """z-score verdict of an ensemble against a reference variance curve."""

    passed: bool
    z_variance: np.ndarray
    z_kurtosis: np.ndarray
    worst_abs_z: float
    threshold: float = 3.0
    notes: str = field(default="")


def verify_born(stats: EnsembleStats, reference_s: np.ndarray,
                threshold: float = 3.0) -> BornReport:
    """Check checkpoint moments against the Born prediction N(0, s(t)).

    z_variance compares the empirical variance to reference_s in units of
    the Gaussian standard error; z_kurtosis compares the excess kurtosis
    to zero in units of sqrt(24/N).  Passing means every |z| is within
    the threshold.
    """
    reference_s = np.asarray(reference_s, dtype=float)
    if reference_s.shape != stats.times.shape:
        raise ValueError("reference_s must match the checkpoint grid")
    if stats.n_particles < 2:
        raise ValueError("stats must carry the ensemble size")
    z_var = (stats.variance - reference_s) / stats.stderr_variance
    z_kurt = stats.excess_kurtosis / np.sqrt(24.0 / stats.n_particles)
    worst = float(max(np.max(np.abs(z_var)), np.max(np.abs(z_kurt))))
    return BornReport(passed=bool(worst <= threshold),
                      z_variance=z_var, z_kurtosis=z_kurt,
                      worst_abs_z=worst, threshold=threshold)
