"""Exact Gaussian wavepacket dynamics under a quantum stiffness schedule.

For a Gaussian state the Schroedinger equation closes on three numbers:
the variance s, the phase curvature alpha, and the global phase beta.
Everything follows from the width equation.  With sigma = sqrt(2 s),

    sigma'' + (kappa(t)/m) * sigma = 4 D^2 / sigma^3,

an Ermakov-type equation (D = hbar/(2m)).  Integrating it forward is the
first of the package's two independent verifiers: a schedule designed in
the overdamped picture must land the width on target with zero slope.

Also here: the instantaneous energy of the Gaussian state, its Wigner
phase-space density, the squeeze-tilt angle, and the osmotic drift that
reproduces the same statistics as an overdamped diffusion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError
from .model import PhysConsts, TimeProtocol

__all__ = [
    "TrajectoryRecord",
    "energy_of",
    "integrate_ermakov",
    "nelson_drift",
    "tilt_angle",
    "wigner_at",
]


@dataclass
class TrajectoryRecord:
    """Wavepacket history on a uniform time grid."""

    t: np.ndarray
    s: np.ndarray
    sdot: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    energy: np.ndarray

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])


def energy_of(s, sdot, kappa, c: PhysConsts):
    """Mean energy of the Gaussian state.

    E = (m/(4 s)) * (sdot^2/2 + 2 s^2 kappa/m + 2 D^2); at equilibrium
    (sdot = 0, kappa = m D^2/s^2) this is the ground-state value m D^2/s,
    i.e. hbar*omega/2.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("variance must be positive")
    sdot = np.asarray(sdot, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    out = (c.m / (4.0 * s)) * (0.5 * sdot**2 + 2.0 * s**2 * kappa / c.m + 2.0 * c.D**2)
    return float(out) if out.ndim == 0 else out


def integrate_ermakov(kappa_t: TimeProtocol, s_start: float, c: PhysConsts,
                      dt: float | None = None) -> TrajectoryRecord:
    """Integrate the width equation under a quantum schedule, from rest.

    Fixed-step RK4 on (sigma, sigmadot, beta) with kappa(t) linearly
    interpolated between protocol nodes; beta rides along as an extra
    quadrature (betadot = -hbar/(4 m s)).  Starts at variance s_start with
    zero width velocity.  Default step is one ten-thousandth of the span.

    Raises IntegrationError (with the failure time) if the width collapses.
    """
    c.require_quantum()
    if kappa_t.kind != "quantum":
        raise ValueError("integrate_ermakov expects a quantum schedule")
    if s_start <= 0.0:
        raise ValueError("starting variance must be positive")
    t0, t1 = kappa_t.span
    span = t1 - t0
    if dt is None:
        dt = span / 1.0e4
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(round(span / dt)))
    h = span / n_steps

    # kappa at the half-step grid; RK4 stages never need anything finer
    kap = np.interp(t0 + 0.5 * h * np.arange(2 * n_steps + 1),
                    kappa_t.t_nodes, kappa_t.values)

    inv_m = 1.0 / c.m
    four_d2 = 4.0 * c.D**2
    half_hbar_over_m = 0.5 * c.hbar / c.m

    sig = np.sqrt(2.0 * s_start)
    v = 0.0
    beta = 0.0
    sig_floor = 1e-8 * sig

    sigmas = np.empty(n_steps + 1)
    vels = np.empty(n_steps + 1)
    betas = np.empty(n_steps + 1)
    sigmas[0] = sig
    vels[0] = v
    betas[0] = beta

    def accel(sigma, kappa):
        return -kappa * inv_m * sigma + four_d2 / sigma**3

    for k in range(n_steps):
        ka, km, kb = kap[2 * k], kap[2 * k + 1], kap[2 * k + 2]
        # k1
        a1 = accel(sig, ka)
        b1 = -half_hbar_over_m / sig**2
        # k2
        s2 = sig + 0.5 * h * v
        v2 = v + 0.5 * h * a1
        if s2 <= sig_floor:
            raise IntegrationError("width collapsed", t=t0 + (k + 0.5) * h)
        a2 = accel(s2, km)
        b2 = -half_hbar_over_m / s2**2
        # k3
        s3 = sig + 0.5 * h * v2
        v3 = v + 0.5 * h * a2
        if s3 <= sig_floor:
            raise IntegrationError("width collapsed", t=t0 + (k + 0.5) * h)
        a3 = accel(s3, km)
        b3 = -half_hbar_over_m / s3**2
        # k4
        s4 = sig + h * v3
        v4 = v + h * a3
        if s4 <= sig_floor:
            raise IntegrationError("width collapsed", t=t0 + (k + 1.0) * h)
        a4 = accel(s4, kb)
        b4 = -half_hbar_over_m / s4**2

        sig = sig + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        beta = beta + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        if not np.isfinite(sig) or sig <= sig_floor:
            raise IntegrationError("width collapsed", t=t0 + (k + 1.0) * h)
        sigmas[k + 1] = sig
        vels[k + 1] = v
        betas[k + 1] = beta

    t = t0 + h * np.arange(n_steps + 1)
    s = 0.5 * sigmas**2
    sdot = sigmas * vels
    alpha = c.m * sdot / (4.0 * c.hbar * s)
    energy = energy_of(s, sdot, kap[::2], c)
    return TrajectoryRecord(t=t, s=s, sdot=sdot, alpha=alpha, beta=betas, energy=energy)


def wigner_at(x, p, s, alpha, c: PhysConsts):
    """Wigner density of the Gaussian state at phase-space point(s) (x, p).

    W = (1/(pi hbar)) exp(-x^2/(2 s) - (2 s/hbar^2) (p - 2 alpha hbar x)^2);
    normalized to one, Gaussian in both directions, sheared by the phase
    curvature.
    """
    c.require_quantum()
    if np.any(np.asarray(s) <= 0.0):
        raise ValueError("variance must be positive")
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    out = (np.exp(-x**2 / (2.0 * s)
                  - (2.0 * s / c.hbar**2) * (p - 2.0 * alpha * c.hbar * x) ** 2)
           / (np.pi * c.hbar))
    return float(out) if out.ndim == 0 else out


def tilt_angle(alpha, c: PhysConsts, omega_i: float) -> float:
    """Phase-space shear angle: tan(theta) = 2 alpha hbar / (m omega_i)."""
    if omega_i <= 0.0:
        raise ValueError("omega_i must be positive")
    return float(np.arctan2(2.0 * alpha * c.hbar, c.m * omega_i))


def nelson_drift(x, s, alpha, c: PhysConsts):
    """Osmotic-plus-current drift reproducing the wavepacket statistics.

    b(x) = (hbar/m) * (2 alpha - 1/(2 s)) * x; a diffusion dx = b dt +
    sqrt(2 D) dW with D = hbar/(2m) keeps a Gaussian ensemble in lockstep
    with the Gaussian state (s, alpha).
    """
    if np.any(np.asarray(s) <= 0.0):
        raise ValueError("variance must be positive")
    x = np.asarray(x, dtype=float)
    out = (c.hbar / c.m) * (2.0 * alpha - 1.0 / (2.0 * s)) * x
    return float(out) if out.ndim == 0 else out
