"""Quantum/classical stiffness correspondence and the variance flow.

A Gaussian ground state of width s in a quantum trap kappa(t) has the same
position statistics as an overdamped bead in a classical trap kbar(t) when
D = hbar/(2m).  The bridge works in both directions:

* forward: drive the bead with kbar(t), its variance obeys
  sdot = (2/gamma) * (D*gamma - kbar*s);
* back: given kbar and the variance history, the quantum stiffness is
  kappa = hbar^2/(2 m s^2) + (m/gamma) * d(kbar)/dt - (m/gamma^2) * kbar^2,
  or equivalently, with s as the independent variable,
  kappa = hbar^2/(2 m s^2) + (2m/gamma^2) (D gamma - s kbar) kbar' - (m/gamma^2) kbar^2.

Schedules parametrized by s are turned into time-domain protocols through
the duration integral dt = gamma ds / (2 (D gamma - s kbar)).  Protocols
pinned to equilibrium at both ends make that integrand blow up like
|s - s_end|^(-2/3); the quadrature here models those boundary cells with a
local power law instead of evaluating at the endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import InfeasibleProtocolError, IntegrationError
from .model import PhysConsts, SGridProtocol, TimeProtocol

__all__ = [
    "TimeDomainProtocols",
    "VarianceTrajectory",
    "duration",
    "evolve_variance",
    "flow_gap",
    "quantum_from_classical_s",
    "quantum_from_classical_t",
    "time_of_s",
    "to_time_domain",
    "variance_rate",
]


def variance_rate(s, kbar, c: PhysConsts):
    """Instantaneous variance velocity of the overdamped ensemble.

    sdot = (2/gamma) * (D*gamma - kbar*s).  Positive while the trap is
    softer than the equilibrium stiffness for the current width.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("variance must be positive")
    kbar = np.asarray(kbar, dtype=float)
    out = 2.0 * (c.D * c.gamma - kbar * s) / c.gamma
    return float(out) if out.ndim == 0 else out


def flow_gap(p: SGridProtocol, c: PhysConsts) -> np.ndarray:
    """D*gamma - s*kbar at every node; the signed distance to stalling."""
    return c.D * c.gamma - p.s_nodes * p.kbar


@dataclass
class VarianceTrajectory:
    """Variance history sampled at the driving protocol's own nodes."""

    t: np.ndarray
    s: np.ndarray
    sdot: np.ndarray


def evolve_variance(kbar_t: TimeProtocol, s_start: float, c: PhysConsts,
                    dt: float | None = None) -> VarianceTrajectory:
    """Integrate the variance flow under a time-domain classical schedule.

    Classic fixed-step RK4, with substeps chosen so no step straddles a
    protocol node (kbar is linear inside each cell, so fourth order is
    preserved).  Samples are returned at the protocol nodes.

    Parameters
    ----------
    kbar_t : TimeProtocol
        Classical stiffness schedule (kind "classical").
    s_start : float
        Variance at the first node.
    dt : float, optional
        Target substep; defaults to one ten-thousandth of the span.
    """
    if kbar_t.kind != "classical":
        raise ValueError("evolve_variance drives the classical trap; got a quantum schedule")
    if s_start <= 0.0:
        raise ValueError("starting variance must be positive")
    t_nodes = kbar_t.t_nodes
    span = t_nodes[-1] - t_nodes[0]
    if dt is None:
        dt = span / 1.0e4
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    two_over_gamma = 2.0 / c.gamma
    Dg = c.D * c.gamma

    s_out = np.empty_like(t_nodes)
    s_out[0] = s_start
    s = s_start
    for j in range(t_nodes.size - 1):
        t0, t1 = t_nodes[j], t_nodes[j + 1]
        k0, k1 = kbar_t.values[j], kbar_t.values[j + 1]
        cell = t1 - t0
        m_sub = max(1, int(np.ceil(cell / dt)))
        h = cell / m_sub
        slope = (k1 - k0) / cell
        for i in range(m_sub):
            ta = t0 + i * h
            ka = k0 + slope * (ta - t0)
            km = k0 + slope * (ta + 0.5 * h - t0)
            kb = k0 + slope * (ta + h - t0)
            f1 = two_over_gamma * (Dg - ka * s)
            f2 = two_over_gamma * (Dg - km * (s + 0.5 * h * f1))
            f3 = two_over_gamma * (Dg - km * (s + 0.5 * h * f2))
            f4 = two_over_gamma * (Dg - kb * (s + h * f3))
            s = s + (h / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
            if not np.isfinite(s) or s <= 0.0:
                raise IntegrationError(
                    f"variance left (0, inf) during integration at t={ta + h:.6g}",
                    t=ta + h)
        s_out[j + 1] = s

    sdot = variance_rate(s_out, kbar_t.values, c)
    return VarianceTrajectory(t=t_nodes.copy(), s=s_out, sdot=sdot)


def quantum_from_classical_t(kbar_t: TimeProtocol, s_t: np.ndarray,
                             c: PhysConsts) -> TimeProtocol:
    """Map a time-domain classical schedule plus its variance history to kappa(t).

    kappa = hbar^2/(2 m s^2) + (m/gamma) d(kbar)/dt - (m/gamma^2) kbar^2,
    with the time derivative taken by centered differences on the protocol
    grid (second-order one-sided at the ends).  s_t must be the variance
    produced by this same schedule (e.g. from evolve_variance), sampled on
    the same grid.
    """
    c.require_quantum()
    if kbar_t.kind != "classical":
        raise ValueError("expected a classical schedule")
    s_t = np.asarray(s_t, dtype=float)
    if s_t.shape != kbar_t.t_nodes.shape:
        raise ValueError("s_t must be sampled on the protocol's time grid")
    if np.any(s_t <= 0.0):
        raise ValueError("variance samples must be positive")
    kbar = kbar_t.values
    kbar_dot = np.gradient(kbar, kbar_t.t_nodes, edge_order=2)
    kappa = (c.hbar**2 / (2.0 * c.m * s_t**2)
             + (c.m / c.gamma) * kbar_dot
             - (c.m / c.gamma**2) * kbar**2)
    return TimeProtocol(kbar_t.t_nodes.copy(), kappa, "quantum")


def quantum_from_classical_s(p: SGridProtocol, c: PhysConsts) -> np.ndarray:
    """Quantum stiffness on the protocol's s-grid.

    kappa(s) = hbar^2/(2 m s^2) + (2m/gamma^2)(D gamma - s kbar) kbar'
               - (m/gamma^2) kbar^2,
    with kbar' = dkbar/ds by centered differences (second-order one-sided
    at the ends).  On the equilibrium branch kbar = D gamma / s the
    derivative term carries a zero prefactor, so the result collapses to
    m D^2 / s^2 at machine precision regardless of discretization.
    """
    c.require_quantum()
    kbar_prime = np.gradient(p.kbar, p.s_nodes, edge_order=2)
    g = flow_gap(p, c)
    s = p.s_nodes
    return (c.hbar**2 / (2.0 * c.m * s**2)
            + (2.0 * c.m / c.gamma**2) * g * kbar_prime
            - (c.m / c.gamma**2) * p.kbar**2)


# ---------------------------------------------------------------------------
# duration quadrature
# ---------------------------------------------------------------------------

# cells treated with the local power-law model at a singular endpoint
_N_LAYER = 8
# endpoint counts as pinned to equilibrium below this fraction of the gap scale
_SINGULAR_REL = 1e-7


def _power_cell(mag_a, tau_a, mag_b, tau_b):
    """Integral of |v| over [tau_a, tau_b] under the two-point power model.

    Fits |v| = B * tau^(-q) through the cell's endpoint samples; exact for
    any pure power, second-order for smooth integrands.
    """
    q = np.log(mag_a / mag_b) / np.log(tau_b / tau_a)
    if abs(1.0 - q) < 1e-8:
        return mag_a * tau_a * np.log(tau_b / tau_a)
    return (mag_b * tau_b - mag_a * tau_a) / (1.0 - q)


def _singular_cells(x, v, singular_left, singular_right):
    """Per-cell integrals of sampled v(x), tolerating endpoint power-law blow-up.

    Interior cells use the trapezoid rule.  Near an endpoint flagged as
    singular, cells switch to a two-point power-law model in the distance
    tau from that endpoint; the boundary cell itself uses the exponent
    fitted from the two nearest interior samples and integrates the model
    across [0, tau_1], which is finite only for exponents below one.
    """
    n = x.size
    dx = np.diff(x)
    with np.errstate(invalid="ignore", over="ignore"):
        cells = 0.5 * (v[:-1] + v[1:]) * dx

    layer = min(_N_LAYER, (n - 1) // 2)
    dir_sign = 1.0 if dx[0] > 0.0 else -1.0

    if singular_left:
        tau = np.abs(x - x[0])
        sv = 1.0 if v[1] > 0.0 else -1.0
        mags = np.abs(v)
        q0 = np.log(mags[1] / mags[2]) / np.log(tau[2] / tau[1])
        if q0 >= 0.99:
            raise InfeasibleProtocolError(
                "duration integral diverges at the start node "
                f"(local exponent {q0:.3f} >= 1)", node=0, s=float(x[0]))
        q0 = max(q0, 0.0)
        cells[0] = sv * dir_sign * mags[1] * tau[1] / (1.0 - q0)
        for j in range(1, layer):
            cells[j] = sv * dir_sign * _power_cell(mags[j], tau[j], mags[j + 1], tau[j + 1])

    if singular_right:
        tau = np.abs(x[-1] - x)
        sv = 1.0 if v[-2] > 0.0 else -1.0
        mags = np.abs(v)
        qn = np.log(mags[-2] / mags[-3]) / np.log(tau[-3] / tau[-2])
        if qn >= 0.99:
            raise InfeasibleProtocolError(
                "duration integral diverges at the end node "
                f"(local exponent {qn:.3f} >= 1)", node=n - 1, s=float(x[-1]))
        qn = max(qn, 0.0)
        cells[-1] = sv * dir_sign * mags[-2] * tau[-2] / (1.0 - qn)
        for j in range(1, layer):
            a = n - 2 - j   # cell between nodes a and a+1
            cells[a] = sv * dir_sign * _power_cell(
                mags[a + 1], tau[a + 1], mags[a], tau[a])

    return cells


def _duration_cells(p: SGridProtocol, c: PhysConsts) -> np.ndarray:
    g = flow_gap(p, c)
    sgn = p.direction
    bad = np.nonzero(g[1:-1] * sgn <= 0.0)[0]
    if bad.size:
        j = int(bad[0]) + 1
        raise InfeasibleProtocolError(
            "protocol stalls or reverses the variance flow at interior node "
            f"{j} (s={p.s_nodes[j]:.6g}); sign(D*gamma - s*kbar) must match "
            "sign(s_f - s_i) strictly between the endpoints",
            node=j, s=float(p.s_nodes[j]))
    scale = np.max(np.abs(g))
    with np.errstate(divide="ignore"):
        v = c.gamma / g
    return _singular_cells(
        p.s_nodes, v,
        singular_left=abs(g[0]) <= _SINGULAR_REL * scale,
        singular_right=abs(g[-1]) <= _SINGULAR_REL * scale)


def duration(p: SGridProtocol, c: PhysConsts) -> float:
    """Total transfer time of an s-parametrized schedule.

    Delta_t = (1/2) * integral of gamma / (D gamma - s kbar) ds from s_i
    to s_f.  Equilibrium-pinned endpoints give an integrable
    |s - s_end|^(-2/3) divergence, handled by local power-law cells; an
    interior stall (or an endpoint approached with exponent >= 1) raises
    InfeasibleProtocolError.
    """
    return float(0.5 * np.sum(_duration_cells(p, c)))


def time_of_s(p: SGridProtocol, c: PhysConsts) -> np.ndarray:
    """Cumulative transfer time at each node, t(s_i) = 0, t(s_f) = duration."""
    cells = _duration_cells(p, c)
    t = np.empty(p.s_nodes.size)
    t[0] = 0.0
    np.cumsum(0.5 * cells, out=t[1:])
    return t


# ---------------------------------------------------------------------------
# time-domain emission
# ---------------------------------------------------------------------------

def _d_dt_nonuniform(t, f):
    """Three-point finite difference on a nonuniform grid (one-sided ends)."""
    n = t.size
    df = np.empty(n)
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    df[1:-1] = (-h2 / (h1 * (h1 + h2)) * f[:-2]
                + (h2 - h1) / (h1 * h2) * f[1:-1]
                + h1 / (h2 * (h1 + h2)) * f[2:])
    a, b = t[1] - t[0], t[2] - t[1]
    df[0] = (-(2 * a + b) / (a * (a + b)) * f[0]
             + (a + b) / (a * b) * f[1]
             - a / (b * (a + b)) * f[2])
    a, b = t[-2] - t[-3], t[-1] - t[-2]
    df[-1] = (b / (a * (a + b)) * f[-3]
              - (a + b) / (a * b) * f[-2]
              + (2 * b + a) / (b * (a + b)) * f[-1])
    return df


@dataclass
class TimeDomainProtocols:
    """Time-domain emission of an s-parametrized schedule.

    classical and quantum share a uniform time grid; s is the variance on
    that grid.  t_nodes and kappa_nodes give the transfer time and quantum
    stiffness back on the original s-grid (the node-level table).
    """

    classical: TimeProtocol
    quantum: TimeProtocol
    s: np.ndarray
    t_nodes: np.ndarray
    kappa_nodes: np.ndarray

    @property
    def duration(self) -> float:
        return float(self.classical.t_nodes[-1])


def to_time_domain(p: SGridProtocol, c: PhysConsts, n_t: int = 2001) -> TimeDomainProtocols:
    """Emit uniform-grid time-domain protocols from an s-grid schedule.

    The node times come from the duration quadrature.  Resampling uses
    cubic Hermite interpolation with *exact* node derivatives: sdot is
    known in closed form from the flow, and d(kbar)/dt comes from
    finite differences in t, where the schedule is smooth even at
    equilibrium-pinned endpoints (in s it has infinite slope there, which
    is why differencing in s near the ends is avoided).  The quantum
    schedule is then produced by the time-domain map on the uniform grid.
    """
    c.require_quantum()
    if n_t < 9:
        raise ValueError("n_t too small")
    t_nodes = time_of_s(p, c)
    g = flow_gap(p, c)
    sdot_nodes = 2.0 * g / c.gamma
    kbar_dot_nodes = _d_dt_nonuniform(t_nodes, p.kbar)
    # at an equilibrium-pinned end kbar approaches its boundary value
    # quadratically in time, so the true endpoint rate is zero; the
    # one-sided estimate extrapolates across the layer-stretched first
    # interval and lands far off, which would bend the whole first spline
    # segment the wrong way
    scale = float(np.max(np.abs(g)))
    if abs(g[0]) <= _SINGULAR_REL * scale:
        kbar_dot_nodes[0] = 0.0
    if abs(g[-1]) <= _SINGULAR_REL * scale:
        kbar_dot_nodes[-1] = 0.0

    kappa_nodes = (c.hbar**2 / (2.0 * c.m * p.s_nodes**2)
                   + (c.m / c.gamma) * kbar_dot_nodes
                   - (c.m / c.gamma**2) * p.kbar**2)

    s_spline = CubicHermiteSpline(t_nodes, p.s_nodes, sdot_nodes)
    kbar_spline = CubicHermiteSpline(t_nodes, p.kbar, kbar_dot_nodes)

    t_u = np.linspace(0.0, t_nodes[-1], n_t)
    s_u = s_spline(t_u)
    # interpolation can only undershoot positivity near pathological data
    if np.any(s_u <= 0.0):
        raise InfeasibleProtocolError("resampled variance left the positive axis")
    kbar_u = kbar_spline(t_u)
    classical = TimeProtocol(t_u, kbar_u, "classical")
    quantum = quantum_from_classical_t(classical, s_u, c)
    return TimeDomainProtocols(classical=classical, quantum=quantum, s=s_u,
                               t_nodes=t_nodes, kappa_nodes=kappa_nodes)
