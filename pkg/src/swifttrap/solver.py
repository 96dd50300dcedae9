"""Variational schedule synthesis: Euler-Lagrange boundary-value solves.

The duration/cost trade-off is posed on the variance axis: find kbar(s)
between the equilibrium endpoint values kbar(s_i) = D*gamma/s_i and
kbar(s_f) = D*gamma/s_f minimizing duration plus lam times a physical
cost plus mu times the smoothing penalty integral of (dkbar/ds)^2.  The
stationarity conditions are second-order two-point boundary problems in
kbar(s); one per cost:

* energy:  2 mu gamma kbar'' = (gamma^2 s + 3 D^2 gamma^2 lam
            - s^2 kbar^2 lam)/gap^2 - 2 s kbar lam / gap - 3 lam
* phase:   2 mu kbar'' = gamma s / gap^2 - m^2 lam / (8 gamma hbar^2 s)
* work:    2 mu kbar'' = gamma s / gap^2 - lam

with gap = D*gamma - s*kbar.  The multipliers lam, mu enter exactly as
printed above (constant factors of the raw functionals are absorbed into
them).

The solver runs damped fixed-point sweeps: each sweep freezes the
nonlinear right-hand side and solves the linear tridiagonal Poisson
problem for the new iterate, damped by a relaxation factor; steps that
would cross the singular manifold D*gamma = s*kbar in the interior are
rejected and the damping halved.  Once the updates are small the solve
switches to damped Newton steps on the same tridiagonal structure, which
drives the discrete residual to rounding level (the sweep iteration alone
stalls with a small but nonzero residual near the boundary layers, where
the right-hand side is steep).

The work cost with mu = 0 has a closed-form optimum (no smoothing, free
endpoint jumps); `analytic_work_optimal` returns that bundle and doubles
as an oracle for the numerical machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, solve_banded

from .errors import ConvergenceError, SingularityTrapError, SingularManifoldError
from .model import OptimizationProblem, PhysConsts, SGridProtocol, TimeProtocol

__all__ = [
    "BvpOptions",
    "BvpResult",
    "WorkOptimalBundle",
    "analytic_work_optimal",
    "el_rhs_energy",
    "el_rhs_phase",
    "el_rhs_work",
    "solve_bvp",
]


@dataclass(frozen=True)
class BvpOptions:
    """Iteration controls for the damped-sweep solver."""

    max_iter: int = 50000
    tol: float = 1e-10
    relaxation: float = 0.5
    init_amplitude: float = 0.5

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")
        if self.init_amplitude <= 0.0:
            raise ValueError("init_amplitude must be positive")


def _gap_or_raise(s, kbar, c):
    # inside the boundary layers the gap is ~1e-2 from operands ~1, so a
    # plain float64 subtraction loses two digits that the Newton tail then
    # cannot recover; extended precision keeps the residual at rounding level
    ld = np.longdouble
    g = np.asarray(
        ld(c.D) * ld(c.gamma) - np.asarray(s).astype(ld) * np.asarray(kbar).astype(ld)
    ).astype(float)
    if np.any(g == 0.0):
        raise SingularManifoldError(
            "evaluation on the singular manifold D*gamma = s*kbar")
    return g


def el_rhs_energy(s, kbar, prob: OptimizationProblem, c: PhysConsts):
    """kbar'' demanded by stationarity of the energy-cost objective."""
    if prob.mu == 0.0:
        raise ValueError("mu = 0 has no smoothing term; the energy EL equation degenerates")
    s = np.asarray(s, dtype=float)
    kbar = np.asarray(kbar, dtype=float)
    g = _gap_or_raise(s, kbar, c)
    lam = prob.lam
    num = c.gamma**2 * s + 3.0 * c.D**2 * c.gamma**2 * lam - s**2 * kbar**2 * lam
    out = (num / g**2 - 2.0 * s * kbar * lam / g - 3.0 * lam) / (2.0 * prob.mu * c.gamma)
    return float(out) if out.ndim == 0 else out


def el_rhs_phase(s, kbar, prob: OptimizationProblem, c: PhysConsts):
    """kbar'' demanded by stationarity of the phase-cost objective."""
    if prob.mu == 0.0:
        raise ValueError("mu = 0 has no smoothing term; the phase EL equation degenerates")
    s = np.asarray(s, dtype=float)
    kbar = np.asarray(kbar, dtype=float)
    g = _gap_or_raise(s, kbar, c)
    out = (c.gamma * s / g**2
           - c.m**2 * prob.lam / (8.0 * c.gamma * c.hbar**2 * s)) / (2.0 * prob.mu)
    return float(out) if out.ndim == 0 else out


def el_rhs_work(s, kbar, prob: OptimizationProblem, c: PhysConsts):
    """kbar'' demanded by stationarity of the work-cost objective.

    Only valid for mu > 0; the mu = 0 optimum is analytic_work_optimal.
    """
    if prob.mu == 0.0:
        raise ValueError("mu = 0 work cost is solved in closed form by analytic_work_optimal")
    s = np.asarray(s, dtype=float)
    kbar = np.asarray(kbar, dtype=float)
    g = _gap_or_raise(s, kbar, c)
    out = (c.gamma * s / g**2 - prob.lam) / (2.0 * prob.mu)
    return float(out) if out.ndim == 0 else out


_EL_RHS = {"energy": el_rhs_energy, "phase": el_rhs_phase, "work": el_rhs_work}


def _el_rhs_diag_prime(cost, s, kbar, prob, c):
    """Pointwise derivative of the EL right-hand side w.r.t. kbar (for Newton)."""
    g = c.D * c.gamma - s * kbar
    if cost == "energy":
        lam = prob.lam
        num = c.gamma**2 * s + 3.0 * c.D**2 * c.gamma**2 * lam - s**2 * kbar**2 * lam
        return (-2.0 * s**2 * kbar * lam / g**2
                + 2.0 * s * num / g**3
                - 2.0 * s * lam * (g + s * kbar) / g**2) / (2.0 * prob.mu * c.gamma)
    # phase and work share the duration term; their cost terms are kbar-free
    return c.gamma * s**2 / (prob.mu * g**3)


@dataclass
class BvpResult:
    """Converged schedule plus solve diagnostics."""

    protocol: SGridProtocol
    iterations: int
    final_update: float
    residual: float
    rejections: int

    @property
    def kbar(self) -> np.ndarray:
        return self.protocol.kbar

    @property
    def s_nodes(self) -> np.ndarray:
        return self.protocol.s_nodes


def solve_bvp(prob: OptimizationProblem, c: PhysConsts,
              opts: BvpOptions = BvpOptions()) -> BvpResult:
    """Solve the Euler-Lagrange boundary problem for prob.cost.

    Uniform grid of prob.n_grid nodes from s_i to s_f; boundary values are
    pinned to the equilibrium stiffness at both ends.  The initial iterate
    bows away from the equilibrium branch by a feasible half-sine whose
    amplitude scales like sqrt(gamma/max(lam,1)) / sqrt(s) so it starts on
    the correct side of the singular manifold.

    Returns a BvpResult; raises ConvergenceError (no convergence within
    max_iter) or SingularityTrapError (damping underflow while dodging the
    manifold).
    """
    if prob.mu == 0.0:
        raise ValueError("mu = 0 is only solvable for the work cost, in closed form; "
                         "use analytic_work_optimal")
    rhs_fn = _EL_RHS[prob.cost]
    n = prob.n_grid
    s = np.linspace(prob.s_i, prob.s_f, n)
    h = s[1] - s[0]
    h2 = h * h
    sgn = 1.0 if prob.s_f > prob.s_i else -1.0
    Dg = c.D * c.gamma

    bc_i = Dg / prob.s_i
    bc_f = Dg / prob.s_f
    lam_eff = max(prob.lam, 1.0)
    x = (s - prob.s_i) / (prob.s_f - prob.s_i)
    kbar0 = Dg / s - (opts.init_amplitude * sgn * np.sin(np.pi * x)
                      * np.sqrt(c.gamma / lam_eff) / np.sqrt(s))

    s_int = s[1:-1]
    u = kbar0[1:-1].copy()

    # constant-coefficient Poisson operator, factorized once:
    # (u[j-1] - 2 u[j] + u[j+1]) / h^2 = f[j]  ->  A u = -h^2 f + bc terms
    m = n - 2
    ab = np.zeros((2, m))
    ab[0, 1:] = -1.0
    ab[1, :] = 2.0
    chol = cholesky_banded(ab)

    bc_vec = np.zeros(m)
    bc_vec[0] = bc_i
    bc_vec[-1] = bc_f

    def feasible(kbar_int):
        return bool(np.all((Dg - s_int * kbar_int) * sgn > 0.0))

    if not feasible(u):
        raise SingularityTrapError("initial iterate is infeasible", iterations=0)

    relax_cap = opts.relaxation
    relax = opts.relaxation
    rejections = 0
    history: list[float] = []
    upd = np.inf
    upd_min = np.inf
    newton_gate = max(1.0e3 * opts.tol, 1.0e-7)
    it = 0
    converged = False
    in_newton = False
    stall_best = np.inf
    stall_count = 0

    while it < opts.max_iter:
        it += 1
        rejected_here = False
        if not in_newton:
            # frozen-RHS sweep
            f = rhs_fn(s_int, u, prob, c)
            if not np.all(np.isfinite(f)):
                raise ConvergenceError("EL right-hand side blew up",
                                       iterations=it, update_history=history[-50:])
            u_prop = cho_solve_banded((chol, False), -h2 * f + bc_vec)
            step = u_prop - u
            r = relax
            while True:
                cand = u + r * step
                if feasible(cand):
                    break
                rejected_here = True
                rejections += 1
                r *= 0.5
                if r < 1e-12:
                    raise SingularityTrapError(
                        "damping underflowed while avoiding the singular manifold",
                        iterations=it, update_history=history[-50:])
            upd = r * float(np.max(np.abs(step)))
            u = cand
            # remember a working damping level, creep back toward the ceiling
            relax = min(relax_cap, 2.0 * r)
            # a sweep sequence that stops contracting is cycling around the
            # fixed point; lower the damping ceiling and try again
            if upd < 0.95 * stall_best:
                stall_best = upd
                stall_count = 0
            else:
                stall_count += 1
                if stall_count >= 40:
                    relax_cap = max(0.25 * relax_cap, 1.0 / 1024.0)
                    relax = min(relax, relax_cap)
                    stall_best = upd
                    stall_count = 0
            if upd <= newton_gate:
                in_newton = True
        else:
            # Newton tail: same tridiagonal structure, exact pointwise
            # Jacobian; drives the discrete residual to rounding level.  The
            # sweep update underestimates the remaining error when its
            # contraction is slow, so convergence is only declared here.
            f = rhs_fn(s_int, u, prob, c)
            # difference-of-differences form: no O(|u|) cancellation, so the
            # rounding floor of the residual stays well under the tolerance
            d2u = np.diff(np.concatenate(([bc_i], u, [bc_f])), 2) / h2
            resid = d2u - f
            fp = _el_rhs_diag_prime(prob.cost, s_int, u, prob, c)
            jab = np.zeros((3, m))
            jab[0, 1:] = 1.0 / h2
            jab[1, :] = -2.0 / h2 - fp
            jab[2, :-1] = 1.0 / h2
            delta = solve_banded((1, 1), jab, -resid)
            if float(np.max(np.abs(delta))) > 0.5 * (float(np.max(np.abs(u))) + 1.0):
                # solution-scale jump: handed over too far out; back to
                # sweeps, and require a tighter handoff next time
                in_newton = False
                newton_gate = max(0.1 * newton_gate, 10.0 * opts.tol)
                history.append(upd)
                continue
            r = 1.0
            while True:
                cand = u + r * delta
                if feasible(cand):
                    break
                rejected_here = True
                rejections += 1
                r *= 0.5
                if r < 1e-12:
                    raise SingularityTrapError(
                        "damping underflowed in the Newton tail",
                        iterations=it, update_history=history[-50:])
            upd = r * float(np.max(np.abs(delta)))
            u = cand
        history.append(upd)
        upd_min = min(upd_min, upd)
        if upd < opts.tol and in_newton and not rejected_here:
            converged = True
            break
        if it > 200 and upd > 1e6 * upd_min:
            raise ConvergenceError("iteration diverged",
                                   iterations=it, update_history=history[-50:])

    if not converged:
        raise ConvergenceError(
            f"no convergence within {opts.max_iter} iterations "
            f"(last update {upd:.3e}, tol {opts.tol:.1e})",
            iterations=it, update_history=history[-50:])

    f = rhs_fn(s_int, u, prob, c)
    d2u = np.diff(np.concatenate(([bc_i], u, [bc_f])), 2) / h2
    printed_factor = 2.0 * prob.mu * (c.gamma if prob.cost == "energy" else 1.0)
    residual = printed_factor * float(np.max(np.abs(d2u - f)))

    kbar = np.empty(n)
    kbar[0] = bc_i
    kbar[-1] = bc_f
    kbar[1:-1] = u
    orientation = "expansion" if sgn > 0 else "compression"
    protocol = SGridProtocol(s, kbar, orientation)
    return BvpResult(protocol=protocol, iterations=it, final_update=float(upd),
                     residual=residual, rejections=rejections)


# ---------------------------------------------------------------------------
# closed-form work optimum (mu = 0)
# ---------------------------------------------------------------------------

@dataclass
class WorkOptimalBundle:
    """Closed-form minimum-work schedule: s-grid and time-domain views.

    The optimality condition pins s*kbar(s) = D*gamma - sign * sqrt(gamma*s/lam)
    (sign = sign(s_f - s_i), so the flow always moves toward the target);
    endpoints jump away from equilibrium.  The quantum image collapses to
    kappa(s) = m D^2 / s^2, the variance path is
    s(t) = (sqrt(s_i) + sign * t/sqrt(gamma*lam))^2, and the duration is
    sqrt(gamma*lam) * |sqrt(s_f) - sqrt(s_i)|.  As a schedule of rescaled
    time t/duration, kappa is independent of lam.
    """

    lam: float
    duration: float
    s: np.ndarray
    kbar_s: np.ndarray
    kappa_s: np.ndarray
    t_at_s: np.ndarray
    t: np.ndarray
    s_t: np.ndarray
    kbar_t: np.ndarray
    kappa_t: np.ndarray

    def s_protocol(self) -> SGridProtocol:
        return SGridProtocol.from_samples(self.s, self.kbar_s)

    def classical_time_protocol(self) -> TimeProtocol:
        return TimeProtocol(self.t, self.kbar_t, "classical")

    def quantum_time_protocol(self) -> TimeProtocol:
        return TimeProtocol(self.t, self.kappa_t, "quantum")


def analytic_work_optimal(lam: float, s_i: float, s_f: float, c: PhysConsts,
                          n: int = 2001) -> WorkOptimalBundle:
    """Closed-form minimum-work schedule between variances s_i and s_f.

    The quantum stiffness is evaluated by substituting the closed-form
    kbar(s) and its analytic derivative into the s-domain map, so the
    m D^2/s^2 collapse is exercised rather than assumed.
    """
    c.require_quantum()
    if lam <= 0.0 or not np.isfinite(lam):
        raise ValueError("lam must be positive")
    if s_i <= 0.0 or s_f <= 0.0 or s_i == s_f:
        raise ValueError("endpoint variances must be positive and distinct")
    if n < 3:
        raise ValueError("need at least 3 samples")
    sign = 1.0 if s_f > s_i else -1.0
    root_gl = np.sqrt(c.gamma * lam)

    def kbar_of(s):
        return c.D * c.gamma / s - sign * np.sqrt(c.gamma / (lam * s))

    def kappa_of(s):
        kb = kbar_of(s)
        kbp = -c.D * c.gamma / s**2 + sign * 0.5 * np.sqrt(c.gamma / lam) * s**-1.5
        gap = sign * np.sqrt(c.gamma * s / lam)
        return (c.hbar**2 / (2.0 * c.m * s**2)
                + (2.0 * c.m / c.gamma**2) * gap * kbp
                - (c.m / c.gamma**2) * kb**2)

    dur = float(root_gl * abs(np.sqrt(s_f) - np.sqrt(s_i)))
    s = np.linspace(s_i, s_f, n)
    t_at_s = root_gl * np.abs(np.sqrt(s) - np.sqrt(s_i))
    t = np.linspace(0.0, dur, n)
    s_t = (np.sqrt(s_i) + sign * t / root_gl) ** 2
    return WorkOptimalBundle(
        lam=lam, duration=dur,
        s=s, kbar_s=kbar_of(s), kappa_s=kappa_of(s), t_at_s=t_at_s,
        t=t, s_t=s_t, kbar_t=kbar_of(s_t), kappa_t=kappa_of(s_t))
