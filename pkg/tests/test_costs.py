"""Cost functionals, their closed forms, and the combined objective."""

import numpy as np
import pytest
from scipy.integrate import quad

from swifttrap import (
    CostReport,
    OptimizationProblem,
    SGridProtocol,
    analytic_work_optimal,
    duration,
    f_alpha,
    f_energy,
    g_penalty,
    j_total,
    work_classical,
    work_from_schedule,
)

ROOT2 = np.sqrt(2.0)


def _bundle_protocol(consts, lam=1.0, n=2001):
    return analytic_work_optimal(lam, 1.0, 2.0, consts, n=n).s_protocol()


def _closed_forms(c, lam=1.0):
    """Exact functionals of the minimum-work path on the 1 -> 2 expansion."""
    f_a = (c.m**2 / (8.0 * c.gamma * c.hbar**2)) \
        * 2.0 * np.sqrt(c.gamma / lam) * (1.0 - 1.0 / ROOT2)
    def kbar(s):
        return c.D * c.gamma / s - np.sqrt(c.gamma / (lam * s))
    def integrand(s):
        gap = c.D * c.gamma - s * kbar(s)
        return gap / s + (3.0 * c.D**2 * c.gamma**2 - s**2 * kbar(s)**2) / (s * gap) \
            - 2.0 * kbar(s)
    f_e = (c.m / (4.0 * c.gamma)) * (
        quad(integrand, 1.0, 2.0, epsabs=1e-12, epsrel=1e-12)[0]
        + 2.0 * (2.0 * kbar(2.0) - kbar(1.0)))
    work = -0.5 * c.D * c.gamma * np.log(2.0) \
        + 0.5 * (ROOT2 - 1.0) * np.sqrt(c.gamma / lam)
    return f_e, f_a, work


def test_work_closed_form_value(consts):
    p = _bundle_protocol(consts)
    _, _, w_exact = _closed_forms(consts)
    assert work_classical(p, consts) == pytest.approx(w_exact, abs=2e-8)
    assert w_exact == pytest.approx(-0.1394668091, abs=1e-9)


def test_energy_and_phase_closed_forms(consts):
    p = _bundle_protocol(consts)
    f_e, f_a, _ = _closed_forms(consts)
    assert f_energy(p, consts) == pytest.approx(f_e, abs=5e-8)
    assert f_alpha(p, consts) == pytest.approx(f_a, abs=1e-8)


def test_work_excess_duration_tradeoff_invariant(consts):
    # (W - W_quasistatic) * duration = (gamma/2) (sqrt(2)-1)^2 for every lam
    target = 0.5 * consts.gamma * (ROOT2 - 1.0) ** 2
    w_qs = -0.5 * consts.D * consts.gamma * np.log(2.0)
    products = []
    for lam in (0.25, 1.0, 4.0, 16.0):
        b = analytic_work_optimal(lam, 1.0, 2.0, consts)
        w = work_classical(b.s_protocol(), consts)
        products.append((w - w_qs) * b.duration)
        assert abs(products[-1] - target) <= 1e-7
    # and the excess work itself decreases monotonically with lam
    excesses = [p / analytic_work_optimal(lam, 1.0, 2.0, consts).duration
                for p, lam in zip(products, (0.25, 1.0, 4.0, 16.0))]
    assert excesses[0] > excesses[1] > excesses[2] > excesses[3] > 0.0


def test_time_and_s_domain_work_agree(consts):
    b = analytic_work_optimal(1.0, 1.0, 2.0, consts)
    w_s = work_classical(b.s_protocol(), consts)
    w_t = work_from_schedule(b.classical_time_protocol(), b.s_t)
    assert abs(w_t - w_s) <= 1e-6
    with pytest.raises(ValueError):
        work_from_schedule(b.quantum_time_protocol(), b.s_t)
    with pytest.raises(ValueError):
        work_from_schedule(b.classical_time_protocol(), b.s_t[:-1])


def test_penalty_closed_form_and_direction_invariance(consts):
    s = np.linspace(1.0, 2.0, 1001)
    p = SGridProtocol.from_samples(s, s.copy())          # kbar' = 1
    assert g_penalty(p, consts) == pytest.approx(1.0, rel=1e-10)
    q = SGridProtocol.from_samples(s[::-1], s[::-1].copy())
    assert g_penalty(q, consts) == pytest.approx(g_penalty(p, consts), rel=1e-12)


def test_combined_objective_composition(cache):
    c = cache.c
    p = cache.bvp("phase", 0.5).protocol
    for cost in ("energy", "phase", "work"):
        prob = OptimizationProblem(cost=cost, lam=1.3, mu=0.7, s_i=1.0, s_f=2.0)
        rep = j_total(p, prob, c)
        assert isinstance(rep, CostReport)
        assert rep.duration == pytest.approx(duration(p, c), rel=1e-12)
        if cost == "energy":
            f_abs = 4.0 * rep.f_energy / c.m
        elif cost == "phase":
            f_abs = rep.f_alpha
        else:
            f_abs = -np.trapezoid(p.kbar, p.s_nodes)
        assert rep.f_absorbed == pytest.approx(f_abs, rel=1e-9)
        assert rep.j_total == pytest.approx(
            rep.duration + 1.3 * f_abs + 0.7 * rep.g_penalty, rel=1e-12)


@pytest.mark.parametrize("cost", ["energy", "phase"])
def test_solutions_are_local_minima(cache, cost):
    # the solved schedules make the right-hand sides stationary for the
    # combination 2 * duration + lam * F + mu * G; every smooth feasible
    # perturbation must therefore raise it
    c = cache.c
    prob = OptimizationProblem(cost=cost, lam=1.0, mu=0.5, s_i=1.0, s_f=2.0)
    p0 = cache.bvp(cost, 0.5).protocol

    def j_el(p):
        rep = j_total(p, prob, c)
        return rep.j_total + rep.duration

    base = j_el(p0)
    x = p0.s_nodes - 1.0
    increases = []
    for k in (1, 2, 3):
        for eps in (-0.05, -0.02, 0.02, 0.05):
            p = SGridProtocol.from_samples(p0.s_nodes,
                                           p0.kbar + eps * np.sin(k * np.pi * x))
            increases.append(j_el(p) - base)
    rng = np.random.Generator(np.random.Philox(key=42))
    for _ in range(5):
        coeffs = rng.normal(0.0, 0.02, 3)
        bump = sum(ck * np.sin((i + 1) * np.pi * x)
                   for i, ck in enumerate(coeffs))
        p = SGridProtocol.from_samples(p0.s_nodes, p0.kbar + bump)
        increases.append(j_el(p) - base)
    assert min(increases) > 0.0, f"found a descent direction: {min(increases):.3e}"
