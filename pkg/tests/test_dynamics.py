"""Gaussian wavepacket integration and its phase-space observables."""

import numpy as np
import pytest

from swifttrap import (
    IntegrationError,
    TimeProtocol,
    analytic_work_optimal,
    energy_of,
    equilibrium_kappa,
    integrate_ermakov,
    nelson_drift,
    tilt_angle,
    wigner_at,
)


def _const_quantum(kappa, span=5.0, n=51):
    t = np.linspace(0.0, span, n)
    return TimeProtocol(t, np.full(n, kappa), "quantum")


def test_ground_state_energy(consts):
    # at equilibrium the mean energy is the ground-state value m D^2 / s
    for s in (0.25, 1.0, 3.0):
        e = energy_of(s, 0.0, equilibrium_kappa(s, consts), consts)
        assert e == pytest.approx(consts.m * consts.D**2 / s, rel=1e-14)
    with pytest.raises(ValueError):
        energy_of(-1.0, 0.0, 1.0, consts)


def test_hold_at_equilibrium(consts):
    run = integrate_ermakov(_const_quantum(equilibrium_kappa(1.0, consts)), 1.0, consts)
    assert np.max(np.abs(run.s - 1.0)) <= 1e-12
    assert np.max(np.abs(run.sdot)) <= 1e-12
    assert np.max(np.abs(run.alpha)) <= 1e-12
    assert run.duration == pytest.approx(5.0)
    # global phase advances at -hbar/(4 m s) = -1/2 per unit time
    assert run.beta[-1] == pytest.approx(-2.5, rel=1e-10)


def test_breathing_mode_closed_form(consts):
    # quench 1.0 -> equilibrium-of-0.5 from rest: s oscillates between the
    # turning points 1 and 1/4 with period pi/omega, conserving the energy
    kappa = equilibrium_kappa(0.5, consts)
    omega = np.sqrt(kappa / consts.m)
    run = integrate_ermakov(_const_quantum(kappa), 1.0, consts)
    energy = energy_of(run.s, run.sdot, kappa, consts)
    assert np.max(np.abs(energy - energy[0])) <= 1e-10
    assert run.s.min() == pytest.approx(0.25, abs=1e-5)
    assert run.s.max() <= 1.0 + 1e-9
    period = np.pi / omega
    assert np.interp(period, run.t, run.s) == pytest.approx(1.0, abs=1e-4)


def test_alpha_tracks_width_velocity(consts):
    kappa = equilibrium_kappa(0.5, consts)
    run = integrate_ermakov(_const_quantum(kappa), 1.0, consts)
    expect = consts.m * run.sdot / (4.0 * consts.hbar * run.s)
    assert np.max(np.abs(run.alpha - expect)) <= 1e-14


def test_under_resolved_integration_collapses(consts):
    bad = TimeProtocol(np.linspace(0.0, 10.0, 23), np.full(23, 200.0), "quantum")
    with pytest.raises(IntegrationError) as exc:
        integrate_ermakov(bad, 1.0, consts, dt=0.45)
    assert exc.value.t is not None


def test_integrator_guards(consts):
    proto = _const_quantum(0.5)
    with pytest.raises(ValueError, match="quantum"):
        integrate_ermakov(TimeProtocol(proto.t_nodes, proto.values, "classical"),
                          1.0, consts)
    with pytest.raises(ValueError):
        integrate_ermakov(proto, 0.0, consts)
    with pytest.raises(ValueError):
        integrate_ermakov(proto, 1.0, consts, dt=-0.1)


def test_work_bundle_satisfies_width_equation(consts):
    # along the minimum-work path sigma = sqrt(2 s) is linear in time, so
    # the width equation reduces to kappa sigma / m = 4 D^2 / sigma^3
    b = analytic_work_optimal(1.0, 1.0, 2.0, consts)
    sigma = np.sqrt(2.0 * b.s_t)
    assert np.max(np.abs(np.diff(sigma, 2))) <= 1e-10
    resid = b.kappa_t * sigma / consts.m - 4.0 * consts.D**2 / sigma**3
    assert np.max(np.abs(resid)) <= 1e-12


def test_work_bundle_needs_matched_launch_velocity(consts):
    # the closed-form path starts with sdot = 2 sqrt(s_i / (gamma lam)) != 0;
    # integrating its stiffness from rest therefore misses the target
    b = analytic_work_optimal(1.0, 1.0, 2.0, consts)
    run = integrate_ermakov(b.quantum_time_protocol(), 1.0, consts)
    assert np.max(np.abs(np.interp(b.t, run.t, run.s) - b.s_t)) > 0.1
    assert abs(run.s[-1] - 2.0) > 1e-2


def test_wigner_density_values(consts):
    assert wigner_at(0.0, 0.0, 1.0, 0.0, consts) == pytest.approx(1.0 / np.pi)
    # shear: the p-Gaussian is centered on 2 alpha hbar x
    x, alpha, s = 0.7, 0.9, 1.3
    ridge = 2.0 * alpha * consts.hbar * x
    w_on = wigner_at(x, ridge, s, alpha, consts)
    assert w_on > wigner_at(x, ridge + 0.5, s, alpha, consts)
    assert w_on == pytest.approx(np.exp(-x**2 / (2.0 * s)) / np.pi)
    with pytest.raises(ValueError):
        wigner_at(0.0, 0.0, -1.0, 0.0, consts)


def test_tilt_angle(consts):
    assert tilt_angle(0.0, consts, omega_i=1.0) == 0.0
    # tan(theta) = 1 when 2 alpha hbar = m omega_i
    alpha = consts.m * 2.0 / (2.0 * consts.hbar)
    assert tilt_angle(alpha, consts, omega_i=2.0) == pytest.approx(np.pi / 4.0)
    with pytest.raises(ValueError):
        tilt_angle(0.1, consts, omega_i=0.0)


def test_nelson_drift_structure(consts):
    # linear in x; restoring for a resting packet; vanishes at alpha = 1/(4s)
    s = 1.4
    assert nelson_drift(2.0, s, 0.0, consts) == pytest.approx(
        2.0 * nelson_drift(1.0, s, 0.0, consts))
    assert nelson_drift(1.0, s, 0.0, consts) < 0.0
    assert nelson_drift(1.0, s, 1.0 / (4.0 * s), consts) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        nelson_drift(1.0, -1.0, 0.0, consts)
