"""Stiffness correspondence, duration quadrature, time-domain emission."""

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from swifttrap import (
    InfeasibleProtocolError,
    IntegrationError,
    SGridProtocol,
    TimeProtocol,
    duration,
    equilibrium_kbar,
    evolve_variance,
    flow_gap,
    quantum_from_classical_s,
    quantum_from_classical_t,
    time_of_s,
    to_time_domain,
    variance_rate,
)


def _pinned_analytic(amplitude=0.5, n=2001):
    """Schedule with gap = A ((s-1)(2-s))^(2/3): equilibrium-pinned ends and
    a duration known in closed form through the Beta function."""
    s = np.linspace(1.0, 2.0, n)
    gap = amplitude * ((s - 1.0) * (2.0 - s)) ** (2.0 / 3.0)
    return s, SGridProtocol.from_samples(s, (1.0 - gap) / s)


def test_variance_rate_signs_and_validation(consts):
    assert variance_rate(1.0, 1.0, consts) == 0.0
    assert variance_rate(1.0, 0.5, consts) > 0.0   # soft trap: spreading
    assert variance_rate(1.0, 2.0, consts) < 0.0   # stiff trap: squeezing
    with pytest.raises(ValueError):
        variance_rate(-1.0, 1.0, consts)


def test_flow_gap_matches_definition(consts):
    s = np.linspace(1.0, 2.0, 11)
    p = SGridProtocol.from_samples(s, 0.3 * np.ones(11))
    assert np.allclose(flow_gap(p, consts), 1.0 - 0.3 * s, rtol=1e-15)


def test_duration_closed_form_smooth(consts):
    # gap = sqrt(s): dt = (1/2) int ds / sqrt(s) = sqrt(2) - 1
    s = np.linspace(1.0, 2.0, 2001)
    p = SGridProtocol.from_samples(s, (1.0 - np.sqrt(s)) / s)
    assert duration(p, consts) == pytest.approx(np.sqrt(2.0) - 1.0, abs=1e-8)


@pytest.mark.parametrize("amplitude", [0.5, 1.0])
def test_duration_closed_form_pinned_ends(consts, amplitude):
    _, p = _pinned_analytic(amplitude)
    beta_13 = gamma_fn(1.0 / 3.0) ** 2 / gamma_fn(2.0 / 3.0)
    exact = beta_13 / (2.0 * amplitude)
    assert duration(p, consts) == pytest.approx(exact, rel=2e-4)


def test_time_of_s_cumulative(consts):
    _, p = _pinned_analytic()
    t = time_of_s(p, consts)
    assert t[0] == 0.0
    assert np.all(np.diff(t) > 0.0)
    assert t[-1] == pytest.approx(duration(p, consts), rel=1e-12)


def test_interior_stall_is_rejected(consts):
    s = np.linspace(1.0, 2.0, 101)
    kbar = equilibrium_kbar(s, consts).copy()
    kbar += 0.2 * np.sin(np.pi * (s - 1.0))   # gap < 0: flow reversed
    with pytest.raises(InfeasibleProtocolError) as exc:
        duration(SGridProtocol.from_samples(s, kbar), consts)
    assert exc.value.node is not None


def test_linearly_vanishing_gap_diverges(consts):
    # gap ~ |s - s_end| has a log-divergent time integral; the grid must be
    # fine enough that the fitted boundary exponent resolves the linear zero
    s = np.linspace(1.0, 2.0, 1001)
    gap = 0.5 * (s - 1.0) * (2.0 - s)
    with pytest.raises(InfeasibleProtocolError, match="diverges"):
        duration(SGridProtocol.from_samples(s, (1.0 - gap) / s), consts)


def test_evolve_variance_exponential_relaxation(consts):
    tn = np.linspace(0.0, 3.0, 301)
    kb = 0.8
    proto = TimeProtocol(tn, np.full_like(tn, kb), "classical")
    traj = evolve_variance(proto, 1.0, consts)
    s_eq = 1.0 / kb
    exact = s_eq + (1.0 - s_eq) * np.exp(-2.0 * kb * tn)
    assert np.max(np.abs(traj.s - exact)) <= 1e-12
    assert np.allclose(traj.sdot, variance_rate(traj.s, proto.values, consts))


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_evolve_variance_guards(consts):
    tn = np.linspace(0.0, 1.0, 11)
    quantum = TimeProtocol(tn, np.ones(11), "quantum")
    with pytest.raises(ValueError, match="classical"):
        evolve_variance(quantum, 1.0, consts)
    proto = TimeProtocol(tn, np.ones(11), "classical")
    with pytest.raises(ValueError):
        evolve_variance(proto, -1.0, consts)
    with pytest.raises(ValueError):
        evolve_variance(proto, 1.0, consts, dt=0.0)
    # strongly expulsive trap blows the variance up (overflow to inf)
    expulsive = TimeProtocol(np.linspace(0.0, 80.0, 11), np.full(11, -5.0), "classical")
    with pytest.raises(IntegrationError):
        evolve_variance(expulsive, 1.0, consts)


def test_map_s_and_t_forms_agree(consts):
    # the same schedule mapped via d/ds and via d/dt (chain rule check)
    _, p = _pinned_analytic()
    td = to_time_domain(p, consts)
    kap_s = quantum_from_classical_s(p, consts)
    assert np.max(np.abs(kap_s - td.kappa_nodes)[30:-30]) <= 1e-3


def test_map_t_form_guards(consts):
    tn = np.linspace(0.0, 1.0, 11)
    proto = TimeProtocol(tn, np.ones(11), "classical")
    with pytest.raises(ValueError, match="classical"):
        quantum_from_classical_t(TimeProtocol(tn, np.ones(11), "quantum"),
                                 np.ones(11), consts)
    with pytest.raises(ValueError):
        quantum_from_classical_t(proto, np.ones(10), consts)
    with pytest.raises(ValueError):
        quantum_from_classical_t(proto, -np.ones(11), consts)


def test_emission_round_trip(consts):
    _, p = _pinned_analytic()
    td = to_time_domain(p, consts)
    assert td.classical.kind == "classical" and td.quantum.kind == "quantum"
    assert td.s[0] == pytest.approx(1.0, abs=1e-12)
    assert td.s[-1] == pytest.approx(2.0, abs=1e-9)
    assert td.duration == pytest.approx(duration(p, consts), rel=1e-12)
    # driving the flow with the emitted schedule reproduces the emitted s
    traj = evolve_variance(td.classical, 1.0, consts)
    assert np.max(np.abs(traj.s - td.s)) <= 2e-4


def test_emission_endpoint_stiffness_is_equilibrium(cache):
    # at pinned ends kbar approaches its boundary value quadratically in
    # time, so the emitted quantum stiffness must start and end on the
    # equilibrium values rather than inherit a finite differencing bias
    td = cache.timedomain("phase", 0.5)
    assert td.quantum.values[0] == pytest.approx(0.5, abs=1e-4)
    assert td.quantum.values[-1] == pytest.approx(0.125, abs=1e-4)


def test_emission_rejects_tiny_grid(consts):
    _, p = _pinned_analytic(n=501)
    with pytest.raises(ValueError):
        to_time_domain(p, consts, n_t=5)
