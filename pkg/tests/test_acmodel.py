"""AC measurement functions, analytic Jacobian, gain, and observability."""

import json
import math

import numpy as np
import pytest

from gridgsp import (
    ac_gain,
    ac_is_observable,
    build_ac_model,
    parse_json_case,
)
from gridgsp.acmodel import ACState, induced_ac_rows

TWO_BUS = {
    "name": "twobus", "base_mva": 100.0,
    "buses": [
        {"id": 1, "type": "ref", "vm": 1.02, "va_deg": 0.0},
        {"id": 2, "type": "pq", "vm": 0.97, "va_deg": -4.0},
    ],
    "branches": [
        {"from": 1, "to": 2, "r": 0.02, "x": 0.12, "b": 0.06,
         "tap": 0.98, "shift_deg": 1.5},
    ],
}


def hand_two_bus_measurements(vm, th, r, x, bc, tap, shift):
    """Scalar trig-identity route for a single branch; independent of the
    complex-matrix implementation."""
    g = r / (r * r + x * x)
    bs = -x / (r * r + x * x)
    y = complex(g, bs)
    a = tap * complex(math.cos(shift), math.sin(shift))
    yff = (y + 1j * bc / 2) / (tap * tap)
    yft = -y / a.conjugate()
    ytf = -y / a
    ytt = y + 1j * bc / 2

    def flow(vi, vk, thik, ykk, yik):
        gkk, bkk = ykk.real, ykk.imag
        gik, bik = yik.real, yik.imag
        p = vi * vi * gkk + vi * vk * (gik * math.cos(thik) + bik * math.sin(thik))
        q = -vi * vi * bkk + vi * vk * (gik * math.sin(thik) - bik * math.cos(thik))
        return p, q

    pf, qf = flow(vm[0], vm[1], th[0] - th[1], yff, yft)
    pt, qt = flow(vm[1], vm[0], th[1] - th[0], ytt, ytf)
    # injections: with a single branch the bus injection equals its flow
    return {"p_inj": (pf, pt), "q_inj": (qf, qt),
            "p_flow": (pf, pt), "q_flow": (qf, qt)}


def test_two_bus_hand_formulas():
    net = parse_json_case(json.dumps(TWO_BUS))
    model = build_ac_model(net, sigma2=0.0)
    state = model.state_from_case()
    z = model.measure(state)
    br = net.branches[0]
    hand = hand_two_bus_measurements(
        vm=[1.02, 0.97], th=[0.0, math.radians(-4.0)],
        r=br.resistance, x=br.reactance, bc=br.total_charging_susceptance,
        tap=br.tap_ratio, shift=br.phase_shift)
    # layout: [P inj x2][P flow 1->2, 2->1][Q inj x2][Q flow 1->2, 2->1]
    np.testing.assert_allclose(z[0:2], hand["p_inj"], atol=1e-12)
    np.testing.assert_allclose(z[2:4], hand["p_flow"], atol=1e-12)
    np.testing.assert_allclose(z[4:6], hand["q_inj"], atol=1e-12)
    np.testing.assert_allclose(z[6:8], hand["q_flow"], atol=1e-12)


def test_flat_profile_lossless_zero(chain3):
    model = build_ac_model(chain3, sigma2=0.0)
    z = model.measure(model.flat_start())
    np.testing.assert_allclose(z, 0.0, atol=1e-14)


def test_case_solution_consistency(case14, case30, case57, case118):
    """Recorded case voltages reproduce the recorded injections (the slack
    active row is excluded: files keep the published dispatch there)."""
    for net in (case14, case30, case57, case118):
        model = build_ac_model(net, sigma2=0.0)
        z = model.measure(model.state_from_case())
        ref = net.reference_bus - 1
        p_err = np.abs(z[:net.n_bus] - net.active_injections())
        p_err[ref] = 0.0
        q_err = np.abs(z[model.n_active:model.n_active + net.n_bus]
                       - net.reactive_injections())
        assert np.max(p_err) < 1e-4
        assert np.max(q_err) < 1e-4


def test_sum_of_injections_covers_losses(case118):
    model = build_ac_model(case118, sigma2=0.0)
    z = model.measure(model.state_from_case())
    losses = np.sum(z[:118])
    assert losses >= 0.0
    assert losses < 2.0  # sane loss level, per-unit on 100 MVA


def test_measurement_count(case118):
    model = build_ac_model(case118, sigma2=0.0)
    assert model.n_measurements == 952
    assert model.n_active == 476


def jacobian_fd_error(model, state, step=1e-6):
    analytic = model.jacobian(state)
    x = state.as_vector()
    fd = np.empty_like(analytic)
    for j in range(len(x)):
        hi = x.copy()
        lo = x.copy()
        hi[j] += step
        lo[j] -= step
        fd[:, j] = (model.measure(state.replace_vector(hi))
                    - model.measure(state.replace_vector(lo))) / (2 * step)
    mask = np.abs(analytic) > 1e-8
    return np.max(np.abs(analytic[mask] - fd[mask]) / np.abs(analytic[mask]))


def random_state_near_flat(model, rng):
    nfree = model.n_bus - 1
    return ACState(theta=0.1 * rng.standard_normal(nfree),
                   v=1.0 + 0.03 * rng.standard_normal(nfree),
                   reference_bus=model.reference_bus,
                   v_ref=model.v_ref, n_bus=model.n_bus)


def test_jacobian_vs_finite_differences(case14, toy5):
    rng = np.random.default_rng(2718)
    for net in (case14, toy5):
        model = build_ac_model(net, sigma2=0.0)
        for _ in range(5):
            state = random_state_near_flat(model, rng)
            assert jacobian_fd_error(model, state) < 1e-5


def test_jacobian_locality(toy5):
    model = build_ac_model(toy5, sigma2=0.0)
    rng = np.random.default_rng(31)
    state = random_state_near_flat(model, rng)
    H = model.jacobian(state)
    n = toy5.n_bus
    nf = n - 1
    col_of = {b: i for i, b in enumerate(j + 1 for j in range(n)
                                         if j != model.reference_bus - 1)}
    adjacency = {b: {b} for b in range(1, n + 1)}
    for (k, m) in model.edges:
        adjacency[k].add(m)
        adjacency[m].add(k)
    for s in model.sensors:
        touched = np.flatnonzero(np.abs(H[s.row]) > 1e-12)
        buses = set()
        for c in touched:
            theta_col = c if c < nf else c - nf
            bus = [b for b, i in col_of.items() if i == theta_col][0]
            buses.add(bus)
        if s.kind in ("p_flow", "q_flow"):
            assert buses <= {s.from_bus, s.to_bus}
        else:
            assert buses <= adjacency[s.bus]


def test_dc_consistency_at_flat(chain3, chain3_lap):
    """On an r = 0, shunt-free, tap = 1 network the flat-profile linearization
    of the active rows reproduces the DC measurement matrix."""
    model = build_ac_model(chain3, sigma2=0.0)
    H = model.jacobian(model.flat_start())
    from gridgsp import build_dc_model
    dc = build_dc_model(chain3_lap, sigma2=0.0, reference_bus=chain3.reference_bus)
    nf = chain3.n_bus - 1
    cols = dc.free_columns()
    np.testing.assert_allclose(H[:model.n_active, :nf], dc.H[:, cols], atol=1e-6)
    # no angle-to-reactive coupling at flat on the lossless network
    np.testing.assert_allclose(H[:model.n_active, nf:], 0.0, atol=1e-9)


def test_gain_identities(toy5):
    model = build_ac_model(toy5, sigma2=0.0)
    rng = np.random.default_rng(13)
    H = model.jacobian(random_state_near_flat(model, rng))
    m = H.shape[0]
    G1 = ac_gain(H, np.eye(m))
    np.testing.assert_allclose(G1, H.T @ H, atol=1e-12)
    G2 = ac_gain(H, 4.0 * np.eye(m))
    np.testing.assert_allclose(G2, G1 / 4.0, atol=1e-12)
    assert np.max(np.abs(G1 - G1.T)) < 1e-12


def test_ac_observability(case14, chain3):
    model = build_ac_model(case14, sigma2=0.01)
    rng = np.random.default_rng(4)
    state = random_state_near_flat(model, rng)
    assert ac_is_observable(model, state, None)
    assert not ac_is_observable(model, state, [])
    chain_model = build_ac_model(chain3, sigma2=0.01)
    rows = induced_ac_rows(chain_model, [1])
    assert not ac_is_observable(chain_model, chain_model.flat_start(), rows)


def test_induced_ac_rows_mirror_dc(case118, case118_lap):
    from gridgsp.placement import induced_sensor_rows
    model = build_ac_model(case118, sigma2=0.01)
    buses = [3, 17, 52, 100]
    dc_rows = induced_sensor_rows(case118_lap, buses)
    ac_rows = induced_ac_rows(model, buses)
    assert len(ac_rows) == 2 * len(dc_rows)
    assert tuple(ac_rows[:len(dc_rows)]) == tuple(dc_rows)
    assert tuple(r - model.n_active for r in ac_rows[len(dc_rows):]) == tuple(dc_rows)
