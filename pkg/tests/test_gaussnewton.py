"""Iterative AC estimation: recovery, equivalence chains, and failure modes."""

import numpy as np
import pytest

from gridgsp import (
    GNConfig,
    build_ac_model,
    gauss_newton_wls,
    pm_gauss_newton,
    regularized_gauss_newton,
)
from gridgsp.acmodel import generate_ac_measurements, induced_ac_rows
from gridgsp.exceptions import NonConvergence, SingularGain
from gridgsp.gaussnewton import (
    flat_anchor,
    regularization_matrix,
    regularized_gradient,
)


def test_full_sensors_noiseless_recovery(case14, case14_lap):
    model = build_ac_model(case14, sigma2=0.0)
    truth = model.state_from_case()
    z = model.measure(truth)
    state, trace = gauss_newton_wls(model, z, None, GNConfig())
    assert trace.converged
    assert trace.iterations <= 20
    assert np.max(np.abs(state.as_vector() - truth.as_vector())) < 1e-6


def test_fixed_point_at_truth(case14):
    model = build_ac_model(case14, sigma2=0.0)
    truth = model.state_from_case()
    z = model.measure(truth)
    state, trace = gauss_newton_wls(model, z, None,
                                    GNConfig(initial_state=truth))
    assert trace.step_norms[0] < 1e-10
    assert trace.iterations == 1


def test_singular_gain_low_coverage(case118, case118_lap):
    model = build_ac_model(case118, sigma2=0.01)
    rng = np.random.default_rng(0)
    buses = rng.choice(118, size=48, replace=False) + 1
    rows = induced_ac_rows(model, buses)
    truth = model.state_from_case()
    z = generate_ac_measurements(model, truth, rng)[np.asarray(rows)]
    with pytest.raises(SingularGain):
        gauss_newton_wls(model, z, rows, GNConfig())


def test_zero_mu_equals_plain_per_iterate(case14, case14_lap):
    model = build_ac_model(case14, sigma2=0.01)
    truth = model.state_from_case()
    z = generate_ac_measurements(model, truth, 7)
    cfg = GNConfig(mu_theta=0.0, mu_v=0.0)
    plain_state, plain_trace = gauss_newton_wls(model, z, None, cfg)
    reg_state, reg_trace = regularized_gauss_newton(model, z, None,
                                                    case14_lap, cfg)
    assert plain_trace.iterations == reg_trace.iterations
    np.testing.assert_allclose(plain_trace.step_norms, reg_trace.step_norms,
                               rtol=0, atol=1e-12)
    np.testing.assert_allclose(plain_state.as_vector(), reg_state.as_vector(),
                               rtol=0, atol=1e-12)


def test_pm_with_smoothness_prior_equals_regularized(case30, case30_lap):
    model = build_ac_model(case30, sigma2=0.01)
    truth = model.state_from_case()
    z_full = generate_ac_measurements(model, truth, 11)
    rng = np.random.default_rng(3)
    buses = rng.choice(30, size=10, replace=False) + 1
    rows = np.asarray(induced_ac_rows(model, buses))
    cfg = GNConfig(mu_theta=0.045, mu_v=10.0)
    reg_state, reg_trace = regularized_gauss_newton(model, z_full[rows], rows,
                                                    case30_lap, cfg)
    Lbar = regularization_matrix(case30_lap, model.reference_bus, 0.045, 10.0)
    pm_state, pm_trace = pm_gauss_newton(model, z_full[rows], rows,
                                         flat_anchor(model), Lbar, cfg)
    assert reg_trace.iterations == pm_trace.iterations
    np.testing.assert_allclose(pm_trace.step_norms, reg_trace.step_norms,
                               rtol=0, atol=1e-10)
    np.testing.assert_allclose(pm_state.as_vector(), reg_state.as_vector(),
                               rtol=0, atol=1e-10)


def test_anchor_is_exact_fixed_point(case30, case30_lap):
    """Synthetic data generated exactly at the anchor: the regularization
    force vanishes and the iteration stays put."""
    model = build_ac_model(case30, sigma2=0.0)
    x0 = flat_anchor(model)
    anchor_state = model.flat_start().replace_vector(x0)
    z = model.measure(anchor_state)
    cfg = GNConfig(mu_theta=0.045, mu_v=10.0, initial_state=anchor_state)
    state, trace = regularized_gauss_newton(model, z, None, case30_lap, cfg)
    assert trace.step_norms[0] < 1e-10
    np.testing.assert_allclose(state.as_vector(), x0, atol=1e-10)


def test_pm_empty_sensors_returns_prior(case30):
    model = build_ac_model(case30, sigma2=0.01)
    rng = np.random.default_rng(5)
    nf2 = 2 * (case30.n_bus - 1)
    x_prior = flat_anchor(model) + 0.01 * rng.standard_normal(nf2)
    state, trace = pm_gauss_newton(model, np.zeros(0), [], x_prior,
                                   np.eye(nf2), GNConfig())
    assert trace.converged
    np.testing.assert_allclose(state.as_vector(), x_prior, atol=1e-10)


def test_first_order_optimality_at_convergence(case30, case30_lap):
    model = build_ac_model(case30, sigma2=0.01)
    truth = model.state_from_case()
    z_full = generate_ac_measurements(model, truth, 23)
    rng = np.random.default_rng(8)
    buses = rng.choice(30, size=12, replace=False) + 1
    rows = np.asarray(induced_ac_rows(model, buses))
    cfg = GNConfig(mu_theta=0.045, mu_v=10.0, delta=1e-10, max_iter=40)
    state, trace = regularized_gauss_newton(model, z_full[rows], rows,
                                            case30_lap, cfg)
    assert trace.converged
    reg = regularization_matrix(case30_lap, model.reference_bus, 0.045, 10.0)
    g = regularized_gradient(model, z_full[rows], rows, reg,
                             flat_anchor(model), state)
    Rs = model.R[np.ix_(rows, rows)]
    scale = 1 + np.linalg.norm(
        model.jacobian(state)[rows].T @ (z_full[rows] / np.diagonal(Rs)))
    assert np.linalg.norm(g) < 100 * cfg.delta * scale


def test_regularized_gain_positive_definite(case30, case30_lap):
    model = build_ac_model(case30, sigma2=0.01)
    rows = np.asarray(induced_ac_rows(model, [4, 9]))
    from gridgsp.acmodel import ac_gain
    H = model.jacobian(model.flat_start())[rows]
    G = ac_gain(H, model.R[np.ix_(rows, rows)]) + regularization_matrix(
        case30_lap, model.reference_bus, 0.045, 10.0)
    assert np.linalg.eigvalsh(G)[0] > 0


def test_nonconvergence_carries_state(case14, case14_lap):
    model = build_ac_model(case14, sigma2=0.01)
    truth = model.state_from_case()
    z = generate_ac_measurements(model, truth, 2)
    with pytest.raises(NonConvergence) as err:
        gauss_newton_wls(model, z, None, GNConfig(max_iter=1))
    assert err.value.state is not None
    assert err.value.trace.iterations == 1


def test_config_validation():
    with pytest.raises(ValueError):
        GNConfig(delta=0.0)
    with pytest.raises(ValueError):
        GNConfig(max_iter=0)
