"""Spectral operations: eigendecomposition, GFT, Dirichlet energy, filters,
low-pass analysis, and the smoothness report."""

import numpy as np
import pytest

from gridgsp import (
    apply_graph_filter,
    build_laplacian,
    default_c2,
    dirichlet_energy,
    eig_laplacian,
    gft,
    igft,
    lowpass_analysis,
    smoothness_report,
)
from gridgsp.exceptions import DimensionMismatch, ZeroLambda2
from gridgsp.netcase import LaplacianMatrix
from gridgsp.spectral import (
    dirichlet_energy_edge_sum,
    dirichlet_energy_spectral,
    inverse_laplacian_response,
)

from conftest import random_connected_laplacian


def unit_path3():
    w = {(1, 2): 1.0, (2, 3): 1.0}
    L = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
    return LaplacianMatrix(matrix=L, edge_weights=w)


def test_path3_eigenvalues():
    spec = eig_laplacian(unit_path3())
    np.testing.assert_allclose(spec.eigenvalues, [0.0, 1.0, 3.0], atol=1e-12)
    np.testing.assert_allclose(np.abs(spec.eigenvectors[:, 0]),
                               np.full(3, 1 / np.sqrt(3)), atol=1e-12)
    # sign convention: largest-magnitude entry positive
    for j in range(3):
        k = np.argmax(np.abs(spec.eigenvectors[:, j]))
        assert spec.eigenvectors[k, j] > 0


def test_orthonormal_and_reconstruction(case14_lap):
    spec = eig_laplacian(case14_lap)
    n = spec.n
    np.testing.assert_allclose(spec.eigenvectors.T @ spec.eigenvectors,
                               np.eye(n), atol=1e-8)
    recon = spec.eigenvectors @ np.diag(spec.eigenvalues) @ spec.eigenvectors.T
    np.testing.assert_allclose(recon, case14_lap.matrix, atol=1e-8)
    assert abs(spec.eigenvalues[0]) < 1e-9


def test_gft_constant_and_basis():
    spec = eig_laplacian(unit_path3())
    coeffs = gft(spec, np.full(3, 1 / np.sqrt(3)))
    np.testing.assert_allclose(np.abs(coeffs), [1.0, 0.0, 0.0], atol=1e-12)
    for k in range(3):
        ek = gft(spec, spec.eigenvectors[:, k])
        expected = np.zeros(3)
        expected[k] = 1.0
        np.testing.assert_allclose(ek, expected, atol=1e-12)


def test_gft_matches_dense_multiply():
    rng = np.random.default_rng(7)
    spec = eig_laplacian(unit_path3())
    a = rng.standard_normal(3)
    np.testing.assert_allclose(gft(spec, a), spec.eigenvectors.T @ a, atol=1e-14)


def test_gft_parseval(case14_lap):
    rng = np.random.default_rng(3)
    spec = eig_laplacian(case14_lap)
    for _ in range(10):
        a = rng.standard_normal(spec.n)
        assert abs(np.linalg.norm(gft(spec, a)) - np.linalg.norm(a)) < 1e-10


def test_igft_roundtrip():
    rng = np.random.default_rng(11)
    spec = eig_laplacian(unit_path3())
    a = rng.standard_normal(3)
    np.testing.assert_allclose(igft(spec, gft(spec, a)), a, atol=1e-10)
    e1 = np.zeros(3)
    e1[0] = 1.0
    np.testing.assert_allclose(np.abs(igft(spec, e1)), np.full(3, 1 / np.sqrt(3)),
                               atol=1e-12)


def test_dimension_mismatch():
    spec = eig_laplacian(unit_path3())
    with pytest.raises(DimensionMismatch):
        gft(spec, np.ones(4))
    with pytest.raises(DimensionMismatch):
        igft(spec, np.ones(2))
    with pytest.raises(DimensionMismatch):
        dirichlet_energy(unit_path3(), np.ones(5))
    with pytest.raises(DimensionMismatch):
        apply_graph_filter(spec, np.ones(2), np.ones(3))


def test_dirichlet_constant_zero(toy5_lap):
    assert dirichlet_energy(toy5_lap, np.full(5, 3.7)) == pytest.approx(0.0, abs=1e-12)


def test_dirichlet_path3_hand_value():
    lap = unit_path3()
    assert dirichlet_energy(lap, np.array([1.0, 2.0, 4.0])) == pytest.approx(5.0)
    assert dirichlet_energy_edge_sum(lap, np.array([1.0, 2.0, 4.0])) == pytest.approx(5.0)


def test_dirichlet_three_forms_agree_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        lap = random_connected_laplacian(rng)
        spec = eig_laplacian(lap)
        a = rng.standard_normal(lap.n_bus)
        e_quad = dirichlet_energy(lap, a)
        e_edge = dirichlet_energy_edge_sum(lap, a)
        e_spec = dirichlet_energy_spectral(spec, a)
        scale = max(abs(e_quad), 1e-12)
        assert abs(e_quad - e_edge) / scale < 1e-8
        assert abs(e_quad - e_spec) / scale < 1e-8


def test_filter_identity_and_projection():
    spec = eig_laplacian(unit_path3())
    rng = np.random.default_rng(5)
    a = rng.standard_normal(3)
    np.testing.assert_allclose(apply_graph_filter(spec, np.ones(3), a), a, atol=1e-12)
    const = np.full(3, 1 / np.sqrt(3))
    psi = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(apply_graph_filter(spec, psi, const), const, atol=1e-12)


def test_inverse_laplacian_filter_recovers_state(case14_lap):
    """Filtering L @ theta with the 1/lambda response recovers theta up to a
    constant shift; oracle is the pseudo-inverse solve."""
    rng = np.random.default_rng(17)
    spec = eig_laplacian(case14_lap)
    theta = rng.standard_normal(spec.n) * 0.2
    z = case14_lap.matrix @ theta
    psi = inverse_laplacian_response(spec, default_c2(spec))
    rec = apply_graph_filter(spec, psi, z)
    oracle = np.linalg.pinv(case14_lap.matrix) @ z
    np.testing.assert_allclose(rec - rec.mean(), oracle - oracle.mean(), atol=1e-8)
    np.testing.assert_allclose(rec - rec.mean(), theta - theta.mean(), atol=1e-8)


def test_lowpass_analysis_path3():
    spec = eig_laplacian(unit_path3())
    ana = lowpass_analysis(spec, c2=10.0)
    np.testing.assert_allclose(ana.eta, [1.0 / 30.0, 1.0 / 3.0], atol=1e-12)
    assert ana.lowpass_orders() == [1, 2]
    np.testing.assert_allclose(ana.frequency_response, [30.0, 1.0, 1.0 / 3.0],
                               atol=1e-12)


def test_lowpass_boundary_and_large_c2():
    spec = eig_laplacian(unit_path3())
    boundary = lowpass_analysis(spec, c2=1.0 / (3 * 1.0))
    assert boundary.eta[0] == pytest.approx(1.0)
    assert 1 not in boundary.lowpass_orders()
    big = lowpass_analysis(spec, c2=1e4 / (3 * 1.0))
    assert big.eta[0] < 1e-3


def test_lowpass_disconnected_raises():
    w = {(1, 2): 1.0}
    L = np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    spec = eig_laplacian(LaplacianMatrix(matrix=L, edge_weights=w))
    with pytest.raises(ZeroLambda2):
        lowpass_analysis(spec, 10.0)


def test_smoothness_report_values(case14, case14_lap):
    rep = smoothness_report(case14, case14_lap)
    assert rep.theta_ratio == pytest.approx(0.6617, rel=0.01)
    assert rep.vmag_ratio == pytest.approx(0.0036, rel=0.05)
    assert rep.power_ratio == pytest.approx(16.4079, rel=0.01)
    assert rep.theta_gft.shape == (14,)


def test_smoothness_flat_case(toy5, toy5_lap):
    flat = np.ones(5)
    rep = smoothness_report(toy5, toy5_lap, theta=np.zeros(5), vmag=flat)
    assert rep.theta_ratio == 0.0
    assert rep.vmag_ratio == pytest.approx(0.0, abs=1e-12)


def test_table_ordering_both_conventions(case14, case30, case57, case118):
    for net in (case14, case30, case57, case118):
        for convention in ("susceptance", "inverse-reactance"):
            lap = build_laplacian(net, convention=convention)
            rep = smoothness_report(net, lap)
            assert rep.vmag_ratio < rep.theta_ratio < rep.power_ratio
            assert rep.power_ratio / rep.theta_ratio >= 10.0


def test_lowpass_energy_concentration(case14, case30, case57, case118):
    for net in (case14, case30, case57, case118):
        lap = build_laplacian(net)
        spec = eig_laplacian(lap)
        theta = net.angles()
        theta = theta - theta[net.reference_bus - 1]
        coeffs = gft(spec, theta)
        k = int(np.ceil(net.n_bus / 4))
        frac = np.sum(coeffs[:k] ** 2) / np.sum(coeffs ** 2)
        assert frac > 0.9
