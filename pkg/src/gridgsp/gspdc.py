"""Smoothness-regularized DC state estimation: GSP-WLS, the pm-WLS baseline,
and reconstruction of withheld power measurements.

The regularized coefficient matrix H_S^T R_S^-1 H_S + mu * L_Vbar is solved by
Cholesky factorization with an LDL^T + diagonal-jitter fallback; explicit
inverses are never formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dcmodel import DCState, _whitened_normal, resolve_rows, state_from_free
from .exceptions import DimensionMismatch, SingularRegularizedSystem, SingularSystem


@dataclass(frozen=True)
class GspConfig:
    mu: float = 0.1               # Lagrange/regularization multiplier, >= 0
    epsilon: float | None = None  # smoothness budget; documentation only

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be >= 0")


@dataclass(frozen=True)
class PriorModel:
    theta_prior: np.ndarray       # length N-1, free-bus order
    R_prior_inv: np.ndarray       # (N-1) x (N-1) symmetric PSD


def solve_spd(A, b, error_cls=SingularRegularizedSystem, jitter_scale=1e-12):
    """Solve A x = b for symmetric positive (semi)definite A.

    Tries Cholesky; on failure falls back to LDL^T with a tiny diagonal
    jitter (jitter_scale * trace / n).  Raises `error_cls` when A is
    numerically rank-deficient rather than merely borderline.
    """
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(A), b)
    except np.linalg.LinAlgError:
        pass
    w = np.linalg.eigvalsh(A)
    if w[0] <= 1e-12 * max(w[-1], 1e-300):
        raise error_cls("coefficient matrix is numerically singular")
    n = A.shape[0]
    jitter = jitter_scale * np.trace(A) / n
    lu, d, perm = scipy.linalg.ldl(A + jitter * np.eye(n))
    # LDL^T solve: A = P L D L^T P^T with lu already permuted
    y = scipy.linalg.solve_triangular(lu[perm], np.asarray(b)[perm], lower=True,
                                      unit_diagonal=True)
    y = scipy.linalg.solve(d, y)
    x = scipy.linalg.solve_triangular(lu[perm].T, y, lower=False,
                                      unit_diagonal=True)
    out = np.empty_like(x)
    out[perm] = x
    return out


def laplacian_free_block(lap, reference_bus):
    """L with the reference row and column removed (L_Vbar)."""
    mask = np.ones(lap.n_bus, bool)
    mask[reference_bus - 1] = False
    return lap.matrix[np.ix_(mask, mask)]


def gsp_wls(model, z_s, sensors, lap, config):
    """GSP-WLS estimate: (H^T R^-1 H + mu L_Vbar)^-1 H^T R^-1 z_S.

    Does not require observability when mu > 0; with mu = 0 on an
    unobservable subset raises SingularRegularizedSystem.
    """
    rows = resolve_rows(model, sensors)
    z_s = np.asarray(z_s, float)
    if z_s.shape != (len(rows),):
        raise DimensionMismatch(f"z length {z_s.shape} != |S| = {len(rows)}")
    A, b, _ = _whitened_normal(model, rows, z_s)
    A = A + config.mu * laplacian_free_block(lap, model.reference_bus)
    theta_free = solve_spd(A, b, SingularRegularizedSystem)
    return state_from_free(theta_free, model.n_bus, model.reference_bus)


def pm_wls(model, z_s, sensors, prior):
    """Pseudo-measurement WLS: fuse measurements with a predicted state.

    theta_hat = (H^T R^-1 H + R_prior^-1)^-1 (H^T R^-1 z_S + R_prior^-1 theta_prior).
    Reduces to gsp_wls when theta_prior = 0 and R_prior^-1 = mu L_Vbar.
    """
    rows = resolve_rows(model, sensors)
    z_s = np.asarray(z_s, float)
    if z_s.shape != (len(rows),):
        raise DimensionMismatch(f"z length {z_s.shape} != |S| = {len(rows)}")
    nfree = model.n_bus - 1
    if prior.theta_prior.shape != (nfree,):
        raise DimensionMismatch("theta_prior length != N - 1")
    if len(rows) == 0:
        A = np.asarray(prior.R_prior_inv, float)
        b = prior.R_prior_inv @ prior.theta_prior
    else:
        A, b, _ = _whitened_normal(model, rows, z_s)
        A = A + prior.R_prior_inv
        b = b + prior.R_prior_inv @ prior.theta_prior
    theta_free = solve_spd(A, b, SingularSystem)
    return state_from_free(theta_free, model.n_bus, model.reference_bus)


def reconstruct_missing_power(model, state, sensors):
    """Predict the withheld measurements: z_hat = H_{M\\S, V} theta_hat.

    Returns (rows, values) where rows are the 0-based indices of M \\ S in
    ascending order.
    """
    held = set(resolve_rows(model, sensors).tolist())
    missing = np.array([r for r in range(model.n_measurements) if r not in held],
                       int)
    if len(missing) == 0:
        return missing, np.zeros(0)
    return missing, model.H[missing] @ state.theta
