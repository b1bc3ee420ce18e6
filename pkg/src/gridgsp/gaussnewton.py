"""Iterative AC state estimation: plain Gauss-Newton WLS, the regularized
variant with Dirichlet-energy terms on angles and magnitudes, and the
pseudo-measurement variant.

All three share one iteration core, so the zero-regularization special cases
coincide with the plain iteration bit-for-bit.  Pure Gauss-Newton steps, no
line search or damping; divergence shows up in the trace instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .acmodel import ac_gain, gain_rcond
from .exceptions import (
    DimensionMismatch,
    NonConvergence,
    SingularGain,
    SingularRegularizedGain,
)
from .gspdc import laplacian_free_block

RCOND_FLOOR = 1e-10


@dataclass(frozen=True)
class GNConfig:
    mu_theta: float = 0.0
    mu_v: float = 0.0
    delta: float = 1e-8           # convergence tolerance on the step norm
    max_iter: int = 20
    initial_state: object = None  # None -> flat voltage profile

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class GNTrace:
    step_norms: list = field(default_factory=list)
    objective_values: list = field(default_factory=list)   # J_reg at each iterate
    gain_rconds: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0


def _resolve_rows(model, sensors):
    if sensors is None:
        return np.arange(model.n_measurements)
    rows = np.asarray(sorted(sensors), int)
    if len(rows) and (rows[0] < 0 or rows[-1] >= model.n_measurements):
        raise DimensionMismatch("sensor row index out of range")
    return rows


def regularization_matrix(lap, reference_bus, mu_theta, mu_v):
    """Block-diagonal penalty diag(mu_theta * L_Vbar, mu_v * L_Vbar)."""
    Lf = laplacian_free_block(lap, reference_bus)
    nf = Lf.shape[0]
    M = np.zeros((2 * nf, 2 * nf))
    M[:nf, :nf] = mu_theta * Lf
    M[nf:, nf:] = mu_v * Lf
    return M


def flat_anchor(model):
    """x0 = [0, v_ref * 1]: zero angles, reference magnitude everywhere."""
    nf = model.n_bus - 1
    return np.concatenate([np.zeros(nf), np.full(nf, model.v_ref)])


def _objective(resid, rw, x, reg, anchor):
    d = x - anchor
    return float(resid @ rw + d @ (reg @ d))


def _core(model, z_s, rows, reg, anchor, cfg, singular_exc):
    """Shared Gauss-Newton loop for the plain/regularized/pm variants."""
    z_s = np.asarray(z_s, float)
    if z_s.shape != (len(rows),):
        raise DimensionMismatch(f"z length {z_s.shape} != |S| = {len(rows)}")
    state = cfg.initial_state if cfg.initial_state is not None else model.flat_start()
    x = state.as_vector()
    Rs = model.R[np.ix_(rows, rows)]
    rdiag = np.diagonal(Rs)
    zero_noise = not np.any(Rs)
    diag_only = np.count_nonzero(Rs - np.diag(rdiag)) == 0

    def whiten(resid):
        if zero_noise:
            return resid
        return resid / rdiag if diag_only else np.linalg.solve(Rs, resid)

    trace = GNTrace()
    resid = z_s - model.measure(state)[rows]
    rw = whiten(resid)
    trace.objective_values.append(_objective(resid, rw, x, reg, anchor))

    for _ in range(cfg.max_iter):
        H = model.jacobian(state)[rows]
        G = ac_gain(H, Rs) + reg
        rc = gain_rcond(G)
        trace.gain_rconds.append(rc)
        if rc <= RCOND_FLOOR:
            raise singular_exc("gain matrix is numerically singular")
        rhs = H.T @ rw - reg @ (x - anchor)
        dx = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), rhs)
        x = x + dx
        state = state.replace_vector(x)
        resid = z_s - model.measure(state)[rows]
        rw = whiten(resid)
        step = float(np.linalg.norm(dx))
        trace.step_norms.append(step)
        trace.objective_values.append(_objective(resid, rw, x, reg, anchor))
        trace.iterations += 1
        if step <= cfg.delta:
            trace.converged = True
            return state, trace
    raise NonConvergence(
        f"step norm {trace.step_norms[-1]:.3e} > {cfg.delta:.1e} "
        f"after {cfg.max_iter} iterations", state=state, trace=trace)


def gauss_newton_wls(model, z_s, sensors, cfg):
    """Plain Gauss-Newton WLS; requires observability at every iterate."""
    rows = _resolve_rows(model, sensors)
    nf2 = 2 * (model.n_bus - 1)
    zero = np.zeros((nf2, nf2))
    return _core(model, z_s, rows, zero, np.zeros(nf2), cfg, SingularGain)


def regularized_gauss_newton(model, z_s, sensors, lap, cfg):
    """Gauss-Newton with the smoothness penalty; works without observability
    when mu_theta > 0 or mu_v > 0.  Flat-profile initialization by default."""
    rows = _resolve_rows(model, sensors)
    reg = regularization_matrix(lap, model.reference_bus, cfg.mu_theta, cfg.mu_v)
    return _core(model, z_s, rows, reg, flat_anchor(model), cfg,
                 SingularRegularizedGain)


def pm_gauss_newton(model, z_s, sensors, x_prior, R_prior_inv, cfg):
    """Pseudo-measurement variant: anchor at a predicted state with weight
    R_prior_inv in place of the smoothness penalty."""
    rows = _resolve_rows(model, sensors)
    x_prior = np.asarray(x_prior, float)
    nf2 = 2 * (model.n_bus - 1)
    if x_prior.shape != (nf2,):
        raise DimensionMismatch("x_prior length != 2N - 2")
    return _core(model, z_s, rows, np.asarray(R_prior_inv, float), x_prior, cfg,
                 SingularRegularizedGain)


def regularized_gradient(model, z_s, sensors, reg, anchor, state):
    """First-order residual -H^T R^-1 (z - h) + reg (x - x0); zero at optima."""
    rows = _resolve_rows(model, sensors)
    z_s = np.asarray(z_s, float)
    Rs = model.R[np.ix_(rows, rows)]
    resid = z_s - model.measure(state)[rows]
    if not np.any(Rs):
        rw = resid
    elif np.count_nonzero(Rs - np.diag(np.diagonal(Rs))) == 0:
        rw = resid / np.diagonal(Rs)
    else:
        rw = np.linalg.solve(Rs, resid)
    H = model.jacobian(state)[rows]
    return -H.T @ rw + reg @ (state.as_vector() - anchor)
