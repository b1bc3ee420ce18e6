"""Bus-selection policies for sensor placement: the estimation-error lower
bound used as objective, greedy selection, E-design, random, and an
exhaustive oracle.

Selection works at bus level: measuring a bus provides its injection row
(a row of L) and both flow directions on every incident merged edge.  The
placement objective itself is evaluated on the injection rows only, i.e.
the candidate measurement matrix is L restricted to the selected buses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import SingularRegularizedSystem, TooLarge
from .gspdc import laplacian_free_block

#: reciprocal-condition floor shared by the singularity gates
RCOND_FLOOR = 1e-10


@dataclass(frozen=True)
class BusSelection:
    buses: tuple              # selected bus ids in selection order
    sensor_rows: tuple        # induced rows of the DC measurement model

    @property
    def q(self):
        return len(self.buses)


@dataclass(frozen=True)
class CRBReport:
    value: float              # Tr(K R_S K^T) >= 0
    bias_gradient_norm: float # Frobenius norm of K H - I


def induced_sensor_rows(lap, buses):
    """DC model rows provided by measuring `buses`: one injection row per bus
    plus both flow directions on all incident merged edges, deduplicated."""
    edges = lap.edges()
    chosen = set(buses)
    rows = {b - 1 for b in chosen}
    n = lap.n_bus
    for i, (k, m) in enumerate(edges):
        if k in chosen or m in chosen:
            rows.add(n + 2 * i)
            rows.add(n + 2 * i + 1)
    return tuple(sorted(rows))


def _injection_noise(R, buses, lap):
    """Noise covariance block of the injection sensors at `buses`."""
    idx = np.array([b - 1 for b in buses], int)
    R = np.asarray(R, float)
    if R.ndim == 0:
        return float(R) * np.eye(len(idx))
    if R.ndim == 1:
        return np.diag(R[idx])
    return R[np.ix_(idx, idx)]


def crb(lap, buses, mu, R, reference_bus=1):
    """Estimation-error lower bound Tr(K R_S K^T) for a bus selection.

    K = (L_S^T R_S^-1 L_S + mu L_Vbar)^-1 L_S^T R_S^-1 with L_S the selected
    injection rows of L restricted to the free columns.  Computed via
    factorization (solve then Frobenius accumulation), never an explicit
    inverse.  `R` may be a scalar variance, a length-N diagonal, or an N x N
    matrix over the injection sensors.
    """
    buses = sorted(set(buses))
    n = lap.n_bus
    mask = np.ones(n, bool)
    mask[reference_bus - 1] = False
    Ls = lap.matrix[np.ix_([b - 1 for b in buses], np.flatnonzero(mask))]
    Rs = _injection_noise(R, buses, lap)

    d = np.diagonal(Rs)
    diag_only = np.count_nonzero(Rs - np.diag(d)) == 0
    if diag_only:
        Lw = Ls / d[:, None]
        half = Ls / np.sqrt(d)[:, None]          # R_S^{-1/2} L_S
    else:
        c_r = scipy.linalg.cho_factor(Rs, lower=True)
        Lw = scipy.linalg.cho_solve(c_r, Ls)
        half = scipy.linalg.solve_triangular(c_r[0], Ls, lower=True)
    A = Ls.T @ Lw + mu * laplacian_free_block(lap, reference_bus)
    try:
        cf = scipy.linalg.cho_factor(A)
    except np.linalg.LinAlgError as exc:
        raise SingularRegularizedSystem("regularized matrix is singular") from exc
    piv = np.diagonal(cf[0])
    if np.min(np.abs(piv)) <= 1e-6 * np.max(np.abs(piv)):
        # suspicious pivots: confirm conditioning with the exact spectrum
        w = np.linalg.eigvalsh(A)
        if w[0] <= RCOND_FLOOR * max(w[-1], 1e-300):
            raise SingularRegularizedSystem("regularized matrix is numerically singular")
    # Tr(K R K^T) = || A^-1 (R^{-1/2} L_S)^T ||_F^2
    X = scipy.linalg.cho_solve(cf, half.T)
    value = float(np.sum(X * X))
    KH = scipy.linalg.cho_solve(cf, Ls.T @ Lw)
    bias_grad = KH - np.eye(n - 1)
    return CRBReport(value=value, bias_gradient_norm=float(np.linalg.norm(bias_grad)))


def crb_pseudoinverse(lap, buses, mu, R, reference_bus=1):
    """Oracle route: Tr(K H (H^T R^-1 H)^+ H^T K^T) with an SVD pseudo-inverse.

    Algebraically equal to `crb` (A A^+ A = A); kept as an independent
    cross-check of the factorized path.
    """
    buses = sorted(set(buses))
    n = lap.n_bus
    mask = np.ones(n, bool)
    mask[reference_bus - 1] = False
    Ls = lap.matrix[np.ix_([b - 1 for b in buses], np.flatnonzero(mask))]
    Rs = _injection_noise(R, buses, lap)
    Rinv = np.linalg.inv(Rs)
    G = Ls.T @ Rinv @ Ls
    A = G + mu * laplacian_free_block(lap, reference_bus)
    K = np.linalg.solve(A, Ls.T @ Rinv)
    mid = K @ Ls @ np.linalg.pinv(G) @ Ls.T @ K.T
    return float(np.trace(mid))


def greedy_selection(lap, q, mu, R, reference_bus=1):
    """Iteratively add the bus whose inclusion minimizes the CRB.

    Ties break toward the lowest bus id; the selection order is recorded.
    Each candidate is evaluated by a full refactorization (simple and
    correct at this scale; block updates are a possible optimization).
    """
    n = lap.n_bus
    if not 1 <= q <= n:
        raise ValueError(f"q must be in 1..{n}")
    chosen = []
    for _ in range(q):
        best_bus, best_val = None, np.inf
        for w in range(1, n + 1):
            if w in chosen:
                continue
            try:
                val = crb(lap, chosen + [w], mu, R, reference_bus).value
            except SingularRegularizedSystem:
                continue
            if best_bus is None or val < best_val - 1e-15 * abs(best_val):
                best_bus, best_val = w, val
        if best_bus is None:
            # all candidates singular (mu = 0, tiny selections): fall back to
            # lowest unchosen id so the selection is still well-defined
            best_bus = min(b for b in range(1, n + 1) if b not in chosen)
        chosen.append(best_bus)
    return BusSelection(buses=tuple(chosen),
                        sensor_rows=induced_sensor_rows(lap, chosen))


def edesign_selection(spectrum, q, r_cutoff, lap=None):
    """Greedy maximization of the smallest singular value of V_{S, 1..R}.

    Assumes the measured signal is band-limited to the first `r_cutoff`
    graph frequencies; one bus is added per step, ties to the lowest id.
    """
    n = spectrum.n
    if not 1 <= q <= n:
        raise ValueError(f"q must be in 1..{n}")
    if r_cutoff > n:
        raise ValueError("r_cutoff must be <= N")
    Vr = spectrum.eigenvectors[:, :r_cutoff]
    chosen = []
    for _ in range(q):
        best_bus, best_val = None, -np.inf
        for w in range(1, n + 1):
            if w in chosen:
                continue
            rows = [b - 1 for b in chosen] + [w - 1]
            smin = np.linalg.svd(Vr[rows], compute_uv=False)[-1]
            if best_bus is None or smin > best_val + 1e-15 * abs(best_val):
                best_bus, best_val = w, smin
        chosen.append(best_bus)
    rows = induced_sensor_rows(lap, chosen) if lap is not None else ()
    return BusSelection(buses=tuple(chosen), sensor_rows=rows)


def random_selection(n_buses, q, rng, lap=None):
    """Uniform selection of q distinct buses; seeded and reproducible."""
    if q > n_buses:
        raise ValueError("q must be <= N")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    buses = tuple(int(b) + 1 for b in rng.choice(n_buses, size=q, replace=False))
    rows = induced_sensor_rows(lap, buses) if lap is not None else ()
    return BusSelection(buses=buses, sensor_rows=rows)


def exhaustive_selection(lap, q, mu, R, reference_bus=1, budget=10 ** 6):
    """Global CRB minimizer by enumeration; oracle for greedy quality.

    Guarded: raises TooLarge when C(N, q) exceeds the budget.
    """
    n = lap.n_bus
    if math.comb(n, q) > budget:
        raise TooLarge(f"C({n},{q}) exceeds enumeration budget {budget}")
    best_combo, best_val = None, np.inf
    for combo in itertools.combinations(range(1, n + 1), q):
        try:
            val = crb(lap, list(combo), mu, R, reference_bus).value
        except SingularRegularizedSystem:
            continue
        if best_combo is None or val < best_val - 1e-15 * abs(best_val):
            best_combo, best_val = combo, val
    if best_combo is None:
        raise SingularRegularizedSystem("every selection of this size is singular")
    return BusSelection(buses=best_combo,
                        sensor_rows=induced_sensor_rows(lap, best_combo))
