"""DC power-flow measurement model: H assembly, synthetic measurements,
classical WLS estimation, and the numerical observability test.

Row layout of H (0-based `row` fields):
  rows 0 .. N-1        bus injections in bus order (these rows equal L = B)
  rows N .. N+2P-1     branch flows, one pair per merged edge in canonical
                       (sorted) edge order: k->n then n->k, with k < n.
The flow row for direction k->n is W_kn (e_k - e_n), i.e. the modeled flow
is W_kn (theta_k - theta_n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, Unobservable

INJECTION = "injection"
FLOW = "flow"


@dataclass(frozen=True)
class SensorIndex:
    kind: str                 # INJECTION or FLOW
    row: int                  # 0-based position in H
    bus: int = 0              # injection bus (1-based), 0 for flows
    from_bus: int = 0         # flow direction, 1-based
    to_bus: int = 0


@dataclass(frozen=True)
class DCMeasurementModel:
    H: np.ndarray             # M x N
    sensors: tuple            # SensorIndex per row
    R: np.ndarray             # M x M SPD noise covariance (sigma^2 I default)
    reference_bus: int        # 1-based
    edges: tuple              # merged (k, n) pairs in row order

    @property
    def n_bus(self):
        return self.H.shape[1]

    @property
    def n_measurements(self):
        return self.H.shape[0]

    def free_columns(self):
        """Column indices of the non-reference buses (the estimated set)."""
        return np.array([j for j in range(self.n_bus) if j != self.reference_bus - 1])


@dataclass(frozen=True)
class DCState:
    theta: np.ndarray         # length N, theta[reference] = 0 exactly
    reference_bus: int

    def free(self):
        mask = np.ones(len(self.theta), bool)
        mask[self.reference_bus - 1] = False
        return self.theta[mask]


def state_from_free(theta_free, n_bus, reference_bus):
    theta = np.zeros(n_bus)
    mask = np.ones(n_bus, bool)
    mask[reference_bus - 1] = False
    theta[mask] = theta_free
    return DCState(theta=theta, reference_bus=reference_bus)


def build_dc_model(lap, sigma2, reference_bus=1):
    """Assemble H from a Laplacian: N injection rows (= L) plus 2P flow rows.

    sigma2 = 0 is allowed for noiseless studies; the stored R then falls back
    to identity weighting (WLS estimates are invariant to scaling R anyway).
    """
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    n = lap.n_bus
    edges = lap.edges()
    m = n + 2 * len(edges)
    H = np.zeros((m, n))
    H[:n, :] = lap.matrix
    sensors = [SensorIndex(kind=INJECTION, row=i, bus=i + 1) for i in range(n)]
    r = n
    for (k, nn) in edges:
        w = lap.edge_weights[(k, nn)]
        H[r, k - 1] = w
        H[r, nn - 1] = -w
        sensors.append(SensorIndex(kind=FLOW, row=r, from_bus=k, to_bus=nn))
        H[r + 1, nn - 1] = w
        H[r + 1, k - 1] = -w
        sensors.append(SensorIndex(kind=FLOW, row=r + 1, from_bus=nn, to_bus=k))
        r += 2
    R = np.eye(m) * sigma2
    return DCMeasurementModel(H=H, sensors=tuple(sensors), R=R,
                              reference_bus=reference_bus, edges=tuple(edges))


def generate_dc_measurements(model, state, rng):
    """z = H theta_true + e with e ~ N(0, R), drawn from the given generator.

    `rng` may be an integer seed or a numpy Generator; reproducible per seed.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    z = model.H @ state.theta
    if not np.any(model.R):
        return z
    if np.count_nonzero(model.R - np.diag(np.diagonal(model.R))) == 0:
        e = np.sqrt(np.diagonal(model.R)) * rng.standard_normal(model.n_measurements)
    else:
        e = np.linalg.cholesky(model.R) @ rng.standard_normal(model.n_measurements)
    return z + e


def _whitened_normal(model, rows, z_s):
    """H_S^T R_S^-1 H_S restricted to free columns, and H_S^T R_S^-1 z_S."""
    cols = model.free_columns()
    Hs = model.H[np.ix_(rows, cols)]
    Rs = model.R[np.ix_(rows, rows)]
    d = np.diagonal(Rs)
    if not np.any(Rs):
        Hw = Hs          # zero noise: unit weighting
    elif np.count_nonzero(Rs - np.diag(d)) == 0:
        Hw = Hs / d[:, None]
    else:
        Hw = scipy.linalg.cho_solve(scipy.linalg.cho_factor(Rs), Hs)
    A = Hs.T @ Hw
    b = Hw.T @ z_s if z_s is not None else None
    return A, b, Hs


def resolve_rows(model, sensors):
    """Normalize a sensor subset to a sorted 0-based row-index array."""
    if sensors is None:
        return np.arange(model.n_measurements)
    rows = np.asarray(sorted(sensors), int)
    if len(rows) and (rows[0] < 0 or rows[-1] >= model.n_measurements):
        raise DimensionMismatch("sensor row index out of range")
    return rows


def wls_estimate(model, z, sensors=None):
    """Classical WLS estimate on an observable sensor subset.

    `z` holds the measured values for `sensors` (sorted row order); with
    sensors=None it is the full measurement vector.  Raises Unobservable when
    the normal-equation matrix is numerically singular.
    """
    rows = resolve_rows(model, sensors)
    z = np.asarray(z, float)
    if z.shape != (len(rows),):
        raise DimensionMismatch(f"z length {z.shape} != |S| = {len(rows)}")
    A, b, _ = _whitened_normal(model, rows, z)
    try:
        c, low = scipy.linalg.cho_factor(A)
    except np.linalg.LinAlgError as exc:
        raise Unobservable("normal-equation matrix is singular") from exc
    except scipy.linalg.LinAlgError as exc:
        raise Unobservable("normal-equation matrix is singular") from exc
    # Cholesky may pass on nearly singular systems; gate on conditioning.
    w = np.linalg.eigvalsh(A)
    if w[0] <= 1e-10 * max(w[-1], 1e-300):
        raise Unobservable("normal-equation matrix is numerically singular")
    theta_free = scipy.linalg.cho_solve((c, low), b)
    return state_from_free(theta_free, model.n_bus, model.reference_bus)


def is_observable(model, sensors):
    """Rank test of Definition-2 type: rank(H_{S, Vbar}) == N - 1.

    Rank is computed by SVD with tolerance max(M, N) * eps * sigma_max.
    """
    rows = resolve_rows(model, sensors)
    if len(rows) == 0:
        return False
    Hs = model.H[np.ix_(rows, model.free_columns())]
    return np.linalg.matrix_rank(Hs) == model.n_bus - 1
