"""AC power-flow measurement functions, analytic Jacobian, gain matrix, and
the AC observability test.

Full polar pi-model: series impedance r + jx, total line charging, off-nominal
tap ratio on the from side, and phase shift.  Injections follow
P_i = v_i sum_j v_j (G_ij cos th_ij + B_ij sin th_ij) and the reactive
analogue; branch flows come from the per-branch two-port admittances.

Measurement row layout (mirrors the DC model, active block first):
  [P injections (N)] [P flows (2P)] [Q injections (N)] [Q flows (2P)]
with flows ordered per merged edge (k < n): k->n then n->k.  A flow sensor on
a merged edge measures the total transfer over all parallel circuits.

The state excludes the reference bus entirely: x = [theta_free, v_free] with
theta_ref = 0 and v_ref fixed from the case, so x has 2N - 2 components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netcase import merged_edge_pairs

P_INJECTION = "p_injection"
Q_INJECTION = "q_injection"
P_FLOW = "p_flow"
Q_FLOW = "q_flow"


@dataclass(frozen=True)
class ACState:
    theta: np.ndarray         # angles of the non-reference buses, radians
    v: np.ndarray             # magnitudes of the non-reference buses, p.u.
    reference_bus: int        # 1-based
    v_ref: float              # reference magnitude, fixed from the case
    n_bus: int

    def as_vector(self):
        return np.concatenate([self.theta, self.v])

    def replace_vector(self, x):
        nfree = self.n_bus - 1
        return ACState(theta=x[:nfree].copy(), v=x[nfree:].copy(),
                       reference_bus=self.reference_bus,
                       v_ref=self.v_ref, n_bus=self.n_bus)

    def full_angles(self):
        th = np.zeros(self.n_bus)
        mask = np.ones(self.n_bus, bool)
        mask[self.reference_bus - 1] = False
        th[mask] = self.theta
        return th

    def full_magnitudes(self):
        vm = np.full(self.n_bus, self.v_ref)
        mask = np.ones(self.n_bus, bool)
        mask[self.reference_bus - 1] = False
        vm[mask] = self.v
        return vm


@dataclass(frozen=True)
class ACSensor:
    kind: str
    row: int
    bus: int = 0
    from_bus: int = 0
    to_bus: int = 0


class ACMeasurementModel:
    """Measurement function h(x), its Jacobian, and sensor bookkeeping."""

    def __init__(self, net, sigma2):
        if sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        self.net = net
        self.n_bus = net.n_bus
        self.reference_bus = net.reference_bus
        self.v_ref = net.buses[self.reference_bus - 1].voltage_magnitude
        self.sigma2 = sigma2
        self.edges = tuple(merged_edge_pairs(net))
        n = self.n_bus

        branches = net.in_service_branches()
        nb = len(branches)
        self._f = np.array([br.from_bus - 1 for br in branches], int)
        self._t = np.array([br.to_bus - 1 for br in branches], int)
        ys = np.array([1.0 / (br.resistance + 1j * br.reactance) for br in branches])
        bc = np.array([br.total_charging_susceptance for br in branches])
        a = np.array([br.tap_ratio * np.exp(1j * br.phase_shift) for br in branches])
        self._yff = (ys + 1j * bc / 2.0) / (a * np.conj(a))
        self._yft = -ys / np.conj(a)
        self._ytf = -ys / a
        self._ytt = ys + 1j * bc / 2.0

        Y = np.zeros((n, n), complex)
        np.add.at(Y, (self._f, self._f), self._yff)
        np.add.at(Y, (self._f, self._t), self._yft)
        np.add.at(Y, (self._t, self._f), self._ytf)
        np.add.at(Y, (self._t, self._t), self._ytt)
        for b in net.buses:
            Y[b.id - 1, b.id - 1] += b.shunt_conductance + 1j * b.shunt_susceptance
        self.ybus = Y

        edge_pos = {e: i for i, e in enumerate(self.edges)}
        # flow slot of each branch side: from-side and to-side directed rows
        self._fwd_slot = np.empty(nb, int)   # slot of the f->t flow
        self._rev_slot = np.empty(nb, int)   # slot of the t->f flow
        for i in range(nb):
            k, m = self._f[i] + 1, self._t[i] + 1
            e = edge_pos[tuple(sorted((k, m)))]
            if k < m:
                self._fwd_slot[i] = 2 * e
                self._rev_slot[i] = 2 * e + 1
            else:
                self._fwd_slot[i] = 2 * e + 1
                self._rev_slot[i] = 2 * e

        p = len(self.edges)
        self.n_active = n + 2 * p
        self.n_measurements = 2 * self.n_active
        sensors = []
        for i in range(n):
            sensors.append(ACSensor(kind=P_INJECTION, row=i, bus=i + 1))
        for i, (k, m) in enumerate(self.edges):
            sensors.append(ACSensor(kind=P_FLOW, row=n + 2 * i, from_bus=k, to_bus=m))
            sensors.append(ACSensor(kind=P_FLOW, row=n + 2 * i + 1, from_bus=m, to_bus=k))
        off = self.n_active
        for s in list(sensors):
            kind = Q_INJECTION if s.kind == P_INJECTION else Q_FLOW
            sensors.append(ACSensor(kind=kind, row=s.row + off, bus=s.bus,
                                    from_bus=s.from_bus, to_bus=s.to_bus))
        self.sensors = tuple(sensors)
        self.R = np.eye(self.n_measurements) * sigma2

        mask = np.ones(n, bool)
        mask[self.reference_bus - 1] = False
        self._free = np.flatnonzero(mask)
        self._col_of = -np.ones(n, int)
        self._col_of[self._free] = np.arange(n - 1)

    # -- state helpers ------------------------------------------------------

    def flat_start(self):
        nfree = self.n_bus - 1
        return ACState(theta=np.zeros(nfree), v=np.ones(nfree),
                       reference_bus=self.reference_bus,
                       v_ref=self.v_ref, n_bus=self.n_bus)

    def state_from_case(self):
        """Ground-truth state from the case file's solved voltages."""
        va = self.net.angles()
        va = va - va[self.reference_bus - 1]
        vm = self.net.magnitudes()
        return ACState(theta=va[self._free], v=vm[self._free],
                       reference_bus=self.reference_bus,
                       v_ref=self.v_ref, n_bus=self.n_bus)

    def _complex_voltage(self, state):
        return state.full_magnitudes() * np.exp(1j * state.full_angles())

    # -- measurement function ------------------------------------------------

    def _branch_flows(self, V):
        Vf, Vt = V[self._f], V[self._t]
        If = self._yff * Vf + self._yft * Vt
        It = self._ytf * Vf + self._ytt * Vt
        return Vf * np.conj(If), Vt * np.conj(It)

    def measure(self, state):
        """h(x): all M measurement values at the given state."""
        V = self._complex_voltage(state)
        s_inj = V * np.conj(self.ybus @ V)
        sf, st = self._branch_flows(V)
        p = len(self.edges)
        flow = np.zeros(2 * p, complex)
        np.add.at(flow, self._fwd_slot, sf)
        np.add.at(flow, self._rev_slot, st)
        z = np.empty(self.n_measurements)
        n = self.n_bus
        z[:n] = s_inj.real
        z[n:self.n_active] = flow.real
        z[self.n_active:self.n_active + n] = s_inj.imag
        z[self.n_active + n:] = flow.imag
        return z

    # -- Jacobian -------------------------------------------------------------

    def jacobian(self, state):
        """H(x) = dh/dx, an M x (2N - 2) matrix, by analytic differentiation."""
        n = self.n_bus
        V = self._complex_voltage(state)
        Vn = V / np.abs(V)
        Ibus = self.ybus @ V

        dS_dva = 1j * np.diag(V) @ np.conj(np.diag(Ibus) - self.ybus @ np.diag(V))
        dS_dvm = np.diag(V) @ np.conj(self.ybus @ np.diag(Vn)) \
            + np.diag(np.conj(Ibus)) @ np.diag(Vn)

        f, t = self._f, self._t
        Vf, Vt, Vnf, Vnt = V[f], V[t], Vn[f], Vn[t]
        If = self._yff * Vf + self._yft * Vt
        It = self._ytf * Vf + self._ytt * Vt

        dSf_dthf = 1j * Vf * np.conj(If) - 1j * Vf * np.conj(self._yff * Vf)
        dSf_dtht = -1j * Vf * np.conj(self._yft * Vt)
        dSf_dvf = Vnf * np.conj(If) + Vf * np.conj(self._yff * Vnf)
        dSf_dvt = Vf * np.conj(self._yft * Vnt)

        dSt_dtht = 1j * Vt * np.conj(It) - 1j * Vt * np.conj(self._ytt * Vt)
        dSt_dthf = -1j * Vt * np.conj(self._ytf * Vf)
        dSt_dvt = Vnt * np.conj(It) + Vt * np.conj(self._ytt * Vnt)
        dSt_dvf = Vt * np.conj(self._ytf * Vnf)

        p = len(self.edges)
        dflow_dva = np.zeros((2 * p, n), complex)
        dflow_dvm = np.zeros((2 * p, n), complex)
        np.add.at(dflow_dva, (self._fwd_slot, f), dSf_dthf)
        np.add.at(dflow_dva, (self._fwd_slot, t), dSf_dtht)
        np.add.at(dflow_dvm, (self._fwd_slot, f), dSf_dvf)
        np.add.at(dflow_dvm, (self._fwd_slot, t), dSf_dvt)
        np.add.at(dflow_dva, (self._rev_slot, t), dSt_dtht)
        np.add.at(dflow_dva, (self._rev_slot, f), dSt_dthf)
        np.add.at(dflow_dvm, (self._rev_slot, t), dSt_dvt)
        np.add.at(dflow_dvm, (self._rev_slot, f), dSt_dvf)

        cols = self._free
        H = np.empty((self.n_measurements, 2 * (n - 1)))
        nf = n - 1
        H[:n, :nf] = dS_dva.real[:, cols]
        H[:n, nf:] = dS_dvm.real[:, cols]
        H[n:self.n_active, :nf] = dflow_dva.real[:, cols]
        H[n:self.n_active, nf:] = dflow_dvm.real[:, cols]
        H[self.n_active:self.n_active + n, :nf] = dS_dva.imag[:, cols]
        H[self.n_active:self.n_active + n, nf:] = dS_dvm.imag[:, cols]
        H[self.n_active + n:, :nf] = dflow_dva.imag[:, cols]
        H[self.n_active + n:, nf:] = dflow_dvm.imag[:, cols]
        return H


def build_ac_model(net, sigma2=0.01):
    return ACMeasurementModel(net, sigma2)


def ac_measure(model, state):
    return model.measure(state)


def ac_jacobian(model, state):
    return model.jacobian(state)


def ac_gain(H_s, R_s):
    """Gain matrix G = H_S^T R_S^-1 H_S (symmetric PSD)."""
    d = np.diagonal(R_s)
    if not np.any(R_s):
        Hw = H_s          # zero noise: unit weighting
    elif np.count_nonzero(R_s - np.diag(d)) == 0:
        Hw = H_s / d[:, None]
    else:
        Hw = np.linalg.solve(R_s, H_s)
    return H_s.T @ Hw


def gain_rcond(G):
    """Reciprocal condition estimate of a symmetric PSD gain matrix."""
    w = np.linalg.eigvalsh(G)
    lo, hi = max(w[0], 0.0), max(w[-1], 0.0)
    if hi == 0.0:
        return 0.0
    return lo / hi


def ac_is_observable(model, state, sensors, rcond_floor=1e-10):
    """True iff the gain matrix at `state` is numerically nonsingular."""
    rows = np.asarray(sorted(sensors), int) if sensors is not None \
        else np.arange(model.n_measurements)
    if len(rows) == 0:
        return False
    H = model.jacobian(state)[rows]
    G = ac_gain(H, model.R[np.ix_(rows, rows)])
    return gain_rcond(G) > rcond_floor


def induced_ac_rows(model, buses):
    """AC sensor rows for measured buses: P,Q injections plus both-direction
    P,Q flows on every incident merged edge (mirrors the DC rule)."""
    chosen = set(buses)
    n = model.n_bus
    rows = {b - 1 for b in chosen}
    for i, (k, m) in enumerate(model.edges):
        if k in chosen or m in chosen:
            rows.add(n + 2 * i)
            rows.add(n + 2 * i + 1)
    active = sorted(rows)
    off = model.n_active
    return tuple(active + [r + off for r in active])


def generate_ac_measurements(model, state, rng):
    """z = h(x_true) + e with e ~ N(0, sigma^2 I); seeded and reproducible."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    z = model.measure(state)
    sigma = np.sqrt(model.sigma2) if model.sigma2 > 0 else 0.0
    return z + sigma * rng.standard_normal(model.n_measurements)
