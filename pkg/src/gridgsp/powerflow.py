"""Newton-Raphson AC power flow.

Utility used to produce and verify the solved voltages embedded in the
bundled case files (see tools/build_cases.py).  The Network type does not
record generator buses, so PV buses and their setpoints are passed in
explicitly.
"""

from __future__ import annotations

import numpy as np

from .acmodel import build_ac_model
from .exceptions import ConvergenceFailure


def solve_power_flow(net, pv_buses=(), vg=None, tol=1e-10, max_iter=50):
    """Solve the AC power flow of a parsed case.

    Scheduled injections come from the Network's per-bus active/reactive
    injection fields; `pv_buses` lists 1-based PV bus ids, `vg` maps bus id to
    the regulated magnitude (defaults to the case value).  The reference bus
    holds the case angle and magnitude.  Returns (vm, va) full-length arrays.
    """
    model = build_ac_model(net, sigma2=0.0)
    Y = model.ybus
    n = net.n_bus
    ref = net.reference_bus - 1
    pv = np.array(sorted(set(int(b) - 1 for b in pv_buses) - {ref}), int)
    pq = np.array([i for i in range(n) if i != ref and i not in set(pv)], int)
    pvpq = np.concatenate([pv, pq])

    vg = vg or {}
    vm = np.array([vg.get(b.id, b.voltage_magnitude) if (b.id - 1 in pv or b.id - 1 == ref)
                   else 1.0 for b in net.buses])
    va = np.full(n, net.buses[ref].voltage_angle)
    psch = net.active_injections()
    qsch = net.reactive_injections()

    for _ in range(max_iter):
        V = vm * np.exp(1j * va)
        S = V * np.conj(Y @ V)
        mism = np.concatenate([psch[pvpq] - S.real[pvpq], qsch[pq] - S.imag[pq]])
        if np.max(np.abs(mism)) < tol:
            return vm, va
        Ibus = Y @ V
        Vn = V / np.abs(V)
        dS_dva = 1j * np.diag(V) @ np.conj(np.diag(Ibus) - Y @ np.diag(V))
        dS_dvm = np.diag(V) @ np.conj(Y @ np.diag(Vn)) + np.diag(np.conj(Ibus)) @ np.diag(Vn)
        J = np.block([
            [dS_dva.real[np.ix_(pvpq, pvpq)], dS_dvm.real[np.ix_(pvpq, pq)]],
            [dS_dva.imag[np.ix_(pq, pvpq)],  dS_dvm.imag[np.ix_(pq, pq)]],
        ])
        dx = np.linalg.solve(J, mism)
        va[pvpq] += dx[:len(pvpq)]
        vm[pq] += dx[len(pvpq):]
    raise ConvergenceFailure(f"power flow did not reach {tol:g} in {max_iter} iterations")


def injections_at(net, vm, va):
    """Complex power injections implied by a voltage profile."""
    model = build_ac_model(net, sigma2=0.0)
    V = vm * np.exp(1j * va)
    return V * np.conj(model.ybus @ V)
