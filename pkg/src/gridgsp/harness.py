"""Monte-Carlo experiment driver: observability probability sweeps,
MSE-vs-selection-size and MSE-vs-noise grids for the DC and AC estimators,
and CSV/JSON result persistence.

Determinism: every trial owns a Generator derived from
(master seed, grid indices, trial index), so results are independent of
execution order and thread count.  Aggregation uses plain summation of
per-trial squared errors collected in trial order.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import acmodel, dcmodel, gaussnewton, gspdc, placement
from .cases import load_case
from .exceptions import GridGspError
from .netcase import build_laplacian
from .spectral import eig_laplacian

CSV_HEADER = ("case,model,policy,estimator,q,sigma2,trials,mse_theta,mse_v,"
              "mse_power,observable_fraction,excluded_trials,runtime_ms")

DC_ESTIMATORS = ("gsp", "pm", "wls")
AC_ESTIMATORS = ("gsp", "pm", "plain")
POLICIES = ("random", "edesign", "greedy")


@dataclass(frozen=True)
class ExperimentConfig:
    case: str = "case118"
    model: str = "dc"                       # "dc" | "ac"
    policies: tuple = ("random", "edesign", "greedy")
    estimators: tuple = ("gsp", "pm")
    q_values: tuple = (24, 36, 48, 60, 72, 84, 96, 108, 118)
    sigma2_values: tuple = (0.01,)
    trials: int = 1000
    seed: int = 0
    mu: float = 0.1                         # DC regularization
    mu_theta: float = 0.045                 # AC regularization (angles)
    mu_v: float = 10.0                      # AC regularization (magnitudes)
    delta: float = 1e-8
    max_iter: int = 20
    prior_sigma2: float = 0.015             # prior draw variance (pm baselines)
    prior_weight_dc: float = 0.5            # R_prior^-1 = weight * I
    prior_weight_ac: float = 1.0
    edesign_cutoff: int = 48
    weights: str = "susceptance"
    threads: int = 1
    record_runtime: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.model not in ("dc", "ac"):
            raise ValueError("model must be 'dc' or 'ac'")


@dataclass(frozen=True)
class ResultRecord:
    case: str
    model: str
    policy: str
    estimator: str
    q: int
    sigma2: float
    trials: int
    mse_theta: float | None
    mse_v: float | None = None
    mse_power: float | None = None
    observable_fraction: float | None = None
    excluded_trials: int = 0
    runtime_ms: int = 0


@dataclass
class _CaseBundle:
    net: object
    lap: object
    spectrum: object


def _load_bundle(cfg):
    net = load_case(cfg.case)
    lap = build_laplacian(net, convention=cfg.weights)
    return _CaseBundle(net=net, lap=lap, spectrum=eig_laplacian(lap))


def _trial_rng(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


# ---------------------------------------------------------------------------
# observability sweep
# ---------------------------------------------------------------------------

def run_observability_sweep(cfg, q_values=None, trials=10_000, bundle=None):
    """Fraction of random bus selections that yield an observable DC system."""
    if cfg.model != "dc":
        raise ValueError("observability sweep is defined on the DC model")
    b = bundle or _load_bundle(cfg)
    model = dcmodel.build_dc_model(b.lap, sigma2=0.01,
                                   reference_bus=b.net.reference_bus)
    records = []
    for qi, q in enumerate(q_values if q_values is not None else cfg.q_values):
        t0 = time.perf_counter()

        def one(trial, _q=q, _qi=qi):
            rng = _trial_rng(cfg.seed, 0, _qi, trial)
            sel = placement.random_selection(b.net.n_bus, _q, rng, lap=b.lap)
            return dcmodel.is_observable(model, sel.sensor_rows)

        hits = _map_trials(one, trials, cfg.threads)
        records.append(ResultRecord(
            case=b.net.name, model="dc", policy="random", estimator="none",
            q=q, sigma2=None, trials=trials,
            mse_theta=None,
            observable_fraction=sum(hits) / trials,
            runtime_ms=_elapsed_ms(t0, cfg)))
    return records


def _map_trials(fn, trials, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(trials)))
    return [fn(t) for t in range(trials)]


def _elapsed_ms(t0, cfg):
    return int(round((time.perf_counter() - t0) * 1000)) if cfg.record_runtime else 0


# ---------------------------------------------------------------------------
# selections
# ---------------------------------------------------------------------------

def policy_selection(policy, bundle, q, cfg, rng=None):
    """Bus selection for a policy; `rng` drives the random policy."""
    if policy == "greedy":
        return placement.greedy_selection(bundle.lap, q, cfg.mu, cfg.sigma2_values[0],
                                          reference_bus=bundle.net.reference_bus)
    if policy == "edesign":
        return placement.edesign_selection(bundle.spectrum, q,
                                           min(cfg.edesign_cutoff, bundle.net.n_bus),
                                           lap=bundle.lap)
    if policy == "random":
        return placement.random_selection(bundle.net.n_bus, q,
                                          rng if rng is not None else cfg.seed,
                                          lap=bundle.lap)
    raise ValueError(f"unknown policy {policy!r}")


# ---------------------------------------------------------------------------
# MSE experiments
# ---------------------------------------------------------------------------

def run_mse_experiment(cfg, bundle=None):
    """Empirical estimation error over the (policy, estimator, q, sigma2) grid.

    Per-trial noise (and, for the random policy, the selection) is freshly
    drawn from a deterministic per-trial stream.  Estimator failures are
    excluded from the average and counted per record.
    """
    b = bundle or _load_bundle(cfg)
    runner = _run_dc_cell if cfg.model == "dc" else _run_ac_cell
    records = []
    for qi, q in enumerate(cfg.q_values):
        deterministic = {}
        for policy in cfg.policies:
            if policy in ("greedy", "edesign"):
                deterministic[policy] = policy_selection(policy, b, q, cfg)
        for si, sigma2 in enumerate(cfg.sigma2_values):
            if cfg.model == "dc":
                meas_model = dcmodel.build_dc_model(
                    b.lap, sigma2, reference_bus=b.net.reference_bus)
            else:
                meas_model = acmodel.build_ac_model(b.net, sigma2)
            for pi, policy in enumerate(cfg.policies):
                t0 = time.perf_counter()
                cells = {est: _Accumulator() for est in cfg.estimators}

                def one(trial, _q=q, _key=(1, qi, si, pi), _m=meas_model,
                        _policy=policy, _det=deterministic):
                    rng = _trial_rng(cfg.seed, *_key, trial)
                    sel = _det.get(_policy) or placement.random_selection(
                        b.net.n_bus, _q, rng, lap=b.lap)
                    return runner(cfg, b, sel, _m, rng)

                for result in _map_trials(one, cfg.trials, cfg.threads):
                    for est, payload in result.items():
                        cells[est].add(payload)
                for est in cfg.estimators:
                    acc = cells[est]
                    records.append(ResultRecord(
                        case=b.net.name, model=cfg.model, policy=policy,
                        estimator=est, q=q, sigma2=sigma2, trials=cfg.trials,
                        mse_theta=acc.mean("theta"),
                        mse_v=acc.mean("v"),
                        mse_power=acc.mean("power"),
                        observable_fraction=acc.mean("observable"),
                        excluded_trials=acc.excluded,
                        runtime_ms=_elapsed_ms(t0, cfg)))
    return records


class _Accumulator:
    def __init__(self):
        self.sums = {}
        self.counts = {}
        self.excluded = 0

    def add(self, payload):
        if payload is None:
            self.excluded += 1
            return
        for k, v in payload.items():
            if v is None:
                continue
            self.sums[k] = self.sums.get(k, 0.0) + v
            self.counts[k] = self.counts.get(k, 0) + 1

    def mean(self, key):
        if key not in self.counts:
            return None
        return self.sums[key] / self.counts[key]


def _run_dc_cell(cfg, b, sel, model, rng):
    """One DC trial: generate measurements, run each estimator, return errors."""
    net = b.net
    theta_true = net.angles()
    theta_true = theta_true - theta_true[net.reference_bus - 1]
    truth = dcmodel.DCState(theta=theta_true, reference_bus=net.reference_bus)
    z_full = dcmodel.generate_dc_measurements(model, truth, rng)
    rows = np.asarray(sel.sensor_rows, int)
    z_s = z_full[rows]
    z_clean = model.H @ theta_true

    out = {}
    for est in cfg.estimators:
        try:
            if est == "gsp":
                state = gspdc.gsp_wls(model, z_s, rows, b.lap,
                                      gspdc.GspConfig(mu=cfg.mu))
            elif est == "pm":
                nfree = net.n_bus - 1
                prior = gspdc.PriorModel(
                    theta_prior=rng.normal(0.0, np.sqrt(cfg.prior_sigma2), nfree),
                    R_prior_inv=cfg.prior_weight_dc * np.eye(nfree))
                state = gspdc.pm_wls(model, z_s, rows, prior)
            elif est == "wls":
                state = dcmodel.wls_estimate(model, z_s, rows)
            else:
                raise ValueError(f"unknown DC estimator {est!r}")
        except GridGspError:
            out[est] = None
            continue
        err = state.theta - theta_true
        missing, zhat = gspdc.reconstruct_missing_power(model, state, rows)
        payload = {
            "theta": float(err @ err),
            "observable": float(dcmodel.is_observable(model, rows)),
        }
        if len(missing):
            d = zhat - z_clean[missing]
            payload["power"] = float(d @ d)
        out[est] = payload
    return out


def _run_ac_cell(cfg, b, sel, model, rng):
    """One AC trial: plain / regularized / pm Gauss-Newton on the same draw."""
    net = b.net
    truth = model.state_from_case()
    z_full = acmodel.generate_ac_measurements(model, truth, rng)
    rows = np.asarray(acmodel.induced_ac_rows(model, sel.buses), int)
    z_s = z_full[rows]
    gn_cfg = gaussnewton.GNConfig(mu_theta=cfg.mu_theta, mu_v=cfg.mu_v,
                                  delta=cfg.delta, max_iter=cfg.max_iter)
    nf = net.n_bus - 1

    out = {}
    for est in cfg.estimators:
        try:
            if est == "gsp":
                state, _ = gaussnewton.regularized_gauss_newton(
                    model, z_s, rows, b.lap, gn_cfg)
            elif est == "pm":
                x_prior = gaussnewton.flat_anchor(model) + \
                    rng.normal(0.0, np.sqrt(cfg.prior_sigma2), 2 * nf)
                state, _ = gaussnewton.pm_gauss_newton(
                    model, z_s, rows, x_prior,
                    cfg.prior_weight_ac * np.eye(2 * nf), gn_cfg)
            elif est == "plain":
                state, _ = gaussnewton.gauss_newton_wls(model, z_s, rows, gn_cfg)
            else:
                raise ValueError(f"unknown AC estimator {est!r}")
        except GridGspError:
            out[est] = None
            continue
        dth = state.theta - truth.theta
        dv = state.v - truth.v
        out[est] = {
            "theta": float(dth @ dth),
            "v": float(dv @ dv),
        }
    return out


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        if np.isnan(x):
            return ""
        return format(x, ".12g")
    return str(x)


def records_to_csv(records):
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join(_fmt(v) for v in (
            r.case, r.model, r.policy, r.estimator, r.q, r.sigma2, r.trials,
            r.mse_theta, r.mse_v, r.mse_power, r.observable_fraction,
            r.excluded_trials, r.runtime_ms)))
    return "\n".join(lines) + "\n"


def records_to_json(records):
    return json.dumps([r.__dict__ for r in records], indent=1, default=_fmt)


def emit_report(records, out_dir, basename="results", fmt="csv"):
    """Write records to <out_dir>/<basename>.{csv,json}; returns the paths."""
    if not records:
        raise ValueError("no records to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if fmt in ("csv", "both"):
        p = out / f"{basename}.csv"
        p.write_text(records_to_csv(records))
        paths.append(p)
    if fmt in ("json", "both"):
        p = out / f"{basename}.json"
        p.write_text(records_to_json(records))
        paths.append(p)
    if not paths:
        raise ValueError(f"unknown format {fmt!r}")
    return paths
