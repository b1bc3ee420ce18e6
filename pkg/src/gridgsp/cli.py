"""Command-line interface.

Subcommands: smoothness, observability, estimate-dc, estimate-ac, place,
monte-carlo.  Exit codes: 0 success, 2 configuration error, 3 case-parse
error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, acmodel, dcmodel, gaussnewton, gspdc, harness, placement
from .cases import load_case
from .exceptions import GridGspError, MalformedCase
from .gspdc import GspConfig
from .netcase import build_laplacian
from .spectral import eig_laplacian, smoothness_report

EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


def _common(sub):
    sub.add_argument("--case", default="case118",
                     help="bundled case name or path to a .m/.json case file")
    sub.add_argument("--seed", type=int, default=0, help="master seed")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--weights", choices=("susceptance", "inverse-reactance"),
                     default="susceptance", help="Laplacian edge-weight convention")


def build_parser():
    p = argparse.ArgumentParser(
        prog="gridgsp",
        description="Graph-signal state estimation for power networks")
    p.add_argument("--version", action="version", version=f"gridgsp {__version__}")
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("smoothness", help="normalized smoothness report of a case")
    _common(s)

    s = subs.add_parser("observability",
                        help="observable fraction of random bus selections per q")
    _common(s)
    s.add_argument("--q-grid", type=int, nargs="+",
                   default=[24, 36, 48, 60, 72, 84, 96, 108, 118])
    s.add_argument("--trials", type=int, default=10_000)

    s = subs.add_parser("estimate-dc", help="one DC estimation run")
    _common(s)
    s.add_argument("--buses", default="greedy",
                   help="policy name (greedy|edesign|random) or JSON file with bus ids")
    s.add_argument("--q", type=int, default=48, help="bus count for policy selections")
    s.add_argument("--mu", type=float, default=0.1)
    s.add_argument("--sigma2", type=float, default=0.01)
    s.add_argument("--reconstruct-power", action="store_true")

    s = subs.add_parser("estimate-ac", help="one AC estimation run")
    _common(s)
    s.add_argument("--buses", default="greedy")
    s.add_argument("--q", type=int, default=48)
    s.add_argument("--mu-theta", type=float, default=0.045)
    s.add_argument("--mu-v", type=float, default=10.0)
    s.add_argument("--delta", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=20)
    s.add_argument("--sigma2", type=float, default=0.01)
    s.add_argument("--method", choices=("gsp", "pm", "plain"), default="gsp")

    s = subs.add_parser("place", help="sensor placement")
    _common(s)
    s.add_argument("--policy", choices=("greedy", "edesign", "random", "exhaustive"),
                   default="greedy")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--mu", type=float, default=0.1)
    s.add_argument("--sigma2", type=float, default=0.01)
    s.add_argument("--cutoff", type=int, default=48, help="E-design band limit")

    s = subs.add_parser("monte-carlo", help="Monte-Carlo MSE experiment grid")
    _common(s)
    s.add_argument("--model", choices=("dc", "ac"), default="dc")
    s.add_argument("--policies", nargs="+", default=["random", "edesign", "greedy"])
    s.add_argument("--estimators", nargs="+", default=None)
    s.add_argument("--q-grid", type=int, nargs="+", default=[48])
    s.add_argument("--sigma2-grid", type=float, nargs="+", default=[0.01])
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--mu", type=float, default=0.1)
    s.add_argument("--mu-theta", type=float, default=0.045)
    s.add_argument("--mu-v", type=float, default=10.0)
    return p


def _load(args):
    net = load_case(args.case)
    lap = build_laplacian(net, convention=args.weights)
    return net, lap


def _selection(args, net, lap, sigma2, mu):
    spec_arg = args.buses
    path = Path(spec_arg)
    if path.exists() and path.is_file():
        buses = json.loads(path.read_text())
        return placement.BusSelection(
            buses=tuple(int(b) for b in buses),
            sensor_rows=placement.induced_sensor_rows(lap, buses))
    if spec_arg == "greedy":
        return placement.greedy_selection(lap, args.q, mu, sigma2,
                                          reference_bus=net.reference_bus)
    if spec_arg == "edesign":
        return placement.edesign_selection(eig_laplacian(lap), args.q,
                                           min(48, net.n_bus), lap=lap)
    if spec_arg == "random":
        return placement.random_selection(net.n_bus, args.q, args.seed, lap=lap)
    raise ValueError(f"--buses must be a policy name or a JSON file, got {spec_arg!r}")


def _emit(text, args, default_name):
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / default_name).write_text(text)
        print(out / default_name)
    else:
        print(text, end="")


def cmd_smoothness(args):
    net, lap = _load(args)
    rep = smoothness_report(net, lap)
    if args.format == "json":
        text = json.dumps({"case": rep.case, "theta": rep.theta_ratio,
                           "vmag": rep.vmag_ratio, "power": rep.power_ratio},
                          indent=1) + "\n"
        _emit(text, args, "smoothness.json")
    else:
        lines = ["case,metric,value"]
        for metric, value in rep.rows():
            lines.append(f"{rep.case},{metric},{value:.6f}")
        _emit("\n".join(lines) + "\n", args, "smoothness.csv")
    if args.out:
        gft_lines = ["index,theta_gft,vmag_gft,power_gft"]
        for i in range(net.n_bus):
            gft_lines.append(f"{i + 1},{rep.theta_gft[i]:.10g},"
                             f"{rep.vmag_gft[i]:.10g},{rep.power_gft[i]:.10g}")
        (Path(args.out) / "smoothness_gft.csv").write_text("\n".join(gft_lines) + "\n")
    return 0


def cmd_observability(args):
    net, lap = _load(args)
    cfg = harness.ExperimentConfig(case=args.case, model="dc", seed=args.seed,
                                   threads=args.threads, weights=args.weights)
    records = harness.run_observability_sweep(cfg, q_values=args.q_grid,
                                              trials=args.trials)
    text = harness.records_to_csv(records) if args.format == "csv" \
        else harness.records_to_json(records)
    _emit(text, args, f"observability.{args.format}")
    return 0


def cmd_estimate_dc(args):
    net, lap = _load(args)
    model = dcmodel.build_dc_model(lap, args.sigma2, reference_bus=net.reference_bus)
    sel = _selection(args, net, lap, args.sigma2, args.mu)
    theta_true = net.angles()
    theta_true = theta_true - theta_true[net.reference_bus - 1]
    truth = dcmodel.DCState(theta=theta_true, reference_bus=net.reference_bus)
    z = dcmodel.generate_dc_measurements(model, truth, args.seed)
    rows = np.asarray(sel.sensor_rows, int)
    state = gspdc.gsp_wls(model, z[rows], rows, lap, GspConfig(mu=args.mu))
    err = state.theta - theta_true
    result = {
        "case": net.name,
        "buses": list(sel.buses),
        "mu": args.mu,
        "sigma2": args.sigma2,
        "theta_hat": state.theta.tolist(),
        "mse_vs_truth": float(err @ err),
    }
    if args.reconstruct_power:
        missing, zhat = gspdc.reconstruct_missing_power(model, state, rows)
        result["reconstructed_power"] = {
            "rows": missing.tolist(), "values": zhat.tolist()}
    _emit(json.dumps(result, indent=1) + "\n", args, "estimate_dc.json")
    return 0


def cmd_estimate_ac(args):
    net, lap = _load(args)
    model = acmodel.build_ac_model(net, args.sigma2)
    sel = _selection(args, net, lap, args.sigma2, args.mu_theta)
    truth = model.state_from_case()
    z = acmodel.generate_ac_measurements(model, truth, args.seed)
    rows = np.asarray(acmodel.induced_ac_rows(model, sel.buses), int)
    cfg = gaussnewton.GNConfig(mu_theta=args.mu_theta, mu_v=args.mu_v,
                               delta=args.delta, max_iter=args.max_iter)
    if args.method == "gsp":
        state, trace = gaussnewton.regularized_gauss_newton(model, z[rows], rows,
                                                            lap, cfg)
    elif args.method == "pm":
        nf2 = 2 * (net.n_bus - 1)
        state, trace = gaussnewton.pm_gauss_newton(
            model, z[rows], rows, gaussnewton.flat_anchor(model), np.eye(nf2), cfg)
    else:
        state, trace = gaussnewton.gauss_newton_wls(model, z[rows], rows, cfg)
    dth = state.theta - truth.theta
    dv = state.v - truth.v
    result = {
        "case": net.name,
        "method": args.method,
        "buses": list(sel.buses),
        "theta_hat": state.theta.tolist(),
        "v_hat": state.v.tolist(),
        "mse_theta": float(dth @ dth),
        "mse_v": float(dv @ dv),
        "converged": trace.converged,
        "trace": {
            "iterations": trace.iterations,
            "step_norms": trace.step_norms,
            "objective_values": trace.objective_values,
        },
    }
    _emit(json.dumps(result, indent=1) + "\n", args, "estimate_ac.json")
    return 0


def cmd_place(args):
    net, lap = _load(args)
    if args.policy == "greedy":
        sel = placement.greedy_selection(lap, args.q, args.mu, args.sigma2,
                                         reference_bus=net.reference_bus)
    elif args.policy == "edesign":
        sel = placement.edesign_selection(eig_laplacian(lap), args.q,
                                          min(args.cutoff, net.n_bus), lap=lap)
    elif args.policy == "random":
        sel = placement.random_selection(net.n_bus, args.q, args.seed, lap=lap)
    else:
        sel = placement.exhaustive_selection(lap, args.q, args.mu, args.sigma2,
                                             reference_bus=net.reference_bus)
    report = placement.crb(lap, sel.buses, args.mu, args.sigma2,
                           reference_bus=net.reference_bus)
    result = {
        "case": net.name,
        "policy": args.policy,
        "buses": list(sel.buses),
        "sensor_rows": list(sel.sensor_rows),
        "crb": report.value,
    }
    _emit(json.dumps(result, indent=1) + "\n", args, "place.json")
    return 0


def cmd_monte_carlo(args):
    estimators = args.estimators
    if estimators is None:
        estimators = ["gsp", "pm"]
    cfg = harness.ExperimentConfig(
        case=args.case, model=args.model, policies=tuple(args.policies),
        estimators=tuple(estimators), q_values=tuple(args.q_grid),
        sigma2_values=tuple(args.sigma2_grid), trials=args.trials,
        seed=args.seed, mu=args.mu, mu_theta=args.mu_theta, mu_v=args.mu_v,
        threads=args.threads, weights=args.weights)
    records = harness.run_mse_experiment(cfg)
    if args.out:
        paths = harness.emit_report(records, args.out, basename="monte_carlo",
                                    fmt=args.format)
        for p in paths:
            print(p)
    else:
        text = harness.records_to_csv(records) if args.format == "csv" \
            else harness.records_to_json(records)
        print(text, end="")
    return 0


_COMMANDS = {
    "smoothness": cmd_smoothness,
    "observability": cmd_observability,
    "estimate-dc": cmd_estimate_dc,
    "estimate-ac": cmd_estimate_ac,
    "place": cmd_place,
    "monte-carlo": cmd_monte_carlo,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the config-error code
        return exc.code
    try:
        return _COMMANDS[args.command](args)
    except MalformedCase as exc:
        print(f"case error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError,) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GridGspError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
