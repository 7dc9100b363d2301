"""Command-line front door.

Subcommands: ``simulate`` writes a path CSV, ``estimate`` turns a path CSV
into trawl-function and functional estimates, ``tdep`` runs the
T-dependence test, ``mc`` executes a Monte Carlo experiment file, and
``kernels`` dumps asymptotic-variance kernel grids.

Exit codes: 0 success, 2 usage/config error, 3 runtime error.  Every output
file gets a JSON provenance sidecar (config hash, master seed, version) from
which the run can be reproduced bitwise.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys

import numpy as np

from . import __version__
from .estimators import choose_window, estimate_trawl, lambda_bar_n, lambda_n, psi_n
from .inference import tau_test
from .limit_theory import AvarKernel
from .mc import ExperimentConfig, run_experiment, test_function_from_dict
from .models import seed_from_dict, trawl_from_dict
from .simulate import GridScheme, export_csv, ingest_csv, simulate_points, simulate_slices

USAGE_ERROR = 2
RUNTIME_ERROR = 3


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _sidecar(path, payload):
    payload = dict(payload)
    payload["version"] = __version__
    payload["config_hash"] = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()
    with open(str(path) + ".provenance.json", "w") as fh:
        json.dump(payload, fh, indent=2)


def cmd_simulate(args) -> int:
    spec = _load_json(args.spec) if args.spec else {}
    for key, val in (("n", args.n), ("delta", args.delta), ("seed", args.seed)):
        if val is not None:
            spec[key] = val
    if args.method is not None:
        spec["simulator"] = args.method
    trawl = trawl_from_dict(spec["trawl"])
    seed_spec = seed_from_dict(spec["seed_spec"])
    scheme = GridScheme(
        n=int(spec["n"]),
        delta=float(spec["delta"]),
        master_seed=int(spec.get("seed", 0)),
        horizon=spec.get("horizon"),
    )
    simulator = spec.get("simulator", "slices")
    if simulator == "points":
        path = simulate_points(trawl, seed_spec, scheme)
    elif simulator == "slices":
        path = simulate_slices(trawl, seed_spec, scheme)
    else:
        raise SystemExit2(f"unknown simulator {simulator!r}")
    export_csv(path, args.out)
    _sidecar(args.out, {"command": "simulate", "spec": {**spec, "trawl": trawl.to_dict(), "seed_spec": seed_spec.to_dict()}})
    return 0


def cmd_estimate(args) -> int:
    path = ingest_csv(args.input, delta=args.delta)
    est = estimate_trawl(path, method=args.method)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag_time", "a_hat"])
        for lag, value in zip(est.lag_times, est.a_hat):
            writer.writerow([repr(float(lag)), repr(float(value))])
    _sidecar(args.out, {"command": "estimate", "input": args.input, "method": args.method})
    if args.functionals_out:
        g = test_function_from_dict(_parse_g(args.g))
        window = choose_window(est.n, args.varpi, args.theta, args.kappa)
        t_grid = [float(t) for t in args.t_grid.split(",")]
        with open(args.functionals_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "psi_n", "lambda_n", "lambda_bar_n"])
            for t in t_grid:
                bar = (
                    lambda_bar_n(est, g, t, window)
                    if int(t / est.delta) < window
                    else float("nan")
                )
                writer.writerow(
                    [repr(t), repr(psi_n(est, g, t)), repr(lambda_n(est, g, t)), repr(bar)]
                )
        _sidecar(args.functionals_out, {"command": "estimate-functionals", "input": args.input})
    return 0


def cmd_tdep(args) -> int:
    path = ingest_csv(args.input, delta=args.delta)
    report = tau_test(path, T=args.T, p=args.p)
    text = report.to_json(indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _sidecar(args.out, {"command": "tdep", "input": args.input, "T": args.T, "p": args.p})
    else:
        print(text)
    return 0


def cmd_mc(args) -> int:
    cfg_dict = _load_json(args.experiment)
    if args.seed is not None:
        cfg_dict["master_seed"] = args.seed
    if args.threads is not None:
        cfg_dict["threads"] = args.threads
    cfg = ExperimentConfig.from_dict(cfg_dict)
    result = run_experiment(cfg)
    result.write_json(args.out)
    result.write_csv(args.raw_out or (str(args.out) + ".raw.csv"))
    _sidecar(args.out, {"command": "mc", "experiment": cfg.to_dict()})
    return 0


def cmd_kernels(args) -> int:
    trawl = trawl_from_dict(_load_json(args.trawl) if args.trawl.endswith(".json") else json.loads(args.trawl))
    kern = AvarKernel(trawl, k4=args.k4)
    grid = np.linspace(args.lo, args.hi, args.points)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        if args.what == "sigma_a":
            writer.writerow(["s", "r", "value"])
            for s in grid:
                for r in grid:
                    writer.writerow([repr(float(s)), repr(float(r)), repr(kern.sigma_a_matrix(s, r))])
        elif args.what == "sigma_a_sq":
            writer.writerow(["t", "value"])
            for t in grid:
                writer.writerow([repr(float(t)), repr(kern.sigma_a_sq(t))])
        else:
            l1, l2 = (int(x) for x in args.what.split(":")[1].split(","))
            writer.writerow(["s", "r", "value"])
            for s in grid:
                for r in grid:
                    writer.writerow([repr(float(s)), repr(float(r)), repr(kern.appendix_f(l1, l2, s, r))])
    _sidecar(args.out, {"command": "kernels", "trawl": trawl.to_dict(), "k4": args.k4, "what": args.what})
    return 0


class SystemExit2(ValueError):
    """Configuration error mapped to exit code 2."""


def build_parser():
    parser = argparse.ArgumentParser(prog="trawlkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a trawl-process path to CSV")
    p.add_argument("--spec", help="JSON file with trawl, seed_spec, n, delta")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--method", choices=["slices", "points"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the trawl function from a path CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, help="grid step for single-column input")
    p.add_argument("--method", choices=["naive", "fft"], default="fft")
    p.add_argument("--out", required=True, help="lag_time,a_hat CSV")
    p.add_argument("--functionals-out", help="optional t,psi_n,lambda_n,lambda_bar_n CSV")
    p.add_argument("--g", default="square", help="'square' or 'power:<exponent>'")
    p.add_argument("--t-grid", default="0.5,1.0")
    p.add_argument("--varpi", type=float, default=2.0)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=None)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("tdep", help="run the T-dependence ratio test")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--out", help="JSON report path (stdout when omitted)")
    p.set_defaults(func=cmd_tdep)

    p = sub.add_parser("mc", help="run a Monte Carlo experiment file")
    p.add_argument("--experiment", required=True)
    p.add_argument("--out", required=True, help="summary JSON path")
    p.add_argument("--raw-out", help="raw n,rep,stat CSV path")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("kernels", help="dump asymptotic-variance kernel grids")
    p.add_argument("--trawl", required=True, help="JSON file or inline JSON")
    p.add_argument("--k4", type=float, default=0.0)
    p.add_argument("--what", default="sigma_a", help="sigma_a | sigma_a_sq | f:l1,l2")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kernels)

    return parser


def _parse_g(text: str) -> dict:
    if text == "square":
        return {"kind": "square"}
    if text.startswith("power:"):
        return {"kind": "power", "exponent": float(text.split(":", 1)[1])}
    raise SystemExit2(f"cannot parse test function {text!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: missing required field {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, FileNotFoundError, SystemExit2) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # noqa: BLE001 - stable exit-code contract
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
