"""Batch front door: plan bounds, run integrations, verify, and sweep grids.

Exit codes: 0 success, 1 runtime or verification failure, 2 usage error.
All output is deterministic given the full invocation including the seed;
JSON uses 12 significant digits, CSV 9, with LF line endings. An optional
JSON config file supplies defaults for any long flag; explicit flags win.
"""

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import verify as verify_suites
from .bounds import (
    ball_plan,
    ball_walk_burn_in,
    ball_walk_conductance_lower,
    ball_walk_sample_size,
    error_bound,
    lazification_conductance,
)
from .densities import DensityEvaluationError, parse_density, parse_integrand
from .estimator import (
    append_batch_csv,
    format_json,
    reference_integral,
    run_replications,
    summarize_replications,
    write_batch_csv,
)
from .walk import delta_choice

SWEEP_CSV_COLUMNS = ("d", "alpha", "delta", "phi_lazy_lower", "n0", "n", "cost_total", "log10_cost")
CSV_DIGITS = 9

USAGE_EXIT = 2
FAILURE_EXIT = 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lazymcmc",
        description="Lazy reversible MCMC integration on the unit ball with explicit error bounds.",
    )
    parser.add_argument("--config", help="JSON file of default option values (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="print delta, conductance bound, burn-in, error bound, and cost")
    plan.add_argument("-d", "--dimension", type=int)
    plan.add_argument("-a", "--alpha", type=float)
    plan.add_argument("-n", "--samples", type=int, help="number of averaged steps n")
    plan.add_argument("--eps", type=float, help="target error; derives n from the cost formula")
    plan.add_argument("--fsup", type=float, help="sup norm of the integrand (default 1)")
    plan.add_argument("-o", "--out", help="write the JSON report here instead of stdout")

    integ = sub.add_parser("integrate", help="run the lazy Metropolis ball walk estimator")
    integ.add_argument("-d", "--dimension", type=int)
    integ.add_argument("--rho", help="density spec: uniform | explin:a1,..,ad | gauss:c")
    integ.add_argument("--f", dest="integrand", help="integrand spec: one | coord:k | coord2:k | halfspace:k,t")
    integ.add_argument("-n", "--samples", type=int)
    integ.add_argument("--n0", type=int, help="burn-in steps (default: the planned burn-in for (d, alpha))")
    integ.add_argument("--delta", type=float, help="proposal radius (default: tuned choice)")
    integ.add_argument("--reps", type=int, help="replications (default 1)")
    integ.add_argument("--seed", type=int, help="base seed; replication r uses seed + r (default 0)")
    integ.add_argument("--jobs", type=int, help="worker pool size (default: available parallelism)")
    integ.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    integ.add_argument("-o", "--out", help="output path (default stdout; csv output appends, header once)")

    ver = sub.add_parser("verify", help="run the exact finite-chain verification suites")
    ver.add_argument("--seed", type=int, help="suite seed (default 0)")
    ver.add_argument("-o", "--out", help="write the JSON summary here as well")

    sweep = sub.add_parser("sweep", help="tabulate plans over a (dimension, alpha) grid")
    sweep.add_argument("--dims", help="comma-separated dimensions, e.g. 1,2,4,8")
    sweep.add_argument("--alphas", help="comma-separated alpha values, e.g. 0,1,2,4")
    sweep.add_argument("--eps", type=float, help="target error for the cost columns")
    sweep.add_argument("--fsup", type=float, help="sup norm of the integrand (default 1)")
    sweep.add_argument("--jobs", type=int, help="worker pool size")
    sweep.add_argument("-o", "--out", help="output CSV path (default stdout)")
    return parser


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}")
    if not isinstance(doc, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    return doc


class UsageError(Exception):
    pass


def _setting(args, config, name, default=None, required=False):
    value = getattr(args, name, None)
    if value is None:
        value = config.get(name, default)
    if required and value is None:
        raise UsageError(f"missing required option --{name.replace('_', '-')}")
    return value


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def cmd_plan(args, config):
    d = _setting(args, config, "dimension", required=True)
    alpha = _setting(args, config, "alpha", required=True)
    n = _setting(args, config, "samples")
    eps = _setting(args, config, "eps")
    fsup = _setting(args, config, "fsup", 1.0)
    if (n is None) == (eps is None):
        raise UsageError("give exactly one of --samples and --eps")
    report = {}
    if eps is not None:
        n = ball_walk_sample_size(d, alpha, eps, fsup)
        report["eps"] = float(eps)
        report["cost_burn_in_term"] = ball_walk_burn_in(d, alpha)
        report["cost_sampling_term"] = n
    plan = ball_plan(d, alpha, n)
    report.update(plan.to_dict())
    report["f_sup_norm"] = float(fsup)
    report["headline_error_bound"] = plan.headline_error_bound * fsup
    report["composed_error_bound"] = plan.composed.error_bound * fsup
    _emit(format_json(report), args.out)
    return 0


def cmd_integrate(args, config):
    d = _setting(args, config, "dimension", required=True)
    rho_spec = _setting(args, config, "rho", required=True)
    f_spec = _setting(args, config, "integrand", required=True)
    n = _setting(args, config, "samples", required=True)
    try:
        rho = parse_density(str(rho_spec), int(d))
        f = parse_integrand(str(f_spec), int(d))
    except ValueError as exc:
        raise UsageError(str(exc))
    n0 = _setting(args, config, "n0")
    if n0 is None:
        n0 = ball_walk_burn_in(d, rho.alpha)
    delta = _setting(args, config, "delta")
    if delta is None:
        delta = delta_choice(d, rho.alpha)
    reps = int(_setting(args, config, "reps", 1))
    seed = int(_setting(args, config, "seed", 0))
    jobs = _setting(args, config, "jobs")
    fmt = _setting(args, config, "format", "json")
    if reps < 1:
        raise UsageError("--reps must be >= 1")

    reference = reference_integral(rho, f)
    runs = run_replications(rho, f, int(n), int(n0), seed, reps, delta, jobs)
    estimates = np.array([run.estimate for run in runs])
    rmse = float(np.sqrt(np.mean((estimates - reference.value) ** 2)))
    report = summarize_replications(runs, reference.value, rho, f) if reps >= 2 else None
    phi_cert = lazification_conductance(ball_walk_conductance_lower(int(d), rho.alpha))
    bound = error_bound(phi_cert, int(n), int(n0), math.exp(2.0 * rho.alpha), f.sup_norm).error_bound

    if fmt == "csv":
        rows = [
            {
                "d": int(d),
                "alpha": rho.alpha,
                "delta": float(delta),
                "n": int(n),
                "n0": int(n0),
                "seed": run.seed,
                "estimate": run.estimate,
                "reference": reference.value,
                "rmse": rmse,
                "bound": bound,
                "margin": bound - rmse,
            }
            for run in runs
        ]
        if args.out:
            append_batch_csv(args.out, rows)  # header written when the file is new
        else:
            buffer = io.StringIO()
            write_batch_csv(buffer, rows)
            sys.stdout.write(buffer.getvalue())
    else:
        doc = {
            "spec": {
                "dimension": int(d),
                "rho": str(rho_spec),
                "integrand": str(f_spec),
                "n": int(n),
                "n0": int(n0),
                "delta": float(delta),
                "seed": seed,
                "replications": reps,
            },
            "reference": reference,
            "runs": [run for run in runs],
        }
        if report is not None:
            doc["mse_report"] = report
        else:
            doc["rmse_single"] = rmse
            doc["theoretical_bound"] = bound
        _emit(format_json(doc), args.out)
    return 0


def cmd_verify(args, config):
    seed = int(_setting(args, config, "seed", 0))
    results = verify_suites.run_all(seed)
    failed = [check for check in results if not check.passed]
    for check in results:
        print(check.summary())
    if args.out:
        _emit(format_json({"seed": seed, "checks": [c.to_dict() for c in results]}), args.out)
    if failed:
        for check in failed:
            print(f"violations in {check.name}:", file=sys.stderr)
            print(format_json(check.violations), file=sys.stderr)
        return FAILURE_EXIT
    return 0


def _parse_grid(text, caster, name):
    try:
        values = [caster(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"bad {name} list: {text!r}")
    if not values:
        raise UsageError(f"empty {name} grid")
    return values


def cmd_sweep(args, config):
    dims = _parse_grid(_setting(args, config, "dims", required=True), int, "dimension")
    alphas = _parse_grid(_setting(args, config, "alphas", required=True), float, "alpha")
    eps = _setting(args, config, "eps", required=True)
    fsup = float(_setting(args, config, "fsup", 1.0))
    jobs = _setting(args, config, "jobs")

    cells = [(d, alpha) for d in dims for alpha in alphas]

    def evaluate(cell):
        d, alpha = cell
        n = ball_walk_sample_size(d, alpha, eps, fsup)
        plan = ball_plan(d, alpha, n)
        return {
            "d": d,
            "alpha": alpha,
            "delta": plan.delta,
            "phi_lazy_lower": plan.phi_lazy_lower,
            "n0": plan.n0,
            "n": plan.n,
            "cost_total": plan.cost_total,
            "log10_cost": math.log10(plan.cost_total),
        }

    workers = jobs if jobs and jobs > 0 else None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(evaluate, cells))  # map preserves grid order

    lines = [",".join(SWEEP_CSV_COLUMNS)]
    for row in rows:
        formatted = []
        for col in SWEEP_CSV_COLUMNS:
            value = row[col]
            if isinstance(value, float):
                formatted.append(f"{value:.{CSV_DIGITS}g}")
            else:
                formatted.append(str(value))
        lines.append(",".join(formatted))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


HANDLERS = {
    "plan": cmd_plan,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return HANDLERS[args.command](args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except DensityEvaluationError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return FAILURE_EXIT


if __name__ == "__main__":
    sys.exit(main())
