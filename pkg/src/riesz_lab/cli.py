"""Command-line interface.

Every run echoes its fully resolved configuration into the JSON report,
embeds the kernel descriptor, writes files atomically (temp file plus
rename) and is deterministic given --seed.  Exit codes: 0 success, 1 for
usage errors (including out-of-range flag values), 2 for numeric
failures at run time.
"""

import argparse
import csv
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import lattice as lat
from ._backend import BACKEND
from .equilibrium import MODELS, model_by_name, predicted_next_order_constant
from .errors import NumericError, RieszLabError
from .hamiltonian import Configuration, split
from .kernels import make_kernel
from .minimize import (MinimizeOptions, fit_expansion, multistart,
                       sample_initial, separation_report)
from .sampler import run_chain
from .specfun import riemann_zeta


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".riesz-lab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_json(report: dict, args) -> None:
    if not getattr(args, "no_timestamp", False):
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=True)
    out = getattr(args, "out", None)
    if out:
        _atomic_write(out, text + "\n")
    else:
        print(text)


def _emit_csv(path, header, rows) -> None:
    if path:
        buf = []
        buf.append(",".join(header))
        for row in rows:
            buf.append(",".join(repr(v) if isinstance(v, float) else str(v)
                               for v in row))
        _atomic_write(path, "\n".join(buf) + "\n")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)


def _resolved(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _model_name(text: str) -> str:
    if text not in MODELS:
        raise argparse.ArgumentTypeError(
            f"unknown model {text!r}; choose from {sorted(MODELS)}")
    return text


def _riesz_2d_s(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 2.0:
        raise argparse.ArgumentTypeError(
            f"s must lie in (0, 2) for d = 2 lattices, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


# ---------------------------------------------------------------------------
# subcommands

def _cmd_zeta(args) -> int:
    print(f"{riemann_zeta(args.x):.12g}")
    return 0


def _cmd_minimize(args) -> int:
    model = model_by_name(args.model)
    opts = MinimizeOptions(seed=args.seed, max_iterations=args.max_iterations)
    result = multistart(model, args.n, args.trials, opts, threads=args.threads)
    rep = separation_report(model, result.config)
    report = {
        "command": "minimize",
        "config": _resolved(args),
        "kernel_spec": model.spec.as_dict(),
        "value": result.value,
        "iterations": result.iterations,
        "converged": result.converged,
        "points": result.config.points.tolist(),
        "separation": rep.as_dict(),
        "backend": BACKEND,
    }
    _emit_json(report, args)
    if args.append_csv:
        new = not os.path.exists(args.append_csv)
        with open(args.append_csv, "a", encoding="utf-8") as fh:
            if new:
                fh.write("n,value\n")
            fh.write(f"{args.n},{result.value!r}\n")
    return 0


def _cmd_split_check(args) -> int:
    model = model_by_name(args.model)
    rows = []
    header = ["index", "H", "mean_field", "zeta_term", "log_correction",
              "next_order_direct", "next_order_potential_route", "route_gap"]
    for index in range(args.count):
        config = sample_initial(model, args.n, args.seed + index)
        rep = split(model, config)
        rows.append([index, rep.H, rep.mean_field, rep.zeta_term,
                     rep.log_correction, rep.next_order_direct,
                     rep.next_order_potential_route, rep.route_gap])
    _emit_csv(args.out, header, rows)
    return 0


def _cmd_fit(args) -> int:
    model = model_by_name(args.model)
    data = []
    with open(args.data, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            data.append((int(row["n"]), float(row["value"])))
    e_hat, next_hat, residuals = fit_expansion(model, data)
    report = {
        "command": "fit",
        "config": _resolved(args),
        "kernel_spec": model.spec.as_dict(),
        "E_hat": e_hat,
        "next_order_hat": next_hat,
        "residuals": residuals.tolist(),
        "data": data,
    }
    if args.xi is not None:
        report["predicted_next_order"] = predicted_next_order_constant(model, args.xi)
    _emit_json(report, args)
    return 0


def _cmd_lattice_scan(args) -> int:
    spec = make_kernel("riesz", 2, args.s) if args.s else make_kernel("log2d", 2)
    res = args.resolution
    xs = np.linspace(0.0, 0.5, res)

    def column(x):
        x = float(x)
        y_min = math.sqrt(1.0 - x * x)
        return [(x, float(y), lat.relative_lattice_W(lat.Lattice2D(x, float(y)), spec))
                for y in np.linspace(y_min, 3.0, res)]

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            columns = list(pool.map(column, xs))
    else:
        columns = [column(x) for x in xs]
    rows = [row for col in columns for row in col]
    best = min(rows, key=lambda r: r[2])
    _emit_csv(args.out, ["x", "y", "relative_W"], rows)
    summary = {
        "command": "lattice-scan",
        "config": _resolved(args),
        "kernel_spec": spec.as_dict(),
        "argmin": {"x": best[0], "y": best[1]},
        "min_value": best[2],
    }
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0


def _cmd_green1d(args) -> int:
    series = lat.green_1d(args.N, args.alpha, args.x, method="series")
    integral = lat.green_1d(args.N, args.alpha, args.x, method="integral")
    print(f"series   {series:.12e}")
    print(f"integral {integral:.12e}")
    print(f"gap      {abs(series - integral):.3e}")
    return 0


def _cmd_periodic_w(args) -> int:
    points = []
    with open(args.points, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                points.append(float(line))
    config = lat.TorusConfig.unit_density(points)
    spec = make_kernel("log1d", 1) if args.alpha == 0.5 \
        else make_kernel("riesz", 1, 1.0 - 2.0 * args.alpha)
    report_obj = lat.periodic_W(config, spec)
    report = {
        "command": "periodic-w",
        "config": _resolved(args),
        "kernel_spec": spec.as_dict(),
        "report": report_obj.as_dict(),
    }
    if args.eta is not None:
        report["W_eta"] = lat.truncated_periodic_energy(config, spec, args.eta)
        report["eta"] = args.eta
    _emit_json(report, args)
    return 0


def _cmd_sample(args) -> int:
    model = model_by_name(args.model)
    stats = run_chain(model, args.n, args.beta, args.steps, args.burn_in,
                      args.seed)
    spec = model.spec
    n = args.n
    rows = []
    stride = max(1, (args.steps - args.burn_in) // max(stats.energy_trace.size, 1))
    for k, energy in enumerate(stats.energy_trace):
        if spec.is_log:
            scaled = (energy - n * n * model.energy_E
                      + n / spec.d * math.log(n)) / n
        else:
            scaled = (energy - n * n * model.energy_E) / n ** (1 + spec.s / spec.d)
        rows.append([args.burn_in + k * stride, float(energy), float(scaled)])
    _emit_csv(args.out, ["step", "energy", "next_order_scaled"], rows)
    summary = {
        "command": "sample",
        "config": _resolved(args),
        "kernel_spec": spec.as_dict(),
        "stats": stats.as_dict(),
        "backend": BACKEND,
    }
    print(json.dumps(summary, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser plumbing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riesz-lab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=_positive_int,
                       default=os.cpu_count() or 1)
        p.add_argument("--out", default=None)
        p.add_argument("--no-timestamp", action="store_true")
        p.add_argument("--config", default=None, help="key = value defaults file")

    p = sub.add_parser("zeta", help="evaluate the Riemann zeta function")
    common(p)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=_cmd_zeta)

    p = sub.add_parser("minimize", help="multistart minimization of H_n")
    common(p)
    p.add_argument("--model", type=_model_name, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=8)
    p.add_argument("--max-iterations", type=_positive_int, default=5000)
    p.add_argument("--append-csv", default=None,
                   help="append an (n, value) row for later fitting")
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("split-check", help="splitting-identity report rows")
    common(p)
    p.add_argument("--model", type=_model_name, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--count", type=_positive_int, default=10)
    p.set_defaults(func=_cmd_split_check)

    p = sub.add_parser("fit", help="fit the energy expansion to (n, value) data")
    common(p)
    p.add_argument("--model", type=_model_name, required=True)
    p.add_argument("--data", required=True, help="CSV with n,value columns")
    p.add_argument("--xi", type=float, default=None,
                   help="also report the predicted constant for this xi")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("lattice-scan",
                       help="scan relative lattice energies over tau")
    common(p)
    p.add_argument("--s", type=_riesz_2d_s, default=None,
                   help="Riesz exponent in (0, 2); omit for the 2D log case")
    p.add_argument("--resolution", type=_positive_int, default=64)
    p.set_defaults(func=_cmd_lattice_scan)

    p = sub.add_parser("green1d", help="1D torus Green function, both paths")
    common(p)
    p.add_argument("--N", type=float, default=1.0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=_cmd_green1d)

    p = sub.add_parser("periodic-w", help="renormalized energy of torus points")
    common(p)
    p.add_argument("--points", required=True, help="file with one point per line")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=None)
    p.set_defaults(func=_cmd_periodic_w)

    p = sub.add_parser("sample", help="Metropolis sampling of the Gibbs measure")
    common(p)
    p.add_argument("--model", type=_model_name, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--beta", type=_positive_float, required=True)
    p.add_argument("--steps", type=_positive_int, default=100000)
    p.add_argument("--burn-in", type=_nonneg_int, default=10000)
    p.set_defaults(func=_cmd_sample)

    return parser


def _config_file_args(argv):
    """Prepend key = value pairs from --config so explicit flags win."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if not path:
        return argv
    if not os.path.exists(path):
        raise RieszLabError(f"config file not found: {path}")
    extra = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise RieszLabError(f"malformed config line: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "yes"):
                extra.append(flag)
            else:
                extra.extend([flag, value])
    return argv[:1] + extra + argv[1:]


def run(argv) -> int:
    argv = list(argv)
    try:
        argv = _config_file_args(argv)
        parser = _build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code in (0, None) else 1
        return args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except RieszLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
