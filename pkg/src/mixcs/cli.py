"""Command-line interface: matrix generation, spectral checks, RIP
estimation, recovery, and the benchmark sweeps.

Every run writes its outputs plus a manifest JSON recording the resolved
config, master seed, tool version, output list and wall-clock duration.
Exit codes: 0 success, 1 validation error, 2 runtime/solver error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import __version__
from .ensembles import (
    MixedGraphModel,
    mixed_measurement,
    moment_check,
    named_law,
    sample_iid_matrix,
    MeasurementMatrix,
)
from .errors import MixcsError, ValidationError
from .experiments import (
    ENSEMBLES,
    image_experiment,
    success_vs_measurements,
    success_vs_sparsity,
)
from .imaging import read_pgm, synthetic_test_image, write_pgm
from .matrixio import (
    fmt_float,
    load_matrix,
    load_vector_csv,
    save_csmat,
    save_matrix_csv,
)
from .reporting import (
    IMAGE_CSV_HEADER,
    SUCCESS_CSV_HEADER,
    plot_image_panel,
    plot_spectral_reports,
    plot_success_curves,
    write_lines_csv,
    write_success_curves_csv,
)
from .rip import RIP_CSV_HEADER, delta_exhaustive, delta_monte_carlo
from .rng import derive_seed
from .solver import bpdn
from .spectral import CSV_HEADER as SPECTRAL_CSV_HEADER
from .spectral import bai_yin_check, semicircle_edge_check


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_NAMED_LAWS = ("gaussian-unit", "bernoulli-sym", "three-point")

# config schemas: key -> (type-checker label, default, validator)
_POS_INT = ("positive integer", lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 1)
_NONNEG_INT = ("non-negative integer", lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0)
_POS_REAL = ("positive number", lambda v: isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0)
_NONNEG_REAL = ("non-negative number", lambda v: isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0)


def _grid_checker(v):
    return (
        isinstance(v, list) and len(v) > 0
        and all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in v)
        and sorted(v) == v
    )


_GRID = ("ascending list of non-negative integers", _grid_checker)
_ENSEMBLE_LIST = (
    "list of ensemble names",
    lambda v: isinstance(v, list) and len(v) > 0
    and all(e in ("gaussian", "bernoulli", "three-point", "s-mixed") for e in v),
)
_IMAGE = ("string path or \"synthetic\"", lambda v: isinstance(v, str) and len(v) > 0)

CONFIG_SCHEMAS = {
    "bench-sparsity": {
        "ensembles": (_ENSEMBLE_LIST, list(ENSEMBLES)),
        "N": (_POS_INT, 256),
        "n": (_POS_INT, 100),
        "k_grid": (_GRID, [10, 20, 30, 40]),
        "trials": (_POS_INT, 1000),
        "master_seed": (_NONNEG_INT, 1),
        "threshold": (_POS_REAL, 1e-4),
        "eps": (_NONNEG_REAL, 0.0),
        "solver_tol": (_POS_REAL, 1e-6),
        "solver_max_iter": (_POS_INT, 3000),
    },
    "bench-measurements": {
        "ensembles": (_ENSEMBLE_LIST, list(ENSEMBLES)),
        "N": (_POS_INT, 256),
        "k": (_POS_INT, 20),
        "n_grid": (_GRID, [60, 70, 80, 90, 95, 100, 110, 120]),
        "trials": (_POS_INT, 1000),
        "master_seed": (_NONNEG_INT, 1),
        "threshold": (_POS_REAL, 1e-4),
        "eps": (_NONNEG_REAL, 0.0),
        "solver_tol": (_POS_REAL, 1e-6),
        "solver_max_iter": (_POS_INT, 3000),
    },
    "bench-image": {
        "ensembles": (_ENSEMBLE_LIST, list(ENSEMBLES)),
        "image": (_IMAGE, "synthetic"),
        "n": (_POS_INT, 2400),
        "eps": (_NONNEG_REAL, 0.0),
        "master_seed": (_NONNEG_INT, 1),
        "solver_tol": (_POS_REAL, 1e-6),
        "solver_max_iter": (_POS_INT, 3000),
    },
}


def load_config(command: str, source) -> dict:
    """Validate a config dict (or JSON file path) against the command schema.

    Unknown keys are rejected; defaults are filled for missing keys.
    """
    if command not in CONFIG_SCHEMAS:
        raise ValidationError(f"no config schema for command {command!r}")
    schema = CONFIG_SCHEMAS[command]
    if source is None:
        raw = {}
    elif isinstance(source, dict):
        raw = dict(source)
    else:
        try:
            with open(source) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {source} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValidationError(f"config {source} must hold a JSON object")
    unknown = set(raw) - set(schema)
    if unknown:
        raise ValidationError(
            f"unknown config key(s) {sorted(unknown)} for {command}; "
            f"allowed: {sorted(schema)}"
        )
    resolved = {}
    for key, ((label, check), default) in schema.items():
        value = raw.get(key, default)
        if not check(value):
            raise ValidationError(f"config key {key!r}: expected {label}, got {value!r}")
        resolved[key] = value
    return resolved


def _resolve_jobs(args) -> int:
    env = os.environ.get("MIXCS_JOBS")
    if env is not None:
        try:
            jobs = int(env)
        except ValueError as exc:
            raise ValidationError(f"MIXCS_JOBS must be an integer, got {env!r}") from exc
    else:
        jobs = args.jobs if getattr(args, "jobs", None) else (os.cpu_count() or 1)
    if jobs < 1:
        raise ValidationError(f"jobs must be >= 1, got {jobs}")
    return jobs


def _write_manifest(primary_out, command, config, master_seed, outputs, t0):
    path = str(primary_out) + ".manifest.json"
    manifest = {
        "command": command,
        "config": config,
        "master_seed": master_seed,
        "tool_version": __version__,
        "outputs": [str(o) for o in outputs],
        "duration_seconds": time.time() - t0,
    }
    for out in outputs:
        if not os.path.exists(str(out)):
            raise MixcsError(f"declared output missing at exit: {out}")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _save_matrix(matrix: MeasurementMatrix, out: str):
    if out.endswith(".csv"):
        save_matrix_csv(matrix, out)
    else:
        save_csmat(matrix, out)


def _cmd_gen_matrix(args) -> int:
    t0 = time.time()
    if args.n < 1 or args.N < 1:
        raise ValidationError("--n and --N must be positive")
    scale = not args.raw
    if args.ensemble == "s-mixed":
        if args.n > args.N:
            raise ValidationError("s-mixed needs n <= N (rows subsampled from N×N parent)")
        model = MixedGraphModel(args.N, named_law(args.diag_law), named_law(args.offdiag_law))
        matrix = mixed_measurement(model, args.n, args.seed, scale=scale)
    else:
        law = named_law({"gaussian": "gaussian-unit", "bernoulli": "bernoulli-sym",
                         "three-point": "three-point"}[args.ensemble])
        matrix = sample_iid_matrix(law, args.n, args.N, args.seed)
        if scale:
            s = 1.0 / math.sqrt(args.n)
            matrix = MeasurementMatrix(matrix.entries * s, scaling=s,
                                       provenance=matrix.provenance)
    _save_matrix(matrix, args.out)
    config = {"ensemble": args.ensemble, "n": args.n, "N": args.N, "seed": args.seed,
              "raw": args.raw, "diag_law": args.diag_law, "offdiag_law": args.offdiag_law,
              "out": args.out}
    _write_manifest(args.out, "gen-matrix", config, args.seed, [args.out], t0)
    print(f"wrote {args.out} ({matrix.n}x{matrix.N}, scaling={fmt_float(matrix.scaling)})")
    return 0


def _cmd_spectral_check(args) -> int:
    t0 = time.time()
    reports = []
    if args.law == "bai-yin":
        spec = named_law(args.dist)
        for i in range(args.seeds):
            seed = derive_seed(args.seed, "spectral:bai-yin", i)
            reports.append(bai_yin_check(spec, args.n, args.y, seed))
        labels = ("sqrt(v)(1-sqrt(y))", "sqrt(v)(1+sqrt(y))")
    else:
        model = MixedGraphModel(max(args.n, 1), named_law(args.diag_law),
                                named_law(args.offdiag_law))
        for i in range(args.seeds):
            seed = derive_seed(args.seed, "spectral:semicircle", i)
            reports.append(semicircle_edge_check(model, args.n, seed))
        labels = ("-2*sigma", "2*sigma")
    write_lines_csv(args.out, SPECTRAL_CSV_HEADER, (r.csv_line() for r in reports))
    fig_path = os.path.splitext(args.out)[0] + ".png"
    plot_spectral_reports(reports, labels, fig_path)
    config = {"law": args.law, "n": args.n, "y": args.y, "dist": args.dist,
              "diag_law": args.diag_law, "offdiag_law": args.offdiag_law,
              "seeds": args.seeds, "master_seed": args.seed, "out": args.out}
    _write_manifest(args.out, "spectral-check", config, args.seed,
                    [args.out, fig_path], t0)
    worst = max(r.abs_deviation for r in reports)
    print(f"wrote {args.out} ({args.seeds} seeds, worst |obs-pred| = {fmt_float(worst)})")
    return 0


def _cmd_rip(args) -> int:
    t0 = time.time()
    matrix = load_matrix(args.matrix)
    if args.exhaustive:
        est = delta_exhaustive(matrix, args.k)
    else:
        est = delta_monte_carlo(matrix, args.k, args.trials, args.seed)
    print(f"delta = {fmt_float(est.delta)}")
    print(RIP_CSV_HEADER)
    print(est.csv_line())
    if args.out:
        write_lines_csv(args.out, RIP_CSV_HEADER, [est.csv_line()])
        config = {"matrix": args.matrix, "k": args.k, "exhaustive": bool(args.exhaustive),
                  "trials": None if args.exhaustive else args.trials,
                  "seed": args.seed, "out": args.out}
        _write_manifest(args.out, "rip", config, args.seed, [args.out], t0)
    return 0


def _cmd_recover(args) -> int:
    t0 = time.time()
    matrix = load_matrix(args.matrix)
    y = load_vector_csv(args.y)
    res = bpdn(matrix, y, args.eps, tol=args.tol, max_iter=args.max_iter)
    with open(args.out, "w", newline="") as fh:
        fh.write(
            f"# objective={fmt_float(res.objective)} residual={fmt_float(res.residual)} "
            f"iterations={res.iterations} status={res.status}\n"
        )
        fh.write("index,value\n")
        for i, v in enumerate(res.x_star):
            if abs(v) > 1e-10:
                fh.write(f"{i},{fmt_float(v)}\n")
    config = {"matrix": args.matrix, "y": args.y, "eps": args.eps, "tol": args.tol,
              "max_iter": args.max_iter, "out": args.out}
    _write_manifest(args.out, "recover", config, None, [args.out], t0)
    print(f"status={res.status} objective={fmt_float(res.objective)} "
          f"residual={fmt_float(res.residual)} iterations={res.iterations}")
    return 0


def _cmd_moments(args) -> int:
    t0 = time.time()
    spec = named_law(args.law)
    rep = moment_check(spec, args.samples, args.seed)
    lines = [
        f"mean={fmt_float(rep.mean)}",
        f"variance={fmt_float(rep.variance)}",
        f"fourth_moment={fmt_float(rep.fourth_moment)}",
        f"positive_part_second_moment={fmt_float(rep.positive_part_second_moment)}",
    ]
    print("\n".join(lines))
    if args.out:
        header = "mean,variance,fourth_moment,positive_part_second_moment"
        row = ",".join(fmt_float(v) for v in (rep.mean, rep.variance, rep.fourth_moment,
                                              rep.positive_part_second_moment))
        write_lines_csv(args.out, header, [row])
        config = {"law": args.law, "samples": args.samples, "seed": args.seed,
                  "out": args.out}
        _write_manifest(args.out, "moments", config, args.seed, [args.out], t0)
    return 0


def _run_bench_curves(command, args, sweep_fn, param_name):
    t0 = time.time()
    cfg = load_config(command, args.config)
    jobs = _resolve_jobs(args)
    done_rows: list[str] = []

    def progress(ensemble, value, pt):
        done_rows.append(",".join([
            ensemble, str(pt.param), str(pt.trials), str(pt.successes),
            fmt_float(pt.rate), fmt_float(pt.mean_rel_error), fmt_float(pt.mean_iterations),
        ]))
        print(f"[{command}] {ensemble} {param_name}={value}: rate={pt.rate:.3f} "
              f"({len(done_rows)} points done)", file=sys.stderr)

    kwargs = dict(
        ensembles=cfg["ensembles"], N=cfg["N"], trials=cfg["trials"],
        master_seed=cfg["master_seed"], threshold=cfg["threshold"], eps=cfg["eps"],
        solver_tol=cfg["solver_tol"], solver_max_iter=cfg["solver_max_iter"],
        jobs=jobs, progress=progress,
    )
    if command == "bench-sparsity":
        kwargs.update(n=cfg["n"], k_grid=cfg["k_grid"])
    else:
        kwargs.update(k=cfg["k"], n_grid=cfg["n_grid"])
    try:
        curves = sweep_fn(**kwargs)
    except Exception as exc:
        # flush what completed, marked, before the error propagates
        write_lines_csv(args.out, SUCCESS_CSV_HEADER,
                        done_rows + [f"#error:{type(exc).__name__}:{exc}"])
        raise
    write_success_curves_csv(args.out, curves)
    fig_path = os.path.splitext(args.out)[0] + ".png"
    plot_success_curves(curves, "sparsity k" if param_name == "k" else "measurements n",
                        fig_path)
    _write_manifest(args.out, command, cfg, cfg["master_seed"], [args.out, fig_path], t0)
    print(f"wrote {args.out} and {fig_path}")
    return 0


def _cmd_bench_sparsity(args) -> int:
    return _run_bench_curves("bench-sparsity", args, success_vs_sparsity, "k")


def _cmd_bench_measurements(args) -> int:
    return _run_bench_curves("bench-measurements", args, success_vs_measurements, "n")


def _cmd_bench_image(args) -> int:
    t0 = time.time()
    cfg = load_config("bench-image", args.config)
    image = synthetic_test_image() if cfg["image"] == "synthetic" else read_pgm(cfg["image"])
    stem = os.path.splitext(args.out)[0]
    rows = []
    panels = []
    outputs = [args.out]
    try:
        for ensemble in cfg["ensembles"]:
            seed = derive_seed(cfg["master_seed"], f"image:{ensemble}")
            rep = image_experiment(image, cfg["n"], ensemble, seed, eps=cfg["eps"],
                                   solver_tol=cfg["solver_tol"],
                                   solver_max_iter=cfg["solver_max_iter"])
            pgm_path = f"{stem}-{ensemble}.pgm"
            write_pgm(pgm_path, rep.reconstruction)
            outputs.append(pgm_path)
            rows.append(",".join([
                ensemble, str(cfg["n"]), str(image.size), str(rep.sparsity),
                fmt_float(rep.mse), str(rep.result.iterations), rep.result.status,
            ]))
            panels.append((ensemble, rep.reconstruction, rep.mse))
            print(f"[bench-image] {ensemble}: MSE={rep.mse:.6f} "
                  f"({rep.result.iterations} iterations)", file=sys.stderr)
    except Exception as exc:
        write_lines_csv(args.out, IMAGE_CSV_HEADER,
                        rows + [f"#error:{type(exc).__name__}:{exc}"])
        raise
    write_lines_csv(args.out, IMAGE_CSV_HEADER, rows)
    fig_path = stem + ".png"
    plot_image_panel(image, panels, fig_path)
    outputs.append(fig_path)
    _write_manifest(args.out, "bench-image", cfg, cfg["master_seed"], outputs, t0)
    print(f"wrote {args.out} and {fig_path}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="mixcs", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mixcs {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("gen-matrix", help="sample a measurement matrix to CSMAT1/CSV")
    p.add_argument("--ensemble", required=True,
                   choices=["gaussian", "bernoulli", "three-point", "s-mixed"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--raw", action="store_true", help="skip the n^(-1/2) scaling")
    p.add_argument("--diag-law", default="gaussian-unit", choices=_NAMED_LAWS)
    p.add_argument("--offdiag-law", default="bernoulli-sym", choices=_NAMED_LAWS)
    p.set_defaults(func=_cmd_gen_matrix)

    p = sub.add_parser("spectral-check", help="empirical spectral-edge law checks")
    p.add_argument("--law", required=True, choices=["bai-yin", "semicircle"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--y", type=float, default=0.25)
    p.add_argument("--dist", default="gaussian-unit", choices=_NAMED_LAWS)
    p.add_argument("--diag-law", default="gaussian-unit", choices=_NAMED_LAWS)
    p.add_argument("--offdiag-law", default="bernoulli-sym", choices=_NAMED_LAWS)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="spectral-check.csv")
    p.set_defaults(func=_cmd_spectral_check)

    p = sub.add_parser("rip", help="estimate the restricted-isometry constant")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--exhaustive", action="store_true")
    group.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_rip)

    p = sub.add_parser("recover", help="l1 recovery from a matrix and measurement vector")
    p.add_argument("--matrix", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("moments", help="empirical moment report for a named law")
    p.add_argument("--law", required=True, choices=_NAMED_LAWS)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_moments)

    for name, fn in (("bench-sparsity", _cmd_bench_sparsity),
                     ("bench-measurements", _cmd_bench_measurements)):
        p = sub.add_parser(name, help=f"{name} sweep (JSON config)")
        p.add_argument("--config", help="JSON config path (defaults apply if omitted)")
        p.add_argument("--out", default=f"{name}.csv")
        p.add_argument("--jobs", type=int, default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("bench-image", help="image reconstruction benchmark (JSON config)")
    p.add_argument("--config", help="JSON config path (defaults apply if omitted)")
    p.add_argument("--out", default="bench-image.csv")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=_cmd_bench_image)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MixcsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime errors keep the exit-code contract
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
