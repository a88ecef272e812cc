"""Command-line experiment runner.

    elasto-coinv --list-examples
    elasto-coinv run --config ex3_circle --noise 0.01 --seed 7 --out runs/ex3
    elasto-coinv sweep --config ex3_circle --noise 0,0.01,0.05 --seeds 1 --out runs/sweep

Exit codes: 0 converged, 2 configuration error, 3 geometry error,
4 discrepancy-principle failure, 5 no convergence (including a diverged iterate).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import svg
from .cauchy import GeometryError, MorozovError
from .config import ConfigError, builtin_examples, load_config, resolve_config_path
from .geometry import DegenerateCurveError
from .inversion import Inversion, InversionResult, IterateDivergedError, StepFailure
from .pipeline import PipelineResult, fmt, history_rows, prepare

log = logging.getLogger("elasto_coinv")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_MOROZOV = 4
EXIT_NOT_CONVERGED = 5


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_artifacts(out, res: PipelineResult):
    cfg = res.config
    deg = cfg.inversion.degree
    n_imp = res.result.final.impedance.coeffs.size
    header = ["n", "E_n", "residual_norm", "alpha_reused"]
    header += [f"a{j}" for j in range(deg + 1)] + [f"b{j}" for j in range(1, deg + 1)]
    header += [f"chi{j}" for j in range(n_imp)]
    _write_csv(os.path.join(out, "history.csv"), header, history_rows(res.result))

    th, r_true, r_init, r_rec = res.boundary_table()
    _write_csv(
        os.path.join(out, "boundary.csv"),
        ["theta", "r_true", "r_init", "r_reconstructed"],
        ([fmt(a), fmt(b), fmt(c), fmt(d)] for a, b, c, d in zip(th, r_true, r_init, r_rec)),
    )
    tm, chi_true, chi_rec = res.impedance_table()
    _write_csv(
        os.path.join(out, "impedance.csv"),
        ["theta", "chi_true", "chi_reconstructed"],
        ([fmt(a), fmt(b), fmt(c)] for a, b, c in zip(tm, chi_true, chi_rec)),
    )

    def xy(r):
        # close the polar curve
        t = np.append(th, th[0])
        r = np.append(r, r[0])
        return r * np.cos(t), r * np.sin(t)

    with open(os.path.join(out, "boundary.svg"), "w") as fh:
        fh.write(svg.line_plot(
            [("exact", *xy(r_true)), ("initial", *xy(r_init)), ("reconstructed", *xy(r_rec))],
            title=f"{cfg.spec.name}: boundary (delta={cfg.spec.noise:g})",
            xlabel="x1", ylabel="x2", equal_aspect=True,
        ))
    with open(os.path.join(out, "impedance.svg"), "w") as fh:
        fh.write(svg.line_plot(
            [("exact", tm, chi_true), ("reconstructed", tm, chi_rec)],
            title=f"{cfg.spec.name}: impedance on the missing arc", xlabel="theta", ylabel="chi",
        ))
    hist = [s for s in res.result.history if np.isfinite(s.error) and s.error > 0]
    if hist:
        with open(os.path.join(out, "convergence.svg"), "w") as fh:
            fh.write(svg.line_plot(
                [("E_n", [s.n for s in hist], [np.log10(s.error) for s in hist])],
                title="stopping metric", xlabel="iteration", ylabel="log10 E_n",
            ))


def run_experiment(config_path, out_dir, overrides=(), noise=None, seed=None):
    """Run one experiment and write its artifacts; returns ``(exit_code, summary dict)``."""
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.perf_counter()
    summary = {"status": "ok", "config": str(config_path)}
    overrides = list(overrides)
    if noise is not None:
        overrides.append(f"noise.delta={noise}")
    if seed is not None:
        overrides.append(f"noise.seed={seed}")

    def finish(code, status, **extra):
        summary.update(extra)
        summary["status"] = status
        summary["exit_code"] = code
        summary["runtime_seconds"] = time.perf_counter() - t0
        summary["finished"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        if code != EXIT_OK:
            with open(os.path.join(out_dir, "FAILED"), "w") as fh:
                fh.write(f"{status}: {extra.get('message', '')}\n")
        elif os.path.exists(os.path.join(out_dir, "FAILED")):
            os.remove(os.path.join(out_dir, "FAILED"))
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
        return code, summary

    try:
        cfg = load_config(path=resolve_config_path(str(config_path)), overrides=overrides)
    except ConfigError as exc:
        return finish(EXIT_CONFIG, "config_error", message=str(exc))
    with open(os.path.join(out_dir, "config.echo"), "w") as fh:
        fh.write(cfg.to_ini())
    summary.update(name=cfg.spec.name, noise=cfg.spec.noise, seed=cfg.spec.seed)

    try:
        data, target, truth, field, reg = prepare(cfg)
    except (GeometryError, DegenerateCurveError) as exc:
        return finish(EXIT_GEOMETRY, "geometry_error", message=str(exc))
    except MorozovError as exc:
        return finish(EXIT_MOROZOV, "morozov_failure", message=str(exc))
    summary.update(alpha=reg.alpha, alpha_floored=reg.floored, discrepancy=reg.discrepancy, eps=data.eps)

    try:
        inv = Inversion(cfg.spec.material, field, target, truth.curve, cfg.inversion)
    except (GeometryError, DegenerateCurveError) as exc:
        return finish(EXIT_GEOMETRY, "geometry_error", message=str(exc))
    failure = None
    try:
        result = inv.run(cfg.spec.init_radius, cfg.spec.chi0)
    except (IterateDivergedError, StepFailure) as exc:
        failure = exc
        result = InversionResult(getattr(exc, "history", []), False)
    if not result.history:
        return finish(EXIT_NOT_CONVERGED, "diverged", message=str(failure))
    res = PipelineResult(cfg, data, truth, reg, inv, result, time.perf_counter() - t0)
    _write_artifacts(out_dir, res)
    summary.update(
        converged=result.converged,
        steps=result.steps,
        final_E_n=result.final.error,
        final_residual_norm=result.final.residual_norm,
        boundary_error=res.boundary_error,
        impedance_error=res.impedance_error,
    )
    if failure is not None:
        return finish(EXIT_NOT_CONVERGED, "diverged", message=str(failure))
    if not result.converged:
        return finish(EXIT_NOT_CONVERGED, "max_iter", message=f"no convergence in {result.steps} iterations")
    return finish(EXIT_OK, "converged")


def _sweep_one(args):
    config, out_dir, overrides, noise, seed = args
    code, summary = run_experiment(config, out_dir, overrides, noise=noise, seed=seed)
    return code, summary


SWEEP_COLUMNS = ["noise", "seed", "exit_code", "status", "steps", "alpha", "boundary_error", "impedance_error"]


def sweep(config, noise_levels, seeds, out_dir, overrides=(), workers=None):
    """Run every ``(noise, seed)`` pair; writes ``sweep.csv`` and returns its rows."""
    noise_levels = list(noise_levels)
    seeds = list(seeds)
    if not noise_levels:
        raise ConfigError("noise level list is empty")
    if not seeds:
        raise ConfigError("seed list is empty")
    os.makedirs(out_dir, exist_ok=True)
    jobs = [
        (config, os.path.join(out_dir, f"noise{nz:g}_seed{sd}"), tuple(overrides), nz, sd)
        for nz in noise_levels
        for sd in seeds
    ]
    if workers is None:
        workers = int(os.environ.get("ELASTO_COINV_THREADS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_one, jobs))
    else:
        outcomes = [_sweep_one(j) for j in jobs]
    rows = []
    for (_, _, _, nz, sd), (code, s) in zip(jobs, outcomes):
        rows.append({
            "noise": nz,
            "seed": sd,
            "exit_code": code,
            "status": s.get("status"),
            "steps": s.get("steps", ""),
            "alpha": s.get("alpha", ""),
            "boundary_error": s.get("boundary_error", ""),
            "impedance_error": s.get("impedance_error", ""),
        })

    def cell(v):
        return fmt(v) if isinstance(v, float) else str(v)

    _write_csv(os.path.join(out_dir, "sweep.csv"), SWEEP_COLUMNS, ([cell(r[c]) for c in SWEEP_COLUMNS] for r in rows))
    return rows


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser():
    p = argparse.ArgumentParser(prog="elasto-coinv", description=__doc__.split("\n")[0])
    p.add_argument("--list-examples", action="store_true", help="print the built-in example configs")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("--config", required=True, help="config file or built-in example name")
    r.add_argument("--out", default=None, help="output directory (default runs/<name>)")
    r.add_argument("--noise", type=float, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE")

    s = sub.add_parser("sweep", help="run a noise/seed sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--noise", required=True, type=_float_list, help="comma-separated noise levels")
    s.add_argument("--seeds", default=[0], type=_int_list, help="comma-separated seeds")
    s.add_argument("--out", default=None)
    s.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE")
    s.add_argument("--workers", type=int, default=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")
    if args.list_examples:
        for name in builtin_examples():
            print(name)
        return EXIT_OK
    if args.command is None:
        build_parser().print_usage(sys.stderr)
        return EXIT_CONFIG
    stem = os.path.basename(args.config)
    stem = stem[:-4] if stem.endswith(".cfg") else stem
    if args.command == "run":
        out = args.out or os.path.join("runs", stem)
        code, summary = run_experiment(args.config, out, args.overrides, args.noise, args.seed)
        keys = ("status", "steps", "alpha", "boundary_error", "impedance_error", "runtime_seconds")
        print(json.dumps({k: summary[k] for k in keys if k in summary}))
        print(f"artifacts written to {out}")
        return code
    out = args.out or os.path.join("runs", f"{stem}_sweep")
    try:
        rows = sweep(args.config, args.noise, args.seeds, out, args.overrides, args.workers)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for row in rows:
        print(", ".join(f"{c}={row[c]}" for c in SWEEP_COLUMNS))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
