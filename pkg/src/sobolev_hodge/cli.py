"""``hodge`` command-line driver.

Commands
--------
``hodge solve --config c.json [--out dir] [--threads n]``
    Writes ``solution.bin`` and ``report.json``.
``hodge verify <suite> --config c.json``
    Writes ``<suite>.csv`` and ``<suite>_summary.json``.
``hodge sweep --param P|M|X_max --values a,b,c --config c.json``
    Writes ``sweep_<param>.csv`` and ``sweep_<param>_summary.json``.

Exit codes: 0 success, 1 verification or sweep failure, 2 zero-mode
incompatible data, 3 invalid configuration or arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import ConfigError, HodgeError, ZeroModeIncompatible
from .fieldio import dump_field
from .runner import SUITES, build_problem, run_solve

log = logging.getLogger("sobolev_hodge")

EXIT_OK, EXIT_FAIL, EXIT_ZERO_MODE, EXIT_CONFIG = 0, 1, 2, 3
_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
SWEEP_PARAMS = {"P": int, "M": int, "X_max": float}


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which collides with the zero-mode code
    def error(self, message):
        raise _ArgumentError(message)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
    Path(path).write_text(text + "\n")


def write_csv(rows, path) -> None:
    cols = []
    for row in rows:
        cols.extend(k for k in row if k not in cols)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else _fmt(row.get(k))) for k in cols})


def _fmt(val):
    if isinstance(val, (float, np.floating)):
        return repr(float(val))
    return val


def _thread_limit(n):
    if n is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _output_dir(cfg: RunConfig, override) -> Path:
    out = Path(override) if override else cfg.resolve(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(args) -> int:
    cfg = RunConfig.load(args.config)
    out = _output_dir(cfg, args.out)
    problem = build_problem(cfg)
    try:
        sol, report = run_solve(problem)
    except ZeroModeIncompatible as exc:
        print(f"error: {exc}", file=sys.stderr)
        write_json({"error": "zero_mode_incompatible", "component": exc.component,
                    "value": exc.value, "threshold": exc.threshold}, out / "report.json")
        return EXIT_ZERO_MODE
    dump_field(sol, out / "solution.bin")
    report["config"] = _config_echo(cfg)
    write_json(report, out / "report.json")
    log.info("solve finished: relative residual %.3e", report["relative_residual"])
    return EXIT_OK


def _config_echo(cfg: RunConfig) -> dict:
    g = cfg.grid
    return dict(grid=dict(N=g.N, L=g.L, M=g.M, X_max=g.X_max, P=g.P), degree=cfg.degree,
                kind=cfg.kind, data=cfg.data, seed=cfg.seed, tolerances=cfg.tolerances)


def cmd_verify(args) -> int:
    cfg = RunConfig.load(args.config)
    out = _output_dir(cfg, args.out)
    rows, summary, passed = SUITES[args.suite](cfg)
    write_csv(rows, out / f"{args.suite}.csv")
    write_json(summary, out / f"{args.suite}_summary.json")
    if not passed:
        failing = [r for r in rows if r.get("passed") is False] or rows
        print(f"verify {args.suite}: FAILED", file=sys.stderr)
        for r in failing[:10]:
            print("  " + json.dumps(r, default=_json_default, sort_keys=True), file=sys.stderr)
        return EXIT_FAIL
    print(f"verify {args.suite}: passed")
    return EXIT_OK


def parse_values(text: str, param: str) -> list:
    conv = SWEEP_PARAMS[param]
    try:
        vals = [conv(float(v)) if conv is int else conv(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep values {text!r}: {exc}") from exc
    if conv is int and any(float(v) != int(float(v)) for v in text.split(",") if v.strip()):
        raise ConfigError(f"{param} values must be integers")
    if len(vals) < 2:
        raise ConfigError("a sweep needs at least two values")
    return vals


def cmd_sweep(args) -> int:
    cfg = RunConfig.load(args.config)
    values = parse_values(args.values, args.param)
    configs = [cfg.with_grid(**{args.param: v}) for v in values]
    out = _output_dir(cfg, args.out)
    rows, failed = [], 0
    for val, c in zip(values, configs):
        t0 = time.perf_counter()
        row = dict(value=val)
        try:
            _, rep = run_solve(build_problem(c))
            row.update(
                residual=rep["relative_residual"],
                bc_violation=rep["bc_violation"],
                estimate_ratio=rep["estimate_ratio"],
                truncation_estimate=rep["truncation_estimate"],
                error="",
            )
        except HodgeError as exc:
            failed += 1
            row.update(residual=None, bc_violation=None, estimate_ratio=None, truncation_estimate=None,
                       error=type(exc).__name__)
            log.warning("sweep point %s=%s failed: %s", args.param, val, exc)
        row["wall_time"] = time.perf_counter() - t0
        rows.append(row)
    cols = ["value", "residual", "bc_violation", "estimate_ratio", "wall_time", "truncation_estimate", "error"]
    write_csv([{k: r[k] for k in cols} for r in rows], out / f"sweep_{args.param}.csv")
    # wall times are left out of the summary so it is reproducible
    write_json(dict(param=args.param, values=values, failed=failed,
                    residual=[r["residual"] for r in rows],
                    truncation_estimate=[r["truncation_estimate"] for r in rows]),
               out / f"sweep_{args.param}_summary.json")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hodge", description="Strip-model solver for the Hodge Laplacian with nonlocal boundary terms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--threads", type=int, default=None, help="cap on BLAS/FFT worker threads")

    s = sub.add_parser("solve", help="solve one problem")
    common(s)
    s.set_defaults(func=cmd_solve)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    common(v)
    v.set_defaults(func=cmd_verify)
    w = sub.add_parser("sweep", help="re-solve over a grid parameter")
    w.add_argument("--param", required=True, choices=list(SWEEP_PARAMS))
    w.add_argument("--values", required=True, help="comma-separated values")
    common(w)
    w.set_defaults(func=cmd_sweep)
    return p


def _configure_logging():
    name = os.environ.get("HODGE_LOG", "warn").lower()
    level = _LEVELS.get(name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("sobolev_hodge").setLevel(level)


def main(argv=None) -> int:
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        with _thread_limit(args.threads):
            return args.func(args)
    except _ArgumentError as exc:
        print(f"hodge: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZeroModeIncompatible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZERO_MODE


if __name__ == "__main__":
    sys.exit(main())
