"""Command-line front end: ``g5 check`` and ``g5 run``.

Exit codes: 0 all checks pass, 1 a tolerance failed, 2 usage or config
error, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import checks, io
from .config import ConfigError, ScenarioConfig, parse_config
from .runner import run_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _seed(default: int = 0) -> int:
    env = os.environ.get("G5_SEED")
    if env is None or env == "":
        return default
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"G5_SEED must be an integer, got {env!r}") from None


def _emit(result, outdir: Path):
    """Write report.json and, when available, the series CSVs and state.bin."""
    outdir.mkdir(parents=True, exist_ok=True)
    io.write_report(outdir / "report.json", result.entries)
    for name, records in result.series.items():
        io.write_series(outdir / f"{name}.csv", records)
    if result.state is not None:
        io.write_state(outdir / "state.bin", result.state)


def _run_one(cfg: ScenarioConfig, outdir: str) -> tuple[int, list[str]]:
    try:
        result = run_scenario(cfg)
    except (ValueError, TypeError) as exc:
        return EXIT_USAGE, [f"error: {exc}"]
    lines = result.lines()
    try:
        _emit(result, Path(outdir))
    except OSError as exc:
        return EXIT_IO, lines + [f"error: cannot write outputs to {outdir}: {exc}"]
    return (EXIT_OK if result.passed else EXIT_FAIL), lines


def _output_dirs(configs: list[Path], out: Path) -> list[Path]:
    if len(configs) == 1:
        return [out]
    dirs = [out / p.stem for p in configs]
    if len({d.resolve() for d in dirs}) != len(dirs):
        raise ConfigError("config files must have distinct names when running several at once")
    return dirs


def cmd_check(args) -> int:
    seed = _seed(args.seed)
    results = checks.run_suite(seed, quick=args.quick)
    for r in results:
        print(r.line())
    npass = sum(r.passed for r in results)
    print(f"{npass}/{len(results)} checks passed (seed {seed})")
    if args.out:
        entries = [{"scenario": "check", "name": r.name, "metric": "max_error", "value": r.value,
                    "tolerance": r.tol, "pass": r.passed} for r in results]
        try:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            io.write_report(Path(args.out) / "report.json", entries)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if npass == len(results) else EXIT_FAIL


def cmd_run(args) -> int:
    paths = [Path(p) for p in args.configs]
    cfgs = []
    for p in paths:
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot read {p}: {exc}", file=sys.stderr)
            return EXIT_IO
        try:
            cfg = parse_config(text)
        except ConfigError as exc:
            print(f"{p}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if os.environ.get("G5_SEED"):
            cfg = dataclasses.replace(cfg, seed=_seed(cfg.seed))
        cfgs.append(cfg)

    if args.dump_config:
        for p, cfg in zip(paths, cfgs):
            if len(cfgs) > 1:
                print(f"# {p}")
            sys.stdout.write(cfg.dump())
        return EXIT_OK

    dirs = _output_dirs(paths, Path(args.out))
    jobs = max(1, args.jobs)
    if jobs == 1 or len(cfgs) == 1:
        outcomes = [_run_one(c, str(d)) for c, d in zip(cfgs, dirs)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, cfgs, [str(d) for d in dirs]))

    status = EXIT_OK
    for p, (code, lines) in zip(paths, outcomes):
        for line in lines:
            print(f"{p.name}: {line}")
        status = max(status, code)
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="g5", description="5D covariant non-relativistic quantum mechanics")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="run the group5/geometry5/clifford invariant suites")
    pc.add_argument("--seed", type=int, default=0, help="RNG seed (G5_SEED overrides)")
    pc.add_argument("--quick", action="store_true", help="smaller random samples")
    pc.add_argument("--out", default=None, help="also write report.json here")
    pc.set_defaults(func=cmd_check)

    pr = sub.add_parser("run", help="run scenario config files")
    pr.add_argument("configs", nargs="+", help="config files")
    pr.add_argument("--out", default="g5_out", help="output directory (one subdirectory per config when several)")
    pr.add_argument("--jobs", type=int, default=1, help="run configs concurrently")
    pr.add_argument("--dump-config", action="store_true", help="print the normalised configs and exit")
    pr.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
