"""Command-line entry points.

Subcommands:
  run     -- replicate a simulation study from a TOML config
  impute  -- complete a CSV matrix with one structured missing block
  eval    -- score an estimate against a truth matrix over a target mask

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .completion import CompletionOptions, macomss
from .core import BlockPartition, new_masked_matrix
from .errors import ConvergenceFailure, MacomssError, SingularSubmatrix
from .evaluation import nmse
from .harness import ExperimentConfig, run_experiment
from .numerics import frobenius_norm, spectral_norm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class DataError(Exception):
    pass


def _parse_csv_matrix(path: str) -> tuple[np.ndarray, np.ndarray, list[str] | None]:
    """Parse a CSV into (values, observed-mask, header). 'NA' (case-insensitive)
    marks missing; an unparseable first row is treated as a header."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            raw = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise DataError(f"{path} is empty")

    def parse_cell(cell, i, j):
        cell = cell.strip()
        if cell.upper() == "NA":
            return np.nan, 0
        try:
            return float(cell), 1
        except ValueError:
            raise DataError(
                f"{path}: malformed cell {cell!r} at row {i + 1}, column {j + 1}") from None

    header = None
    first = raw[0]
    try:
        for j, cell in enumerate(first):
            parse_cell(cell, 0, j)
    except DataError:
        header = [c.strip() for c in first]
        raw = raw[1:]
        if not raw:
            raise DataError(f"{path} has a header but no data rows") from None

    offset = 1 if header is not None else 0
    width = len(raw[0])
    values = np.zeros((len(raw), width))
    mask = np.zeros((len(raw), width), dtype=np.int8)
    for i, row in enumerate(raw):
        if len(row) != width:
            raise DataError(f"{path}: row {i + offset + 1} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            values[i, j], mask[i, j] = parse_cell(cell, i + offset, j)
    values[mask == 0] = 0.0
    return values, mask, header


def _write_csv_matrix(path: str, grid: np.ndarray, header: list[str] | None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for row in grid:
            writer.writerow([repr(float(v)) for v in row])


def _load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    seed_env = os.environ.get("MACOMSS_SEED")
    if seed_env is not None:
        data["seed"] = int(seed_env)
    if "methods" in data:
        data["methods"] = tuple(data["methods"])
    return ExperimentConfig(**data)


def _cmd_run(args) -> int:
    try:
        config = _load_config(args.config)
        if args.replicates is not None:
            config = ExperimentConfig(**{**config.__dict__, "replicates": args.replicates})
        if args.workers is not None:
            config = ExperimentConfig(**{**config.__dict__, "workers": args.workers})
    except (OSError, ValueError, TypeError, tomllib.TOMLDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report, timings = run_experiment(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    with open(out / "replicates.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "method", "metric", "value"])
        for row in report.rows:
            for metric in ("frob_loss", "spec_loss", "rel_frob_loss", "nmse", "auc", "r_hat"):
                value = row[metric]
                writer.writerow([row["replicate"], row["method"], metric,
                                 "NA" if value is None else repr(value)])
    with open(out / "timings.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "runtime_ms"])
        for t in timings:
            writer.writerow([t["replicate"], f"{t['runtime_ms']:.3f}"])
    print(f"wrote {out / 'report.json'}")
    return EXIT_OK


def _cmd_impute(args) -> int:
    try:
        values, mask, header = _parse_csv_matrix(args.input)
    except DataError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DATA
    try:
        partition = BlockPartition(values.shape[0], values.shape[1], args.m1, args.m2)
        y = new_masked_matrix(values, mask, partition)
    except MacomssError as exc:
        print(f"partition inconsistency: {exc}", file=sys.stderr)
        return EXIT_DATA
    opts = CompletionOptions(r0_mode=args.r0, eta_const=args.eta)
    try:
        result = macomss(y, opts)
    except (ConvergenceFailure, SingularSubmatrix) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MacomssError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _write_csv_matrix(args.output, result.a_hat, header)
    sidecar = {
        "r_hat": result.r_hat,
        "r0_used": result.r0_used,
        "criterion_side": result.criterion_side,
        "diagnostics": result.diagnostics,
    }
    Path(args.output + ".report.json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    try:
        estimate, _, _ = _parse_csv_matrix(args.estimate)
        truth, _, _ = _parse_csv_matrix(args.truth)
        mask, _, _ = _parse_csv_matrix(args.mask)
    except DataError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DATA
    if estimate.shape != truth.shape or mask.shape != truth.shape:
        print("eval inputs must share a shape", file=sys.stderr)
        return EXIT_DATA
    try:
        score = nmse(estimate, truth, mask)
    except MacomssError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    diff = estimate - truth
    print(f"nmse={score!r}")
    print(f"frob_loss={frobenius_norm(diff)!r}")
    print(f"spec_loss={spectral_norm(diff)!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macomss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a config-driven experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--replicates", type=int, default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--out", default="macomss-out")
    run.set_defaults(func=_cmd_run)

    imp = sub.add_parser("impute", help="complete a CSV matrix")
    imp.add_argument("--input", required=True)
    imp.add_argument("--m1", type=int, required=True, help="observable row count")
    imp.add_argument("--m2", type=int, required=True, help="observable column count")
    imp.add_argument("--r0", default="min_dims",
                     choices=["min_dims", "hsvt_heuristic"])
    imp.add_argument("--eta", type=float, default=2.0)
    imp.add_argument("--output", required=True)
    imp.set_defaults(func=_cmd_impute)

    ev = sub.add_parser("eval", help="score an estimate against a truth matrix")
    ev.add_argument("--estimate", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--mask", required=True)
    ev.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
