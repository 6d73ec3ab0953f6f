"""Command-line front end: CSV in, JSON Betti report out.

Exit codes: 0 success, 1 usage error, 2 data error, 3 budget exceeded,
4 verify mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from .core import PointCloud, PrimeField
from .engine import BettiReport, JobError, attach_verification, run
from .rips import DEFAULT_BUDGET, BudgetExceededError


class DataFormatError(Exception):
    """Input file is malformed; message carries the line number."""


class UsageError(Exception):
    """Bad flags or configuration."""


@dataclass
class RunConfig:
    input_path: str
    epsilon: float
    scales: list
    n_max: int = 1
    field: int = 2
    workers: int = None
    grid: list = None
    budget: int = DEFAULT_BUDGET
    verify: bool = False
    output: str = None
    slack: float = 0.0
    timings: bool = True


def parse_input(path) -> PointCloud:
    """Load a CSV point cloud: one point per line, comma-separated floats.

    A single leading header line is skipped when its first token is not
    numeric; blank lines are ignored; the column count of the first data line
    is enforced on every later line.  Errors carry 1-based line numbers.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc

    rows = []
    width = None
    seen_any = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if not seen_any:
            seen_any = True
            try:
                float(fields[0])
            except ValueError:
                continue  # header line
        try:
            values = [float(f) for f in fields]
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise DataFormatError(
                f"line {lineno}: non-numeric field {bad!r}"
            ) from None
        if any(not math.isfinite(v) for v in values):
            raise DataFormatError(f"line {lineno}: non-finite coordinate")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataFormatError(
                f"line {lineno}: expected {width} fields, got {len(values)}"
            )
        rows.append(values)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return PointCloud(rows)


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def report_to_dict(report: BettiReport, timings: bool = True) -> dict:
    """JSON-ready dict with fixed key order; timing values zeroed when disabled."""
    tm = report.diagnostics.get("timings_ms", {})
    if not timings:
        tm = _zero_timings(tm)
    out = {
        "epsilon": report.epsilon,
        "field": report.field,
        "grid": list(report.grid),
        "scales": [{"scale": sr.scale, "betti": list(sr.betti)} for sr in report.scales],
        "diagnostics": {
            "leaf_count": report.diagnostics.get("leaf_count", 0),
            "max_leaf_points": report.diagnostics.get("max_leaf_points", 0),
            "ranks_f": report.diagnostics.get("ranks_f", {}),
            "timings_ms": tm,
            "warnings": list(report.diagnostics.get("warnings", [])),
        },
    }
    if report.verify is not None:
        out["verify"] = report.verify
    return out


def _zero_timings(tm):
    if isinstance(tm, dict):
        return {k: _zero_timings(v) for k, v in tm.items()}
    return 0.0


def emit_report(report: BettiReport, path=None, timings: bool = True) -> str:
    """Serialize a report (fixed key order, two-space indent, trailing newline).

    Writes to `path` when given, else returns the text for stdout.
    """
    text = json.dumps(report_to_dict(report, timings=timings), indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="mvbetti",
        description="Betti numbers of a point cloud at chosen scales, computed "
                    "by overlapping-grid decomposition with Mayer-Vietoris "
                    "assembly and optionally checked against a direct "
                    "persistence computation.",
    )
    p.add_argument("input", help="CSV file, one point per line")
    p.add_argument("--epsilon", type=float, required=True,
                   help="top scale; all requested scales must lie in (0, epsilon]")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--scales", type=str, default=None,
                   help="comma-separated list of scales")
    g.add_argument("--scale-steps", type=int, default=None, metavar="M",
                   help="use M evenly spaced scales epsilon*i/M (default 10)")
    p.add_argument("--max-dim", type=int, default=1,
                   help="highest homology dimension to report (default 1)")
    p.add_argument("--field", type=int, default=2,
                   help="prime coefficient field (default 2)")
    p.add_argument("--parallel", type=int, default=None,
                   help="max concurrent jobs; also sets the grid cell count "
                        "unless --grid is given (default: cpu count)")
    p.add_argument("--grid", type=str, default=None,
                   help="per-axis cell counts k1,..,kd (overrides --parallel)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help=f"simplex budget per region (default {DEFAULT_BUDGET})")
    p.add_argument("--verify", action="store_true",
                   help="cross-check against the direct global computation")
    p.add_argument("--output", type=str, default=None,
                   help="write the JSON report here instead of stdout")
    p.add_argument("--slack", type=float, default=0.0,
                   help="additive distance tolerance for noisy data (default 0)")
    p.add_argument("--no-timings", action="store_true",
                   help="zero out wall-clock fields for reproducible output")
    return p


def config_from_args(args) -> RunConfig:
    eps = args.epsilon
    if not (eps > 0):
        raise UsageError("--epsilon must be positive")
    if args.max_dim < 0:
        raise UsageError("--max-dim must be >= 0")
    if args.slack < 0:
        raise UsageError("--slack must be >= 0")
    if args.budget < 1:
        raise UsageError("--budget must be >= 1")
    try:
        PrimeField(args.field)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    if args.scales is not None:
        try:
            scales = [float(s) for s in args.scales.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"--scales must be comma-separated numbers: {args.scales!r}") from None
        if not scales:
            raise UsageError("--scales is empty")
    else:
        m = args.scale_steps if args.scale_steps is not None else 10
        if m < 1:
            raise UsageError("--scale-steps must be >= 1")
        scales = [eps * (i / m) for i in range(1, m + 1)]
    if any(s <= 0 or s > eps for s in scales):
        raise UsageError(f"scales must lie in (0, {eps}]")

    grid = None
    if args.grid is not None:
        try:
            grid = [int(k) for k in args.grid.split(",") if k.strip()]
        except ValueError:
            raise UsageError(f"--grid must be comma-separated integers: {args.grid!r}") from None
        if not grid or any(k < 1 for k in grid):
            raise UsageError("--grid entries must be positive integers")

    workers = args.parallel
    if workers is not None and workers < 1:
        raise UsageError("--parallel must be >= 1")

    return RunConfig(
        input_path=args.input,
        epsilon=eps,
        scales=sorted(scales),
        n_max=args.max_dim,
        field=args.field,
        workers=workers,
        grid=grid,
        budget=args.budget,
        verify=args.verify,
        output=args.output,
        slack=args.slack,
        timings=not args.no_timings,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = config_from_args(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        cloud = parse_input(cfg.input_path)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if cfg.grid is not None and len(cfg.grid) not in (1, cloud.dim):
        print(f"error: --grid needs 1 or {cloud.dim} entries, got {len(cfg.grid)}",
              file=sys.stderr)
        return 1
    grid = cfg.grid
    if grid is not None and len(grid) == 1:
        grid = grid * cloud.dim

    try:
        report = run(
            cloud, cfg.epsilon, cfg.scales,
            n_max=cfg.n_max, field=cfg.field,
            workers=cfg.workers if cfg.workers is not None else (os.cpu_count() or 1),
            grid=grid, budget=cfg.budget, slack=cfg.slack,
        )
    except JobError as exc:
        if isinstance(exc.__cause__, BudgetExceededError):
            print(f"error: {exc}", file=sys.stderr)
            return 3
        raise
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if cfg.verify:
        attach_verification(report, cloud, cfg.n_max, budget=cfg.budget,
                            slack=cfg.slack)

    try:
        text = emit_report(report, path=cfg.output, timings=cfg.timings)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 2
    if not cfg.output:
        sys.stdout.write(text)

    if cfg.verify:
        if report.verify.get("pass") is None:
            print("verify: oracle infeasible under the simplex budget", file=sys.stderr)
            return 3
        if report.verify["pass"] is False:
            print("verify: MISMATCH against the direct computation", file=sys.stderr)
            return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
