"""Command-line front end: ``wsnsens {simulate,profile,analyze,sweep,report}``.

Exit status: 0 success, 2 usage error, 3 data error (unreadable or
inconsistent dataset/report), 4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .config import (
    PARAMETER_NAMES,
    ArenaSpec,
    CostModel,
    WsnConfig,
    arena_from_mapping,
    check_known_keys,
    cost_from_mapping,
    read_key_values,
    wsn_config_from_mapping,
)
from .errors import (
    ConfigurationError,
    DatasetIntegrityError,
    DatasetParseError,
    DegenerateInputError,
    InsufficientDataError,
)
from .profiler import (
    SCHEMES,
    ParameterSpace,
    execute_plan,
    load_dataset,
    record_to_json,
    sample_configs,
    save_dataset,
    space_from_mapping,
)
from .sim import run
from .stats import DEFAULT_ALPHA, extract_effective, render_table, rows_from_csv
from .sweep import sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CONFIG = 4


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsnsens",
        description="Simulate sensor-network energy use and screen configuration parameters.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, out_required=False, workers=False):
        p.add_argument("--config", type=Path, help="flat key = value config file")
        p.add_argument("--seed", type=int, default=0, help="seed (master seed for campaigns)")
        p.add_argument("--out", type=Path, required=out_required, help="output path")
        if workers:
            p.add_argument("--workers", type=_positive_int, default=1, help="parallel worker processes")

    p = sub.add_parser("simulate", help="run one simulation and print its record")
    common(p)

    p = sub.add_parser("profile", help="run a sampled campaign and write a dataset")
    common(p, out_required=True, workers=True)
    p.add_argument("--runs", "-M", dest="runs", type=_count, default=800, help="number of runs (default 800)")
    p.add_argument("--scheme", choices=SCHEMES, default="uniform")
    p.add_argument("--duration", type=_count, help="override the arena duration in ticks")

    p = sub.add_parser("analyze", help="screen a dataset and write a sensitivity report")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.add_argument("--out", type=Path, help="CSV report path (text table goes next to it as .txt)")

    p = sub.add_parser("sweep", help="sweep one parameter over a baseline configuration")
    common(p, out_required=True, workers=True)
    p.add_argument("--param", required=True, help="parameter to sweep")
    p.add_argument("--values", type=_values, required=True, help="comma-separated values")
    p.add_argument("--repeats", type=_positive_int, default=20)
    p.add_argument("--duration", type=_count, help="override the arena duration in ticks")

    p = sub.add_parser("report", help="render a CSV report as an aligned text table")
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--out", type=Path)
    return parser


def parse_command(argv=None) -> argparse.Namespace:
    """Parse and validate an argument vector; usage errors exit with status 2."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        if args.param not in PARAMETER_NAMES:
            parser.error(f"unknown --param {args.param!r}; valid names: {', '.join(PARAMETER_NAMES)}")
        if not args.values:
            parser.error("--values must list at least one value")
    return args


def _load_setup(path: Path | None):
    mapping = read_key_values(path) if path is not None else {}
    check_known_keys(mapping)
    return (
        arena_from_mapping(mapping),
        cost_from_mapping(mapping),
        wsn_config_from_mapping(mapping),
        space_from_mapping(mapping),
    )


def _with_duration(arena: ArenaSpec, duration) -> ArenaSpec:
    if duration is None:
        return arena
    data = arena.to_dict()
    data["duration"] = duration
    return ArenaSpec(**data)


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def cmd_simulate(args) -> int:
    arena, cost, baseline, _ = _load_setup(args.config)
    line = record_to_json(run(baseline, arena, cost, args.seed)) + "\n"
    if args.out:
        _write(args.out, line)
    sys.stdout.write(line)
    return EXIT_OK


def cmd_profile(args) -> int:
    arena, cost, _, space = _load_setup(args.config)
    arena = _with_duration(arena, args.duration)
    started = time.perf_counter()
    plan = sample_configs(space, args.runs, args.scheme, args.seed)
    dataset = execute_plan(plan, arena, cost, workers=args.workers, space=space)
    save_dataset(dataset, args.out)
    elapsed = time.perf_counter() - started
    print(f"M = {dataset.M}  elapsed = {elapsed:.1f} s  -> {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    dataset = load_dataset(args.dataset)
    report = extract_effective(dataset, args.alpha)
    text = report.to_text()
    for row in report.rows:
        if row.degenerate or row.diagnostic:
            print(f"warning: {row.parameter}: {row.diagnostic or 'degenerate'}", file=sys.stderr)
    if args.out:
        _write(args.out, report.to_csv())
        _write(args.out.with_suffix(".txt"), text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    arena, cost, baseline, space = _load_setup(args.config)
    arena = _with_duration(arena, args.duration)
    low, high = space.bounds[args.param]
    outside = [v for v in args.values if not low <= v <= high]
    if outside:
        raise ConfigurationError(f"--values {outside} fall outside [{low}, {high}] for {args.param}")
    result = sweep(args.param, args.values, baseline, arena, cost, args.repeats, args.seed, args.workers)
    _write(args.out, result.to_csv())
    print(f"{len(result.rows)} rows x {args.repeats} repeats -> {args.out}")
    return EXIT_OK


def cmd_report(args) -> int:
    text = render_table(rows_from_csv(args.report.read_text(encoding="utf-8")))
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "profile": cmd_profile,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = parse_command(argv)
    try:
        return COMMANDS[args.command](args)
    except (DatasetParseError, DatasetIntegrityError, InsufficientDataError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
