"""Command-line interface: run, sweep, replay, verify.

Exit codes: 0 success, 2 a stalled run is present in the output,
3 an invariant or protocol violation was found.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import run_to_completion
from .events import EventLog, LogParseError
from .metrics import (
    MetricsError,
    build_run_meta,
    build_summary,
    collect_metrics,
    sweep,
    write_metrics_csv,
)
from .verify import verify_records
from .world import POLICY_NAMES, build_config, parse_scenario_file

EXIT_OK = 0
EXIT_STALLED = 2
EXIT_VIOLATION = 3

_FLAG_TO_KEY = {
    "scouts": "n_scouts",
    "excavators": "n_excavators",
    "haulers": "n_haulers",
    "sites": "n_sites",
    "minerals": "n_minerals",
    "arena": "arena_side",
    "scan_radius": "scan_radius",
    "tick_cap": "tick_cap",
    "seed": "seed",
    "policy": "policy",
}


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="flat key=value scenario file; flags override it")
    parser.add_argument("--scouts", type=int)
    parser.add_argument("--excavators", type=int)
    parser.add_argument("--haulers", type=int)
    parser.add_argument("--sites", type=int)
    parser.add_argument("--minerals", type=int)
    parser.add_argument("--arena", type=float)
    parser.add_argument("--scan-radius", type=float, dest="scan_radius")
    parser.add_argument("--tick-cap", type=int, dest="tick_cap")


def _scenario_from_args(args: argparse.Namespace, **extra):
    file_values = parse_scenario_file(args.config) if args.config else {}
    flag_values = {key: getattr(args, flag, None)
                   for flag, key in _FLAG_TO_KEY.items()
                   if getattr(args, flag, None) is not None}
    flag_values.update({k: v for k, v in extra.items() if v is not None})
    return build_config(file_values, flag_values)


def parse_seed_spec(spec: str) -> list[int]:
    """Seed lists like '7', '0..19' or '1,4,9'."""
    seeds: list[int] = []
    for token in spec.split(","):
        token = token.strip()
        if ".." in token:
            lo, hi = token.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif token:
            seeds.append(int(token))
    if not seeds:
        raise ValueError(f"no seeds in {spec!r}")
    return seeds


def _cmd_run(args: argparse.Namespace) -> int:
    config = _scenario_from_args(args, policy=args.policy, seed=args.seed)
    result = run_to_completion(config, snapshots=args.snapshots)
    out = Path(args.out)
    result.log.dump_jsonl(out / "events.jsonl")
    write_metrics_csv([result.metrics], out / "metrics.csv")
    summary = build_summary([result.metrics])
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (out / "run_meta.json").write_text(
        json.dumps(build_run_meta(config), indent=2, sort_keys=True) + "\n")
    print(f"{result.status.value}: policy={config.policy} seed={config.seed} "
          f"tick={result.metrics.completion_ticks} "
          f"minerals={result.simulation.ctx.world.minerals_at_plant} "
          f"messages={result.metrics.message_count}")
    print(f"outputs written to {out}")
    return EXIT_OK if result.status.value == "completed" else EXIT_STALLED


def _cmd_sweep(args: argparse.Namespace) -> int:
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for policy in policies:
        if policy not in POLICY_NAMES:
            raise ValueError(f"unknown policy {policy!r}")
    seeds = parse_seed_spec(args.seeds)
    base = _scenario_from_args(args)
    result = sweep(policies, seeds, base_config=base, out_dir=args.out,
                   snapshots=args.snapshots)
    for report in result.reports:
        print(f"{report.policy:9s} seed={report.seed:<4d} {report.status:9s} "
              f"ticks={report.completion_ticks}")
    print(f"{len(result.reports)} runs -> {args.out}")
    return EXIT_STALLED if result.any_stalled else EXIT_OK


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        log = EventLog.load_jsonl(args.log)
        report = collect_metrics(log.records)  # validates its own invariants
    except (LogParseError, MetricsError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        log = EventLog.load_jsonl(args.log)
    except LogParseError as exc:
        print(f"verify failed: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    violations = verify_records(log.records)
    if violations:
        for violation in violations:
            print(violation, file=sys.stderr)
        print(f"{len(violations)} violation(s) in {args.log}", file=sys.stderr)
        return EXIT_VIOLATION
    print(f"ok: {len(log)} records, no protocol violations")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isrusim",
        description="Auction-coordinated lunar mining fleet simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write its outputs")
    p_run.add_argument("--policy", choices=POLICY_NAMES, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--snapshots", action="store_true",
                       help="log per-tick robot snapshots (large)")
    p_run.add_argument("--out", required=True, type=Path)
    _add_scenario_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a policies x seeds grid")
    p_sweep.add_argument("--policies", default=",".join(POLICY_NAMES))
    p_sweep.add_argument("--seeds", default="0..19",
                         help="e.g. 0..19 or 1,2,5")
    p_sweep.add_argument("--snapshots", action="store_true")
    p_sweep.add_argument("--out", required=True, type=Path)
    _add_scenario_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_replay = sub.add_parser(
        "replay", help="re-derive metrics from an event log")
    p_replay.add_argument("--log", required=True, type=Path)
    p_replay.set_defaults(func=_cmd_replay)

    p_verify = sub.add_parser(
        "verify", help="run the protocol safety checker over an event log")
    p_verify.add_argument("--log", required=True, type=Path)
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
