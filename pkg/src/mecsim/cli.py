"""Command-line interface.

Subcommands: run, sweep, compare, validate-config. Outputs are CSV files
with a stable column schema (see harness.SUMMARY_COLUMNS / TRACE_COLUMNS);
identical (config, seed, policy) inputs produce byte-identical CSV.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .config import ConfigError, NetworkConfig, load_config, validate_config
from .controller import Policy, parse_policy


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s.strip()]


def _parse_policies(text: str) -> list[Policy]:
    return [parse_policy(s) for s in text.split(",") if s.strip()]


def _parse_values(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def _load(args) -> NetworkConfig:
    if args.config:
        return load_config(args.config)
    return validate_config(NetworkConfig())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON config (default: built-in)")
    p.add_argument("--out", metavar="PATH", help="summary CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecsim",
        description="Mobility-aware computation offloading simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one policy on one seed")
    _add_common(p_run)
    p_run.add_argument("--policy", default="omora-sdp")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--trace", metavar="PATH", help="per-slot trace CSV")

    p_sweep = sub.add_parser("sweep", help="sweep one parameter axis")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=sorted(harness.AXIS_FIELDS))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.add_argument("--policies", default="omora-sdp")
    p_sweep.add_argument("--seeds", default=None, help="N..M or comma list")

    p_cmp = sub.add_parser("compare", help="multi-policy run on shared seeds")
    _add_common(p_cmp)
    p_cmp.add_argument("--policies", default="omora-sdp,nl,nm")
    p_cmp.add_argument("--seeds", default=None, help="N..M or comma list")
    p_cmp.add_argument("--trace", metavar="PATH",
                       help="per-slot trace CSV; one file per policy and seed")

    p_val = sub.add_parser("validate-config", help="check a config file")
    p_val.add_argument("--config", metavar="PATH", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate-config":
            load_config(args.config)
            print("config ok")
            return 0

        cfg = _load(args)
        if args.command == "run":
            policy = parse_policy(args.policy)
            seed = cfg.seed if args.seed is None else args.seed
            summary = harness.run(cfg, policy, seed)
            rows = [harness.summary_row(summary, axis_value=None)]
            _emit_summary(rows, args.out)
            if args.trace:
                harness.write_text(args.trace, harness.trace_csv(summary))
            return 0

        seeds = _parse_seeds(args.seeds) if args.seeds else [cfg.seed]
        policies = _parse_policies(args.policies)
        if args.command == "sweep":
            rows = harness.sweep(cfg, args.axis, _parse_values(args.values),
                                 policies, seeds)
            _emit_summary(rows, args.out)
            return 0

        if args.command == "compare":
            keep = bool(args.trace)
            rows = []
            for policy in policies:
                for seed in seeds:
                    summary = harness.run(cfg, policy, seed, keep_trace=keep)
                    rows.append(harness.summary_row(summary, axis_value=None))
                    if args.trace:
                        path = _trace_path(args.trace, policy, seed)
                        harness.write_text(path, harness.trace_csv(summary))
            _emit_summary(rows, args.out)
            return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


def _trace_path(base: str, policy: Policy, seed: int) -> str:
    p = Path(base)
    return str(p.with_name(f"{p.stem}.{policy.value}.seed{seed}{p.suffix or '.csv'}"))


def _emit_summary(rows: list[dict], out: str | None) -> None:
    text = harness.summary_csv(rows)
    if out:
        harness.write_text(out, text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
