#!/usr/bin/env python3
"""Regenerate the four experiment CSVs consumed by the plots package.

Writes into --outdir (default: results/):
  v_sweep.csv      control-parameter sweep (omora-sdp)
  compare.csv      policy comparison at the default operating point
  trace.<policy>.seedN.csv   per-slot traces for the comparison runs
  rth_sweep.csv    minimum-rate sweep (all policies)
  eps_sweep.csv    migration-unit sweep (omora-sdp, nm)

Full scale (T=2000, 10 seeds) takes roughly an hour on one core;
--fast runs a 200-slot, 2-seed smoke version in about a minute.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mecsim.config import NetworkConfig
from mecsim.controller import Policy
from mecsim import harness


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--fast", action="store_true",
                    help="200 slots, 2 seeds (smoke scale)")
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = NetworkConfig()
    seeds = list(range(1, 11))
    if args.fast:
        cfg = cfg.replace(horizon=200, warmup=40)
        seeds = [1, 2]

    print("V sweep ...", flush=True)
    rows = harness.sweep(cfg, "V", [1e8, 1e9, 1e10, 1e11],
                         [Policy.OMORA_SDP], seeds)
    harness.write_text(str(outdir / "v_sweep.csv"), harness.summary_csv(rows))

    print("policy comparison ...", flush=True)
    rows = []
    for policy in (Policy.OMORA_SDP, Policy.NL, Policy.NM):
        for seed in seeds:
            summary = harness.run(cfg, policy, seed)
            rows.append(harness.summary_row(summary, axis_value=None))
            trace = outdir / f"trace.{policy.value}.seed{seed}.csv"
            harness.write_text(str(trace), harness.trace_csv(summary))
    harness.write_text(str(outdir / "compare.csv"), harness.summary_csv(rows))

    print("rate-floor sweep ...", flush=True)
    rows = harness.sweep(cfg, "rth", [0.5e6, 1.0e6, 1.5e6, 2.0e6],
                         [Policy.OMORA_SDP, Policy.NL, Policy.NM], seeds)
    harness.write_text(str(outdir / "rth_sweep.csv"), harness.summary_csv(rows))

    print("migration-unit sweep ...", flush=True)
    rows = harness.sweep(cfg, "eps", [0.01, 0.1, 1.0, 10.0],
                         [Policy.OMORA_SDP, Policy.NM], seeds)
    harness.write_text(str(outdir / "eps_sweep.csv"), harness.summary_csv(rows))
    print(f"wrote CSVs to {outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
