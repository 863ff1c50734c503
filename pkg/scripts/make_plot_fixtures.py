#!/usr/bin/env python3
"""Regenerate the small CSV fixtures used by the plots package tests."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mecsim.config import NetworkConfig
from mecsim.controller import Policy
from mecsim import harness


def main() -> int:
    outdir = Path(__file__).resolve().parent.parent / "plots" / "fixtures"
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = NetworkConfig(horizon=60, warmup=10)

    rows = harness.sweep(cfg, "V", [1e8, 1e9, 1e10, 1e11], [Policy.NM], [1, 2, 3])
    harness.write_text(str(outdir / "v_sweep.csv"), harness.summary_csv(rows))

    rows = harness.sweep(cfg, "rth", [0.5e6, 1.0e6],
                         [Policy.OMORA_SDP, Policy.NL, Policy.NM], [1, 2])
    harness.write_text(str(outdir / "rth_sweep.csv"), harness.summary_csv(rows))

    rows = harness.sweep(cfg, "eps", [0.01, 0.1, 1.0],
                         [Policy.OMORA_SDP, Policy.NM], [1, 2])
    harness.write_text(str(outdir / "eps_sweep.csv"), harness.summary_csv(rows))

    for policy in (Policy.OMORA_SDP, Policy.NL, Policy.NM):
        summary = harness.run(cfg, policy, 1)
        harness.write_text(str(outdir / f"trace.{policy.value}.seed1.csv"),
                           harness.trace_csv(summary))
    print(f"fixtures written to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
