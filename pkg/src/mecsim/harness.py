"""Time-slotted simulation engine, metric aggregation, and experiment sweeps.

Per-slot event order: arrivals are observed at the slot start, then mobility
and fading are realized (the controller needs the current channel), then the
controller decides, realized work and costs are computed, and finally the
queues are updated. All randomness comes from four label-separated streams
derived from the run seed alone, so different policies on the same seed see
identical arrival/fading/mobility realizations.

Summary statistics average the slots after the configured warm-up (queue
build-up transient); traces cover every slot.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import channel, controller, costs, queueing
from .config import NetworkConfig, validate_config
from .controller import Policy
from .model import SlotMetrics, SlotState, validate_decision
from .rng import rng_stream


@dataclass
class RunTrace:
    """Per-slot, per-MID realizations for one run; arrays are (T, U)."""

    queue_bits: np.ndarray
    arrivals: np.ndarray
    executed_local: np.ndarray
    executed_offload: np.ndarray
    rate_total: np.ndarray
    power_local: np.ndarray
    power_offload: np.ndarray
    migration: np.ndarray
    service_cost: np.ndarray
    rate_violation: np.ndarray
    wasted: np.ndarray
    assoc_server: np.ndarray
    tx_power: np.ndarray
    cpu_freq: np.ndarray
    # per-slot scalars (length T)
    drift_lhs: np.ndarray
    drift_rhs: np.ndarray
    p2_objective: np.ndarray
    p2_iterations: np.ndarray
    monotone_violations: np.ndarray
    final_queues: np.ndarray  # (U,) backlog after the last update


@dataclass
class RunSummary:
    policy: str
    seed: int
    cfg_digest: str
    horizon: int
    warmup: int
    avg_service_cost: float
    avg_queue_bits: float
    rate_violation_frac: float
    avg_power: float
    avg_migration: float
    wasted_total: float
    final_queue_mean: float
    drift_bound_violations: int
    trace: RunTrace | None = field(default=None, repr=False)

    def slot_metrics(self, t: int) -> SlotMetrics:
        """Realized per-MID quantities of slot t (1-based)."""
        tr = self.trace
        if tr is None:
            raise ValueError("run was executed without trace retention")
        i = t - 1
        return SlotMetrics(
            t=t,
            queue_bits=tr.queue_bits[i],
            arrivals_bits=tr.arrivals[i],
            executed_local=tr.executed_local[i],
            executed_offload=tr.executed_offload[i],
            rate_total=tr.rate_total[i],
            power_local=tr.power_local[i],
            power_offload=tr.power_offload[i],
            migration=tr.migration[i],
            service_cost=tr.service_cost[i],
            rate_violation=tr.rate_violation[i],
            wasted_bits=tr.wasted[i],
            assoc_server=tr.assoc_server[i],
            tx_power=tr.tx_power[i],
            cpu_freq=tr.cpu_freq[i],
            drift_bound_lhs=float(tr.drift_lhs[i]),
            drift_bound_rhs=float(tr.drift_rhs[i]),
            p2_objective=float(tr.p2_objective[i]),
            p2_iterations=int(tr.p2_iterations[i]),
        )


def run(cfg: NetworkConfig, policy: Policy, seed: int,
        keep_trace: bool = True) -> RunSummary:
    """Simulate one policy for cfg.horizon slots under the given seed."""
    validate_config(cfg)
    u_n, m_n = cfg.num_mids, cfg.num_servers
    t_n = cfg.horizon

    placement = rng_stream(seed, "placement")
    mobility = rng_stream(seed, "mobility")
    fading_stream = rng_stream(seed, "fading")
    arrivals_stream = rng_stream(seed, "arrivals")

    positions = channel.initial_positions(cfg, placement)
    servers = channel.server_grid(cfg)
    queues = np.zeros(u_n)
    prev_assoc = np.zeros((u_n, m_n))

    shape = (t_n, u_n)
    tr = RunTrace(
        queue_bits=np.zeros(shape), arrivals=np.zeros(shape),
        executed_local=np.zeros(shape), executed_offload=np.zeros(shape),
        rate_total=np.zeros(shape), power_local=np.zeros(shape),
        power_offload=np.zeros(shape), migration=np.zeros(shape),
        service_cost=np.zeros(shape), rate_violation=np.zeros(shape, dtype=bool),
        wasted=np.zeros(shape), assoc_server=np.zeros(shape, dtype=int),
        tx_power=np.zeros(shape), cpu_freq=np.zeros(shape),
        drift_lhs=np.zeros(t_n), drift_rhs=np.zeros(t_n),
        p2_objective=np.zeros(t_n), p2_iterations=np.zeros(t_n, dtype=int),
        monotone_violations=np.zeros(t_n, dtype=int),
        final_queues=queues,
    )

    rate_tol = 1e-9 * max(1.0, cfg.rate_min_bps)
    for i in range(t_n):
        arrivals = queueing.draw_arrivals(cfg, arrivals_stream)
        positions = channel.step_mobility(positions, cfg.step_m, cfg.area,
                                          mobility)
        fading = channel.draw_fading(u_n, m_n, fading_stream)
        state = SlotState(t=i + 1, positions=positions,
                          server_positions=servers, fading=fading,
                          queues=queues, arrivals=arrivals,
                          prev_assoc=prev_assoc)
        decision, diag = controller.decide_slot(state, cfg, policy)
        validate_decision(decision, cfg)

        gains = channel.gain_matrix(positions, servers, fading, cfg)
        gain_assoc = np.sum(gains * decision.assoc, axis=1)
        r_off = channel.offload_rate(gain_assoc, decision.tx_power, cfg)
        r_loc = channel.local_rate(decision.cpu_freq, cfg.comp_intensity)
        d_off = r_off * cfg.slot_s
        d_loc = r_loc * cfg.slot_s
        executed = d_off + d_loc
        p_loc = costs.local_power(decision.cpu_freq, cfg.energy_coeff)
        p_off = costs.offload_power(decision.tx_power, cfg.amp_coeff,
                                    cfg.circuit_power_w)
        migration = costs.migration_costs(prev_assoc, decision.assoc,
                                          cfg.migration_unit)
        service = costs.service_cost(p_loc + p_off, migration,
                                     cfg.migration_weight)
        cost_total = float(service.sum())

        next_queues = queueing.update_queue(queues, executed, arrivals)
        lhs = queueing.lyapunov(next_queues) - queueing.lyapunov(queues) \
            + cfg.lyapunov_v * cost_total
        d_max = queueing.max_executed_per_slot(cfg, float(fading.max()))
        rhs = queueing.drift_penalty_bound(queues, arrivals, executed, d_max,
                                           cfg.arrival_high_bits, cost_total,
                                           cfg.lyapunov_v)

        tr.queue_bits[i] = queues
        tr.arrivals[i] = arrivals
        tr.executed_local[i] = d_loc
        tr.executed_offload[i] = d_off
        tr.rate_total[i] = r_off + r_loc
        tr.power_local[i] = p_loc
        tr.power_offload[i] = p_off
        tr.migration[i] = migration
        tr.service_cost[i] = service
        tr.rate_violation[i] = (r_off + r_loc) < (cfg.rate_min_bps - rate_tol)
        tr.wasted[i] = np.maximum(executed - queues, 0.0)
        tr.assoc_server[i] = decision.server_of()
        tr.tx_power[i] = decision.tx_power
        tr.cpu_freq[i] = decision.cpu_freq
        tr.drift_lhs[i] = lhs
        tr.drift_rhs[i] = rhs
        tr.p2_objective[i] = diag.objective
        tr.p2_iterations[i] = diag.iterations
        tr.monotone_violations[i] = diag.monotone_violations

        queues = next_queues
        prev_assoc = decision.assoc

    tr.final_queues = queues
    return summarize(cfg, policy, seed, tr, keep_trace=keep_trace)


def summarize(cfg: NetworkConfig, policy: Policy, seed: int, tr: RunTrace,
              keep_trace: bool = True) -> RunSummary:
    t_n = tr.queue_bits.shape[0]
    w = min(cfg.warmup, t_n)
    sl = slice(w, t_n)
    included = max(t_n - w, 1)
    bound_tol = 1e-9 * (1.0 + np.abs(tr.drift_rhs))  # checked on every slot
    return RunSummary(
        policy=policy.value,
        seed=seed,
        cfg_digest=cfg.digest(),
        horizon=t_n,
        warmup=w,
        avg_service_cost=float(tr.service_cost[sl].sum() / included),
        avg_queue_bits=float(tr.queue_bits[sl].sum() / included),
        rate_violation_frac=float(tr.rate_violation[sl].mean()) if t_n > w else 0.0,
        avg_power=float((tr.power_local[sl] + tr.power_offload[sl]).sum() / included),
        avg_migration=float(tr.migration[sl].sum() / included),
        wasted_total=float(tr.wasted[sl].sum()),
        final_queue_mean=float(tr.final_queues.mean()),
        drift_bound_violations=int(np.sum(tr.drift_lhs >
                                          tr.drift_rhs + bound_tol)),
        trace=tr if keep_trace else None,
    )


# --------------------------------------------------------------------------
# sweeps and comparisons
# --------------------------------------------------------------------------

AXIS_FIELDS = {"V": "lyapunov_v", "rth": "rate_min_bps", "eps": "migration_unit"}


def sweep(cfg: NetworkConfig, axis: str, values: list[float],
          policies: list[Policy], seeds: list[int],
          keep_trace: bool = False) -> list[dict]:
    """One run per (axis value, policy, seed), plus seed-averaged rows.

    Returns summary rows in deterministic order; seed-averaged rows carry
    seed="mean".
    """
    if axis not in AXIS_FIELDS:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of "
                         f"{sorted(AXIS_FIELDS)}")
    if not values:
        raise ValueError("sweep needs at least one axis value")
    field_name = AXIS_FIELDS[axis]
    rows: list[dict] = []
    for value in values:
        swept = cfg.replace(**{field_name: value})
        for policy in policies:
            per_seed = []
            for seed in seeds:
                summary = run(swept, policy, seed, keep_trace=keep_trace)
                row = summary_row(summary, axis_value=value)
                rows.append(row)
                per_seed.append(row)
            rows.append(_mean_row(per_seed))
    return rows


def compare(cfg: NetworkConfig, policies: list[Policy],
            seeds: list[int], keep_trace: bool = False) -> list[dict]:
    """Multi-policy comparison on shared randomness; one row per run."""
    rows = []
    for policy in policies:
        for seed in seeds:
            summary = run(cfg, policy, seed, keep_trace=keep_trace)
            rows.append(summary_row(summary, axis_value=None))
    return rows


SUMMARY_COLUMNS = ["axis_value", "policy", "seed", "avg_service_cost",
                   "avg_queue_bits", "rate_violation_frac", "avg_power",
                   "avg_migration"]
TRACE_COLUMNS = ["t", "mid", "Q", "A", "D_local", "D_off", "p_tx", "f",
                 "assoc", "cost"]


def summary_row(summary: RunSummary, axis_value: float | None) -> dict:
    return {
        "axis_value": "" if axis_value is None else _fmt(axis_value),
        "policy": summary.policy,
        "seed": str(summary.seed),
        "avg_service_cost": _fmt(summary.avg_service_cost),
        "avg_queue_bits": _fmt(summary.avg_queue_bits),
        "rate_violation_frac": _fmt(summary.rate_violation_frac),
        "avg_power": _fmt(summary.avg_power),
        "avg_migration": _fmt(summary.avg_migration),
    }


def _mean_row(rows: list[dict]) -> dict:
    out = dict(rows[0])
    out["seed"] = "mean"
    for col in SUMMARY_COLUMNS[3:]:
        out[col] = _fmt(float(np.mean([float(r[col]) for r in rows])))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def trace_csv(summary: RunSummary) -> str:
    tr = summary.trace
    if tr is None:
        raise ValueError("run was executed without trace retention")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    t_n, u_n = tr.queue_bits.shape
    for i in range(t_n):
        for u in range(u_n):
            writer.writerow([
                i + 1, u,
                _fmt(tr.queue_bits[i, u]), _fmt(tr.arrivals[i, u]),
                _fmt(tr.executed_local[i, u]), _fmt(tr.executed_offload[i, u]),
                _fmt(tr.tx_power[i, u]), _fmt(tr.cpu_freq[i, u]),
                int(tr.assoc_server[i, u]), _fmt(tr.service_cost[i, u]),
            ])
    return buf.getvalue()


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
