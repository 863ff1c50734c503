"""Per-slot control: alternating optimization of CPU frequency, transmit
power, and user association, plus the two benchmark policies.

Policies:

* ``omora-sdp``  - full controller, association via the SDP relaxation.
* ``omora-exact`` - full controller, association via the exact solver.
* ``nl``         - no local computation (f = 0), dynamic association.
* ``nm``         - no migration: the initial association is kept forever.

Each alternation pass solves the frequency and power subproblems in closed
form and then re-solves the association given the new rates. An association
candidate is accepted only if it does not worsen the slot objective (the
rounding step of the relaxation route is not guaranteed optimal, and on ties
keeping the current association avoids oscillation), so the objective is
non-increasing across passes by construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import allocator, association, channel, costs
from .config import NetworkConfig
from .model import Decision, SlotState


class Policy(enum.Enum):
    OMORA_SDP = "omora-sdp"
    OMORA_EXACT = "omora-exact"
    NL = "nl"
    NM = "nm"


def parse_policy(name: str) -> Policy:
    try:
        return Policy(name.strip().lower())
    except ValueError:
        valid = ", ".join(p.value for p in Policy)
        raise ValueError(f"unknown policy {name!r}; expected one of: {valid}")


@dataclass
class SlotDiagnostics:
    iterations: int = 0
    objective: float = 0.0
    objective_trace: list[float] = field(default_factory=list)
    association_solves: int = 0
    monotone_violations: int = 0
    rate_infeasible: np.ndarray | None = None  # per-MID allocator flags


def greedy_max_gain(gains: np.ndarray, cap_max: int) -> np.ndarray:
    """Cold-start association: each MID takes its best-gain server that still
    has capacity, in MID index order."""
    u_n, m_n = gains.shape
    assoc = np.zeros((u_n, m_n))
    counts = np.zeros(m_n, dtype=int)
    for u in range(u_n):
        for m in np.argsort(-gains[u]):
            if counts[m] < cap_max:
                assoc[u, m] = 1.0
                counts[m] += 1
                break
        else:
            raise ValueError("no server with spare capacity (cap_max too small)")
    return assoc


def p2_objective(state: SlotState, decision: Decision, cfg: NetworkConfig) -> float:
    """Slot objective: sum_u Q_u (A_u - D_u) + V sum_u (P_u + phi c_u)."""
    gains = channel.gain_matrix(state.positions, state.server_positions,
                                state.fading, cfg)
    gain_assoc = np.sum(gains * decision.assoc, axis=1)
    r_off = channel.offload_rate(gain_assoc, decision.tx_power, cfg)
    r_loc = channel.local_rate(decision.cpu_freq, cfg.comp_intensity)
    executed = (r_off + r_loc) * cfg.slot_s
    power = costs.local_power(decision.cpu_freq, cfg.energy_coeff) \
        + costs.offload_power(decision.tx_power, cfg.amp_coeff, cfg.circuit_power_w)
    migration = costs.migration_costs(state.prev_assoc, decision.assoc,
                                      cfg.migration_unit)
    drift = float(np.dot(state.queues, state.arrivals - executed))
    penalty = cfg.lyapunov_v * float(np.sum(power + cfg.migration_weight * migration))
    return drift + penalty


_MAX_PASSES = 50
_REL_IMPROVEMENT = 1e-6


def decide_slot(state: SlotState, cfg: NetworkConfig,
                policy: Policy) -> tuple[Decision, SlotDiagnostics]:
    """One slot of the controller under the given policy."""
    gains = channel.gain_matrix(state.positions, state.server_positions,
                                state.fading, cfg)
    u_n = state.num_mids

    if state.is_cold_start():
        assoc = greedy_max_gain(gains, cfg.cap_max)
    else:
        assoc = state.prev_assoc.copy()
    p_tx = np.full(u_n, cfg.p_max_w / 2)
    f_cpu = np.zeros(u_n)

    diag = SlotDiagnostics()
    q = state.queues
    best: tuple[float, Decision] | None = None
    prev_obj: float | None = None
    cached_costs: np.ndarray | None = None
    cached_assoc: np.ndarray | None = None
    flags = np.zeros(u_n, dtype=bool)

    for it in range(1, _MAX_PASSES + 1):
        diag.iterations = it
        gain_assoc = np.sum(gains * assoc, axis=1)

        # CPU frequencies given (p, x)
        if policy is Policy.NL:
            f_cpu = np.zeros(u_n)
            f_flags = np.zeros(u_n, dtype=bool)
        else:
            r_off = channel.offload_rate(gain_assoc, p_tx, cfg)
            f_cpu, f_flags = allocator.optimal_frequency_many(q, r_off, cfg)

        # transmit powers given (f, x)
        r_loc = channel.local_rate(f_cpu, cfg.comp_intensity)
        p_tx, p_flags = allocator.optimal_power_many(q, gain_assoc, r_loc, cfg)
        flags = f_flags | p_flags

        # association given (f, p)
        if policy is not Policy.NM:
            rates_all = channel.offload_rate(gains, p_tx[:, None], cfg)
            problem = association.build_costs(q, rates_all, state.prev_assoc, cfg)
            if cached_costs is not None and np.array_equal(problem.costs,
                                                           cached_costs):
                candidate = cached_assoc
            else:
                try:
                    if policy is Policy.OMORA_EXACT:
                        candidate, _ = association.solve_exact(problem)
                    else:
                        candidate, _ = association.associate_sdr(problem)
                except association.AssociationError as exc:
                    raise association.AssociationError(
                        f"slot {state.t}, pass {it}: {exc}; problem dump: "
                        f"{problem.to_json()}") from exc
                diag.association_solves += 1
                cached_costs = problem.costs
                cached_assoc = candidate
            if candidate is not assoc and not np.array_equal(candidate, assoc):
                cur = p2_objective(state, Decision(assoc, p_tx, f_cpu), cfg)
                new = p2_objective(state, Decision(candidate, p_tx, f_cpu), cfg)
                if new < cur:  # ties keep the incumbent: no oscillation
                    assoc = candidate.copy()

        decision = Decision(assoc, p_tx, f_cpu)
        obj = p2_objective(state, decision, cfg)
        diag.objective_trace.append(obj)
        if best is None or obj < best[0]:
            best = (obj, decision)
        if prev_obj is not None:
            if obj > prev_obj + 1e-9 * max(1.0, abs(prev_obj)):
                diag.monotone_violations += 1
            if prev_obj - obj < _REL_IMPROVEMENT * max(1.0, abs(prev_obj)):
                break
        prev_obj = obj

    assert best is not None
    diag.objective = best[0]
    diag.rate_infeasible = flags
    return best[1], diag
