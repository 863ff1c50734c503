"""Task buffer dynamics and Lyapunov quantities."""

from __future__ import annotations

import numpy as np

from .config import NetworkConfig


def draw_arrivals(cfg: NetworkConfig, stream: np.random.Generator) -> np.ndarray:
    """Per-MID workload for one slot, i.i.d. Uniform[low, high] bits."""
    if cfg.arrival_low_bits == cfg.arrival_high_bits:
        return np.full(cfg.num_mids, float(cfg.arrival_low_bits))
    return stream.uniform(cfg.arrival_low_bits, cfg.arrival_high_bits,
                          size=cfg.num_mids)


def update_queue(q, executed, arrivals):
    """Backlog recursion Q' = max(Q - D, 0) + A.

    Arrivals join the buffer after this slot's service, so work executed in a
    slot can exceed the backlog (the surplus is wasted service, tracked by the
    harness) but the buffer never goes negative.
    """
    q = np.asarray(q, dtype=float)
    executed = np.asarray(executed, dtype=float)
    arrivals = np.asarray(arrivals, dtype=float)
    return np.maximum(q - executed, 0.0) + arrivals


def lyapunov(q) -> float:
    """Quadratic potential 0.5 * sum(Q^2)."""
    q = np.asarray(q, dtype=float)
    return float(0.5 * np.sum(q * q))


def drift_penalty_bound(q, arrivals, executed, d_max, a_max,
                        cost_total: float, lyapunov_v: float) -> float:
    """Per-slot upper bound on drift-plus-penalty.

    Returns C + sum_u Q_u (A_u - D_u) + V * cost_total with
    C = 0.5 * sum_u (D_max^2 + A_max^2). Valid whenever ``d_max`` / ``a_max``
    dominate the realized per-MID executed work / arrivals for the slot
    (scalars broadcast across MIDs). Reported as a diagnostic; the harness
    checks the realized inequality against it every slot.
    """
    q = np.asarray(q, dtype=float)
    arrivals = np.asarray(arrivals, dtype=float)
    executed = np.asarray(executed, dtype=float)
    d_max = np.broadcast_to(np.asarray(d_max, dtype=float), q.shape)
    a_max = np.broadcast_to(np.asarray(a_max, dtype=float), q.shape)
    c_const = 0.5 * float(np.sum(d_max ** 2 + a_max ** 2))
    return c_const + float(np.sum(q * (arrivals - executed))) \
        + lyapunov_v * float(cost_total)


def max_executed_per_slot(cfg: NetworkConfig, fading_max: float) -> float:
    """Largest executable work in one slot given the slot's peak fading.

    Uses the best possible channel (distance clamped at d0) at full transmit
    power plus the local CPU flat out; dominates any realized D_u.
    """
    gain_max = fading_max * cfg.pathloss_const
    snr_max = gain_max * cfg.p_max_w / (cfg.interference_w + cfg.noise_w)
    r_off_max = cfg.bandwidth_hz * np.log1p(snr_max) / np.log(2.0)
    r_loc_max = cfg.f_max_hz / cfg.comp_intensity
    return float((r_off_max + r_loc_max) * cfg.slot_s)
