"""Per-slot dynamic state and control decisions.

Conventions: U = number of MIDs, M = number of servers. Association matrices
are dense binary (U, M) arrays with one-hot rows; an all-zero row is allowed
only for the cold-start predecessor (no association before slot 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import NetworkConfig


class StateError(ValueError):
    """Raised when a state or decision violates a model invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SlotState:
    """Everything the controller observes at the start of a slot."""

    t: int                        # slot index, 1-based
    positions: np.ndarray         # (U, 2) MID coordinates, meters
    server_positions: np.ndarray  # (M, 2) static server coordinates
    fading: np.ndarray            # (U, M) Rayleigh power coefficients, Exp(1)
    queues: np.ndarray            # (U,) backlog in bits at slot start
    arrivals: np.ndarray          # (U,) bits arriving during this slot
    prev_assoc: np.ndarray        # (U, M) binary association of slot t-1

    def __post_init__(self):
        for name in ("positions", "server_positions", "fading", "queues",
                     "arrivals", "prev_assoc"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(self.queues < 0):
            raise StateError("queues must be non-negative")
        if np.any(self.fading < 0):
            raise StateError("fading coefficients must be non-negative")
        check_assoc_rows(self.prev_assoc, allow_zero_rows=True)

    @property
    def num_mids(self) -> int:
        return self.positions.shape[0]

    @property
    def num_servers(self) -> int:
        return self.server_positions.shape[0]

    def is_cold_start(self) -> bool:
        return not np.any(self.prev_assoc)


@dataclass(frozen=True)
class Decision:
    """One slot's control output."""

    assoc: np.ndarray     # (U, M) binary, one-hot rows
    tx_power: np.ndarray  # (U,) Watts
    cpu_freq: np.ndarray  # (U,) Hz

    def __post_init__(self):
        for name in ("assoc", "tx_power", "cpu_freq"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def server_of(self) -> np.ndarray:
        """Index of the associated server per MID."""
        return np.argmax(self.assoc, axis=1)


def check_assoc_rows(assoc: np.ndarray, allow_zero_rows: bool = False) -> None:
    assoc = np.asarray(assoc)
    if assoc.ndim != 2:
        raise StateError("association must be a (U, M) matrix")
    if not np.all((assoc == 0) | (assoc == 1)):
        raise StateError("association entries must be binary")
    sums = assoc.sum(axis=1)
    ok = sums == 1
    if allow_zero_rows:
        # cold start: either every row is unset or every row is one-hot
        if not np.any(assoc):
            return
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise StateError(f"association row {bad} does not sum to 1")


def validate_decision(dec: Decision, cfg: NetworkConfig) -> Decision:
    """Enforce one-hot rows, per-server capacity, and box constraints."""
    check_assoc_rows(dec.assoc)
    col = dec.assoc.sum(axis=0)
    if np.any(col > cfg.cap_max):
        bad = int(np.flatnonzero(col > cfg.cap_max)[0])
        raise StateError(
            f"server {bad} serves {int(col[bad])} MIDs > cap_max={cfg.cap_max}"
        )
    if np.any(dec.tx_power < 0) or np.any(dec.tx_power > cfg.p_max_w * (1 + 1e-12)):
        raise StateError("tx_power outside [0, p_max_w]")
    if np.any(dec.cpu_freq < 0) or np.any(dec.cpu_freq > cfg.f_max_hz * (1 + 1e-12)):
        raise StateError("cpu_freq outside [0, f_max_hz]")
    return dec


@dataclass
class SlotMetrics:
    """Realized per-MID quantities for one slot (arrays of length U)."""

    t: int
    queue_bits: np.ndarray       # backlog at slot start
    arrivals_bits: np.ndarray
    executed_local: np.ndarray   # D^l = r^l * tau
    executed_offload: np.ndarray  # D^o = r^o * tau
    rate_total: np.ndarray       # R = r^l + r^o, bits/s
    power_local: np.ndarray      # kappa f^3
    power_offload: np.ndarray    # zeta p + p_r
    migration: np.ndarray        # epsilon per server change
    service_cost: np.ndarray     # power + phi * migration
    rate_violation: np.ndarray   # bool, R < R_th (beyond tolerance)
    wasted_bits: np.ndarray      # max(D - Q, 0)
    assoc_server: np.ndarray     # int, serving server index
    tx_power: np.ndarray
    cpu_freq: np.ndarray
    drift_bound_lhs: float = 0.0  # L(Q') - L(Q) + V * sum(cost)
    drift_bound_rhs: float = 0.0  # per-slot upper bound on the same
    p2_objective: float = 0.0
    p2_iterations: int = 0

    @property
    def executed(self) -> np.ndarray:
        return self.executed_local + self.executed_offload

    @property
    def power(self) -> np.ndarray:
        return self.power_local + self.power_offload

    def check(self, cfg: NetworkConfig) -> None:
        """Internal consistency of the realized quantities."""
        if not np.allclose(self.service_cost,
                           self.power + cfg.migration_weight * self.migration,
                           rtol=1e-12, atol=0):
            raise StateError("service_cost != power + phi * migration")
