"""Power, migration, and service cost accounting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CostBreakdown:
    local_power: np.ndarray    # kappa f^3, W
    offload_power: np.ndarray  # zeta p + p_r, W
    migration: np.ndarray      # 0 or epsilon per MID
    phi: float

    @property
    def power(self) -> np.ndarray:
        return self.local_power + self.offload_power

    @property
    def service(self) -> np.ndarray:
        return self.power + self.phi * self.migration


def local_power(f, energy_coeff: float):
    """CPU power kappa * f^3."""
    f = np.asarray(f, dtype=float)
    return energy_coeff * f ** 3


def offload_power(p_tx, amp_coeff: float, circuit_power: float):
    """Transmit chain power zeta * p + p_r."""
    return amp_coeff * np.asarray(p_tx, dtype=float) + circuit_power


def migration_cost(prev_row: np.ndarray, cur_row: np.ndarray, unit: float) -> float:
    """Cost of switching server between consecutive slots.

    Evaluates (unit/2) * sum_m [(1-prev_m)cur_m + (1-cur_m)prev_m], which is
    0 when the association is unchanged and ``unit`` when it moved. An
    all-zero previous row means cold start (no predecessor): cost 0.
    """
    prev_row = np.asarray(prev_row, dtype=float)
    cur_row = np.asarray(cur_row, dtype=float)
    if not np.any(prev_row):
        _require_one_hot(cur_row, "current")
        return 0.0
    _require_one_hot(prev_row, "previous")
    _require_one_hot(cur_row, "current")
    flips = (1 - prev_row) * cur_row + (1 - cur_row) * prev_row
    return float(unit / 2 * flips.sum())


def migration_costs(prev_assoc: np.ndarray, assoc: np.ndarray, unit: float) -> np.ndarray:
    """Vectorized per-MID migration cost; all-zero prev rows cost 0."""
    prev_assoc = np.asarray(prev_assoc, dtype=float)
    assoc = np.asarray(assoc, dtype=float)
    cold = ~np.any(prev_assoc, axis=1)
    flips = (1 - prev_assoc) * assoc + (1 - assoc) * prev_assoc
    out = unit / 2 * flips.sum(axis=1)
    out[cold] = 0.0
    return out


def service_cost(power, migration, phi: float):
    """Weighted sum P + phi * c."""
    return np.asarray(power, dtype=float) + phi * np.asarray(migration, dtype=float)


def _require_one_hot(row: np.ndarray, which: str) -> None:
    if not (np.all((row == 0) | (row == 1)) and row.sum() == 1):
        raise ValueError(f"{which} association row must be one-hot")
