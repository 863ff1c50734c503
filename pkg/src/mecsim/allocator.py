"""Per-MID resource allocation given a fixed association.

Two one-dimensional convex subproblems, solved in closed form:

* CPU frequency: minimize ``V*kappa*f^3 - Q*f*tau/gamma`` over
  ``0 <= f <= f_max`` subject to the rate floor ``f/gamma >= R_th - r_off``.
* Transmit power: minimize ``-Q*omega*tau*log2(1 + p*H/s) + V*(zeta*p + p_r)``
  over ``0 <= p <= p_max`` subject to the offload rate covering what the
  local rate leaves of R_th.

Brute-force grid minimizers of the same objectives are provided as
independent oracles; the closed forms must never do worse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig


@dataclass(frozen=True)
class AllocContext:
    """Inputs of one subproblem for one MID."""

    q: float        # queue backlog, bits
    gain: float     # channel power gain to the associated server
    r_other: float  # the complementary rate (offload rate for the CPU
                    # subproblem, local rate for the power subproblem), bits/s
    cfg: NetworkConfig

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("queue must be non-negative")
        if self.gain <= 0:
            raise ValueError("channel gain must be positive")


@dataclass(frozen=True)
class AllocResult:
    value: float
    rate_violation: bool  # the R_th floor was unreachable even at the cap


def frequency_objective(ctx: AllocContext, f) -> np.ndarray:
    cfg = ctx.cfg
    f = np.asarray(f, dtype=float)
    return cfg.lyapunov_v * cfg.energy_coeff * f ** 3 \
        - ctx.q * f * cfg.slot_s / cfg.comp_intensity


def power_objective(ctx: AllocContext, p) -> np.ndarray:
    cfg = ctx.cfg
    p = np.asarray(p, dtype=float)
    s = cfg.interference_w + cfg.noise_w
    rate = cfg.bandwidth_hz * np.log1p(p * ctx.gain / s) / math.log(2.0)
    return -ctx.q * rate * cfg.slot_s \
        + cfg.lyapunov_v * (cfg.amp_coeff * p + cfg.circuit_power_w)


def min_feasible_frequency(ctx: AllocContext) -> float:
    """Smallest f meeting the rate floor: (R_th - r_off) * gamma, clamped at 0."""
    cfg = ctx.cfg
    return max((cfg.rate_min_bps - ctx.r_other) * cfg.comp_intensity, 0.0)


def min_feasible_power(ctx: AllocContext) -> float:
    """Smallest p whose offload rate covers R_th - r_local, clamped at 0."""
    cfg = ctx.cfg
    deficit = cfg.rate_min_bps - ctx.r_other
    if deficit <= 0:
        return 0.0
    s = cfg.interference_w + cfg.noise_w
    exponent = deficit / cfg.bandwidth_hz
    if exponent > 1000:  # 2**x would overflow; certainly infeasible
        return math.inf
    return (2.0 ** exponent - 1.0) * s / ctx.gain


def optimal_frequency_many(q, r_off, cfg: NetworkConfig):
    """Vectorized closed-form CPU frequencies; returns (f, violation flags).

    f = max{(R_th - r_off)*gamma, 0, min{sqrt(Q*tau/(3*V*kappa*gamma)), f_max}}.
    Where even f_max cannot meet the rate floor the cap is returned with the
    violation flag raised; the expectation constraint tolerates rare misses.
    """
    q = np.asarray(q, dtype=float)
    r_off = np.asarray(r_off, dtype=float)
    f_lo = np.maximum((cfg.rate_min_bps - r_off) * cfg.comp_intensity, 0.0)
    denom = 3.0 * cfg.lyapunov_v * cfg.energy_coeff * cfg.comp_intensity
    if denom == 0:
        stationary = np.where(q > 0, np.inf, 0.0)
    else:
        stationary = np.sqrt(q * cfg.slot_s / denom)
    f = np.maximum(f_lo, np.minimum(stationary, cfg.f_max_hz))
    violated = f_lo > cfg.f_max_hz
    return np.where(violated, cfg.f_max_hz, f), violated


def optimal_power_many(q, gain, r_loc, cfg: NetworkConfig):
    """Vectorized closed-form transmit powers; returns (p, violation flags).

    The stationary point of the objective is
    ``Q*omega*tau / (V*zeta*ln 2) - (chi + sigma^2)/H``, clamped into
    [required, p_max]. Infeasible rate floor => p_max plus the flag.
    """
    q = np.asarray(q, dtype=float)
    gain = np.asarray(gain, dtype=float)
    r_loc = np.asarray(r_loc, dtype=float)
    s = cfg.interference_w + cfg.noise_w
    deficit = cfg.rate_min_bps - r_loc
    exponent = np.minimum(deficit / cfg.bandwidth_hz, 1000.0)
    with np.errstate(over="ignore"):
        p_req = np.where(deficit > 0, (2.0 ** exponent - 1.0) * s / gain, 0.0)
    p_req = np.where(deficit / cfg.bandwidth_hz > 1000.0, np.inf, p_req)
    coeff = cfg.lyapunov_v * cfg.amp_coeff
    if coeff == 0:
        stationary = np.where(q > 0, np.inf, -s / gain)
    else:
        stationary = q * cfg.bandwidth_hz * cfg.slot_s / (coeff * math.log(2.0)) \
            - s / gain
    p = np.maximum(p_req, np.minimum(stationary, cfg.p_max_w))
    p = np.maximum(p, 0.0)
    violated = p_req > cfg.p_max_w
    return np.where(violated, cfg.p_max_w, p), violated


def optimal_frequency(ctx: AllocContext) -> AllocResult:
    """Closed-form minimizer of the CPU subproblem for one MID."""
    f, violated = optimal_frequency_many(
        np.array([ctx.q]), np.array([ctx.r_other]), ctx.cfg)
    return AllocResult(float(f[0]), bool(violated[0]))


def optimal_power(ctx: AllocContext) -> AllocResult:
    """Closed-form minimizer of the transmit-power subproblem for one MID."""
    p, violated = optimal_power_many(
        np.array([ctx.q]), np.array([ctx.gain]), np.array([ctx.r_other]), ctx.cfg)
    return AllocResult(float(p[0]), bool(violated[0]))


def grid_oracle_frequency(ctx: AllocContext, grid_points: int) -> float:
    """Brute-force minimizer of the CPU objective over the feasible interval."""
    lo, hi = _interval(min_feasible_frequency(ctx), ctx.cfg.f_max_hz, grid_points)
    return _refining_grid_min(lambda f: frequency_objective(ctx, f),
                              lo, hi, grid_points)


def grid_oracle_power(ctx: AllocContext, grid_points: int) -> float:
    """Brute-force minimizer of the power objective over the feasible interval."""
    lo, hi = _interval(min_feasible_power(ctx), ctx.cfg.p_max_w, grid_points)
    return _refining_grid_min(lambda p: power_objective(ctx, p),
                              lo, hi, grid_points)


def _interval(lo: float, hi: float, grid_points: int) -> tuple[float, float]:
    if grid_points < 1000:
        raise ValueError("grid_points must be >= 1000")
    if lo > hi:  # infeasible floor: only the cap remains to scan
        lo = hi
    return lo, hi


def _refining_grid_min(objective, lo: float, hi: float, grid_points: int,
                       passes: int = 3) -> float:
    """Exhaustive grid scan, zooming onto the incumbent cell each pass.

    Keeps the best evaluated point across every pass; never consults any
    closed form.
    """
    best_x, best_val = lo, float(objective(np.array([lo]))[0])
    for _ in range(passes):
        grid = np.linspace(lo, hi, grid_points)
        vals = objective(grid)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_x, best_val = float(grid[k]), float(vals[k])
        if hi == lo:
            break
        span = (hi - lo) / (grid_points - 1)
        lo, hi = max(lo, grid[k] - 2 * span), min(hi, grid[k] + 2 * span)
    return best_x
