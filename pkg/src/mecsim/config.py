"""Network configuration: every physical and algorithmic constant of the model.

All quantities are SI / bits: seconds, Hz, Watts, meters, bits. Channel gains
and path-loss constants are linear (not dB).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass


class ConfigError(ValueError):
    """Raised when a configuration violates a model invariant."""


@dataclass(frozen=True)
class NetworkConfig:
    # topology
    num_servers: int = 3            # MEC servers (one per small base station)
    num_mids: int = 10              # mobile IoT devices
    area: tuple[float, float] = (100.0, 100.0)   # rectangle, meters

    # time structure
    slot_s: float = 1.0             # slot length tau, seconds
    horizon: int = 2000             # slots per run
    warmup: int = 200               # slots excluded from time averages

    # radio
    bandwidth_hz: float = 1e6       # per-MID uplink bandwidth omega
    noise_w: float = 1e-13          # background noise variance sigma^2
    interference_w: float = 1e-10   # constant inter-cell interference chi
    pathloss_const: float = 1e-4    # g0, linear (-40 dB)
    pathloss_exp: float = 4.0       # theta
    ref_dist_m: float = 1.0         # d0
    p_max_w: float = 1.0            # max transmit power
    amp_coeff: float = 1.0          # amplifier coefficient zeta
    circuit_power_w: float = 0.0    # constant circuit power p_r

    # computation
    f_max_hz: float = 2.15e9        # max local CPU frequency
    energy_coeff: float = 1e-28     # kappa: W per (cycles/s)^3
    comp_intensity: float = 737.5   # gamma: CPU cycles per bit

    # workload
    arrival_low_bits: float = 0.95e6
    arrival_high_bits: float = 1.5e6

    # mobility
    step_m: float = 1.0             # random-walk step per slot

    # control
    lyapunov_v: float = 1e10        # stability/cost trade-off weight V
    rate_min_bps: float = 1e5       # minimum total service rate R_th
    migration_unit: float = 0.1     # epsilon, cost of switching server
    migration_weight: float = 0.1   # phi, weight of migration in service cost
    cap_max: int = 10               # N_max, MIDs per server

    seed: int = 0

    def validate(self) -> "NetworkConfig":
        return validate_config(self)

    # -- JSON round-trip ----------------------------------------------------

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["area"] = list(self.area)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NetworkConfig":
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise ConfigError("config JSON must be an object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        if "area" in raw:
            area = raw["area"]
            if not (isinstance(area, (list, tuple)) and len(area) == 2):
                raise ConfigError("area: expected a [width, height] pair")
            raw["area"] = (float(area[0]), float(area[1]))
        return cls(**raw)

    def digest(self) -> str:
        """Stable hash of the full configuration (for run provenance)."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def replace(self, **kw) -> "NetworkConfig":
        return dataclasses.replace(self, **kw)


_POSITIVE = (
    "slot_s", "bandwidth_hz", "noise_w", "pathloss_const", "pathloss_exp",
    "ref_dist_m", "p_max_w", "amp_coeff", "f_max_hz", "energy_coeff",
    "comp_intensity",
)
_NONNEG = (
    "interference_w", "circuit_power_w", "arrival_low_bits",
    "arrival_high_bits", "step_m", "lyapunov_v", "rate_min_bps",
    "migration_unit", "migration_weight",
)


def validate_config(cfg: NetworkConfig) -> NetworkConfig:
    """Check every invariant; raise ConfigError naming the offending field."""
    problems = []
    if cfg.num_servers < 1:
        problems.append("num_servers: must be >= 1")
    if cfg.num_mids < 1:
        problems.append("num_mids: must be >= 1")
    for name in _POSITIVE:
        if not getattr(cfg, name) > 0:
            problems.append(f"{name}: must be > 0")
    for name in _NONNEG:
        if getattr(cfg, name) < 0:
            problems.append(f"{name}: must be >= 0")
    if not (cfg.area[0] > 0 and cfg.area[1] > 0):
        problems.append("area: both dimensions must be > 0")
    if cfg.arrival_low_bits > cfg.arrival_high_bits:
        problems.append("arrival_low_bits: must be <= arrival_high_bits")
    if cfg.cap_max < 1:
        problems.append("cap_max: must be >= 1")
    elif cfg.cap_max * cfg.num_servers < cfg.num_mids:
        problems.append(
            f"cap_max: cap_max*num_servers = {cfg.cap_max * cfg.num_servers}"
            f" < num_mids = {cfg.num_mids}; no feasible association exists"
        )
    if cfg.horizon < 0:
        problems.append("horizon: must be >= 0")
    if cfg.warmup < 0:
        problems.append("warmup: must be >= 0")
    elif cfg.horizon > 0 and cfg.warmup >= cfg.horizon:
        problems.append("warmup: must be < horizon")
    if problems:
        raise ConfigError("invalid config: " + "; ".join(problems))
    return cfg


def load_config(path: str) -> NetworkConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_config(NetworkConfig.from_json(fh.read()))
