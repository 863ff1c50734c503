"""Random-walk mobility, Rayleigh block fading, channel gains, and rates.

The channel power gain between a MID and a server is
``H = h * g0 * (d0 / d)^theta`` with ``h ~ Exp(1)`` redrawn each slot
(block fading). Distances are clamped below at the reference distance d0:
the far-field path-loss model is not valid closer than that, and the clamp
keeps gains bounded when a MID walks over a server.
"""

from __future__ import annotations

import math

import numpy as np

from .config import NetworkConfig

_LN2 = math.log(2.0)


def server_grid(cfg: NetworkConfig) -> np.ndarray:
    """Static server coordinates: evenly spaced on a circle inscribed in the area.

    For M = 3 this is a triangle centred in the rectangle. Deterministic by
    construction so that every run with the same config sees the same layout.
    """
    w, h = cfg.area
    m = cfg.num_servers
    radius = 0.25 * min(w, h)
    angles = 2 * np.pi * np.arange(m) / m + np.pi / 2
    pts = np.stack([w / 2 + radius * np.cos(angles),
                    h / 2 + radius * np.sin(angles)], axis=1)
    return pts


def initial_positions(cfg: NetworkConfig, stream: np.random.Generator) -> np.ndarray:
    """Uniform-random MID placement inside the area."""
    u = stream.random((cfg.num_mids, 2))
    return u * np.asarray(cfg.area)


def _reflect(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Fold coordinates back into [lo, hi] by specular reflection."""
    span = hi - lo
    y = np.mod(x - lo, 2 * span)
    y = np.where(y > span, 2 * span - y, y)
    return y + lo


def step_mobility(positions: np.ndarray, step_length: float,
                  area: tuple[float, float],
                  stream: np.random.Generator) -> np.ndarray:
    """Move each MID ``step_length`` meters in a uniform random direction.

    Positions reflect off the area boundary. Servers never move; only MID
    positions are passed through here.
    """
    positions = np.asarray(positions, dtype=float)
    theta = stream.uniform(0.0, 2 * np.pi, size=positions.shape[0])
    delta = step_length * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    moved = positions + delta
    out = np.empty_like(moved)
    out[:, 0] = _reflect(moved[:, 0], 0.0, area[0])
    out[:, 1] = _reflect(moved[:, 1], 0.0, area[1])
    return out


def draw_fading(num_mids: int, num_servers: int,
                stream: np.random.Generator) -> np.ndarray:
    """One Exp(1) coefficient per MID-server pair, i.i.d. per slot."""
    return stream.exponential(1.0, size=(num_mids, num_servers))


def pair_distances(positions: np.ndarray, server_positions: np.ndarray) -> np.ndarray:
    """(U, M) Euclidean distances."""
    diff = positions[:, None, :] - server_positions[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def channel_gain(fading, dist, cfg: NetworkConfig):
    """Linear power gain H = h * g0 * (d0/d)^theta, with d clamped to >= d0."""
    d = np.maximum(np.asarray(dist, dtype=float), cfg.ref_dist_m)
    return np.asarray(fading, dtype=float) * cfg.pathloss_const * (cfg.ref_dist_m / d) ** cfg.pathloss_exp


def gain_matrix(state_positions: np.ndarray, server_positions: np.ndarray,
                fading: np.ndarray, cfg: NetworkConfig) -> np.ndarray:
    """(U, M) channel power gains for one slot."""
    return channel_gain(fading, pair_distances(state_positions, server_positions), cfg)


def offload_rate(gain, p_tx, cfg: NetworkConfig):
    """Uplink rate omega * log2(1 + H p / (chi + sigma^2)), bits/s."""
    snr = np.asarray(gain, dtype=float) * np.asarray(p_tx, dtype=float) \
        / (cfg.interference_w + cfg.noise_w)
    # log1p keeps precision at the tiny SNRs the optimizer probes
    return cfg.bandwidth_hz * np.log1p(snr) / _LN2


def local_rate(f, comp_intensity: float):
    """Local processing rate f / gamma, bits/s."""
    return np.asarray(f, dtype=float) / comp_intensity
