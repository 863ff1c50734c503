"""Per-slot user association.

Given fixed transmit powers and CPU frequencies, choosing the serving server
for every MID is a linear-cost capacitated assignment problem: entry (u, m)
costs ``0.5*V*phi*eps*(1 - 2*prev[u,m]) - Q_u * r_off[u,m] * tau`` (keeping
the previous server is cheaper by ``V*phi*eps``; faster uplinks are cheaper
proportionally to the backlog).

Two solution routes are provided:

* ``solve_sdr`` + ``round_fractional``: lift each MID's one-hot indicator to a
  PSD matrix, drop the rank-1 constraint, solve the resulting block SDP, and
  round the fractional diagonal through a server-slot bipartite graph and a
  max-weight complete matching.
* ``solve_exact``: the exact integer optimum via a capacity-replicated
  assignment solve (each server duplicated cap_max times), used both as a
  production mode and as the oracle the relaxation route is tested against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import sdp
from .config import NetworkConfig

# weights this small are treated as absent edges / zero mass
_WEIGHT_EPS = 1e-12


class AssociationError(ValueError):
    pass


@dataclass(frozen=True)
class AssignmentProblem:
    costs: np.ndarray       # (U, M)
    cap_max: int
    prev_assoc: np.ndarray  # (U, M) binary; all-zero rows = no predecessor

    def __post_init__(self):
        costs = np.asarray(self.costs, dtype=float)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "prev_assoc",
                           np.asarray(self.prev_assoc, dtype=float))
        if not np.all(np.isfinite(costs)):
            raise AssociationError("assignment costs must be finite")
        if self.cap_max * costs.shape[1] < costs.shape[0]:
            raise AssociationError("cap_max * M < U: capacity infeasible")

    @property
    def num_users(self) -> int:
        return self.costs.shape[0]

    @property
    def num_servers(self) -> int:
        return self.costs.shape[1]

    def to_json(self) -> str:
        return json.dumps({
            "costs": self.costs.tolist(),
            "cap_max": self.cap_max,
            "prev_assoc": self.prev_assoc.tolist(),
        })


def build_costs(queues: np.ndarray, offload_rates: np.ndarray,
                prev_assoc: np.ndarray, cfg: NetworkConfig) -> AssignmentProblem:
    """Assemble the per-pair assignment costs for one slot.

    ``offload_rates`` holds the uplink rate of every MID against every server
    at the MID's current transmit power.
    """
    q = np.asarray(queues, dtype=float)[:, None]
    migration = 0.5 * cfg.lyapunov_v * cfg.migration_weight * cfg.migration_unit \
        * (1.0 - 2.0 * np.asarray(prev_assoc, dtype=float))
    costs = migration - q * np.asarray(offload_rates, dtype=float) * cfg.slot_s
    return AssignmentProblem(costs=costs, cap_max=cfg.cap_max,
                             prev_assoc=prev_assoc)


def assignment_objective(costs: np.ndarray, assoc: np.ndarray) -> float:
    return float(np.sum(np.asarray(costs) * np.asarray(assoc)))


# --------------------------------------------------------------------------
# SDR route
# --------------------------------------------------------------------------

def lift_objective(a_row: np.ndarray) -> np.ndarray:
    """(M+1)x(M+1) objective block: costs in the final row/column halves."""
    m = a_row.shape[0]
    v = np.zeros((m + 1, m + 1))
    v[:m, m] = a_row / 2
    v[m, :m] = a_row / 2
    return v


def lift_binary_constraint(m_idx: int, num_servers: int) -> np.ndarray:
    """Block enforcing w_m^2 = w_m on the lifted matrix: diag(e_m) with a
    -e_m/2 border."""
    v = np.zeros((num_servers + 1, num_servers + 1))
    v[m_idx, m_idx] = 1.0
    v[m_idx, num_servers] = -0.5
    v[num_servers, m_idx] = -0.5
    return v


def lift_selector(m_idx: int, num_servers: int) -> np.ndarray:
    """Block reading w_m off the lifted matrix: an e_m/2 border."""
    v = np.zeros((num_servers + 1, num_servers + 1))
    v[m_idx, num_servers] = 0.5
    v[num_servers, m_idx] = 0.5
    return v


def lift_point(w: np.ndarray) -> np.ndarray:
    """Rank-1 lift [w;1][w;1]^T of an assignment vector."""
    v = np.concatenate([np.asarray(w, dtype=float), [1.0]])
    return np.outer(v, v)


def _sdr_constraints(u_n: int, m_n: int, cap_max: int):
    """Constraint side of the relaxation (independent of the costs).

    Per block: M constraints tying the diagonal to the final column (relaxed
    binarity), one row-sum constraint, and a unit corner entry (implied by
    the lifting but required explicitly, otherwise the relaxation is
    unbounded). Per server: a capacity coupling over all blocks, emitted as
    an equality when capacity is exactly tight (cap_max * M == U leaves no
    slack for an interior point).
    """
    n = m_n + 1
    corner = np.zeros((n, n))
    corner[m_n, m_n] = 1.0
    row_sum = sum(lift_selector(m, m_n) for m in range(m_n))

    eq_coeffs: list[dict[int, np.ndarray]] = []
    eq_rhs: list[float] = []
    for u in range(u_n):
        for m in range(m_n):
            eq_coeffs.append({u: lift_binary_constraint(m, m_n)})
            eq_rhs.append(0.0)
        eq_coeffs.append({u: row_sum})
        eq_rhs.append(1.0)
        eq_coeffs.append({u: corner})
        eq_rhs.append(1.0)

    cap_coeffs = [{u: lift_selector(m, m_n) for u in range(u_n)}
                  for m in range(m_n)]
    cap_rhs = [float(cap_max)] * m_n
    if cap_max * m_n == u_n:
        return eq_coeffs + cap_coeffs, eq_rhs + cap_rhs, [], []
    return eq_coeffs, eq_rhs, cap_coeffs, cap_rhs


def build_sdr(problem: AssignmentProblem) -> sdp.BlockSdp:
    """Block SDP relaxation of the assignment problem: one (M+1)-dimensional
    block per MID, costs in the border of each block's objective matrix."""
    u_n, m_n = problem.num_users, problem.num_servers
    eq_coeffs, eq_rhs, ineq_coeffs, ineq_rhs = _sdr_constraints(
        u_n, m_n, problem.cap_max)
    return sdp.BlockSdp(
        block_sizes=[m_n + 1] * u_n,
        objective=[lift_objective(problem.costs[u]) for u in range(u_n)],
        eq_coeffs=eq_coeffs,
        eq_rhs=eq_rhs,
        ineq_coeffs=ineq_coeffs,
        ineq_rhs=ineq_rhs,
    )


@lru_cache(maxsize=16)
def _prepared_sdr(u_n: int, m_n: int, cap_max: int) -> sdp.PreparedSdp:
    eq_coeffs, eq_rhs, ineq_coeffs, ineq_rhs = _sdr_constraints(u_n, m_n, cap_max)
    return sdp.PreparedSdp([m_n + 1] * u_n, eq_coeffs, eq_rhs,
                           ineq_coeffs, ineq_rhs)


@dataclass
class SdrSolution:
    blocks: list[np.ndarray]  # (M+1, M+1) PSD matrix per MID
    objective: float
    solver: sdp.SdpSolution | None = field(default=None, repr=False)

    def to_json(self) -> str:
        return json.dumps({
            "objective": self.objective,
            "blocks": [b.tolist() for b in self.blocks],
        })


def solve_sdr(problem: AssignmentProblem, tolerance: float = 1e-7) -> SdrSolution:
    prep = _prepared_sdr(problem.num_users, problem.num_servers, problem.cap_max)
    objective = [lift_objective(problem.costs[u]) for u in range(problem.num_users)]
    sol = prep.solve(objective, tolerance=tolerance)
    if sol.status != "optimal":
        raise AssociationError(
            f"relaxation solve failed: {sol.status} ({sol.diagnostics})")
    return SdrSolution(blocks=sol.blocks, objective=sol.objective, solver=sol)


def extract_fractional(problem: AssignmentProblem, sol: SdrSolution) -> np.ndarray:
    """Fractional association z[u, m] = diagonal of each lifted block.

    Validates the solution invariants, clips into [0, 1], and renormalizes
    rows whose sum drifted from 1 by more than 1e-9; drift beyond 1e-6 means
    the solution is unusable and is rejected.
    """
    u_n, m_n = problem.num_users, problem.num_servers
    w = np.stack(sol.blocks)
    min_eigs = np.linalg.eigvalsh(w)[:, 0]
    if min_eigs.min() < -1e-8:
        u = int(min_eigs.argmin())
        raise AssociationError(f"block {u} not PSD: min eig {min_eigs[u]:.3e}")
    corner_err = np.abs(w[:, m_n, m_n] - 1.0)
    if corner_err.max() > 1e-8:
        u = int(corner_err.argmax())
        raise AssociationError(f"block {u} corner != 1: {w[u, m_n, m_n]!r}")
    diag = w[:, np.arange(m_n), np.arange(m_n)]
    border = w[:, :m_n, m_n]
    if np.abs(diag - border).max() > 1e-6:
        u = int(np.abs(diag - border).max(axis=1).argmax())
        raise AssociationError(f"block {u} binarity residual too large")
    z = np.clip(diag, 0.0, 1.0)
    sums = z.sum(axis=1)
    drift = np.abs(sums - 1.0)
    if drift.max() > 1e-6:
        u = int(drift.argmax())
        raise AssociationError(f"block {u} row sum off by {drift[u]:.3e}")
    renorm = drift > 1e-9
    z[renorm] /= sums[renorm, None]
    caps = z.sum(axis=0)
    if np.any(caps > problem.cap_max + 1e-6):
        raise AssociationError("fractional capacity exceeded")
    return z


# --------------------------------------------------------------------------
# rounding: bipartite construction + matching
# --------------------------------------------------------------------------

@dataclass
class BipartiteGraph:
    num_users: int
    slot_server: list[int]                  # server index per right-hand node
    edges: list[tuple[int, int, float]]     # (user, slot node, weight)

    @property
    def num_slots(self) -> int:
        return len(self.slot_server)


def build_bipartite(z: np.ndarray) -> BipartiteGraph:
    """Server-slot bipartite graph from a fractional association.

    Per server, users are sorted by descending share (ties by index) and
    their mass is poured into ceil(total) unit-capacity slot nodes in order;
    a user straddling a slot boundary is split between the two slots. Each
    user's incident edge weights therefore sum to its row sum (= 1), and each
    slot node carries at most unit weight. Zero-weight edges are omitted.
    """
    z = np.asarray(z, dtype=float)
    u_n, m_n = z.shape
    if np.any(z < -_WEIGHT_EPS) or np.any(z > 1 + 1e-6):
        raise AssociationError("fractional shares must lie in [0, 1]")
    row_err = np.abs(z.sum(axis=1) - 1.0)
    if row_err.max() > 1e-6:
        raise AssociationError(
            f"row {int(row_err.argmax())} sums to {z[row_err.argmax()].sum()!r}")

    slot_server: list[int] = []
    edges: list[tuple[int, int, float]] = []
    for m in range(m_n):
        col = z[:, m]
        total = float(col.sum())
        n_slots = int(math.ceil(total - 1e-7))
        if n_slots <= 0:
            continue
        base = len(slot_server)
        slot_server.extend([m] * n_slots)
        order = np.lexsort((np.arange(u_n), -col))
        cum = 0.0
        for u in order:
            w = float(col[u])
            if w <= _WEIGHT_EPS:
                break  # descending order: the rest is zero mass
            lo, hi = cum, cum + w
            s_first = int(math.floor(lo + 1e-12))
            s_last = min(int(math.ceil(hi - 1e-12)), n_slots)
            for s in range(s_first, s_last):
                overlap = min(hi, s + 1.0) - max(lo, float(s))
                if overlap > _WEIGHT_EPS:
                    edges.append((int(u), base + s, overlap))
            cum = hi
    return BipartiteGraph(num_users=u_n, slot_server=slot_server, edges=edges)


def match_and_extract(graph: BipartiteGraph, num_servers: int) -> np.ndarray:
    """Integral association via max-weight complete matching of all users.

    Every user must be matched to exactly one slot node; absent edges are
    forbidden. The graph built from a valid fractional solution always admits
    a complete matching, so failure here is an internal error.
    """
    weights = np.full((graph.num_users, max(graph.num_slots, 1)), -np.inf)
    for u, s, w in graph.edges:
        weights[u, s] = max(weights[u, s], w)
    try:
        rows, cols = linear_sum_assignment(weights, maximize=True)
    except ValueError as exc:
        raise AssociationError(f"no complete matching exists: {exc}") from exc
    if len(rows) != graph.num_users or not np.all(np.isfinite(weights[rows, cols])):
        raise AssociationError("matching failed to cover every user")
    assoc = np.zeros((graph.num_users, num_servers))
    for u, s in zip(rows, cols):
        assoc[u, graph.slot_server[s]] = 1.0
    return assoc


def round_fractional(problem: AssignmentProblem, z: np.ndarray) -> np.ndarray:
    return match_and_extract(build_bipartite(z), problem.num_servers)


def associate_sdr(problem: AssignmentProblem,
                  tolerance: float = 1e-7) -> tuple[np.ndarray, SdrSolution]:
    """Full relaxation route: solve, extract, round."""
    sol = solve_sdr(problem, tolerance=tolerance)
    z = extract_fractional(problem, sol)
    return round_fractional(problem, z), sol


# --------------------------------------------------------------------------
# exact route
# --------------------------------------------------------------------------

def solve_exact(problem: AssignmentProblem) -> tuple[np.ndarray, float]:
    """Exact minimizer of the capacitated assignment.

    Each server is replicated cap_max times and the resulting rectangular
    assignment problem solved exactly; this is the min-cost flow on the
    user -> server -> sink network specialized to unit user supplies.
    """
    u_n, m_n = problem.num_users, problem.num_servers
    cap = problem.cap_max
    expanded = np.repeat(problem.costs, cap, axis=1)
    rows, cols = linear_sum_assignment(expanded)
    assoc = np.zeros((u_n, m_n))
    for u, c in zip(rows, cols):
        assoc[u, c // cap] = 1.0
    return assoc, assignment_objective(problem.costs, assoc)
