"""Small-scale block-diagonal semidefinite programming.

Solves  min sum_b <C_b, X_b>
        s.t. sum_b <A_ib, X_b>  = b_i   (equalities)
             sum_b <G_jb, X_b> <= h_j   (inequalities)
             X_b >= 0 (PSD)

with a primal-dual interior-point method (Nesterov-Todd scaling,
Mehrotra-style predictor-corrector). Inequalities are folded into equality
form through non-negative scalar slack blocks, keeping a pure equality-form
core.

Designed for many small blocks (dimension <= ~16); all per-block linear
algebra is batched across blocks of equal size, and the constraint data can
be prepared once and reused across solves that share a structure
(``PreparedSdp``). The iteration is fully deterministic: a given instance
always produces the same iterate path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

Matrix = np.ndarray


class SdpError(ValueError):
    pass


@dataclass
class BlockSdp:
    """Problem data. Constraint coefficients are sparse over blocks:
    each constraint maps block index -> symmetric matrix."""

    block_sizes: list[int]
    objective: list[Matrix]
    eq_coeffs: list[dict[int, Matrix]] = field(default_factory=list)
    eq_rhs: list[float] = field(default_factory=list)
    ineq_coeffs: list[dict[int, Matrix]] = field(default_factory=list)
    ineq_rhs: list[float] = field(default_factory=list)

    def check_shapes(self) -> None:
        if len(self.objective) != len(self.block_sizes):
            raise SdpError("one objective matrix per block required")
        for b, (n, c) in enumerate(zip(self.block_sizes, self.objective)):
            _check_sym(c, n, f"objective block {b}")
        for i, coeffs in enumerate(self.eq_coeffs):
            for b, m in coeffs.items():
                _check_sym(m, self.block_sizes[b], f"equality {i} block {b}")
        for j, coeffs in enumerate(self.ineq_coeffs):
            for b, m in coeffs.items():
                _check_sym(m, self.block_sizes[b], f"inequality {j} block {b}")
        if len(self.eq_coeffs) != len(self.eq_rhs):
            raise SdpError("equality rhs length mismatch")
        if len(self.ineq_coeffs) != len(self.ineq_rhs):
            raise SdpError("inequality rhs length mismatch")


def _check_sym(m: Matrix, n: int, what: str) -> None:
    m = np.asarray(m)
    if m.shape != (n, n):
        raise SdpError(f"{what}: expected shape {(n, n)}, got {m.shape}")
    if not np.allclose(m, m.T, rtol=0, atol=1e-12 * (1 + np.abs(m).max())):
        raise SdpError(f"{what}: matrix is not symmetric")


@dataclass
class SdpSolution:
    blocks: list[Matrix]          # primal PSD matrix per original block
    objective: float              # primal objective <C, X>
    dual_objective: float
    status: str                   # "optimal" | "max-iters" | "infeasible"
    iterations: int
    slacks: np.ndarray            # realized slack per inequality
    y: np.ndarray                 # multipliers for the extended equality system
    dual_blocks: list[Matrix]     # dual slack matrix Z per original block
    diagnostics: dict


# --------------------------------------------------------------------------
# batched block algebra
# --------------------------------------------------------------------------

def _sym(x: Matrix) -> Matrix:
    return (x + x.transpose(0, 2, 1)) / 2


class _Factored:
    """Eigendecomposition of a stack of SPD matrices, clamped away from
    singularity so the iterate survives roundoff at the cone boundary.
    Stacks of 1x1 blocks bypass LAPACK entirely."""

    __slots__ = ("matrix", "vals", "vecs", "_inv_factor", "_scalar")

    def __init__(self, x: Matrix):
        self._scalar = x.shape[1] == 1
        if self._scalar:
            vals = np.maximum(x[:, 0, 0], 1e-300 * np.ones(x.shape[0]))
            self.vals = vals[:, None]
            self.vecs = None
            self.matrix = self.vals[:, :, None]
            self._inv_factor = None
            return
        vals, vecs = np.linalg.eigh(_sym(x))
        floor = np.maximum(vals[:, -1], 1e-300) * 1e-15
        self.vals = np.maximum(vals, floor[:, None])
        self.vecs = vecs
        self.matrix = np.matmul(vecs * self.vals[:, None, :],
                                vecs.transpose(0, 2, 1))
        # F^{-1} with F F^T = matrix; for the PSD line search
        self._inv_factor = (vecs / np.sqrt(self.vals)[:, None, :]).transpose(0, 2, 1)

    def power(self, p: float) -> Matrix:
        if self._scalar:
            return (self.vals ** p)[:, :, None]
        return np.matmul(self.vecs * (self.vals ** p)[:, None, :],
                         self.vecs.transpose(0, 2, 1))

    def max_step(self, ds: Matrix) -> float:
        """Largest alpha keeping matrix + alpha ds PSD."""
        if self._scalar:
            lam = float((ds[:, 0, 0] / self.vals[:, 0]).min())
            return np.inf if lam >= 0 else -1.0 / lam
        finv = self._inv_factor
        w = np.matmul(finv, np.matmul(ds, finv.transpose(0, 2, 1)))
        lam = float(np.linalg.eigvalsh(w).min())  # lower triangle suffices
        return np.inf if lam >= 0 else -1.0 / lam


def _chol_with_jitter(m: Matrix):
    jitter = 0.0
    base = max(np.trace(m) / max(m.shape[0], 1), 1e-300)
    for _ in range(6):
        try:
            return cho_factor(m + jitter * np.eye(m.shape[0]), lower=True,
                              check_finite=False)
        except np.linalg.LinAlgError:
            jitter = base * 1e-14 if jitter == 0.0 else jitter * 100
    raise np.linalg.LinAlgError("Schur complement not positive definite")


class _Group:
    """Blocks of one common dimension, with constraints as a dense stack."""

    __slots__ = ("n", "members", "A", "A_flat")

    def __init__(self, n: int, members: list[int],
                 constraints: list[dict[int, Matrix]]):
        self.n = n
        self.members = members
        m = len(constraints)
        self.A = np.zeros((m, len(members), n, n))
        index = {b: k for k, b in enumerate(members)}
        for i, coeffs in enumerate(constraints):
            for b, mat in coeffs.items():
                k = index.get(b)
                if k is not None:
                    self.A[i, k] = mat
        self.A_flat = self.A.reshape(m, -1)


# --------------------------------------------------------------------------
# prepared instance: constraint structure reusable across objectives
# --------------------------------------------------------------------------

class PreparedSdp:
    """Folded, grouped constraint data; solve repeatedly with new objectives."""

    def __init__(self, block_sizes: list[int],
                 eq_coeffs: list[dict[int, Matrix]], eq_rhs: list[float],
                 ineq_coeffs: list[dict[int, Matrix]], ineq_rhs: list[float]):
        self.n_orig = len(block_sizes)
        self.n_ineq = len(ineq_coeffs)
        sizes = list(block_sizes) + [1] * self.n_ineq
        constraints = [dict(c) for c in eq_coeffs]
        rhs = list(eq_rhs)
        for j, (coeffs, h) in enumerate(zip(ineq_coeffs, ineq_rhs)):
            c = dict(coeffs)
            c[self.n_orig + j] = np.array([[1.0]])
            constraints.append(c)
            rhs.append(h)
        if not constraints:
            raise SdpError("at least one constraint is required")
        self.sizes = sizes
        self.m = len(constraints)
        self.b = np.asarray(rhs, dtype=float)
        by_size: dict[int, list[int]] = {}
        for idx, n in enumerate(sizes):
            by_size.setdefault(n, []).append(idx)
        self.groups = [_Group(n, by_size[n], constraints) for n in sorted(by_size)]
        self.n_total = sum(sizes)
        # Gram matrix of the constraint operator, for the final feasibility
        # projection (constant per structure; may be singular when redundant
        # constraints are present, hence lstsq at use sites).
        self.gram = sum(g.A_flat @ g.A_flat.T for g in self.groups)

    # block list <-> grouped stacks
    def _scatter(self, blocks: list[Matrix]) -> list[Matrix]:
        return [np.stack([np.asarray(blocks[b], dtype=float) for b in g.members])
                for g in self.groups]

    def _gather(self, stacks: list[Matrix]) -> list[Matrix]:
        out: list[Matrix] = [None] * len(self.sizes)  # type: ignore[list-item]
        for g, stack in zip(self.groups, stacks):
            for k, b in enumerate(g.members):
                out[b] = stack[k]
        return out

    def _op_a(self, x: list[Matrix]) -> np.ndarray:
        return sum(g.A_flat @ xg.reshape(-1) for g, xg in zip(self.groups, x))

    def _op_at(self, y: np.ndarray) -> list[Matrix]:
        return [(y @ g.A_flat).reshape(len(g.members), g.n, g.n)
                for g in self.groups]

    @staticmethod
    def _inner(x: list[Matrix], z: list[Matrix]) -> float:
        return float(sum(np.dot(a.reshape(-1), b.reshape(-1))
                         for a, b in zip(x, z)))

    def _eye(self, scale: float) -> list[Matrix]:
        return [scale * np.broadcast_to(np.eye(g.n),
                                        (len(g.members), g.n, g.n)).copy()
                for g in self.groups]

    def solve(self, objective: list[Matrix], tolerance: float = 1e-7,
              max_iters: int = 200,
              debug_trace: list | None = None) -> SdpSolution:
        c_scale = max(1.0, max(float(np.abs(c).max()) for c in objective))
        obj_blocks = [np.asarray(c, dtype=float) / c_scale for c in objective] \
            + [np.zeros((1, 1)) for _ in range(self.n_ineq)]
        C = self._scatter(obj_blocks)
        b = self.b

        X = self._eye(10.0 * max(1.0, float(np.abs(b).max())))
        Z = self._eye(10.0)
        y = np.zeros(self.m)

        c_norm = 1.0 + max(float(np.abs(cg).max()) for cg in C)
        status = "max-iters"
        iterations = 0
        tiny_steps = 0
        diag: dict = {}
        best = None  # (merit, X, y, Z)

        for it in range(1, max_iters + 1):
            iterations = it
            fx = [_Factored(xg) for xg in X]
            fz = [_Factored(zg) for zg in Z]
            X = [f.matrix for f in fx]
            Z = [f.matrix for f in fz]

            rp = b - self._op_a(X)
            aty = self._op_at(y)
            Rd = [cg - zg - ag for cg, zg, ag in zip(C, Z, aty)]
            gap = self._inner(X, Z)
            mu = gap / self.n_total
            pobj = self._inner(C, X)
            dobj = float(b @ y)
            rel_gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
            prim_res = float(np.abs(rp).max())  # absolute: rhs are O(1)
            dual_res = max(float(np.abs(rg).max()) for rg in Rd) / c_norm

            if debug_trace is not None:
                debug_trace.append({
                    "it": it, "rel_gap": rel_gap, "prim_res": prim_res,
                    "dual_res": dual_res, "mu": mu,
                    "lam_min_x": min(float(f.vals[:, 0].min()) for f in fx),
                })
            merit = max(rel_gap / tolerance, prim_res / 1e-8, dual_res / 1e-7)
            if best is None or merit < best[0]:
                best = (merit, X, y, Z)
            if merit <= 1.0:
                status = "optimal"
                break
            if rel_gap <= tolerance and dual_res <= 1e-7 and prim_res <= 1e-4:
                # Gap and dual feasibility have converged; only a primal
                # remnant is left (Newton steps through the ill-conditioned
                # scaling cannot push it to zero). Remove it by least-squares
                # projection onto the affine constraints, but only while the
                # iterate is interior enough for the correction to keep it PSD.
                lam = np.linalg.lstsq(self.gram, rp, rcond=None)[0]
                corr = self._op_at(lam)
                corr_norm = max(
                    float(np.sqrt((cg * cg).sum(axis=(1, 2))).max())
                    for cg in corr)
                lam_min = min(float(f.vals[:, 0].min()) for f in fx)
                if corr_norm <= 0.25 * lam_min:
                    X = [xg + cg for xg, cg in zip(X, corr)]
                    if float(np.abs(b - self._op_a(X)).max()) <= 1e-8:
                        status = "optimal"
                        best = None
                        break
            if tiny_steps >= 5 or (mu < 1e-14 and prim_res > 1e-5):
                status = "infeasible"
                diag["reason"] = (
                    "step sizes collapsed" if tiny_steps >= 5
                    else "complementarity vanished with large primal residual")
                break

            try:
                xhalf = [f.power(0.5) for f in fx]
                w = []
                xz_min = np.inf
                for xh, zg in zip(xhalf, Z):
                    t = _Factored(xh @ zg @ xh)  # eigenvalues of XZ
                    xz_min = min(xz_min, float(t.vals[:, 0].min()))
                    w.append(xh @ t.power(-0.5) @ xh)
                zinv = [f.power(-1.0) for f in fz]
                centrality = xz_min / mu  # 1 on the central path, -> 0 off it
                # Schur complement M_ij = sum_blocks <A_i, W A_j W>
                waw = [np.matmul(wg[None], np.matmul(g.A, wg[None]))
                       for g, wg in zip(self.groups, w)]
                schur = sum(g.A_flat @ t.reshape(self.m, -1).T
                            for g, t in zip(self.groups, waw))
                lfac = _chol_with_jitter((schur + schur.T) / 2)
                wrdw = [wg @ rg @ wg for wg, rg in zip(w, Rd)]
                a_wrdw = self._op_a(wrdw)

                def direction(rc: list[Matrix]):
                    h = rp - self._op_a(rc) + a_wrdw
                    dy = cho_solve(lfac, h, check_finite=False)
                    atdy = self._op_at(dy)
                    dz = [rg - ag for rg, ag in zip(Rd, atdy)]
                    dx = [_sym(rcg - wg @ dzg @ wg)
                          for rcg, wg, dzg in zip(rc, w, dz)]
                    return dx, dy, dz

                def max_steps(dx, dz):
                    ap = ad = np.inf
                    for fxg, fzg, dxg, dzg in zip(fx, fz, dx, dz):
                        ap = min(ap, fxg.max_step(dxg))
                        ad = min(ad, fzg.max_step(dzg))
                    return ap, ad

                # predictor: pure Newton step toward complementarity zero
                dx_a, dy_a, dz_a = direction([-xg for xg in X])
                ap, ad = max_steps(dx_a, dz_a)
                ap, ad = min(1.0, ap), min(1.0, ad)
                gap_aff = self._inner([xg + ap * d for xg, d in zip(X, dx_a)],
                                      [zg + ad * d for zg, d in zip(Z, dz_a)])
                sigma = min(1.0, max((max(gap_aff, 0.0) / gap) ** 3, 1e-10))
                if centrality < 0.05:
                    # off-center iterates (degenerate faces drive eigenvalue
                    # pairs apart) stall the predictor; recentre instead
                    sigma = max(sigma, 0.5)

                # corrector with adaptive centering and second-order term
                rc = [sigma * mu * zg - xg - _sym(dxg @ dzg @ zg)
                      for zg, xg, dxg, dzg in zip(zinv, X, dx_a, dz_a)]
                dx, dy, dz = direction(rc)
                ap, ad = max_steps(dx, dz)
                ap, ad = min(1.0, 0.98 * ap), min(1.0, 0.98 * ad)
            except np.linalg.LinAlgError as exc:
                status = "infeasible"
                diag["reason"] = f"numerical failure: {exc}"
                break

            if min(ap, ad) < 1e-10:
                tiny_steps += 1
            else:
                tiny_steps = 0
            X = [xg + ap * d for xg, d in zip(X, dx)]
            y = y + ad * dy
            Z = [zg + ad * d for zg, d in zip(Z, dz)]

        if best is not None:
            _, X, y, Z = best
            if status != "optimal":
                # last resort: project the best iterate, accept only if every
                # tolerance (including PSD-ness) survives the correction
                rp = b - self._op_a(X)
                if 0 < float(np.abs(rp).max()) <= 1e-6:
                    lam = np.linalg.lstsq(self.gram, rp, rcond=None)[0]
                    xc = [xg + cg for xg, cg in zip(X, self._op_at(lam))]
                    pobj_s = self._inner(C, xc)
                    dobj_s = float(b @ y)
                    rel_gap = abs(pobj_s - dobj_s) / (1 + abs(pobj_s) + abs(dobj_s))
                    prim_res = float(np.abs(b - self._op_a(xc)).max())
                    aty = self._op_at(y)
                    dual_res = max(float(np.abs(cg - zg - ag).max())
                                   for cg, zg, ag in zip(C, Z, aty)) / c_norm
                    min_eig = min(float(np.linalg.eigvalsh(xg).min())
                                  for xg in xc)
                    if (rel_gap <= tolerance and prim_res <= 1e-8
                            and dual_res <= 1e-7 and min_eig >= -1e-9):
                        X = xc
                        status = "optimal"

        x_blocks = self._gather(X)
        z_blocks = self._gather(Z)
        pobj = self._inner(C, X) * c_scale
        dobj = float(b @ y) * c_scale
        slacks = np.array([float(x_blocks[self.n_orig + j][0, 0])
                           for j in range(self.n_ineq)])
        diag.update({
            "mu": self._inner(X, Z) / self.n_total * c_scale,
            "primal_residual": float(np.abs(b - self._op_a(X)).max()),
            "relative_gap": abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj)),
        })
        return SdpSolution(
            blocks=[x_blocks[i] for i in range(self.n_orig)],
            objective=pobj,
            dual_objective=dobj,
            status=status,
            iterations=iterations,
            slacks=slacks,
            y=y * c_scale,
            dual_blocks=[z_blocks[i] * c_scale for i in range(self.n_orig)],
            diagnostics=diag,
        )


def prepare(sdp: BlockSdp) -> PreparedSdp:
    return PreparedSdp(sdp.block_sizes, sdp.eq_coeffs, sdp.eq_rhs,
                       sdp.ineq_coeffs, sdp.ineq_rhs)


def solve(sdp: BlockSdp, tolerance: float = 1e-7, max_iters: int = 200,
          check: bool = True) -> SdpSolution:
    """Interior-point solve to relative duality gap <= tolerance.

    Primal residuals are driven below 1e-8 (relative to the constraint
    right-hand sides); status reports "optimal", "max-iters", or
    "infeasible" with diagnostics.
    """
    if check:
        sdp.check_shapes()
    return prepare(sdp).solve(sdp.objective, tolerance=tolerance,
                              max_iters=max_iters)


def check_solution(sdp: BlockSdp, sol: SdpSolution) -> dict:
    """Independent residual report for a solution.

    Recomputes the objective, per-constraint residuals, per-block minimum
    eigenvalues, and the duality gap from scratch.
    """
    sdp.check_shapes()
    x = [np.asarray(xb, dtype=float) for xb in sol.blocks]
    pobj = sum(float(np.sum(c * xb)) for c, xb in zip(sdp.objective, x))
    eq_res = np.array([
        sum(float(np.sum(mat * x[bidx])) for bidx, mat in coeffs.items()) - r
        for coeffs, r in zip(sdp.eq_coeffs, sdp.eq_rhs)
    ])
    ineq_slack = np.array([
        r - sum(float(np.sum(mat * x[bidx])) for bidx, mat in coeffs.items())
        for coeffs, r in zip(sdp.ineq_coeffs, sdp.ineq_rhs)
    ])
    min_eigs = np.array([float(np.linalg.eigvalsh(xb).min()) for xb in x])
    return {
        "objective": pobj,
        "dual_objective": sol.dual_objective,
        "duality_gap": pobj - sol.dual_objective,
        "eq_residuals": eq_res,
        "max_eq_residual": float(np.abs(eq_res).max()) if eq_res.size else 0.0,
        "ineq_slacks": ineq_slack,
        "min_ineq_slack": float(ineq_slack.min()) if ineq_slack.size else np.inf,
        "min_eigenvalues": min_eigs,
        "min_eigenvalue": float(min_eigs.min()) if min_eigs.size else np.inf,
    }
