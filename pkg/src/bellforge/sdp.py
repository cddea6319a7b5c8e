"""Small primal-dual interior-point solver for block-diagonal SDPs.

Standard form, with ``X`` block diagonal and every block positive semidefinite::

    primal:  maximise  <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
    dual:    minimise  b . y    s.t.  sum_i y_i A_i - C = Z >= 0

The method is an infeasible-start primal-dual path follower with
Nesterov-Todd scaling and Mehrotra's predictor-corrector.  Linearly dependent
equality constraints are removed before iterating.  Constraint matrices may be
dense or sparse; sparse ones are kept flattened as ``(m, n*n)`` CSR matrices.
Complex Hermitian problems are handled by the real embedding
``H -> [[Re H, -Im H], [Im H, Re H]]`` (see :func:`embed_hermitian`).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
DUAL_INFEASIBLE = "dual_infeasible"
NUMERICAL_FAILURE = "numerical_failure"
TOO_LARGE = "too_large"

#: Largest Schur complement (number of independent constraints) attempted.
MAX_CONSTRAINTS = 6000
_CHUNK_ENTRIES = 2_000_000


class SdpError(RuntimeError):
    """Raised by callers that require an optimal solve."""

    def __init__(self, status: str, message: str = ""):
        super().__init__(message or status)
        self.status = status


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + np.swapaxes(m, -1, -2)) / 2


def _transpose_perm(n: int) -> np.ndarray:
    return np.arange(n * n).reshape(n, n).T.ravel()


class SdpProblem:
    """Block-diagonal real symmetric SDP in the standard primal form.

    Parameters
    ----------
    objective : array or sequence of arrays
        ``C``; a single matrix means one block.
    constraints : sequence
        Each item is ``(A_i, b_i)`` with ``A_i`` a matrix (single block) or a
        list of per-block matrices.
    """

    def __init__(self, objective, constraints: Sequence = ()):
        single = isinstance(objective, np.ndarray) and objective.ndim == 2
        c_blocks = [np.asarray(objective, dtype=float)] if single else [np.asarray(c, dtype=float) for c in objective]
        m = len(constraints)
        a_blocks = [np.zeros((m,) + c.shape) for c in c_blocks]
        b = np.zeros(m)
        for i, (a, bi) in enumerate(constraints):
            parts = [a] if len(c_blocks) == 1 and isinstance(a, np.ndarray) and a.ndim == 2 else a
            for k, part in enumerate(parts):
                a_blocks[k][i] = np.asarray(part, dtype=float)
            b[i] = bi
        self._set(c_blocks, a_blocks, b)

    @classmethod
    def from_blocks(cls, c_blocks: Sequence[np.ndarray], a_blocks: Sequence, b) -> "SdpProblem":
        """Build from stacked data.

        ``a_blocks[k]`` is either a dense ``(m, n_k, n_k)`` array or a sparse
        ``(m, n_k * n_k)`` matrix of row-major flattened constraint matrices.
        """
        obj = cls.__new__(cls)
        obj._set([np.asarray(c, dtype=float) for c in c_blocks], list(a_blocks), np.asarray(b, dtype=float))
        return obj

    def _set(self, c_blocks, a_blocks, b):
        if len(c_blocks) != len(a_blocks):
            raise ValueError("objective and constraints disagree on the number of blocks")
        flats = []
        for c, a in zip(c_blocks, a_blocks):
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ValueError("objective blocks must be square")
            n = c.shape[0]
            if sp.issparse(a):
                a = sp.csr_matrix(a, dtype=float)
                if a.shape != (len(b), n * n):
                    raise ValueError("sparse constraint block has the wrong shape")
                asym = abs(a - a[:, _transpose_perm(n)]).max() if a.nnz else 0.0
            else:
                a = np.asarray(a, dtype=float)
                if a.shape != (len(b), n, n):
                    raise ValueError("dense constraint block has the wrong shape")
                asym = np.abs(a - np.swapaxes(a, 1, 2)).max(initial=0)
                a = a.reshape(len(b), n * n)
            if np.abs(c - c.T).max(initial=0) > 1e-12 or asym > 1e-12:
                raise ValueError("SDP data must be symmetric")
            flats.append(a)
        self.c_blocks = c_blocks
        self.a_flat = flats
        self.b = b

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.c_blocks)

    @property
    def num_constraints(self) -> int:
        return len(self.b)

    def constraint_matrix(self, i: int) -> list[np.ndarray]:
        """Dense per-block matrices of constraint ``i``."""
        out = []
        for a, n in zip(self.a_flat, self.block_dims):
            row = a[i].toarray().ravel() if sp.issparse(a) else a[i]
            out.append(row.reshape(n, n))
        return out

    def to_sdpa(self, path) -> None:
        """Write the problem in SDPA sparse format (dual form ``min b.y, sum y_i F_i - F_0 >= 0``)."""
        lines = [f"{self.num_constraints}", f"{len(self.c_blocks)}",
                 " ".join(str(n) for n in self.block_dims),
                 " ".join(repr(float(v)) for v in self.b)]

        def emit(mat_no, k, mat):
            iu, ju = np.nonzero(np.triu(mat))
            for i, j in zip(iu, ju):
                lines.append(f"{mat_no} {k + 1} {i + 1} {j + 1} {float(mat[i, j])!r}")

        for k, c in enumerate(self.c_blocks):
            emit(0, k, c)
        for i in range(self.num_constraints):
            for k, mat in enumerate(self.constraint_matrix(i)):
                emit(i + 1, k, mat)
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass
class SdpResult:
    value: float
    X: list[np.ndarray]
    status: str
    y: np.ndarray = field(default_factory=lambda: np.zeros(0))
    Z: list[np.ndarray] = field(default_factory=list)
    primal_objective: float = float("nan")
    dual_objective: float = float("nan")
    iterations: int = 0
    gap: float = float("nan")

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def embed_hermitian(h: np.ndarray) -> np.ndarray:
    """Real symmetric ``2D x 2D`` image of a Hermitian ``D x D`` matrix.

    ``<embed(H), embed(X)> = 2 Re tr(H X)``.
    """
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def extract_hermitian(y: np.ndarray) -> np.ndarray:
    """Hermitian matrix represented by a real ``2D x 2D`` block (symmetrised over the embedding)."""
    d = y.shape[0] // 2
    re = (y[:d, :d] + y[d:, d:]) / 2
    im = (y[d:, :d] - y[:d, d:]) / 2
    return re + 1j * im


# -- helpers ------------------------------------------------------------------
def _presolve(a_flat: list, b: np.ndarray, tol: float = 1e-10):
    """Indices of an independent subset of the constraint rows, or ``None`` if inconsistent."""
    m = len(b)
    if m == 0:
        return np.arange(0)
    if all(sp.issparse(a) for a in a_flat):
        stacked = sp.hstack(a_flat).tocsc()
        per_col = np.diff(stacked.indptr)
        nonempty = np.diff(stacked.tocsr().indptr) > 0
        if per_col.max(initial=0) <= 1 and nonempty.all():
            return np.arange(m)  # disjoint supports are independent
        dense = stacked.toarray()
    else:
        dense = np.hstack([a.toarray() if sp.issparse(a) else a for a in a_flat])
    _, r, piv = sla.qr(dense.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * max(1.0, diag[0] if len(diag) else 1.0)))
    keep = np.sort(piv[:rank])
    if rank < m:
        drop = np.setdiff1d(np.arange(m), keep)
        w, *_ = np.linalg.lstsq(dense[keep].T, dense[drop].T, rcond=None)
        if np.abs(w.T @ b[keep] - b[drop]).max() > 1e-8 * (1 + np.abs(b).max()):
            return None
    return keep


def _chol(m: np.ndarray):
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return None


def _max_step(mats: list[np.ndarray], dirs: list[np.ndarray]) -> float:
    """Largest ``alpha`` keeping every ``M + alpha dM`` positive semidefinite."""
    alpha = np.inf
    for m, d in zip(mats, dirs):
        l = _chol(m)
        if l is None:
            return 0.0
        li = sla.solve_triangular(l, d, lower=True)
        s = sla.solve_triangular(l, li.T, lower=True)
        lam = np.linalg.eigvalsh(_sym(s)).min()
        if lam < 0:
            alpha = min(alpha, -1.0 / lam)
    return alpha


def _schur_block(a, w: np.ndarray, n: int) -> np.ndarray:
    """``M_ij = tr(A_i W A_j W)`` for one block."""
    m = a.shape[0]
    if not sp.issparse(a):
        stack = a.reshape(m, n, n)
        g = np.matmul(np.matmul(w, stack), w)
        return a @ np.swapaxes(g, 1, 2).reshape(m, -1).T
    # M_ij = sum A_i[p,q] A_j[r,s] W[q,r] W[s,p], assembled over chunks of positions (p, q)
    at = a.T.tocsr()
    out = np.zeros((m, m))
    cols = np.unique(a.indices)
    step = max(1, _CHUNK_ENTRIES // (n * n))
    for start in range(0, len(cols), step):
        e = cols[start:start + step]
        p, q = np.divmod(e, n)
        # K[e, (r, s)] = W[q_e, r] * W[s, p_e]
        k = (w[q][:, :, None] * w[:, p].T[:, None, :]).reshape(len(e), n * n)
        out += np.asarray(at[e].T @ np.asarray(a @ k.T).T)
    return out


def solve_sdp(p: SdpProblem, tol: float = 1e-9, max_iters: int = 120, accept_tol: float = 1e-8) -> SdpResult:
    """Solve ``p`` by a primal-dual interior-point method.

    Iterates until the relative duality gap and the relative primal and dual
    residuals are all below ``tol``.  If progress stalls first, the best
    iterate is still reported ``optimal`` when all three are below
    ``accept_tol``; otherwise the status is ``numerical_failure``.
    """
    dims = p.block_dims
    keep = _presolve(p.a_flat, p.b)
    if keep is None:
        return SdpResult(float("nan"), [], INFEASIBLE)
    if len(keep) > MAX_CONSTRAINTS:
        return SdpResult(float("nan"), [], TOO_LARGE)
    m_all = p.num_constraints
    A = p.a_flat if len(keep) == m_all else [a[keep] for a in p.a_flat]
    b = p.b[keep]
    C = p.c_blocks
    m = len(b)
    n_total = sum(dims)

    def op_a(X):
        if not m:
            return np.zeros(0)
        return sum(np.asarray(a @ x.ravel()).ravel() for a, x in zip(A, X))

    def op_at(y):
        return [np.asarray(a.T @ y).reshape(n, n) if m else np.zeros((n, n)) for a, n in zip(A, dims)]

    def inner(U, V):
        return float(sum(np.vdot(u, v) for u, v in zip(U, V)))

    def row_sq_norms(a):
        return np.asarray(a.multiply(a).sum(axis=1)).ravel() if sp.issparse(a) else np.sum(a * a, axis=1)

    norm_b = np.linalg.norm(b)
    norm_c = np.sqrt(sum(np.sum(c * c) for c in C))
    a_norms = np.sqrt(sum(row_sq_norms(a) for a in A)) if m else np.zeros(0)
    max_a = a_norms.max(initial=1.0)
    xi = max(10.0, np.sqrt(n_total), n_total * (np.abs(b) / (1 + a_norms)).max(initial=0))
    eta = max(10.0, np.sqrt(n_total), norm_c, max_a)
    X = [xi * np.eye(n) for n in dims]
    Z = [eta * np.eye(n) for n in dims]
    y = np.zeros(m)

    status, it = NUMERICAL_FAILURE, 0
    best = None
    pobj = dobj = gap = float("nan")
    for it in range(1, max_iters + 1):
        rp = b - op_a(X)
        aty = op_at(y)
        Rd = [at - z - c for at, z, c in zip(aty, Z, C)]
        pobj, dobj = inner(C, X), float(b @ y)
        mu = inner(X, Z) / n_total
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / (1 + norm_b)
        dinf = np.sqrt(sum(np.sum(r * r) for r in Rd)) / (1 + norm_c)
        if gap <= tol and pinf <= tol and dinf > tol:
            # ill-conditioned Schur systems let Z drift from A^T y - C; what certifies the
            # dual bound is only how far A^T y - C is from PSD
            exact = [at - c for at, c in zip(aty, C)]
            neg = np.sqrt(sum(np.sum(np.clip(np.linalg.eigvalsh(z), None, 0) ** 2) for z in exact))
            if neg / (1 + norm_c) <= tol:
                dinf, Z = neg / (1 + norm_c), exact
        if gap <= tol and pinf <= tol and dinf <= tol:
            status = OPTIMAL
            break
        score = max(gap, pinf, dinf)
        log.debug("it %d pobj %.10g dobj %.10g gap %.2e pinf %.2e dinf %.2e mu %.2e",
                  it, pobj, dobj, gap, pinf, dinf, mu)
        if best is None or score < best[0]:
            best = (score, [x.copy() for x in X], y.copy(), [z.copy() for z in Z], pobj, dobj, gap)
        # infeasibility certificates
        if dobj < 0 and np.sqrt(sum(np.sum((at - z) ** 2) for at, z in zip(aty, Z))) <= 1e-8 * -dobj \
                and -dobj > 1e8 * (1 + norm_c):
            status = INFEASIBLE
            break
        if pobj > 0 and np.linalg.norm(op_a(X)) <= 1e-8 * pobj and pobj > 1e8 * (1 + norm_b):
            status = DUAL_INFEASIBLE
            break

        # Nesterov-Todd scaling: G^-1 X G^-T = G^T Z G = diag(v), W = G G^T
        G, V = [], []
        for x, z in zip(X, Z):
            lx = _chol(x)
            if lx is None:
                break
            ev, u = np.linalg.eigh(_sym(lx.T @ z @ lx))
            if ev.min() <= 0:
                break
            v = np.sqrt(ev)
            G.append(lx @ u / np.sqrt(v)[None, :])
            V.append(v)
        if len(G) != len(dims):
            log.debug("iterates lost positive definiteness")
            break
        W = [g @ g.T for g in G]
        M = sum(_schur_block(a, w, n) for a, w, n in zip(A, W, dims)) if m else np.zeros((0, 0))
        M = (M + M.T) / 2
        try:
            factor = sla.cho_factor(M, check_finite=False)

            def msolve(r):
                return sla.cho_solve(factor, r, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            pinv = np.linalg.pinv(M, rcond=1e-14, hermitian=True)

            def msolve(r):
                return pinv @ r

        w_rd_w = [w @ r @ w for w, r in zip(W, Rd)]

        def direction(rc_scaled):
            rc = [g @ r @ g.T for g, r in zip(G, rc_scaled)]
            rhs = op_a([u - v for u, v in zip(rc, w_rd_w)]) - rp
            dy = msolve(rhs) if m else np.zeros(0)
            for _ in range(3):
                # refine against the primal equation A(dX) = rp, which M only approximates in floating point
                dZ = [at + r for at, r in zip(op_at(dy), Rd)]
                dX = [_sym(r - w @ dz @ w) for r, w, dz in zip(rc, W, dZ)]
                res = op_a(dX) - rp
                if not m or np.linalg.norm(res) <= 1e-15 * (1 + np.linalg.norm(rp)):
                    break
                dy = dy + msolve(res)
            return dX, dy, dZ

        def scaled(dX, dZ):
            gi = [np.linalg.inv(g) for g in G]
            return [gv @ d @ gv.T for gv, d in zip(gi, dX)], [g.T @ d @ g for g, d in zip(G, dZ)]

        dXa, _, dZa = direction([-np.diag(v) for v in V])
        ap = min(1.0, _max_step(X, dXa))
        ad = min(1.0, _max_step(Z, dZa))
        mu_aff = inner([x + ap * d for x, d in zip(X, dXa)], [z + ad * d for z, d in zip(Z, dZa)]) / n_total
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0
        sxa, sza = scaled(dXa, dZa)
        rcs = []
        for v, dx, dz in zip(V, sxa, sza):
            corr = dx @ dz
            rhs = 2 * sigma * mu * np.eye(len(v)) - 2 * np.diag(v * v) - (corr + corr.T)
            rcs.append(rhs / (v[:, None] + v[None, :]))
        dX, dy, dZ = direction(rcs)
        tau = 0.98 if score > 1e-6 else 0.995
        ap = min(1.0, tau * _max_step(X, dX))
        ad = min(1.0, tau * _max_step(Z, dZ))
        if ap < 1e-12 and ad < 1e-12:
            log.debug("step lengths vanished")
            break
        X = [x + ap * d for x, d in zip(X, dX)]
        y = y + ad * dy
        Z = [z + ad * d for z, d in zip(Z, dZ)]
        if dinf <= tol:
            # once dual feasible, keep Z tied to y exactly instead of accumulating rounding
            exact = [at - c for at, c in zip(op_at(y), C)]
            if all(_chol(z) is not None for z in exact):
                Z = exact

    if status == NUMERICAL_FAILURE and best is not None:
        score, X, y, Z, pobj, dobj, gap = best
        if score <= accept_tol:
            status = OPTIMAL
    y_full = np.zeros(m_all)
    y_full[keep] = y
    value = pobj if status in (OPTIMAL, NUMERICAL_FAILURE) else float("nan")
    return SdpResult(float(value), X, status, y_full, Z, pobj, dobj, it, gap)
