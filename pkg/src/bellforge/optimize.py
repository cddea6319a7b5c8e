"""Fixed-dimension quantum lower bounds: see-saw and symmetric-strategy search.

Two drivers, both multi-restart:

* :func:`seesaw` alternates Alice's measurements, Bob's measurements and the
  state.  ``unrestricted`` is monotone; ``shared_povm`` copies Alice's
  measurements to Bob and keeps the best visited point; ``symmetric_correlation``
  solves each step as an SDP constrained to ``P(a,b|x,y) = P(b,a|y,x)``.
* :func:`sqs_lower_bound` searches symmetric strategies: one shared set of
  projective measurements (an SU(D) chart per setting plus a rank partition)
  and a state in the symmetric or antisymmetric subspace.  For fixed
  measurements the best state in a subspace is the top eigenvector of the
  compressed Bell operator, so only the measurement parameters are searched.

Restart ``r`` under seed ``s`` draws from ``default_rng(SeedSequence([s, r]))``
so results do not depend on the worker count (``BELLFORGE_THREADS``).
"""
from __future__ import annotations

import itertools
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import BellFunctional, evaluate, is_symmetric_functional
from .local import local_bound
from .quantum import (
    Measurement,
    QuantumStrategy,
    bell_operator_from_effects,
    born_correlation,
    born_table,
    swap_operator,
    to_density,
    top_eigenvector,
)
from .sdp import OPTIMAL, SdpProblem, embed_hermitian, extract_hermitian, solve_sdp

log = logging.getLogger(__name__)

MODES = ("unrestricted", "shared_povm", "symmetric_correlation")
SUBSPACES = ("symmetric", "antisymmetric", "full")
GRADIENT_STEP = 1e-6


# -- configuration and reports ----------------------------------------------
@dataclass(frozen=True)
class SeesawConfig:
    local_dim: int = 2
    max_iters: int = 300
    convergence_tol: float = 1e-10
    restarts: int = 10
    mode: str = "unrestricted"
    seed: int = 0

    def __post_init__(self):
        if self.local_dim < 2:
            raise ValueError("local_dim must be at least 2")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class ParamOptConfig:
    """Symmetric-strategy search settings.

    ``rank_partitions`` gives, per setting, the projector ranks of the outcomes
    (summing to ``local_dim``).  ``None`` searches every combination of rank
    compositions when there are at most ``max_partition_combos`` of them and
    otherwise runs a greedy per-setting switch starting from the most balanced
    partition.  ``subspace="full"`` tries both the symmetric and the
    antisymmetric subspace.
    """

    local_dim: int = 2
    subspace: str = "full"
    rank_partitions: tuple[tuple[int, ...], ...] | None = None
    restarts: int = 20
    max_evals: int = 4000
    gtol: float = 1e-9
    max_partition_combos: int = 27
    seed: int = 0

    def __post_init__(self):
        if self.local_dim < 2:
            raise ValueError("local_dim must be at least 2")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.subspace not in SUBSPACES:
            raise ValueError(f"subspace must be one of {SUBSPACES}")
        if self.rank_partitions is not None:
            for ranks in self.rank_partitions:
                if sum(ranks) != self.local_dim or min(ranks) < 0:
                    raise ValueError("each rank partition must be non-negative and sum to local_dim")


@dataclass
class OptimizationReport:
    best_value: float
    best_strategy: QuantumStrategy
    per_restart: list[float]
    converged: bool
    mode: str
    local_dim: int
    failures: int = 0
    details: dict = field(default_factory=dict)


# -- shared helpers -----------------------------------------------------------
def worker_count() -> int:
    env = os.environ.get("BELLFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(restart)]))


def _run_restarts(fn: Callable, args: Sequence[tuple]) -> list:
    workers = min(worker_count(), len(args))
    if workers <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*args)))


def _pick_best(results: list, value_of):
    """Max with ties resolved toward the lowest restart index."""
    best = None
    for r in results:
        if r is None:
            continue
        if best is None or value_of(r) > value_of(best):
            best = r
    return best


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _balanced_ranks(d: int, n: int) -> tuple[int, ...]:
    return tuple(d // n + (1 if k < d % n else 0) for k in range(n))


def _random_measurement(d: int, n: int, rng: np.random.Generator) -> Measurement:
    return Measurement.from_basis(random_unitary(d, rng), _balanced_ranks(d, n))


def _effective_alice(beta: np.ndarray, rho: np.ndarray, b_eff: np.ndarray, dims) -> np.ndarray:
    """``F[x, a] = sum_{b,y} beta[a,b,x,y] tr_B(rho (I (x) M^B_{b|y}))``."""
    da, db = dims
    r = rho.reshape(da, db, da, db)
    g = np.einsum("ijkl,yblj->ybik", r, b_eff, optimize=True)
    return np.einsum("abxy,ybik->xaik", beta, g, optimize=True)


def _effective_bob(beta: np.ndarray, rho: np.ndarray, a_eff: np.ndarray, dims) -> np.ndarray:
    """``F[y, b] = sum_{a,x} beta[a,b,x,y] tr_A(rho (M^A_{a|x} (x) I))``."""
    da, db = dims
    r = rho.reshape(da, db, da, db)
    g = np.einsum("ijkl,xaki->xajl", r, a_eff, optimize=True)
    return np.einsum("abxy,xajl->ybjl", beta, g, optimize=True)


def dichotomic_observable_update(effective_operator, tol: float = 1e-12) -> Measurement:
    """Two-outcome PVM maximising ``tr(F (M_0 - M_1))``.

    ``M_0`` projects onto the non-negative eigenspace of ``F`` (zero eigenvalues
    included, so ``F = 0`` gives ``{I, 0}``).  The optimum is ``sum |lambda_i|``.
    """
    f = np.asarray(effective_operator, dtype=complex)
    f = (f + f.conj().T) / 2
    w, v = np.linalg.eigh(f)
    pos = v[:, w >= -tol]
    p0 = pos @ pos.conj().T
    p0 = (p0 + p0.conj().T) / 2
    return Measurement([p0, np.eye(len(f)) - p0])


def _renormalize(effects: list[np.ndarray]) -> list[np.ndarray]:
    """Project near-POVM effects onto an exact POVM: ``S^-1/2 M S^-1/2`` with ``S = sum M``."""
    effects = [(e + e.conj().T) / 2 for e in effects]
    w, v = np.linalg.eigh(sum(effects))
    s = v @ np.diag(1 / np.sqrt(w)) @ v.conj().T
    out = []
    for e in effects:
        e = s @ e @ s
        lam, u = np.linalg.eigh((e + e.conj().T) / 2)
        out.append(u @ np.diag(np.clip(lam, 0, None)) @ u.conj().T)
    return out


def _povm_sdp(objective: np.ndarray, extra: list[tuple[list[tuple[int, np.ndarray]], float]] = ()):
    """Maximise ``sum_{x,a} tr(F[x,a] M[x,a])`` over POVMs, with linear side constraints.

    ``extra`` items are ``([(flat_index, H), ...], rhs)`` meaning
    ``sum tr(H M[flat_index]) = rhs``.  Returns effects ``(m, n, D, D)`` or ``None``.
    """
    m, n, d = objective.shape[:3]
    nb = m * n
    c_blocks = [embed_hermitian(objective[x, a]) / 2 for x in range(m) for a in range(n)]
    iu, ju = np.triu_indices(2 * d)
    rows_per_setting = len(iu)
    total = m * rows_per_setting + len(extra)
    a_blocks = [np.zeros((total, 2 * d, 2 * d)) for _ in range(nb)]
    b = np.zeros(total)
    row = 0
    for x in range(m):
        for i, j in zip(iu, ju):
            unit = np.zeros((2 * d, 2 * d))
            unit[i, j] = unit[j, i] = 0.5 if i != j else 1.0
            for a in range(n):
                a_blocks[x * n + a][row] = unit
            b[row] = 1.0 if i == j else 0.0
            row += 1
    for terms, rhs in extra:
        for k, h in terms:
            a_blocks[k][row] += embed_hermitian(h) / 2
        b[row] = rhs
        row += 1
    res = solve_sdp(SdpProblem.from_blocks(c_blocks, a_blocks, b))
    if res.status != OPTIMAL:
        return None
    eff = [extract_hermitian(xb) for xb in res.X]
    out = np.empty((m, n, d, d), dtype=complex)
    for x in range(m):
        out[x] = _renormalize(eff[x * n:(x + 1) * n])
    return out


def _sym_pairs(m: int, n: int) -> list[tuple[int, int, int, int]]:
    """Index pairs ``(a,b,x,y)`` with ``(a,x) < (b,y)``; each fixes one ``P(a,b|x,y) = P(b,a|y,x)``."""
    return [(a, b, x, y) for x in range(m) for y in range(m) for a in range(n) for b in range(n)
            if (a, x) < (b, y)]


def _symmetric_party_update(beta, rho, own, other, dims, alice: bool):
    """SDP update of one party's measurements keeping the correlation symmetric."""
    da, db = dims
    r = rho.reshape(da, db, da, db)
    if alice:
        f = _effective_alice(beta, rho, other, dims)
        # G[y, b] = tr_B(rho (I (x) M^B_{b|y})), so P(a,b|x,y) = tr(M^A_{a|x} G[y, b])
        gop = np.einsum("ijkl,yblj->ybik", r, other, optimize=True)
    else:
        f = _effective_bob(beta, rho, other, dims)
        # G[x, a] = tr_A(rho (M^A_{a|x} (x) I)), so P(a,b|x,y) = tr(M^B_{b|y} G[x, a])
        gop = np.einsum("ijkl,xaki->xajl", r, other, optimize=True)
    m, n = own.shape[:2]
    extra = []
    for a, b, x, y in _sym_pairs(m, n):
        if alice:
            terms = [(x * n + a, gop[y, b]), (y * n + b, -gop[x, a])]
        else:
            terms = [(y * n + b, gop[x, a]), (x * n + a, -gop[y, b])]
        extra.append((terms, 0.0))
    return _povm_sdp(f, extra)


def _symmetric_state_update(beta, a_eff, b_eff, dims):
    """Best density matrix for fixed measurements subject to a symmetric correlation."""
    m, n = a_eff.shape[:2]
    op = bell_operator_from_effects(beta, a_eff, b_eff)
    op = (op + op.conj().T) / 2
    dim = op.shape[0]
    cons = [np.eye(2 * dim)]
    b = [2.0]
    for a, bb, x, y in _sym_pairs(m, n):
        k = np.kron(a_eff[x, a], b_eff[y, bb]) - np.kron(a_eff[y, bb], b_eff[x, a])
        cons.append(embed_hermitian((k + k.conj().T) / 2))
        b.append(0.0)
    res = solve_sdp(SdpProblem.from_blocks([embed_hermitian(op) / 2], [np.array(cons)], np.array(b)))
    if res.status != OPTIMAL:
        return None
    rho = extract_hermitian(res.X[0])
    rho = (rho + rho.conj().T) / 2
    lam, u = np.linalg.eigh(rho)
    rho = u @ np.diag(np.clip(lam, 0, None)) @ u.conj().T
    return rho / np.trace(rho).real


# -- see-saw ---------------------------------------------------------------
def _party_update(beta, rho, other_eff, dims, alice: bool) -> np.ndarray:
    f = (_effective_alice if alice else _effective_bob)(beta, rho, other_eff, dims)
    m, n, d = f.shape[:3]
    if n == 2:
        return np.stack([dichotomic_observable_update(f[x, 0] - f[x, 1]).effects for x in range(m)])
    out = _povm_sdp(f)
    if out is None:
        raise RuntimeError("measurement SDP failed")
    return out


def _state_update(beta, a_eff, b_eff, rng) -> tuple[np.ndarray, float]:
    op = bell_operator_from_effects(beta, a_eff, b_eff)
    top = top_eigenvector((op + op.conj().T) / 2)
    if not top.degenerate:
        return top.state, top.value
    # degenerate top eigenspace: take a random unit vector in it
    w, v = np.linalg.eigh((op + op.conj().T) / 2)
    span = v[:, w >= w[-1] - 1e-10 * max(1.0, abs(w[-1]))]
    psi = span @ random_ket(span.shape[1], rng)
    return psi, top.value


def _table_value(beta, state, dims, a_eff, b_eff) -> float:
    return float(np.sum(beta * born_table(state, dims, a_eff, b_eff)))


def _seesaw_restart(f: BellFunctional, cfg: SeesawConfig, restart: int):
    rng = _restart_rng(cfg.seed, restart)
    s = f.scenario
    d = cfg.local_dim
    dims = (d, d)
    beta = f.coefficients
    n = s.outcomes
    a_eff = np.stack([_random_measurement(d, n, rng).effects for _ in range(s.settings_a)])
    if cfg.mode == "unrestricted":
        b_eff = np.stack([_random_measurement(d, n, rng).effects for _ in range(s.settings_b)])
        state, _ = _state_update(beta, a_eff, b_eff, rng)
    else:
        # start from a symmetric strategy: shared measurements and a swap-invariant state
        b_eff = a_eff.copy()
        psi = random_ket(d * d, rng)
        psi = psi + swap_operator(d) @ psi
        state = to_density(psi / np.linalg.norm(psi))
    value = _table_value(beta, state, dims, a_eff, b_eff)
    best = (value, state, a_eff, b_eff)
    history = [value]
    converged = False
    try:
        for _ in range(cfg.max_iters):
            if cfg.mode == "symmetric_correlation":
                new_a = _symmetric_party_update(beta, state, a_eff, b_eff, dims, alice=True)
                if new_a is None:
                    raise RuntimeError("Alice SDP failed")
                a_eff = new_a
                new_b = _symmetric_party_update(beta, state, b_eff, a_eff, dims, alice=False)
                if new_b is None:
                    raise RuntimeError("Bob SDP failed")
                b_eff = new_b
                new_state = _symmetric_state_update(beta, a_eff, b_eff, dims)
                if new_state is None:
                    raise RuntimeError("state SDP failed")
                state = new_state
            else:
                rho = to_density(state) if state.ndim == 1 else state
                a_eff = _party_update(beta, rho, b_eff, dims, alice=True)
                if cfg.mode == "shared_povm":
                    # copy Alice's measurements, then the best state with a symmetric correlation
                    b_eff = a_eff.copy()
                    state = _symmetric_state_update(beta, a_eff, b_eff, dims)
                    if state is None:
                        raise RuntimeError("state SDP failed")
                else:
                    b_eff = _party_update(beta, to_density(state), a_eff, dims, alice=False)
                    state, _ = _state_update(beta, a_eff, b_eff, rng)
            new_value = _table_value(beta, state, dims, a_eff, b_eff)
            history.append(new_value)
            if new_value > best[0]:
                best = (new_value, state, a_eff, b_eff)
            if abs(new_value - value) < cfg.convergence_tol:
                converged = True
                value = new_value
                break
            value = new_value
    except (RuntimeError, np.linalg.LinAlgError, ValueError) as exc:
        log.debug("restart %d failed: %s", restart, exc)
        if len(history) == 1:
            return None
    return best, converged, history


def _strategy(state, a_eff, b_eff, dims) -> QuantumStrategy:
    return QuantumStrategy(state, [Measurement(e) for e in a_eff], [Measurement(e) for e in b_eff], dims=dims)


def seesaw(f: BellFunctional, cfg: SeesawConfig = SeesawConfig()) -> OptimizationReport:
    """Multi-restart see-saw lower bound on the quantum value of ``f`` in local dimension ``cfg.local_dim``."""
    if cfg.mode != "unrestricted" and not f.scenario.is_square:
        raise ValueError(f"mode {cfg.mode} needs equal setting counts")
    results = _run_restarts(_seesaw_restart, [(f, cfg, r) for r in range(cfg.restarts)])
    per_restart = [float("nan") if r is None else r[0][0] + f.constant_offset for r in results]
    good = [r for r in results if r is not None]
    if not good:
        raise RuntimeError("every see-saw restart failed")
    top = _pick_best(good, lambda r: r[0][0])
    _, state, a_eff, b_eff = top[0]
    strategy = _strategy(state, a_eff, b_eff, (cfg.local_dim, cfg.local_dim))
    value = evaluate(f, born_correlation(strategy))
    return OptimizationReport(value, strategy, per_restart, bool(top[1]), cfg.mode, cfg.local_dim,
                              failures=len(results) - len(good),
                              details={"history": top[2]})


# -- symmetric strategies via an SU(D) chart ---------------------------------
def su_parameter_count(d: int) -> int:
    return d * d - 1


def su_unitary(params, d: int) -> np.ndarray:
    """Point of SU(D) from ``D^2 - 1`` real parameters (batched over leading axes).

    Chart: a product of Givens rotations ``G_jk(theta, phi)`` over all pairs
    ``j < k`` (two parameters each) followed by ``diag(e^{i a_1}, ..., e^{i a_{D-1}},
    e^{-i sum a})``.
    """
    params = np.asarray(params, dtype=float)
    if params.shape[-1] != su_parameter_count(d):
        raise ValueError(f"expected {su_parameter_count(d)} parameters for SU({d})")
    lead = params.shape[:-1]
    u = np.broadcast_to(np.eye(d, dtype=complex), lead + (d, d)).copy()
    k = 0
    for i in range(d):
        for j in range(i + 1, d):
            th, ph = params[..., k, None], params[..., k + 1, None]
            k += 2
            c, s = np.cos(th), np.sin(th)
            ci, cj = u[..., :, i].copy(), u[..., :, j]
            # columns (i, j) times [[c, -e^{-i ph} s], [e^{i ph} s, c]]
            u[..., :, i] = c * ci + np.exp(1j * ph) * s * cj
            u[..., :, j] = -np.exp(-1j * ph) * s * ci + c * cj
    free = params[..., k:]
    phases = np.concatenate([free, -free.sum(axis=-1, keepdims=True)], axis=-1)
    return u * np.exp(1j * phases)[..., None, :]


def _subspace_basis(d: int, kind: str) -> np.ndarray:
    """Orthonormal columns spanning the symmetric or antisymmetric subspace of ``C^d (x) C^d``."""
    cols = []
    for i in range(d):
        for j in range(i, d):
            v = np.zeros(d * d)
            if i == j:
                if kind == "symmetric":
                    v[i * d + i] = 1
                    cols.append(v)
                continue
            v[i * d + j] = 1 / math.sqrt(2)
            v[j * d + i] = 1 / math.sqrt(2) if kind == "symmetric" else -1 / math.sqrt(2)
            cols.append(v)
    return np.array(cols).T.astype(complex)


def rank_compositions(d: int, n: int) -> list[tuple[int, ...]]:
    """All ordered ways of splitting ``d`` into ``n`` non-negative ranks."""
    return [c for c in itertools.product(range(d + 1), repeat=n) if sum(c) == d]


def _rank_masks(partitions, d: int) -> np.ndarray:
    """``mask[x, a, k] = 1`` when column ``k`` of ``U_x`` belongs to outcome ``a``."""
    n = len(partitions[0])
    mask = np.zeros((len(partitions), n, d))
    for x, ranks in enumerate(partitions):
        start = 0
        for a, r in enumerate(ranks):
            mask[x, a, start:start + r] = 1
            start += r
    return mask


class _SqsObjective:
    """Top Bell-operator eigenvalue in a swap subspace as a function of the SU(D) parameters.

    Evaluates whole batches of parameter vectors at once, which keeps the
    central-difference gradient down to one batched eigen-solve.
    """

    def __init__(self, beta: np.ndarray, d: int, partitions, basis: np.ndarray):
        n, _, m, _ = beta.shape
        self.d, self.m, self.n = d, m, n
        self.mask = _rank_masks(partitions, d)
        # beta_mat[(x,a), (y,b)] = beta[a,b,x,y]
        self.beta_mat = beta.transpose(2, 0, 3, 1).reshape(m * n, m * n)
        self.basis = basis

    def effects(self, params):
        params = np.asarray(params, dtype=float)
        lead = params.shape[:-1]
        u = su_unitary(params.reshape(lead + (self.m, -1)), self.d)
        left = u[..., None, :, :] * self.mask[..., None, :]
        return left @ np.swapaxes(u.conj(), -1, -2)[..., None, :, :]

    def compressed(self, params):
        e = self.effects(params)
        d, lead = self.d, e.shape[:-4]
        flat = e.reshape(lead + (self.m * self.n, d * d))
        q = np.swapaxes(flat, -1, -2) @ self.beta_mat @ flat
        op = q.reshape(lead + (d, d, d, d)).swapaxes(-3, -2).reshape(lead + (d * d, d * d))
        h = self.basis.conj().T @ op @ self.basis
        return (h + np.swapaxes(h.conj(), -1, -2)) / 2, e

    def top(self, params):
        h, e = self.compressed(params)
        w, v = np.linalg.eigh(h)
        return w[-1], self.basis @ v[:, -1], e

    def __call__(self, params):
        return -np.linalg.eigvalsh(self.compressed(params)[0])[..., -1]

    def grad(self, params):
        p = len(params)
        steps = GRADIENT_STEP * np.eye(p)
        vals = self(np.concatenate([params + steps, params - steps]))
        return (vals[:p] - vals[p:]) / (2 * GRADIENT_STEP)


def _local_search(beta, d, partitions, kind, rng, cfg: ParamOptConfig):
    obj = _SqsObjective(beta, d, partitions, _subspace_basis(d, kind))
    x0 = rng.uniform(-math.pi, math.pi, len(partitions) * su_parameter_count(d))
    res = minimize(obj, x0, jac=obj.grad, method="BFGS",
                   options={"gtol": cfg.gtol, "maxiter": cfg.max_evals})
    value, psi, effects = obj.top(res.x)
    return float(value), psi, effects


def _search_partition_set(beta, d, combos, kinds, rng, cfg):
    best = None
    for parts in combos:
        for kind in kinds:
            if kind == "antisymmetric" and d < 2:
                continue
            cand = _local_search(beta, d, parts, kind, rng, cfg)
            if best is None or cand[0] > best[0]:
                best = cand + (parts, kind)
    return best


def _sqs_restart(f: BellFunctional, cfg: ParamOptConfig, restart: int):
    rng = _restart_rng(cfg.seed, restart)
    s = f.scenario
    d, n, m = cfg.local_dim, s.outcomes, s.settings_a
    kinds = ["symmetric", "antisymmetric"] if cfg.subspace == "full" else [cfg.subspace]
    beta = f.coefficients
    if cfg.rank_partitions is not None:
        if len(cfg.rank_partitions) != m or any(len(r) != n for r in cfg.rank_partitions):
            raise ValueError("rank_partitions must give n ranks for each of the m settings")
        return _search_partition_set(beta, d, [cfg.rank_partitions], kinds, rng, cfg)
    choices = rank_compositions(d, n)
    if len(choices) ** m <= cfg.max_partition_combos:
        return _search_partition_set(beta, d, itertools.product(choices, repeat=m), kinds, rng, cfg)
    # greedy: switch one setting's partition at a time while it helps
    current = [_balanced_ranks(d, n)] * m
    best = _search_partition_set(beta, d, [tuple(current)], kinds, rng, cfg)
    improved = True
    while improved:
        improved = False
        for x in range(m):
            for ranks in choices:
                if ranks == current[x]:
                    continue
                trial = list(current)
                trial[x] = ranks
                cand = _search_partition_set(beta, d, [tuple(trial)], kinds, rng, cfg)
                if cand[0] > best[0] + 1e-9:
                    best, current, improved = cand, trial, True
    return best


def sqs_lower_bound(f: BellFunctional, cfg: ParamOptConfig = ParamOptConfig()) -> OptimizationReport:
    """Best symmetric quantum strategy found in local dimension ``cfg.local_dim``.

    The value is an empirical maximum over restarts, not a certified bound.
    """
    if not f.scenario.is_square:
        raise ValueError("symmetric strategies need equal setting counts")
    if not is_symmetric_functional(f):
        warnings.warn("functional is not symmetric; the SQS search still runs", stacklevel=2)
    results = _run_restarts(_sqs_restart, [(f, cfg, r) for r in range(cfg.restarts)])
    per_restart = [r[0] + f.constant_offset for r in results]
    value, psi, effects, parts, kind = _pick_best(results, lambda r: r[0])
    ms = [Measurement(e) for e in effects]
    strategy = QuantumStrategy(psi, ms, ms)
    return OptimizationReport(evaluate(f, born_correlation(strategy)), strategy, per_restart, True,
                              f"sqs-{kind}", cfg.local_dim,
                              details={"rank_partitions": [list(p) for p in parts], "subspace": kind})


# -- sweeps ----------------------------------------------------------------
SWEEP_COLUMNS = ("alpha", "local", "sqs_qubit", "quantum")


def sweep(family: Callable[[float], BellFunctional], alphas: Iterable[float],
          seesaw_cfg: SeesawConfig | None = None, sqs_cfg: ParamOptConfig | None = None) -> list[tuple]:
    """Rows ``(alpha, local, sqs_qubit, quantum)`` for a one-parameter family.

    ``quantum`` is the qubit see-saw value; ``sqs_qubit`` the best qubit SQS.
    Either column is ``nan`` when its config is ``None``.
    """
    rows = []
    for alpha in alphas:
        f = family(float(alpha))
        local = local_bound(f)[0]
        sqs = sqs_lower_bound(f, sqs_cfg).best_value if sqs_cfg is not None else float("nan")
        qv = seesaw(f, seesaw_cfg).best_value if seesaw_cfg is not None else float("nan")
        rows.append((float(alpha), float(local), float(sqs), float(qv)))
    return rows
