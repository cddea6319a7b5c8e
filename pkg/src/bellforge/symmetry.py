"""Symmetrisation, purification and mirror-symmetry tools.

Index conventions
-----------------
* Symmetrised strategies: each party's space is ``system (x) ancilla`` with a
  qubit ancilla, i.e. local index ``2 * s + k``.
* Naimark dilations: ``ancilla (x) system``, so the dilated projectors are
  block diagonal ``0 (+) ... (+) I (+) ... (+) 0``.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .core import SYMMETRY_TOL, is_symmetric
from .quantum import (I2, PAULIS, PSI_MINUS, Measurement, QuantumStrategy, QubitObservable,
                      born_correlation, swap_operator, to_density)

CHECK_TOL = 1e-10
ROTATION_TOL = 1e-9
MIRROR = np.diag([1.0, -1.0, 1.0])


# -- swap helpers ----------------------------------------------------------------
def swap_state(state: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """``|psi>_BA`` (or ``rho_BA``): the state with the two tensor factors exchanged."""
    da, db = dims
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return state.reshape(da, db).T.reshape(-1)
    r = state.reshape(da, db, da, db)
    return r.transpose(1, 0, 3, 2).reshape(da * db, da * db)


def _pad_measurement(m: Measurement, d: int) -> Measurement:
    """Extend to dimension ``d``; the padding subspace is assigned to outcome 0."""
    k = m.dim
    if k == d:
        return m
    eff = np.zeros((m.outcomes, d, d), dtype=complex)
    eff[:, :k, :k] = m.effects
    eff[0, k:, k:] = np.eye(d - k)
    return Measurement(eff)


def _pad_state(state: np.ndarray, dims: tuple[int, int], d: int) -> np.ndarray:
    da, db = dims
    if state.ndim == 1:
        out = np.zeros((d, d), dtype=complex)
        out[:da, :db] = state.reshape(da, db)
        return out.reshape(-1)
    out = np.zeros((d, d, d, d), dtype=complex)
    out[:da, :db, :da, :db] = state.reshape(da, db, da, db)
    return out.reshape(d * d, d * d)


def _equalize(s: QuantumStrategy):
    d = max(s.dims)
    state = _pad_state(s.state, s.dims, d)
    return d, state, [_pad_measurement(m, d) for m in s.alice], [_pad_measurement(m, d) for m in s.bob]


def _ancilla_effects(ma: Measurement, mb: Measurement) -> Measurement:
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    return Measurement(np.stack([np.kron(a, p0) + np.kron(b, p1) for a, b in zip(ma.effects, mb.effects)]))


def _attach_ancillas(state: np.ndarray, d: int, anc: tuple[int, int]) -> np.ndarray:
    """``state (x) |anc_A anc_B>`` reordered to ``(A_sys, A_anc) (x) (B_sys, B_anc)``."""
    e = np.zeros((2, 2))
    e[anc] = 1.0
    if state.ndim == 1:
        t = np.einsum("ij,kl->ikjl", state.reshape(d, d), e)
        return t.reshape(-1)
    t = np.einsum("ijmn,kl,pq->ikjlmpnq", state.reshape(d, d, d, d), e, e)
    return t.reshape(4 * d * d, 4 * d * d)


def _require_symmetric(s: QuantumStrategy, tol: float) -> None:
    if len(s.alice) != len(s.bob):
        raise ValueError("symmetrisation needs equal setting counts")
    if not is_symmetric(born_correlation(s), tol):
        raise ValueError("the strategy's correlation is not symmetric")


def symmetrize_mixed(s: QuantumStrategy, tol: float = SYMMETRY_TOL) -> QuantumStrategy:
    """SQS ``1/2 [rho_AB (x) |01><01| + rho_BA (x) |10><10|]`` with shared effects.

    Both parties measure ``M^A (x) |0><0| + M^B (x) |1><1|``; local dimensions double.
    """
    _require_symmetric(s, tol)
    d, state, alice, bob = _equalize(s)
    rho = to_density(state)
    rho_ba = swap_state(rho, (d, d))
    new = 0.5 * (_attach_ancillas(rho, d, (0, 1)) + _attach_ancillas(rho_ba, d, (1, 0)))
    shared = [_ancilla_effects(a, b) for a, b in zip(alice, bob)]
    return QuantumStrategy(new, shared, shared)


def symmetrize_pure(s: QuantumStrategy, tol: float = SYMMETRY_TOL) -> QuantumStrategy:
    """PSQS ``(|psi>_AB |01> + |psi>_BA |10>) / sqrt 2`` with shared projective effects."""
    if not s.is_pure:
        raise ValueError("pure symmetrisation needs a ket")
    if not all(m.is_projective() for m in s.alice + s.bob):
        raise ValueError("pure symmetrisation needs projective measurements")
    _require_symmetric(s, tol)
    d, state, alice, bob = _equalize(s)
    psi_ba = swap_state(state, (d, d))
    new = (_attach_ancillas(state, d, (0, 1)) + _attach_ancillas(psi_ba, d, (1, 0))) / math.sqrt(2)
    shared = [_ancilla_effects(a, b) for a, b in zip(alice, bob)]
    return QuantumStrategy(new, shared, shared)


# -- Naimark dilation and purification -------------------------------------------
class Dilation(NamedTuple):
    measurement: Measurement
    isometry: np.ndarray


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def naimark_dilate(m: Measurement, force: bool = False) -> Dilation:
    """Projective measurement and isometry ``V`` with ``V^dagger Pi_a V = M_a``.

    ``V = sum_a |a> (x) sqrt(M_a)`` on ``ancilla (x) system``.  A measurement
    that is already projective is returned unchanged with ``V = I`` unless
    ``force`` is set.
    """
    if m.is_projective() and not force:
        return Dilation(m, np.eye(m.dim, dtype=complex))
    n, d = m.outcomes, m.dim
    v = np.vstack([_psd_sqrt(e) for e in m.effects])
    proj = np.zeros((n, n * d, n * d), dtype=complex)
    for a in range(n):
        proj[a, a * d:(a + 1) * d, a * d:(a + 1) * d] = np.eye(d)
    return Dilation(Measurement(proj), v)


def purify(rho: np.ndarray) -> np.ndarray:
    """``sum_i sqrt(lambda_i) |e_i> (x) |i>`` with eigenvalues sorted in decreasing order."""
    r = to_density(rho)
    w, v = np.linalg.eigh(r)
    order = np.argsort(w)[::-1]
    w, v = np.clip(w[order], 0, None), v[:, order]
    d = r.shape[0]
    return np.einsum("i,si->si", np.sqrt(w), v).reshape(d * d) if d else v.reshape(-1)


# -- mirror symmetry ----------------------------------------------------------------
def mirror_vector(v) -> np.ndarray:
    return MIRROR @ np.asarray(v, dtype=float)


def mirror_measurements(alice: Sequence[QubitObservable]) -> list[QubitObservable]:
    """Reflect each Bloch vector about the x-z plane; effects become complex conjugates."""
    out = []
    for o in alice:
        if o.is_degenerate:
            out.append(o)
        else:
            out.append(QubitObservable(tuple(mirror_vector(o.bloch))))
    return out


def mirror_state(alpha: float, psi_sym) -> np.ndarray:
    """``cos(alpha) psi_sym + i sin(alpha) |Psi->`` for a real, swap-symmetric two-qubit ket."""
    psi_sym = np.asarray(psi_sym, dtype=complex)
    if psi_sym.shape != (4,):
        raise ValueError("psi_sym must be a two-qubit ket")
    if np.abs(psi_sym.imag).max() > CHECK_TOL:
        raise ValueError("psi_sym must be real")
    if np.abs(swap_operator(2) @ psi_sym - psi_sym).max() > CHECK_TOL:
        raise ValueError("psi_sym must be swap symmetric")
    if abs(np.linalg.norm(psi_sym) - 1) > CHECK_TOL:
        raise ValueError("psi_sym must be normalised")
    return math.cos(alpha) * psi_sym + 1j * math.sin(alpha) * PSI_MINUS


def check_mirror_state_form(psi, tol: float = CHECK_TOL) -> tuple[bool, float]:
    """Whether ``S|psi> = e^{i theta} |psi*>`` for some ``theta``; returns ``(ok, theta)``."""
    psi = np.asarray(psi, dtype=complex)
    d = int(round(math.sqrt(psi.size)))
    if d * d != psi.size:
        raise ValueError("ket must live on C^d (x) C^d")
    psi = psi / np.linalg.norm(psi)
    s_psi = swap_operator(d) @ psi
    overlap = np.sum(psi * s_psi)  # <psi*| S psi>
    theta = float(np.angle(overlap))
    ok = np.abs(s_psi - np.exp(1j * theta) * psi.conj()).max() <= tol
    return bool(ok), theta


def find_aligning_rotation(a, b, tol: float = ROTATION_TOL) -> np.ndarray | None:
    """Proper rotation ``R`` with ``R a_k = b_k`` for all ``k``, or ``None`` if none exists.

    Orthogonal Procrustes (Kabsch) with the determinant forced to ``+1``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape != b.shape or a.shape[-1] != 3:
        raise ValueError("a and b must be equally many 3-vectors")
    if len(a) < 1:
        raise ValueError("need at least one vector")
    u, _, vt = np.linalg.svd(b.T @ a)
    fix = np.diag([1.0, 1.0, np.sign(np.linalg.det(u @ vt)) or 1.0])
    r = u @ fix @ vt
    if np.abs(a @ r.T - b).max() > tol:
        return None
    return r


def check_sufficient_conditions(s: QuantumStrategy, map_kind: str = "identity", tol: float = CHECK_TOL) -> bool:
    """Sufficient conditions for a symmetric correlation.

    ``identity``: ``rho_AB = rho_BA`` and ``M^B = M^A`` (an SQS).
    ``conjugation``: ``rho* = rho_BA`` and ``M^B = (M^A)*``.
    """
    if map_kind not in ("identity", "conjugation"):
        raise ValueError("map_kind must be 'identity' or 'conjugation'")
    if s.dims[0] != s.dims[1] or len(s.alice) != len(s.bob):
        return False
    rho = s.rho
    rho_ba = swap_state(rho, s.dims)
    if map_kind == "identity":
        state_ok = np.abs(rho - rho_ba).max() <= tol
        meas_ok = all(np.abs(a.effects - b.effects).max() <= tol for a, b in zip(s.alice, s.bob))
    else:
        state_ok = np.abs(rho.conj() - rho_ba).max() <= tol
        meas_ok = all(np.abs(a.effects.conj() - b.effects).max() <= tol for a, b in zip(s.alice, s.bob))
    return bool(state_ok and meas_ok)


def is_sqs(s: QuantumStrategy, tol: float = CHECK_TOL) -> bool:
    return check_sufficient_conditions(s, "identity", tol)


def mirror_compatible_two_qubit_state(r, t, tol: float = CHECK_TOL) -> np.ndarray:
    """``1/4 (I + r.sigma (x) I + I (x) s.sigma + sum T_ij sigma_i (x) sigma_j)`` with ``s = M r``."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if r.shape != (3,) or t.shape != (3, 3):
        raise ValueError("r must be a 3-vector and T a 3x3 matrix")
    if (abs(t[1, 0] + t[0, 1]) > tol or abs(t[2, 1] + t[1, 2]) > tol or abs(t[2, 0] - t[0, 2]) > tol):
        raise ValueError("T violates T_yx = -T_xy, T_zy = -T_yz, T_zx = T_xz")
    s = MIRROR @ r
    rho = np.kron(I2, I2).astype(complex)
    for i, p in enumerate(PAULIS):
        rho += r[i] * np.kron(p, I2) + s[i] * np.kron(I2, p)
        for j, q in enumerate(PAULIS):
            rho += t[i, j] * np.kron(p, q)
    rho /= 4
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("parameters do not give a positive semidefinite state")
    return rho


# -- qubit strategy diagnostics --------------------------------------------------------
def bloch_vectors(ms: Sequence[Measurement], tol: float = CHECK_TOL) -> np.ndarray | None:
    """Bloch vectors of qubit rank-one two-outcome PVMs, or ``None`` if not of that type."""
    out = []
    for m in ms:
        if m.dim != 2 or m.outcomes != 2 or not m.is_projective(tol):
            return None
        obs = m.observable()
        v = np.real([np.trace(obs @ p) / 2 for p in PAULIS])
        if abs(np.linalg.norm(v) - 1) > 1e-8:
            return None
        out.append(v)
    return np.array(out)


def effects_span_full(ms: Sequence[Measurement], tol: float = 1e-9) -> bool:
    """Heuristic check that the effects span the full operator space."""
    d = ms[0].dim
    vecs = [e.reshape(-1) for m in ms for e in m.effects]
    return bool(np.linalg.matrix_rank(np.array(vecs), tol) == d * d)


def local_unitary_symmetrizable(s: QuantumStrategy) -> bool | None:
    """For qubit PVM strategies: is Bob's direction set a proper rotation of Alice's?

    ``None`` when the strategy is not a qubit rank-one PVM strategy.
    """
    a = bloch_vectors(s.alice)
    b = bloch_vectors(s.bob)
    if a is None or b is None or len(a) != len(b):
        return None
    return find_aligning_rotation(a, b) is not None
