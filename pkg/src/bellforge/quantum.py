"""Quantum strategies, Born-rule correlations and Bell operators.

A strategy is a bipartite state (ket or density matrix on ``C^DA (x) C^DB``)
plus one POVM per setting for each party.  Two-outcome observables ``A`` map to
effects ``M_0 = (I + A)/2``, ``M_1 = (I - A)/2``, consistent with the
``(-1)**a`` convention of :mod:`bellforge.core`.  Degenerate observables
(``A = +-I``) keep a zero effect so every setting has the same outcome count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (BellFunctional, Correlation, Scenario, evaluate, is_symmetric_functional,
                   swap_parties)

PSD_TOL = 1e-10
DEGENERACY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def ket(*amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).ravel()
    return v / np.linalg.norm(v)


def basis_ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1
    return v


PHI_PLUS = ket(1, 0, 0, 1)
PHI_MINUS = ket(1, 0, 0, -1)
PSI_PLUS = ket(0, 1, 1, 0)
PSI_MINUS = ket(0, 1, -1, 0)


def swap_operator(d: int) -> np.ndarray:
    """``S = sum_ij |i><j| (x) |j><i|`` on ``C^d (x) C^d``."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1
    return s


def to_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    da, db = dims
    r = to_density(rho).reshape(da, db, da, db)
    return np.einsum("ijkj->ik", r) if keep == 0 else np.einsum("ijil->jl", r)


def bloch_observable(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[0] * SX + v[1] * SY + v[2] * SZ


class Measurement:
    """One POVM: ``n`` positive effects summing to the identity."""

    def __init__(self, effects, check: bool = True):
        e = np.array(effects, dtype=complex)
        if e.ndim != 3 or e.shape[1] != e.shape[2]:
            raise ValueError("effects must have shape (n, D, D)")
        e.setflags(write=False)
        self.effects = e
        if check:
            self.validate()

    @property
    def outcomes(self) -> int:
        return self.effects.shape[0]

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def validate(self, tol: float = PSD_TOL) -> None:
        e = self.effects
        if np.abs(e - np.conj(np.transpose(e, (0, 2, 1)))).max() > tol:
            raise ValueError("effects are not Hermitian")
        if np.abs(e.sum(axis=0) - np.eye(self.dim)).max() > tol:
            raise ValueError("effects do not sum to the identity")
        if min(np.linalg.eigvalsh(m).min() for m in e) < -tol:
            raise ValueError("effects are not positive semidefinite")

    def is_projective(self, tol: float = PSD_TOL) -> bool:
        return all(np.abs(m @ m - m).max() <= tol for m in self.effects)

    def observable(self) -> np.ndarray:
        """``sum_a (-1)^a M_a`` (meaningful for two outcomes)."""
        signs = (-1.0) ** np.arange(self.outcomes)
        return np.einsum("a,aij->ij", signs, self.effects)

    def conj(self) -> "Measurement":
        return Measurement(np.conj(self.effects), check=False)

    def __repr__(self):
        return f"Measurement(n={self.outcomes}, D={self.dim})"

    @classmethod
    def from_observable(cls, obs) -> "Measurement":
        """Two-outcome PVM of a ``+-1``-valued observable (``+-I`` gives a zero effect)."""
        obs = np.asarray(obs, dtype=complex)
        eye = np.eye(obs.shape[0])
        return cls([(eye + obs) / 2, (eye - obs) / 2])

    @classmethod
    def from_basis(cls, unitary, ranks: Sequence[int] | None = None) -> "Measurement":
        """Projectors onto consecutive groups of the columns of ``unitary``."""
        u = np.asarray(unitary, dtype=complex)
        d = u.shape[0]
        ranks = [1] * d if ranks is None else list(ranks)
        if sum(ranks) != d:
            raise ValueError("ranks must sum to the dimension")
        effects, start = [], 0
        for r in ranks:
            cols = u[:, start:start + r]
            effects.append(cols @ cols.conj().T)
            start += r
        return cls(effects)


@dataclass(frozen=True)
class QubitObservable:
    """Qubit +-1 observable: a Bloch direction, or ``+-I`` when degenerate."""

    bloch: tuple[float, float, float] | None = None
    degenerate_sign: int = 0

    def __post_init__(self):
        if self.bloch is None:
            if self.degenerate_sign not in (1, -1):
                raise ValueError("degenerate observable needs sign +1 or -1")
        else:
            v = np.asarray(self.bloch, dtype=float)
            if abs(np.linalg.norm(v) - 1) > 1e-9:
                raise ValueError("Bloch vector must be a unit vector")
            object.__setattr__(self, "bloch", tuple(float(t) for t in v))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "QubitObservable":
        return cls((math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)))

    @property
    def is_degenerate(self) -> bool:
        return self.bloch is None

    def matrix(self) -> np.ndarray:
        if self.bloch is None:
            return self.degenerate_sign * I2
        return bloch_observable(self.bloch)

    def measurement(self) -> Measurement:
        return Measurement.from_observable(self.matrix())


def _as_measurements(ms) -> tuple[Measurement, ...]:
    out = []
    for m in ms:
        if isinstance(m, Measurement):
            out.append(m)
        elif isinstance(m, QubitObservable):
            out.append(m.measurement())
        else:
            out.append(Measurement(m))
    return tuple(out)


def stack_effects(ms: Sequence[Measurement]) -> np.ndarray:
    """``(m, n, D, D)`` array of effects."""
    return np.stack([m.effects for m in ms])


class QuantumStrategy:
    """State plus local measurements for each party."""

    def __init__(self, state, alice, bob, dims: tuple[int, int] | None = None, check: bool = True):
        self.alice = _as_measurements(alice)
        self.bob = _as_measurements(bob)
        da, db = self.alice[0].dim, self.bob[0].dim
        if dims is None:
            dims = (da, db)
        self.dims = (int(dims[0]), int(dims[1]))
        st = np.array(state, dtype=complex)
        st.setflags(write=False)
        self.state = st
        if check:
            self.validate()

    @property
    def is_pure(self) -> bool:
        return self.state.ndim == 1

    @property
    def rho(self) -> np.ndarray:
        return to_density(self.state)

    @property
    def scenario(self) -> Scenario:
        return Scenario(len(self.alice), len(self.bob), self.alice[0].outcomes)

    def validate(self, tol: float = PSD_TOL) -> None:
        da, db = self.dims
        if any(m.dim != da for m in self.alice) or any(m.dim != db for m in self.bob):
            raise ValueError("measurement dimensions do not match the state's local dimensions")
        n = self.alice[0].outcomes
        if any(m.outcomes != n for m in self.alice + self.bob):
            raise ValueError("all settings need the same number of outcomes")
        if self.is_pure:
            if self.state.shape != (da * db,):
                raise ValueError("ket length does not match dims")
            if abs(np.linalg.norm(self.state) - 1) > tol:
                raise ValueError("ket is not normalised")
        else:
            r = self.state
            if r.shape != (da * db, da * db):
                raise ValueError("density matrix shape does not match dims")
            if np.abs(r - r.conj().T).max() > tol or abs(np.trace(r) - 1) > tol:
                raise ValueError("density matrix must be Hermitian with unit trace")
            if np.linalg.eigvalsh(r).min() < -tol:
                raise ValueError("density matrix is not positive semidefinite")

    def alice_effects(self) -> np.ndarray:
        return stack_effects(self.alice)

    def bob_effects(self) -> np.ndarray:
        return stack_effects(self.bob)

    def __repr__(self):
        kind = "ket" if self.is_pure else "rho"
        return f"QuantumStrategy(dims={self.dims}, state={kind}, m=({len(self.alice)},{len(self.bob)}))"

    # -- JSON -------------------------------------------------------------
    def to_json(self) -> dict:
        def cpx(z):
            return [float(np.real(z)), float(np.imag(z))]

        def mat(m):
            return [[cpx(z) for z in row] for row in m]

        if self.is_pure:
            state = {"kind": "ket", "data": [cpx(z) for z in self.state]}
        else:
            state = {"kind": "rho", "data": mat(self.state)}
        return {"dims": list(self.dims), "state": state,
                "alice": [[mat(e) for e in m.effects] for m in self.alice],
                "bob": [[mat(e) for e in m.effects] for m in self.bob]}

    @classmethod
    def from_json(cls, data: dict) -> "QuantumStrategy":
        def to_c(a):
            a = np.asarray(a, dtype=float)
            if a.shape[-1:] != (2,):
                raise ValueError("complex entries must be encoded as [re, im] pairs")
            return a[..., 0] + 1j * a[..., 1]

        st = data["state"]
        state = to_c(st["data"])
        alice = [[to_c(e) for e in m] for m in data["alice"]]
        bob = [[to_c(e) for e in m] for m in data["bob"]]
        return cls(state, alice, bob, dims=tuple(data.get("dims", (len(alice[0][0]), len(bob[0][0])))))


# -- Born rule and Bell operators ------------------------------------------
def born_table(state: np.ndarray, dims: tuple[int, int], a_eff: np.ndarray, b_eff: np.ndarray) -> np.ndarray:
    """``P[a, b, x, y] = tr(rho M^A_{a|x} (x) M^B_{b|y})`` for stacked effects."""
    da, db = dims
    if state.ndim == 1:
        psi = state.reshape(da, db)
        # <psi| A (x) B |psi> = sum conj(psi_ij) A_ik B_jl psi_kl
        left = np.einsum("ij,xaik->xajk", psi.conj(), a_eff, optimize=True)
        table = np.einsum("xajk,ybjl,kl->abxy", left, b_eff, psi, optimize=True)
    else:
        r = state.reshape(da, db, da, db)
        table = np.einsum("klij,xaik,ybjl->abxy", r, a_eff, b_eff, optimize=True)
    return np.real(table)


def born_correlation(s: QuantumStrategy) -> Correlation:
    return Correlation(s.scenario, born_table(s.state, s.dims, s.alice_effects(), s.bob_effects()))


def bell_operator_from_effects(beta: np.ndarray, a_eff: np.ndarray, b_eff: np.ndarray) -> np.ndarray:
    """``sum beta[a,b,x,y] M^A_{a|x} (x) M^B_{b|y}`` as a ``(DA DB, DA DB)`` matrix."""
    da, db = a_eff.shape[-1], b_eff.shape[-1]
    bob_side = np.einsum("abxy,ybjl->xajl", beta, b_eff, optimize=True)
    op = np.einsum("xaik,xajl->ijkl", a_eff, bob_side, optimize=True)
    return op.reshape(da * db, da * db)


def bell_operator(f: BellFunctional, alice, bob) -> np.ndarray:
    """Bell operator of ``f`` for fixed measurements; excludes the constant offset."""
    a_eff = stack_effects(_as_measurements(alice))
    b_eff = stack_effects(_as_measurements(bob))
    if (len(a_eff), len(b_eff), a_eff.shape[1]) != (f.scenario.settings_a, f.scenario.settings_b,
                                                     f.scenario.outcomes):
        raise ValueError("measurements do not match the functional's scenario")
    op = bell_operator_from_effects(f.coefficients, a_eff, b_eff)
    return (op + op.conj().T) / 2


class TopEigen(NamedTuple):
    state: np.ndarray
    value: float
    degenerate: bool


def top_eigenvector(op: np.ndarray, tol: float = DEGENERACY_TOL) -> TopEigen:
    w, v = np.linalg.eigh(op)
    degenerate = len(w) > 1 and w[-1] - w[-2] <= tol * max(1.0, abs(w[-1]))
    return TopEigen(v[:, -1], float(w[-1]), bool(degenerate))


def best_state_for_measurements(f: BellFunctional, alice, bob) -> TopEigen:
    """Top eigenvector of the Bell operator and the resulting Bell value (offset included).

    ``degenerate`` flags a degenerate top eigenspace; the returned vector is
    then one arbitrary unit vector of that eigenspace.
    """
    top = top_eigenvector(bell_operator(f, alice, bob))
    return TopEigen(top.state, top.value + f.constant_offset, top.degenerate)


# -- Explicit strategies -----------------------------------------------------
def cglmp_unitary(d: int) -> np.ndarray:
    """``U = T W`` with ``T = (-1) (+) I_{d-1}`` and ``W_ij = 1 / (d sin[(i - j - 1/2) pi / d])``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    i = np.arange(d)[:, None]
    j = np.arange(d)[None, :]
    w = 1.0 / (d * np.sin((i - j - 0.5) * np.pi / d))
    t = np.eye(d)
    t[0, 0] = -1
    return (t @ w).astype(complex)


def cglmp_optimal_measurements(d: int) -> tuple[Measurement, Measurement]:
    """Shared measurements: computational basis, and its image under ``U = T W``."""
    u = cglmp_unitary(d)
    return Measurement.from_basis(np.eye(d)), Measurement.from_basis(u)


def cglmp_optimal_state(d: int) -> TopEigen:
    from .catalog import i22dd

    ms = cglmp_optimal_measurements(d)
    return best_state_for_measurements(i22dd(d).functional, ms, ms)


def cglmp_optimal_strategy(d: int) -> QuantumStrategy:
    ms = cglmp_optimal_measurements(d)
    return QuantumStrategy(cglmp_optimal_state(d).state, ms, ms)


def _obs_strategy(state, alice_obs, bob_obs) -> QuantumStrategy:
    return QuantumStrategy(state, [Measurement.from_observable(o) for o in alice_obs],
                           [Measurement.from_observable(o) for o in bob_obs])


def strategy_chsh_max() -> QuantumStrategy:
    r = 1 / math.sqrt(2)
    return _obs_strategy(PHI_PLUS, [SZ, SX], [r * (SZ + SX), r * (SZ - SX)])


def strategy_chsh_sym() -> QuantumStrategy:
    c, s = math.cos(math.pi / 8), math.sin(math.pi / 8)
    psi = -1j * (c * PHI_MINUS + s * PSI_PLUS)
    return _obs_strategy(psi, [SZ, SX], [SZ, SX])


def strategy_i3322c(alpha: float) -> QuantumStrategy:
    """Symmetric maximiser of ``i3322c`` (value 5 for every ``alpha``)."""
    psi = 1j * math.sin(alpha / 2) * PHI_PLUS - math.cos(alpha / 2) * PSI_PLUS
    c6 = 2 * math.cos(math.pi / 6)
    a0 = 0.5 * (c6 * SX + math.cos(alpha) * SY + math.sin(alpha) * SZ)
    a1 = 0.5 * (c6 * SX - math.cos(alpha) * SY - math.sin(alpha) * SZ)
    obs = [a0, a1, SY]
    return _obs_strategy(psi, obs, obs)


IS_PARAMETERS = {
    1.5: (16 / 21, 8 / 17, -math.sqrt(5) / 3),
    2.0: (2 * (1 + math.sqrt(13)) / (3 * math.sqrt(13)), (10 * math.sqrt(13) - 18) / 61,
          -math.sqrt((11 - math.sqrt(13)) / 18)),
}


def strategy_is(alpha: float) -> QuantumStrategy:
    """Asymmetric qubit maximiser of ``i_s(alpha)`` for alpha in {1.5, 2}; ``B_2`` is the identity."""
    try:
        p, s, t = IS_PARAMETERS[float(alpha)]
    except KeyError:
        raise ValueError(f"explicit parameters are known only for alpha in {sorted(IS_PARAMETERS)}") from None
    psi = np.array([math.sqrt(p), 0, 0, math.sqrt(1 - p)], dtype=complex)
    alice = [s * SX + math.sqrt(1 - s * s) * SZ, SX, SZ]
    bob = [t * SX + math.sqrt(1 - t * t) * SZ, t * SX - math.sqrt(1 - t * t) * SZ, I2]
    return _obs_strategy(psi, alice, bob)


J42_STATE_ANGLE_DEG = 42.5092
# (theta_k, phi_k) in degrees; phi_1 is arbitrary since theta_1 = 0.
J42_DIRECTIONS_DEG = ((61.9767, 166.1570), (0.0, 0.0), (54.3423, 41.5892), (52.2700, -71.170))


def j42_directions() -> list[np.ndarray]:
    out = []
    for th, ph in J42_DIRECTIONS_DEG:
        th, ph = math.radians(th), math.radians(ph)
        out.append(np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]))
    return out


def strategy_j42() -> QuantumStrategy:
    """Mirror-symmetric (hence asymmetric) qubit strategy with a symmetric correlation."""
    a = math.radians(J42_STATE_ANGLE_DEG)
    psi = np.array([-math.sin(a), 0, 0, math.cos(a)], dtype=complex)
    alice = [bloch_observable(v) for v in j42_directions()]
    bob = [np.conj(o) for o in alice]
    return _obs_strategy(psi, alice, bob)


def strategy_i9_max() -> QuantumStrategy:
    r = 1 / math.sqrt(2)
    # 1-based settings 1..3 for Alice, 4..9 for Bob as usually written
    a_first = [SZ, SX, -SY]
    b_rest = [r * (SZ + SX), r * (SZ - SX), r * (SZ + SY), r * (SZ - SY), r * (SX + SY), r * (SX - SY)]
    alice = a_first + [np.conj(o) for o in b_rest]
    bob = [np.conj(o) for o in a_first] + b_rest
    return _obs_strategy(PHI_PLUS, alice, bob)


def strategy_i9_sym() -> QuantumStrategy:
    r3 = math.sqrt(3)
    a = {1: SZ, 9: SZ, 8: SX, 2: (r3 * SX + SZ) / 2, 6: (r3 * SX + SZ) / 2,
         3: (r3 * SX - SZ) / 2, 5: -(r3 * SX - SZ) / 2, 4: (SX + r3 * SZ) / 2, 7: (-SX + r3 * SZ) / 2}
    obs = [a[k] for k in range(1, 10)]
    return _obs_strategy(PHI_PLUS, obs, obs)


# -- Entanglement -------------------------------------------------------------
def partial_transpose(rho: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    da, db = dims
    r = to_density(rho).reshape(da, db, da, db)
    return r.transpose(0, 3, 2, 1).reshape(da * db, da * db)


def negativity(rho: np.ndarray, dims: tuple[int, int] | None = None) -> float:
    """``(sum |lambda_i| - 1) / 2`` over the eigenvalues of the partial transpose."""
    r = to_density(rho)
    if dims is None:
        d = int(round(math.sqrt(r.shape[0])))
        if d * d != r.shape[0]:
            raise ValueError("cannot infer an equal split; pass dims")
        dims = (d, d)
    ev = np.linalg.eigvalsh(partial_transpose(r, dims))
    return float((np.abs(ev).sum() - 1) / 2)


# -- Flat regions --------------------------------------------------------------
def flat_segment(f: BellFunctional, p_star: Correlation, c: float) -> Correlation:
    """``c P* + (1 - c) swap(P*)``: on a symmetric functional every point has the value of ``P*``."""
    if not is_symmetric_functional(f):
        raise ValueError("flat_segment needs a symmetric functional")
    if not 0 <= c <= 1:
        raise ValueError("c must lie in [0, 1]")
    return p_star.mix(swap_parties(p_star), c)


def strategy_value(f: BellFunctional, s: QuantumStrategy) -> float:
    return evaluate(f, born_correlation(s))
