"""NPA moment matrices in Collins-Gisin form, party-swap twirling and upper bounds.

Generators are the projectors ``A_{a|x}`` and ``B_{b|y}`` for outcomes
``a, b <= n - 2``; the last outcome is eliminated through normalisation.  A
word is a pair ``(alice_letters, bob_letters)`` (the parties commute), each
letter being ``(setting, outcome)``.  Words are reduced with idempotence and
same-setting orthogonality until they stop changing.

Bell functionals have real coefficients, so the relaxation is taken over real
moment matrices: ``<w>`` and ``<w^dagger>`` share one variable.  The twirled
program additionally merges ``w`` with its party-swapped image.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .core import BellFunctional, Scenario
from .quantum import QuantumStrategy
from .sdp import OPTIMAL, SdpError, SdpProblem, solve_sdp

Letter = tuple[int, int]
Word = tuple[tuple[Letter, ...], tuple[Letter, ...]]

IDENTITY: Word = ((), ())
LEVELS = {"1": "1", "1ab": "1+AB", "1+ab": "1+AB", "2": "2"}


def normalize_level(level) -> str:
    key = str(level).strip().lower()
    if key not in LEVELS:
        raise ValueError(f"unsupported NPA level {level!r}; use 1, 1+AB or 2")
    return LEVELS[key]


def reduce_letters(letters: Iterable[Letter]) -> tuple[Letter, ...] | None:
    """Apply ``P P = P`` and ``P_a P_a' = 0`` (same setting, a != a'); ``None`` is the zero word."""
    out: list[Letter] = []
    for letter in letters:
        if out and out[-1][0] == letter[0]:
            if out[-1][1] != letter[1]:
                return None
            continue
        out.append(letter)
    return tuple(out)


def reduce_word(alice: Iterable[Letter], bob: Iterable[Letter]) -> Word | None:
    a = reduce_letters(alice)
    if a is None:
        return None
    b = reduce_letters(bob)
    return None if b is None else (a, b)


def dagger(w: Word) -> Word:
    return (w[0][::-1], w[1][::-1])


def swap_word(w: Word) -> Word:
    return (w[1], w[0])


def product(u: Word, v: Word) -> Word | None:
    """``u^dagger v`` reduced."""
    return reduce_word(u[0][::-1] + v[0], u[1][::-1] + v[1])


def _letters(m: int, n: int) -> list[Letter]:
    return [(x, a) for x in range(m) for a in range(n - 1)]


def monomials(scenario: Scenario, level) -> list[Word]:
    """Row labels of the moment matrix for the given level."""
    level = normalize_level(level)
    la = _letters(scenario.settings_a, scenario.outcomes)
    lb = _letters(scenario.settings_b, scenario.outcomes)
    words: list[Word] = [IDENTITY] + [((l,), ()) for l in la] + [((), (l,)) for l in lb]
    if level in ("1+AB", "2"):
        words += [((p,), (q,)) for p in la for q in lb]
    if level == "2":
        for party, letters in ((0, la), (1, lb)):
            for p in letters:
                for q in letters:
                    r = reduce_letters((p, q))
                    if r is not None and len(r) == 2:
                        words.append((r, ()) if party == 0 else ((), r))
    seen, out = set(), []
    for w in words:
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


@dataclass
class MomentMatrix:
    """Index structure of a moment matrix.

    ``index[i, j]`` is the variable class of ``<w_i^dagger w_j>`` (``-1`` for a
    word that reduces to zero); class 0 is the identity, fixed to 1.
    """

    scenario: Scenario
    level: str
    words: list[Word]
    index: np.ndarray
    classes: list[tuple[Word, ...]]
    twirled: bool = False

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def num_variables(self) -> int:
        """Number of free moment variables (the identity class excluded)."""
        return len(self.classes) - 1

    def class_of(self, w: Word) -> int:
        for k, members in enumerate(self.classes):
            if w in members:
                return k
        raise KeyError(f"word {w} does not occur in this moment matrix")

    def basis(self) -> tuple[np.ndarray, sp.csr_matrix]:
        """``(F0, F)`` with ``Gamma = F0 + sum_k y_k F_k`` over the free variables.

        ``F`` is sparse with row ``k - 1`` holding the row-major flattening of ``F_k``.
        """
        n = self.size
        f0 = (self.index == 0).astype(float)
        flat = self.index.ravel()
        pos = np.nonzero(flat > 0)[0]
        f = sp.csr_matrix((np.ones(len(pos)), (flat[pos] - 1, pos)), shape=(self.num_variables, n * n))
        return f0, f


def _class_key(w: Word, twirled: bool) -> Word:
    cands = [w, dagger(w)]
    if twirled:
        cands += [swap_word(c) for c in cands]
    return min(cands)


def _build(scenario: Scenario, level: str, words: list[Word], twirled: bool) -> MomentMatrix:
    n = len(words)
    index = np.full((n, n), -1, dtype=int)
    key_to_class: dict[Word, int] = {_class_key(IDENTITY, twirled): 0}
    members: dict[int, set] = {0: {IDENTITY}}
    for i, u in enumerate(words):
        for j, v in enumerate(words):
            w = product(u, v)
            if w is None:
                continue
            key = _class_key(w, twirled)
            k = key_to_class.setdefault(key, len(key_to_class))
            members.setdefault(k, set()).add(w)
            index[i, j] = k
    classes = [tuple(sorted(members[k])) for k in range(len(key_to_class))]
    return MomentMatrix(scenario, level, words, index, classes, twirled)


def npa_moment_structure(scenario: Scenario, level) -> MomentMatrix:
    level = normalize_level(level)
    return _build(scenario, level, monomials(scenario, level), twirled=False)


def twirl(m: MomentMatrix) -> MomentMatrix:
    """Merge variables along orbits of the party swap ``A_{a|x} <-> B_{a|x}``."""
    if not m.scenario.is_square:
        raise ValueError("party-swap twirling needs equal setting counts")
    return _build(m.scenario, m.level, m.words, twirled=True)


def _expand(x: int, a: int, n: int) -> list[tuple[Letter | None, float]]:
    """``P_{a|x}`` as a combination of Collins-Gisin projectors (``None`` = identity)."""
    if a < n - 1:
        return [((x, a), 1.0)]
    return [(None, 1.0)] + [((x, k), -1.0) for k in range(n - 1)]


def moment_objective(f: BellFunctional, m: MomentMatrix) -> np.ndarray:
    """Coefficient of every moment class in ``beta . P`` (class 0 collects the constant)."""
    s = f.scenario
    if s != m.scenario:
        raise ValueError("functional and moment matrix scenarios differ")
    n = s.outcomes
    lookup: dict[Word, int] = {}
    for k, ws in enumerate(m.classes):
        for w in ws:
            lookup[w] = k
    c = np.zeros(len(m.classes))
    beta = f.coefficients
    for a, b, x, y in zip(*np.nonzero(beta)):
        coef = beta[a, b, x, y]
        for la, ca in _expand(x, a, n):
            for lb, cb in _expand(y, b, n):
                w = ((la,) if la else (), (lb,) if lb else ())
                c[lookup[w]] += coef * ca * cb
    return c


def npa_program(f: BellFunctional, level, symmetric: bool = False) -> tuple[SdpProblem, float, MomentMatrix]:
    """Lower the moment relaxation of ``max f`` to an :class:`SdpProblem`.

    The LMI ``Gamma(y) = F0 + sum y_k F_k >= 0`` with objective ``c.y`` is the
    dual of ``max <-F0, X>`` s.t. ``<F_k, X> = -c_k``, so the bound equals
    ``constant - optimum``; the returned float is that constant.
    """
    m = npa_moment_structure(f.scenario, level)
    if symmetric:
        m = twirl(m)
    c = moment_objective(f, m)
    f0, fk = m.basis()
    problem = SdpProblem.from_blocks([-f0], [fk], -c[1:])
    return problem, float(c[0] + f.constant_offset), m


def npa_upper_bound(f: BellFunctional, level="1", symmetric: bool = False, tol: float = 1e-9) -> float:
    """Upper bound on ``f`` over quantum (or, with ``symmetric``, symmetric quantum) correlations."""
    problem, const, _ = npa_program(f, level, symmetric)
    res = solve_sdp(problem, tol=tol)
    if res.status != OPTIMAL:
        raise SdpError(res.status, f"NPA solve ended with status {res.status} (gap {res.gap:.2e})")
    return const - res.dual_objective


def _word_operator(w: Word, alice_ops, bob_ops, dims) -> np.ndarray:
    da, db = dims
    a = np.eye(da, dtype=complex)
    for x, k in w[0]:
        a = a @ alice_ops[x][k]
    b = np.eye(db, dtype=complex)
    for y, k in w[1]:
        b = b @ bob_ops[y][k]
    return np.kron(a, b)


def moment_matrix_from_strategy(m: MomentMatrix, s: QuantumStrategy) -> np.ndarray:
    """``Gamma_ij = tr(rho w_i^dagger w_j)`` evaluated directly on the strategy's operators."""
    ops = [_word_operator(w, [mm.effects for mm in s.alice], [mm.effects for mm in s.bob], s.dims)
           for w in m.words]
    rho = s.rho
    return np.array([[np.trace(rho @ u.conj().T @ v) for v in ops] for u in ops])
