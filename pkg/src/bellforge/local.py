"""Exact local bounds by enumerating deterministic strategies.

Alice's ``n**m`` output assignments are enumerated as base-``n`` counters
(setting 0 is the least significant digit).  For each assignment Bob's best
response decouples over his settings, so it is picked greedily; ties go to the
smallest outcome and, across assignments, to the smallest counter value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BellFunctional, Correlation, evaluate

ENUMERATION_GUARD = 10**7
_CHUNK = 1 << 16


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DeterministicStrategy:
    alice_outputs: tuple[int, ...]
    bob_outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice_outputs", tuple(int(a) for a in self.alice_outputs))
        object.__setattr__(self, "bob_outputs", tuple(int(b) for b in self.bob_outputs))

    def to_json(self) -> dict:
        return {"alice": list(self.alice_outputs), "bob": list(self.bob_outputs)}


def deterministic_correlation(s: DeterministicStrategy, n: int | None = None) -> Correlation:
    """Correlation ``P(a,b|x,y) = [a = s.alice(x)] [b = s.bob(y)]``."""
    a_out = np.asarray(s.alice_outputs)
    b_out = np.asarray(s.bob_outputs)
    if n is None:
        n = max(2, int(max(a_out.max(), b_out.max())) + 1)
    if a_out.min() < 0 or b_out.min() < 0 or max(a_out.max(), b_out.max()) >= n:
        raise ValueError("deterministic outputs out of range")
    fa = np.eye(n)[a_out].T  # (a, x)
    fb = np.eye(n)[b_out].T  # (b, y)
    return Correlation.from_table(np.einsum("ax,by->abxy", fa, fb))


def _assignments(n: int, m: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop)
    return (idx[:, None] // n ** np.arange(m)[None, :]) % n


def _check_guard(n: int, m: int) -> None:
    if n**m > ENUMERATION_GUARD:
        raise EnumerationTooLarge(f"{n}^{m} deterministic assignments exceed guard {ENUMERATION_GUARD}")


def local_bound(f: BellFunctional) -> tuple[float, DeterministicStrategy]:
    """Maximum of ``f`` over local deterministic strategies, with a witness.

    The returned value is recomputed as ``evaluate(f, deterministic_correlation(witness))``
    so that it is reproduced exactly by the witness.
    """
    s = f.scenario
    n, ma = s.outcomes, s.settings_a
    _check_guard(n, ma)
    beta = f.coefficients  # (a, b, x, y)
    # gain[x, a, b, y] = beta[a, b, x, y]
    gain = np.transpose(beta, (2, 0, 1, 3))
    best_val, best_idx, best_bob = -np.inf, -1, None
    total = n**ma
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        alice = _assignments(n, ma, start, stop)  # (k, x)
        # bob_scores[k, b, y] = sum_x beta[alice[k, x], b, x, y]
        bob_scores = gain[np.arange(ma)[None, :], alice].sum(axis=1)
        bob_choice = bob_scores.argmax(axis=1)  # first max -> smallest b
        values = bob_scores.max(axis=1).sum(axis=1)
        k = int(values.argmax())
        if values[k] > best_val + 1e-12:
            best_val, best_idx, best_bob = values[k], start + k, bob_choice[k]
    alice = _assignments(n, ma, best_idx, best_idx + 1)[0]
    witness = DeterministicStrategy(tuple(alice), tuple(best_bob))
    return evaluate(f, deterministic_correlation(witness, n)), witness


def symmetric_local_bound(f: BellFunctional) -> float:
    """Maximum over deterministic strategies with identical output tables for both parties."""
    return symmetric_local_search(f)[0]


def symmetric_local_search(f: BellFunctional) -> tuple[float, DeterministicStrategy]:
    s = f.scenario
    if not s.is_square:
        raise ValueError("symmetric strategies need equal setting counts")
    n, m = s.outcomes, s.settings_a
    _check_guard(n, m)
    beta = f.coefficients
    xs = np.arange(m)
    best_val, best_out = -np.inf, None
    total = n**m
    for start in range(0, total, _CHUNK):
        out = _assignments(n, m, start, min(total, start + _CHUNK))
        # values[k] = sum_{x,y} beta[out[k,x], out[k,y], x, y]
        vals = beta[out[:, :, None], out[:, None, :], xs[None, :, None], xs[None, None, :]].sum(axis=(1, 2))
        k = int(vals.argmax())
        if vals[k] > best_val + 1e-12:
            best_val, best_out = vals[k], out[k]
    witness = DeterministicStrategy(tuple(best_out), tuple(best_out))
    return evaluate(f, deterministic_correlation(witness, n)), witness

