"""Bell scenarios, correlations and linear Bell functionals.

Correlation tables are stored as real arrays indexed ``[a, b, x, y]``.  For
two-outcome scenarios the outcome ``a`` is mapped to the sign ``(-1)**a``; this
is the only sign convention used anywhere in the package, so correlator-form
functionals built here and in :mod:`bellforge.catalog` agree with it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

NORMALIZATION_TOL = 1e-9
SYMMETRY_TOL = 1e-8


class ShapeMismatchError(ValueError):
    """Raised when a table does not fit its scenario."""


@dataclass(frozen=True)
class Scenario:
    """Bipartite Bell scenario with ``m`` settings per party and ``n`` outcomes."""

    settings_a: int
    settings_b: int
    outcomes: int

    def __post_init__(self):
        if self.settings_a < 1 or self.settings_b < 1:
            raise ValueError("each party needs at least one setting")
        if self.outcomes < 2:
            raise ValueError("outcomes must be >= 2")

    @classmethod
    def symmetric(cls, m: int, n: int) -> "Scenario":
        return cls(m, m, n)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        n = self.outcomes
        return (n, n, self.settings_a, self.settings_b)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def is_square(self) -> bool:
        return self.settings_a == self.settings_b


def _check_shape(scenario: Scenario, table: np.ndarray) -> np.ndarray:
    table = np.asarray(table, dtype=float)
    if table.shape != scenario.shape:
        raise ShapeMismatchError(f"table shape {table.shape} does not match scenario {scenario.shape}")
    return table


@dataclass(frozen=True, eq=False)
class Correlation:
    """Joint conditional distribution ``P(a, b | x, y)``."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        table = _check_shape(self.scenario, self.table).copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_table(cls, table) -> "Correlation":
        table = np.asarray(table, dtype=float)
        n, n2, ma, mb = table.shape
        if n != n2:
            raise ShapeMismatchError("non-uniform outcome counts are not supported")
        return cls(Scenario(ma, mb, n), table)

    @classmethod
    def uniform(cls, scenario: Scenario) -> "Correlation":
        n = scenario.outcomes
        return cls(scenario, np.full(scenario.shape, 1.0 / n**2))

    def marginal_a(self) -> np.ndarray:
        """``P_A(a|x)`` as an ``(n, m_a, m_b)`` array, one copy per Bob setting."""
        return self.table.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        """``P_B(b|y)`` as an ``(n, m_a, m_b)`` array, one copy per Alice setting."""
        return self.table.sum(axis=0)

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        t = self.table
        return bool(t.min() >= -tol and t.max() <= 1 + tol
                    and np.abs(t.sum(axis=(0, 1)) - 1).max() <= tol)

    def mix(self, other: "Correlation", c: float) -> "Correlation":
        """Return ``c * self + (1 - c) * other``."""
        if other.scenario != self.scenario:
            raise ShapeMismatchError("scenarios differ")
        return Correlation(self.scenario, c * self.table + (1 - c) * other.table)

    def to_json(self) -> dict:
        s = self.scenario
        if not s.is_square:
            raise ShapeMismatchError("JSON schema requires equal setting counts")
        return {"m": s.settings_a, "n": s.outcomes,
                "p": np.transpose(self.table, (2, 3, 0, 1)).tolist()}

    @classmethod
    def from_json(cls, data: Mapping) -> "Correlation":
        p = np.asarray(data["p"], dtype=float)
        scenario = Scenario.symmetric(int(data["m"]), int(data["n"]))
        return cls(scenario, np.transpose(p, (2, 3, 0, 1)))

    def __repr__(self):
        s = self.scenario
        return f"Correlation(m=({s.settings_a},{s.settings_b}), n={s.outcomes})"


@dataclass(frozen=True)
class CorrelatorView:
    """Full-correlator picture of a two-outcome correlation."""

    singles_a: np.ndarray
    singles_b: np.ndarray
    joints: np.ndarray

    def __post_init__(self):
        for name in ("singles_a", "singles_b", "joints"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        ma, mb = self.joints.shape
        if self.singles_a.shape != (ma,) or self.singles_b.shape != (mb,):
            raise ShapeMismatchError("correlator arrays have inconsistent sizes")


@dataclass(frozen=True, eq=False)
class BellFunctional:
    """Linear functional ``beta . P + constant_offset``."""

    scenario: Scenario
    coefficients: np.ndarray
    constant_offset: float = 0.0
    name: str = ""
    known_local_bound: float | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        beta = _check_shape(self.scenario, self.coefficients).copy()
        beta.setflags(write=False)
        object.__setattr__(self, "coefficients", beta)

    def swapped(self) -> "BellFunctional":
        s = self.scenario
        return BellFunctional(Scenario(s.settings_b, s.settings_a, s.outcomes),
                              np.transpose(self.coefficients, (1, 0, 3, 2)),
                              self.constant_offset, self.name + "<->", self.known_local_bound)

    def to_json(self) -> dict:
        s = self.scenario
        if not s.is_square:
            raise ShapeMismatchError("JSON schema requires equal setting counts")
        return {"m": s.settings_a, "n": s.outcomes,
                "p": np.transpose(self.coefficients, (2, 3, 0, 1)).tolist(),
                "offset": self.constant_offset, "name": self.name,
                "local_bound": self.known_local_bound}

    @classmethod
    def from_json(cls, data: Mapping) -> "BellFunctional":
        beta = np.asarray(data["p"], dtype=float)
        scenario = Scenario.symmetric(int(data["m"]), int(data["n"]))
        lb = data.get("local_bound")
        return cls(scenario, np.transpose(beta, (2, 3, 0, 1)), float(data.get("offset", 0.0)),
                   str(data.get("name", "")), None if lb is None else float(lb))


def evaluate(functional: BellFunctional, p: Correlation) -> float:
    """Bell value ``beta . P`` plus the functional's constant offset."""
    if functional.scenario != p.scenario:
        raise ShapeMismatchError(f"functional scenario {functional.scenario} != correlation scenario {p.scenario}")
    return float(np.sum(functional.coefficients * p.table) + functional.constant_offset)


def _signs(n: int) -> np.ndarray:
    if n != 2:
        raise ValueError(f"correlators are only defined for two outcomes, got n={n}")
    return np.array([1.0, -1.0])


def correlators_from_probabilities(p: Correlation) -> CorrelatorView:
    s = _signs(p.scenario.outcomes)
    t = p.table
    # Marginals taken at Bob setting 0 (resp. Alice setting 0).
    singles_a = np.einsum("a,abx->x", s, t[:, :, :, 0])
    singles_b = np.einsum("b,aby->y", s, t[:, :, 0, :])
    joints = np.einsum("a,b,abxy->xy", s, s, t)
    return CorrelatorView(singles_a, singles_b, joints)


def probabilities_from_correlators(c: CorrelatorView, tol: float = NORMALIZATION_TOL) -> Correlation:
    """Inverse of :func:`correlators_from_probabilities` for two outcomes.

    Raises ``ValueError`` if the correlators do not describe a valid
    distribution (some reconstructed entry is negative beyond ``tol``).
    """
    s = _signs(2)
    table = 0.25 * (1
                    + s[:, None, None, None] * c.singles_a[None, None, :, None]
                    + s[None, :, None, None] * c.singles_b[None, None, None, :]
                    + s[:, None, None, None] * s[None, :, None, None] * c.joints[None, None, :, :])
    if table.min() < -tol:
        raise ValueError(f"inconsistent correlators: reconstructed probability {table.min():.3g} < 0")
    ma, mb = c.joints.shape
    return Correlation(Scenario(ma, mb, 2), table)


def functional_from_correlator_form(
    m: int,
    singles_a: Mapping[int, float] | None = None,
    singles_b: Mapping[int, float] | None = None,
    joints: Mapping[tuple[int, int], float] | None = None,
    offset: float = 0.0,
    name: str = "",
    known_local_bound: float | None = None,
    m_b: int | None = None,
) -> BellFunctional:
    """Expand a correlator expression into probability coefficients.

    ``<A_x>`` becomes ``sum_a (-1)^a P(a, b | x, y)`` for a fixed reference
    setting ``y = 0`` (any choice gives the same value on no-signalling
    correlations; the reference is chosen so the expansion of a party-symmetric
    expression is itself symmetric).
    """
    mb = m if m_b is None else m_b
    scenario = Scenario(m, mb, 2)
    s = _signs(2)
    beta = np.zeros(scenario.shape)
    for x, w in (singles_a or {}).items():
        beta[:, :, x, 0] += w * s[:, None]
    for y, w in (singles_b or {}).items():
        beta[:, :, 0, y] += w * s[None, :]
    for (x, y), w in (joints or {}).items():
        beta[:, :, x, y] += w * np.outer(s, s)
    return BellFunctional(scenario, beta, float(offset), name, known_local_bound)


def swap_parties(p: Correlation) -> Correlation:
    """``P'(a, b | x, y) = P(b, a | y, x)``."""
    if not p.scenario.is_square:
        raise ShapeMismatchError("party swap needs equal setting counts")
    return Correlation(p.scenario, np.transpose(p.table, (1, 0, 3, 2)))


def is_symmetric(p: Correlation, tol: float = SYMMETRY_TOL) -> bool:
    if not p.scenario.is_square:
        return False
    return bool(np.abs(p.table - np.transpose(p.table, (1, 0, 3, 2))).max() <= tol)


def is_symmetric_functional(f: BellFunctional, tol: float = SYMMETRY_TOL) -> bool:
    """Symmetry of the coefficients only; the constant offset is ignored."""
    if not f.scenario.is_square:
        return False
    beta = f.coefficients
    return bool(np.abs(beta - np.transpose(beta, (1, 0, 3, 2))).max() <= tol)


def is_no_signaling(p: Correlation, tol: float = NORMALIZATION_TOL) -> bool:
    pa = p.marginal_a()  # (a, x, y)
    pb = p.marginal_b()  # (b, x, y)
    dev_a = np.abs(pa - pa[:, :, :1]).max()
    dev_b = np.abs(pb - pb[:, :1, :]).max()
    return bool(max(dev_a, dev_b) <= tol)


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
