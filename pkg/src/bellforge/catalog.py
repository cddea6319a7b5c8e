"""Generators for the concrete Bell functionals studied in the package.

Settings are 0-based throughout.  Where an inequality is usually written with
1-based settings (``i9``), setting ``k`` of the usual notation is index ``k-1``
here.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .core import (BellFunctional, Scenario, functional_from_correlator_form,
                   is_symmetric_functional)

SQRT2 = math.sqrt(2.0)

#: Maximal quantum CGLMP values ``I_d`` for d = 2..19 (SQS value, matching NPA level 1+AB).
CGLMP_VALUES = {
    2: 2.82842718, 3: 2.91485425, 4: 2.97269840, 5: 3.01571048, 6: 3.04970041,
    7: 3.07764831, 8: 3.10128058, 9: 3.12168442, 10: 3.13958741, 11: 3.15549968,
    12: 3.16979224, 13: 3.18274300, 14: 3.19456537, 15: 3.20542659, 16: 3.21546005,
    17: 3.22477378, 18: 3.23345644, 19: 3.24158164,
}

#: Negativity of the optimal two-qudit CGLMP state, d = 2..7.
CGLMP_NEGATIVITY = {2: 0.5, 3: 0.9836, 4: 1.4561, 5: 1.9203, 6: 2.3778, 7: 2.8298}

J42_QUANTUM = 0.6722
J42_SQS_QUBIT = 0.5682
J42_SYMMETRIC_QUBIT = 0.6012


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    functional: BellFunctional
    symmetric: bool
    known_quantum_value: float | None = None
    known_sqs_qubit_value: float | None = None
    source: str = ""
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def name(self) -> str:
        return self.functional.name

    @property
    def local_bound(self) -> float | None:
        return self.functional.known_local_bound


def _entry(f: BellFunctional, **kw) -> CatalogEntry:
    return CatalogEntry(f, is_symmetric_functional(f), **kw)


def _chsh_joints(sign_pattern) -> dict:
    return {(x, y): float(sign_pattern[x][y]) for x in range(2) for y in range(2)}


def chsh() -> CatalogEntry:
    f = functional_from_correlator_form(2, joints=_chsh_joints([[1, 1], [1, -1]]),
                                        name="chsh", known_local_bound=2.0)
    return _entry(f, known_quantum_value=2 * SQRT2, known_sqs_qubit_value=2 * SQRT2,
                  source="Clauser-Horne-Shimony-Holt")


def chsh_asymmetric() -> CatalogEntry:
    """CHSH after relabelling Bob's settings 0 <-> 1."""
    f = functional_from_correlator_form(2, joints=_chsh_joints([[1, 1], [-1, 1]]),
                                        name="chsh-asym", known_local_bound=2.0)
    return _entry(f, known_quantum_value=2 * SQRT2, source="CHSH, relabelled B0<->B1")


def _marginal_a(beta: np.ndarray, a: int, x: int, w: float) -> None:
    beta[a, :, x, 0] += w


def _marginal_b(beta: np.ndarray, b: int, y: int, w: float) -> None:
    beta[:, b, 0, y] += w


def i22dd(d: int) -> CatalogEntry:
    """The manifestly symmetric two-setting, ``d``-outcome form of CGLMP."""
    if d < 2:
        raise ValueError("i22dd needs d >= 2")
    scenario = Scenario.symmetric(2, d)
    beta = np.zeros(scenario.shape)
    for a in range(d - 1):
        for b in range(d - 1):
            if a + b <= d - 2:
                beta[a, b, 0, 0] += 1
            if a + b >= d - 2:
                beta[a, b, 1, 1] -= 1
                beta[a, b, 0, 1] += 1
                beta[a, b, 1, 0] += 1
    for a in range(d - 1):
        _marginal_a(beta, a, 0, -1.0)
        _marginal_b(beta, a, 0, -1.0)
    f = BellFunctional(scenario, beta, 0.0, f"i22dd-{d}", 0.0)
    q = CGLMP_VALUES.get(d)
    return _entry(f, known_quantum_value=None if q is None else i22dd_value_from_cglmp(d, q),
                  known_sqs_qubit_value=None,
                  source="Collins-Gisin I_22dd (symmetric CGLMP)")


def cglmp_value_from_i22dd(d: int, i22dd_value: float) -> float:
    """Affine map from an ``I_22dd`` value to the corresponding CGLMP value."""
    return 2.0 * d / (d - 1) * i22dd_value + 2.0


def i22dd_value_from_cglmp(d: int, cglmp_value: float) -> float:
    return (cglmp_value - 2.0) * (d - 1) / (2.0 * d)


def i_s(alpha: float) -> CatalogEntry:
    """Three-setting symmetric family with local bound ``2*alpha + 5``."""
    flags = () if 1.5 <= alpha <= 3.0 else ("alpha-outside-[1.5,3]",)
    singles = {0: 1.0, 1: 1.0, 2: float(alpha)}
    joints = {(0, 2): 1.0, (2, 0): 1.0, (2, 1): -1.0, (1, 2): -1.0, (2, 2): -1.0,
              (1, 0): -2.0, (0, 1): -2.0, (1, 1): -2.0}
    f = functional_from_correlator_form(3, singles, singles, joints,
                                        name=f"is-{alpha:g}", known_local_bound=2 * alpha + 5)
    quantum = {1.5: 25.0 / 3.0, 2.0: (13 + 4 * math.sqrt(13)) / 3}.get(float(alpha))
    sqs = 2 * alpha + 5 if alpha > 1.975 else None
    return _entry(f, known_quantum_value=quantum, known_sqs_qubit_value=sqs,
                  source="symmetric (2,3,2) family I_S(alpha)", flags=flags)


def i3322c() -> CatalogEntry:
    joints = {(0, 1): 1.0, (0, 2): 1.0, (1, 0): 1.0, (2, 0): 1.0,
              (0, 0): 1.0, (1, 1): 1.0, (1, 2): -1.0, (2, 1): -1.0}
    f = functional_from_correlator_form(3, joints=joints, name="i3322c", known_local_bound=4.0)
    return _entry(f, known_quantum_value=5.0, known_sqs_qubit_value=5.0,
                  source="correlation part of I3322 (Goh et al.)")


def j42() -> CatalogEntry:
    """``J_4422^42`` completed to a party-symmetric coefficient table.

    The printed terms are Alice-side only for the off-diagonal ``P(0,0|x,y)``
    terms and the marginals; the party-swapped images of exactly those terms are
    added.  Diagonal terms ``P(0,0|x,x)`` are their own images.
    """
    scenario = Scenario.symmetric(4, 2)
    diag = np.zeros(scenario.shape)
    diag[0, 0, 0, 0] = -3
    diag[0, 0, 1, 1] = 1
    diag[0, 0, 2, 2] = -2
    diag[0, 0, 3, 3] = -2
    half = np.zeros(scenario.shape)
    half[0, 0, 2, 3] += 1
    for y in (0, 2, 3):
        half[0, 0, 1, y] += 2
    for y in (2, 3):
        half[0, 0, 0, y] += 1
    for x, w in ((0, -1.0), (3, -1.0), (1, -4.0)):
        _marginal_a(half, 0, x, w)
    beta = diag + half + np.transpose(half, (1, 0, 3, 2))
    f = BellFunctional(scenario, beta, 0.0, "j42", 0.0)
    return _entry(f, known_quantum_value=J42_QUANTUM, known_sqs_qubit_value=J42_SQS_QUBIT,
                  source="J_4422^42 facet of the (2,4,2) polytope")


def _chsh_block(joints: dict, x1: int, x2: int, y1: int, y2: int) -> None:
    for (x, y), w in (((x1, y1), 1), ((x1, y2), 1), ((x2, y1), 1), ((x2, y2), -1)):
        joints[(x, y)] = joints.get((x, y), 0.0) + w


def i9() -> CatalogEntry:
    joints: dict = {}
    # 1-based blocks (1,2;4,5), (1,3;6,7), (2,3;8,9); the second loop adds the swapped copies.
    for x1, x2, y1, y2 in ((1, 2, 4, 5), (1, 3, 6, 7), (2, 3, 8, 9)):
        _chsh_block(joints, x1 - 1, x2 - 1, y1 - 1, y2 - 1)
    swapped: dict = {}
    for x1, x2, y1, y2 in ((1, 2, 4, 5), (1, 3, 6, 7), (2, 3, 8, 9)):
        _chsh_block(swapped, y1 - 1, y2 - 1, x1 - 1, x2 - 1)
    for k, w in swapped.items():
        joints[k] = joints.get(k, 0.0) + w
    for k in range(3):
        joints[(k, k)] = joints.get((k, k), 0.0) + 1.0
    f = functional_from_correlator_form(9, joints=joints, name="i9", known_local_bound=None)
    return _entry(f, known_quantum_value=12 * SQRT2 + 3,
                  known_sqs_qubit_value=6 * math.sqrt(3) + 9,
                  source="CHSH_3 + CHSH_3' + sum_k <A_k B_k>")


ZETA = 1 / SQRT2 - 0.5


def octagon_vertices() -> np.ndarray:
    """Vertices of the admissible ``(r0, r1)`` octagon, counter-clockwise."""
    z, h = ZETA, 0.5 - ZETA
    return np.array([(h, 0), (z, z), (0, h), (-z, z), (-h, 0), (-z, -z), (0, -h), (z, -z)])


def in_octagon(r0: float, r1: float) -> bool:
    """Strict interior test for the octagon."""
    v = octagon_vertices()
    e = np.roll(v, -1, axis=0) - v
    rel = np.array([r0, r1]) - v
    cross = e[:, 0] * rel[:, 1] - e[:, 1] * rel[:, 0]
    return bool(np.all(cross > 0))


def local_bound_g(r0: float, r1: float) -> float:
    """Closed-form local bound of :func:`i_r0r1` (maximum over the eight sign patterns)."""
    c = SQRT2 - 1
    candidates = [1 / SQRT2 + s0 * r0 + s1 * c * r1 for s0 in (1, -1) for s1 in (1, -1)]
    candidates += [1 / SQRT2 + s1 * r1 + s0 * c * r0 for s0 in (1, -1) for s1 in (1, -1)]
    return max(candidates)


def i_r0r1(r0: float, r1: float) -> CatalogEntry:
    """Asymmetric family maximised by the Tsirelson correlation."""
    flags = []
    if not in_octagon(r0, r1):
        flags.append("outside-octagon")
    if math.isclose(r1, -(SQRT2 + 1) * r0, abs_tol=1e-12):
        flags.append("excluded-line")
    singles_a = {0: (r0 + r1) / SQRT2, 1: (r0 - r1) / SQRT2}
    singles_b = {0: -r0, 1: -r1}
    joints = {k: w / (2 * SQRT2) for k, w in _chsh_joints([[1, 1], [1, -1]]).items()}
    f = functional_from_correlator_form(2, singles_a, singles_b, joints,
                                        name=f"ir-{r0:g}-{r1:g}",
                                        known_local_bound=local_bound_g(r0, r1))
    return _entry(f, known_quantum_value=1.0, source="Tsirelson-inspired family I_{r0,r1}",
                  flags=tuple(flags))


def names() -> list[str]:
    return ["chsh", "chsh-asym", "i22dd-<d>", "is-<alpha>", "i3322c", "j42", "i9", "ir-<r0>-<r1>"]


_NUM = r"(-?[0-9]*\.?[0-9]+(?:e-?[0-9]+)?)"


def get(name: str) -> CatalogEntry:
    """Look up an entry by its CLI name (``chsh``, ``i22dd-3``, ``is-2``, ``ir-0.1-0.05`` ...)."""
    key = name.strip().lower()
    fixed = {"chsh": chsh, "chsh-asym": chsh_asymmetric, "i3322c": i3322c, "j42": j42, "i9": i9}
    if key in fixed:
        return fixed[key]()
    if m := re.fullmatch(r"i22dd-([0-9]+)", key):
        return i22dd(int(m.group(1)))
    if m := re.fullmatch(r"i_?s-" + _NUM, key):
        return i_s(float(m.group(1)))
    if m := re.fullmatch(r"ir-" + _NUM + "-" + _NUM, key):
        return i_r0r1(float(m.group(1)), float(m.group(2)))
    raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(names())}")
