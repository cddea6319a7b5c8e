import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellforge import catalog
from bellforge.core import Correlation, evaluate, is_symmetric_functional
from bellforge.local import local_bound
from bellforge.quantum import born_correlation, strategy_chsh_max, strategy_j42

from oracles import brute_force_local_bound

R2 = math.sqrt(2)


def all_entries():
    return [catalog.chsh(), catalog.chsh_asymmetric(), catalog.i22dd(2), catalog.i22dd(3), catalog.i22dd(4),
            catalog.i_s(1.5), catalog.i_s(2), catalog.i_s(3), catalog.i3322c(), catalog.j42(), catalog.i9(),
            catalog.i_r0r1(0.1, 0.05)]


@pytest.mark.parametrize("entry", all_entries(), ids=lambda e: e.name)
def test_symmetric_flag_matches_coefficients(entry):
    assert entry.symmetric == is_symmetric_functional(entry.functional)


@pytest.mark.parametrize("entry", [e for e in all_entries() if e.local_bound is not None], ids=lambda e: e.name)
def test_known_local_bounds(entry):
    value, _ = local_bound(entry.functional)
    assert value == pytest.approx(entry.local_bound, abs=1e-9)


def test_chsh_entries():
    assert catalog.chsh().local_bound == 2
    assert catalog.chsh().symmetric
    assert not catalog.chsh_asymmetric().symmetric


def _relabelings(beta):
    """Every simultaneous setting permutation and per-setting outcome flip of both parties."""
    m = beta.shape[2]
    for pa in itertools.permutations(range(m)):
        for pb in itertools.permutations(range(m)):
            for fa in itertools.product((0, 1), repeat=m):
                for fb in itertools.product((0, 1), repeat=m):
                    out = beta[:, :, list(pa)][:, :, :, list(pb)].copy()
                    for x in range(m):
                        if fa[x]:
                            out[:, :, x, :] = out[::-1, :, x, :]
                        if fb[x]:
                            out[:, :, :, x] = out[:, ::-1, :, x]
                    yield out


def test_asymmetric_chsh_printed_form_not_symmetric_under_relabelings():
    # we assert only non-symmetry of the listed relabelings applied to the coefficient table
    beta = catalog.chsh_asymmetric().functional.coefficients
    swapped_equal = [np.allclose(b, b.transpose(1, 0, 3, 2)) for b in _relabelings(beta)]
    # the functional is CHSH in disguise, so some relabelling restores symmetry; the printed one is not
    assert not swapped_equal[0]


def test_i22dd_properties():
    assert catalog.i22dd(3).symmetric
    for d in (2, 3, 4):
        assert local_bound(catalog.i22dd(d).functional)[0] == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        catalog.i22dd(1)


def test_i22dd_local_bound_brute_force():
    for d in (2, 3):
        beta = catalog.i22dd(d).functional.coefficients
        assert brute_force_local_bound(beta) == pytest.approx(0, abs=1e-12)


def test_cglmp_affine_map():
    assert catalog.cglmp_value_from_i22dd(2, 0.0) == 2
    d = 3
    q = catalog.i22dd_value_from_cglmp(d, 2.91485425)
    assert catalog.cglmp_value_from_i22dd(d, q) == pytest.approx(2.91485425, abs=1e-12)


@given(st.integers(2, 19), st.floats(-5, 5), st.floats(0.01, 3))
def test_cglmp_map_affine_increasing(d, v, dv):
    f = catalog.cglmp_value_from_i22dd
    assert f(d, v + dv) > f(d, v)
    assert f(d, v + dv) - f(d, v) == pytest.approx(2 * d / (d - 1) * dv)


def test_i_s_family():
    assert local_bound(catalog.i_s(2).functional)[0] == 9
    assert catalog.i_s(1.5).symmetric
    assert "alpha-outside-[1.5,3]" in catalog.i_s(4).flags


def test_i3322c_and_j42_and_i9():
    assert local_bound(catalog.i3322c().functional)[0] == 4
    assert catalog.i3322c().symmetric
    j = catalog.j42()
    assert j.symmetric and local_bound(j.functional)[0] == 0
    assert evaluate(j.functional, born_correlation(strategy_j42())) == pytest.approx(0.6012, abs=1e-3)
    assert catalog.i9().symmetric
    assert catalog.i9().functional.scenario.settings_a == 9


def test_j42_local_bound_brute_force():
    beta = catalog.j42().functional.coefficients
    assert brute_force_local_bound(beta) == pytest.approx(0, abs=1e-12)


def test_i_r0r1_examples():
    assert catalog.local_bound_g(0, 0) == pytest.approx(1 / R2)
    r0, r1 = 0.1, 0.05
    assert catalog.local_bound_g(r0, r1) == pytest.approx(1 / R2 + r0 + (R2 - 1) * r1)
    p_t = born_correlation(strategy_chsh_max())
    assert evaluate(catalog.i_r0r1(r0, r1).functional, p_t) == pytest.approx(1.0, abs=1e-12)
    assert "outside-octagon" in catalog.i_r0r1(0.5, 0.5).flags


def octagon_grid(k=21):
    pts = np.linspace(-0.5, 0.5, k)
    return [(a, b) for a in pts for b in pts if catalog.in_octagon(a, b)]


def test_octagon_grid_violation():
    p_t = born_correlation(strategy_chsh_max())
    grid = octagon_grid()
    assert len(grid) > 50
    for r0, r1 in grid:
        assert evaluate(catalog.i_r0r1(r0, r1).functional, p_t) - catalog.local_bound_g(r0, r1) > 0


@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_g_matches_enumeration(r0, r1):
    e = catalog.i_r0r1(r0, r1)
    assert local_bound(e.functional)[0] == pytest.approx(catalog.local_bound_g(r0, r1), abs=1e-9)


def test_get_by_name():
    assert catalog.get("i22dd-4").functional.scenario.outcomes == 4
    assert catalog.get("is-2").local_bound == 9
    assert catalog.get("i_s-2").local_bound == 9
    assert catalog.get("ir-0.1-0.05").functional.name == "ir-0.1-0.05"
    with pytest.raises(KeyError):
        catalog.get("nope")


def test_uniform_value_for_is():
    f = catalog.i_s(2).functional
    assert evaluate(f, Correlation.uniform(f.scenario)) == pytest.approx(0.0, abs=1e-12)
