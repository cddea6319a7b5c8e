import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellforge import catalog
from bellforge.core import evaluate, is_symmetric
from bellforge.local import local_bound
from bellforge.npa import npa_upper_bound
from bellforge.optimize import (ParamOptConfig, SeesawConfig, dichotomic_observable_update, rank_compositions,
                                random_unitary, seesaw, sqs_lower_bound, su_parameter_count, su_unitary, sweep)
from bellforge.quantum import Measurement, born_correlation
from bellforge.symmetry import is_sqs

R2 = math.sqrt(2)
seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(2, 5))
def test_su_unitary_is_special_unitary(seed, d):
    p = np.random.default_rng(seed).uniform(-4, 4, size=(3, su_parameter_count(d)))
    u = su_unitary(p, d)
    for v in u:
        assert np.abs(v.conj().T @ v - np.eye(d)).max() < 1e-12
        assert abs(np.linalg.det(v) - 1) < 1e-10


def test_su_parameter_checks():
    assert su_parameter_count(3) == 8
    assert np.allclose(su_unitary(np.zeros(3), 2), np.eye(2))
    with pytest.raises(ValueError):
        su_unitary(np.zeros(4), 2)


def test_su_chart_reaches_random_unitaries():
    # the chart covers SU(2) up to a global phase: fit a Haar sample by least squares
    from scipy.optimize import least_squares

    rng = np.random.default_rng(5)
    target = random_unitary(2, rng)
    target = target / np.sqrt(np.linalg.det(target))

    def resid(p):
        diff = su_unitary(p, 2) - target
        return np.concatenate([diff.real.ravel(), diff.imag.ravel()])

    best = min((least_squares(resid, rng.uniform(-3, 3, 3)) for _ in range(10)), key=lambda r: r.cost)
    assert best.cost < 1e-16 or min(
        np.abs(su_unitary(best.x, 2) - s * target).max() for s in (1, -1)) < 1e-6


def test_rank_compositions():
    assert rank_compositions(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert all(sum(c) == 3 for c in rank_compositions(3, 3)) and len(rank_compositions(3, 3)) == 10


@given(seeds, st.integers(2, 4))
def test_dichotomic_update_is_optimal(seed, d):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    f = g + g.conj().T
    m = dichotomic_observable_update(f)
    value = np.real(np.trace(f @ m.observable()))
    assert value == pytest.approx(np.abs(np.linalg.eigvalsh(f)).sum(), abs=1e-10)
    # brute-force envelope over random PVMs of every rank
    for _ in range(50):
        u = random_unitary(d, rng)
        r = int(rng.integers(0, d + 1))
        other = Measurement.from_basis(u, [r, d - r])
        assert np.real(np.trace(f @ other.observable())) <= value + 1e-10


def test_dichotomic_zero_operator():
    m = dichotomic_observable_update(np.zeros((2, 2)))
    assert np.allclose(m.effects[0], np.eye(2)) and np.allclose(m.effects[1], 0)


def test_seesaw_chsh_reaches_tsirelson():
    rep = seesaw(catalog.chsh().functional, SeesawConfig(restarts=5, seed=1))
    assert rep.best_value >= 2 * R2 - 1e-7
    assert rep.best_value == pytest.approx(max(rep.per_restart), abs=1e-9)
    assert rep.best_value == pytest.approx(evaluate(catalog.chsh().functional, born_correlation(rep.best_strategy)))


def test_seesaw_history_is_monotone():
    rep = seesaw(catalog.i_s(2).functional, SeesawConfig(restarts=3, seed=4))
    hist = np.asarray(rep.details["history"])
    assert np.all(np.diff(hist) >= -1e-9)


def test_seesaw_is_deterministic():
    f = catalog.i3322c().functional
    a = seesaw(f, SeesawConfig(restarts=3, seed=9, max_iters=50))
    b = seesaw(f, SeesawConfig(restarts=3, seed=9, max_iters=50))
    assert a.per_restart == b.per_restart


@pytest.mark.parametrize("entry", [catalog.chsh(), catalog.i3322c(), catalog.i_s(2)], ids=lambda e: e.name)
def test_seesaw_below_npa(entry):
    rep = seesaw(entry.functional, SeesawConfig(restarts=3, seed=0, max_iters=100))
    assert rep.best_value <= npa_upper_bound(entry.functional, "1ab") + 1e-6
    assert rep.best_value >= local_bound(entry.functional)[0] - 1e-9


def test_seesaw_qutrit_cglmp():
    rep = seesaw(catalog.i22dd(3).functional, SeesawConfig(local_dim=3, restarts=5, seed=2))
    assert catalog.cglmp_value_from_i22dd(3, rep.best_value) == pytest.approx(2.91485425, abs=1e-5)


def test_seesaw_shared_povm_mode():
    rep = seesaw(catalog.chsh().functional, SeesawConfig(restarts=5, seed=0, mode="shared_povm"))
    assert rep.mode == "shared_povm" and rep.best_value > 2.0


def test_seesaw_symmetric_correlation_mode_keeps_symmetry():
    rep = seesaw(catalog.chsh().functional, SeesawConfig(restarts=2, seed=0, max_iters=15,
                                                          mode="symmetric_correlation"))
    assert is_symmetric(born_correlation(rep.best_strategy), 1e-6)
    assert rep.best_value <= 2 * R2 + 1e-6


def test_config_validation():
    with pytest.raises(ValueError):
        SeesawConfig(mode="x")
    with pytest.raises(ValueError):
        ParamOptConfig(subspace="x")
    with pytest.raises(ValueError):
        ParamOptConfig(local_dim=2, rank_partitions=((1, 2),))


@pytest.mark.parametrize("entry, target", [(catalog.chsh(), 2 * R2), (catalog.i3322c(), 5.0)], ids=["chsh", "i3322c"])
def test_sqs_reaches_known_symmetric_optima(entry, target):
    rep = sqs_lower_bound(entry.functional, ParamOptConfig(restarts=4, seed=0))
    assert rep.best_value == pytest.approx(target, abs=1e-6)
    assert is_sqs(rep.best_strategy)
    assert rep.details["subspace"] in ("symmetric", "antisymmetric")


def test_sqs_respects_rank_partitions():
    cfg = ParamOptConfig(restarts=2, seed=3, rank_partitions=((1, 1), (1, 1)), subspace="symmetric")
    rep = sqs_lower_bound(catalog.chsh().functional, cfg)
    assert rep.details["rank_partitions"] == [[1, 1], [1, 1]]
    assert rep.details["subspace"] == "symmetric"


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 1000))
def test_sqs_never_beats_npa_symmetric_bound(seed):
    f = catalog.i_s(2).functional
    rep = sqs_lower_bound(f, ParamOptConfig(restarts=2, seed=seed, max_evals=800))
    assert is_sqs(rep.best_strategy)
    assert rep.best_value <= npa_upper_bound(f, "1ab", symmetric=True) + 1e-6


def test_sqs_warns_on_asymmetric_functional():
    with pytest.warns(UserWarning):
        sqs_lower_bound(catalog.chsh_asymmetric().functional, ParamOptConfig(restarts=1, max_evals=200))


def test_sweep_rows():
    rows = sweep(lambda a: catalog.i_s(a).functional, [1.5, 3.0], SeesawConfig(restarts=2, max_iters=50),
                 ParamOptConfig(restarts=2, max_evals=500))
    assert [r[0] for r in rows] == [1.5, 3.0]
    for alpha, local, sqs, quantum in rows:
        assert local == 2 * alpha + 5
        assert local - 1e-9 <= sqs <= quantum + 1e-6
