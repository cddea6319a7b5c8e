import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from bellforge import sdp
from bellforge.sdp import (DUAL_INFEASIBLE, INFEASIBLE, TOO_LARGE, SdpProblem, embed_hermitian,
                           extract_hermitian, solve_sdp)

from oracles import solve_standard_form

seeds = st.integers(0, 2**32 - 1)


def sym(rng, n):
    g = rng.normal(size=(n, n))
    return (g + g.T) / 2


def random_feasible_bounded(rng, dims, m):
    """Strictly feasible primal (b from a PD point) and dual (C = sum y A - Z0 with Z0 PD)."""
    a = [[sym(rng, n) for n in dims] for _ in range(m)]
    x0 = []
    for n in dims:
        g = rng.normal(size=(n, n))
        x0.append(g @ g.T + np.eye(n))
    b = np.array([sum(np.sum(ak * xk) for ak, xk in zip(row, x0)) for row in a])
    y0 = rng.normal(size=m)
    c = []
    for k, n in enumerate(dims):
        g = rng.normal(size=(n, n))
        c.append(sum(y0[i] * a[i][k] for i in range(m)) - (g @ g.T + np.eye(n)))
    return c, a, b


def test_one_by_one():
    # max x s.t. x = 3
    r = solve_sdp(SdpProblem(np.array([[1.0]]), [(np.array([[1.0]]), 3.0)]))
    assert r.ok and r.value == pytest.approx(3.0, abs=1e-8)


def test_trace_constrained_eigenvalue():
    # max <C, X> with tr X = 1 equals the top eigenvalue of C
    c = np.diag([1.0, 5.0, -2.0])
    r = solve_sdp(SdpProblem(c, [(np.eye(3), 1.0)]))
    assert r.ok and r.value == pytest.approx(5.0, abs=1e-7)
    assert r.dual_objective == pytest.approx(5.0, abs=1e-7)
    assert np.linalg.eigvalsh(r.X[0]).min() > -1e-8


@settings(max_examples=25)
@given(seeds, st.integers(1, 3))
def test_random_problems_match_oracle(seed, nblocks):
    rng = np.random.default_rng(seed)
    dims = list(rng.integers(1, 5, size=nblocks))
    m = int(rng.integers(1, 6))
    c, a, b = random_feasible_bounded(rng, dims, m)
    r = solve_sdp(SdpProblem(c, [(row, bi) for row, bi in zip(a, b)]))
    ref = solve_standard_form(c, a, b)
    assert r.ok
    assert r.value == pytest.approx(ref, abs=1e-5 * max(1, abs(ref)))
    assert r.primal_objective == pytest.approx(r.dual_objective, abs=1e-6 * max(1, abs(ref)))


@settings(max_examples=20)
@given(seeds)
def test_sparse_and_dense_agree(seed):
    rng = np.random.default_rng(seed)
    c, a, b = random_feasible_bounded(rng, [4], 5)
    dense = np.stack([row[0] for row in a])
    r1 = solve_sdp(SdpProblem.from_blocks(c, [dense], b))
    r2 = solve_sdp(SdpProblem.from_blocks(c, [sp.csr_matrix(dense.reshape(5, 16))], b))
    assert r1.ok and r2.ok and r1.value == pytest.approx(r2.value, abs=1e-8 * max(1, abs(r1.value)))


def test_redundant_constraints_are_presolved():
    c = np.diag([1.0, 2.0])
    r = solve_sdp(SdpProblem(c, [(np.eye(2), 1.0), (2 * np.eye(2), 2.0)]))
    assert r.ok and r.value == pytest.approx(2.0, abs=1e-7)


def test_inconsistent_equalities():
    r = solve_sdp(SdpProblem(np.eye(2), [(np.eye(2), 1.0), (np.eye(2), 2.0)]))
    assert r.status == INFEASIBLE and not r.ok


def test_psd_infeasible():
    # tr X = -1 has no PSD solution
    r = solve_sdp(SdpProblem(np.eye(2), [(np.eye(2), -1.0)]))
    assert r.status == INFEASIBLE


def test_unbounded():
    # max X_00 + X_11 with only X_01 fixed
    a = np.array([[0.0, 0.5], [0.5, 0.0]])
    r = solve_sdp(SdpProblem(np.eye(2), [(a, 0.0)]))
    assert r.status == DUAL_INFEASIBLE


def test_too_large(monkeypatch):
    monkeypatch.setattr(sdp, "MAX_CONSTRAINTS", 1)
    r = solve_sdp(SdpProblem(np.eye(2), [(np.diag([1.0, 0]), 1.0), (np.diag([0, 1.0]), 1.0)]))
    assert r.status == TOO_LARGE


def test_validation():
    with pytest.raises(ValueError):
        SdpProblem(np.array([[0.0, 1.0], [0.0, 0.0]]), [])
    with pytest.raises(ValueError):
        SdpProblem.from_blocks([np.eye(2)], [np.zeros((1, 3, 3))], [1.0])


@given(seeds)
def test_hermitian_embedding(seed):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = h + h.conj().T
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    x = x + x.conj().T
    assert np.allclose(extract_hermitian(embed_hermitian(h)), h)
    assert np.sum(embed_hermitian(h) * embed_hermitian(x)) == pytest.approx(2 * np.real(np.trace(h @ x)))
    ev = np.sort(np.linalg.eigvalsh(embed_hermitian(h)))
    assert np.allclose(ev, np.sort(np.repeat(np.linalg.eigvalsh(h), 2)))


def test_sdpa_export(tmp_path):
    c = np.diag([1.0, 2.0])
    p = SdpProblem([c, np.array([[3.0]])], [([np.eye(2), np.array([[1.0]])], 1.0)])
    path = tmp_path / "p.dat-s"
    p.to_sdpa(path)
    lines = path.read_text().splitlines()
    assert lines[:4] == ["1", "2", "2 1", "1.0"]
    assert "0 1 2 2 2.0" in lines and "1 2 1 1 1.0" in lines


def _read_sdpa(path):
    rows = path.read_text().splitlines()
    m, nb = int(rows[0]), int(rows[1])
    dims = [int(t) for t in rows[2].split()]
    b = np.array([float(t) for t in rows[3].split()])
    mats = [[np.zeros((n, n)) for n in dims] for _ in range(m + 1)]
    for line in rows[4:]:
        k, blk, i, j, v = line.split()
        mat = mats[int(k)][int(blk) - 1]
        mat[int(i) - 1, int(j) - 1] = mat[int(j) - 1, int(i) - 1] = float(v)
    assert nb == len(dims)
    return mats[0], mats[1:], b


@settings(max_examples=10)
@given(seed=seeds)
def test_sdpa_round_trip_solves_to_same_value(tmp_path_factory, seed):
    rng = np.random.default_rng(seed)
    c, a, b = random_feasible_bounded(rng, [3, 2], 3)
    p = SdpProblem(c, [(row, bi) for row, bi in zip(a, b)])
    path = tmp_path_factory.mktemp("sdpa") / "p.dat-s"
    p.to_sdpa(path)
    c2, a2, b2 = _read_sdpa(path)
    value = solve_sdp(p).value
    assert solve_standard_form(c2, a2, b2) == pytest.approx(value, abs=1e-5 * max(1, abs(value)))


def test_bloch_ball_boundary():
    # max tr(sigma_x X) over unit-trace PSD 2x2 is 1
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    r = solve_sdp(SdpProblem(sx, [(np.eye(2), 1.0)]))
    assert r.ok and r.value == pytest.approx(1.0, abs=1e-8)
