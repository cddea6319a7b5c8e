"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Every test prints one ``CRITERION n: PASS|FAIL`` line straight to the terminal
and lists the failing clauses when there are any.
"""
import math
import time

import numpy as np

from bellforge import catalog
from bellforge.core import evaluate, is_symmetric, is_symmetric_functional
from bellforge.local import local_bound
from bellforge.npa import npa_upper_bound
from bellforge.optimize import ParamOptConfig, SeesawConfig, seesaw, sqs_lower_bound
from bellforge.quantum import (born_correlation, best_state_for_measurements, cglmp_optimal_measurements,
                               cglmp_optimal_state, cglmp_unitary, flat_segment, negativity, strategy_chsh_max,
                               strategy_chsh_sym, strategy_i9_max, strategy_i9_sym, strategy_is, strategy_j42)
from bellforge.symmetry import check_sufficient_conditions

import test_symmetry as sym_suite

R2 = math.sqrt(2)
IS2_QUANTUM = (13 + 4 * math.sqrt(13)) / 3


class Criterion:
    def __init__(self, number: int, limit_s: float):
        self.number, self.limit = number, limit_s
        self.failures: list[str] = []
        self.notes: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok: bool, label: str) -> None:
        if not ok:
            self.failures.append(label)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self, capsys) -> None:
        elapsed = time.perf_counter() - self.start
        self.check(elapsed < self.limit, f"runtime {elapsed:.1f}s >= {self.limit:.0f}s")
        verdict = "PASS" if not self.failures else "FAIL"
        extra = "; ".join(self.notes + [f"failed: {f}" for f in self.failures])
        with capsys.disabled():
            print(f"\nCRITERION {self.number}: {verdict} ({elapsed:.1f}s){' - ' + extra if extra else ''}")
        assert not self.failures, "; ".join(self.failures)


def test_criterion_1_chsh(capsys):
    c = Criterion(1, 5)
    f = catalog.chsh().functional
    c.check(local_bound(f)[0] == 2, "local bound 2")
    for s in (strategy_chsh_max(), strategy_chsh_sym()):
        c.check(abs(evaluate(f, born_correlation(s)) - 2 * R2) <= 1e-12, "explicit strategies at 2 sqrt 2")
    c.check(abs(npa_upper_bound(f, "1") - 2 * R2) <= 1e-6, "NPA level 1")
    rep = seesaw(f, SeesawConfig(local_dim=2, restarts=20, seed=0))
    c.check(rep.best_value >= 2 * R2 - 1e-7, "see-saw reaches 2 sqrt 2")
    c.note(f"see-saw {rep.best_value:.10f}")
    c.finish(capsys)


def test_criterion_2_cglmp(capsys):
    c = Criterion(2, 60)
    worst_small = worst_all = 0.0
    for d in range(2, 20):
        ms = cglmp_optimal_measurements(d)
        top = best_state_for_measurements(catalog.i22dd(d).functional, ms, ms)
        err = abs(catalog.cglmp_value_from_i22dd(d, top.value) - catalog.CGLMP_VALUES[d])
        worst_all = max(worst_all, err)
        if d <= 8:
            worst_small = max(worst_small, err)
    c.check(worst_small <= 1e-5, "d=2..8 within 1e-5")
    c.check(worst_all <= 1e-4, "d<=19 within 1e-4")
    c.note(f"max err d<=8 {worst_small:.1e}, d<=19 {worst_all:.1e}")
    c.finish(capsys)


def test_criterion_3_negativity(capsys):
    c = Criterion(3, 10)
    worst = max(abs(negativity(cglmp_optimal_state(d).state) - ref)
                for d, ref in zip(range(2, 6), (0.5, 0.9836, 1.4561, 1.9203)))
    c.check(worst <= 5e-4, "negativity within 5e-4")
    c.note(f"max err {worst:.1e}")
    c.finish(capsys)


def test_criterion_4_is_tradeoff(capsys):
    c = Criterion(4, 30 * 60)
    alphas = np.linspace(1.5, 3.0, 7)
    for a in alphas:
        c.check(local_bound(catalog.i_s(a).functional)[0] == 2 * a + 5, f"local bound at alpha={a}")
    c.check(abs(evaluate(catalog.i_s(2).functional, born_correlation(strategy_is(2.0))) - IS2_QUANTUM) <= 1e-9,
            "strategy_is(2)")
    c.check(abs(evaluate(catalog.i_s(1.5).functional, born_correlation(strategy_is(1.5))) - 25 / 3) <= 1e-12,
            "strategy_is(1.5)")
    npa2 = npa_upper_bound(catalog.i_s(2).functional, "2")
    c.check(abs(npa2 - IS2_QUANTUM) <= 1e-4, f"NPA level 2 at alpha=2 ({npa2:.6f} vs {IS2_QUANTUM:.6f})")
    for a in (2.0, 2.5, 3.0):
        rep = sqs_lower_bound(catalog.i_s(a).functional, ParamOptConfig(restarts=100, seed=0))
        c.check(max(rep.per_restart) <= 2 * a + 5 + 1e-6, f"SQS at alpha={a} stays below the local bound")
    # qualitative sweep: SQS curve monotone and between the local and quantum curves
    sqs_curve, seesaw_curve = [], []
    for a in alphas:
        f = catalog.i_s(a).functional
        sqs_curve.append(sqs_lower_bound(f, ParamOptConfig(restarts=10, seed=0)).best_value)
        seesaw_curve.append(seesaw(f, SeesawConfig(restarts=10, seed=0)).best_value)
    c.check(all(np.diff(sqs_curve) >= -1e-6), "SQS curve monotone in alpha")
    c.check(all(2 * a + 5 - 1e-9 <= s <= q + 1e-6 for a, s, q in zip(alphas, sqs_curve, seesaw_curve)),
            "local <= SQS <= quantum along the sweep")
    c.note(f"NPA-2 {npa2:.6f}")
    c.finish(capsys)


def test_criterion_5_j42(capsys):
    c = Criterion(5, 20 * 60)
    f = catalog.j42().functional
    s = strategy_j42()
    c.check(is_symmetric_functional(f), "functional symmetric")
    c.check(abs(evaluate(f, born_correlation(s)) - 0.6012) <= 1e-3, "strategy value 0.6012")
    c.check(is_symmetric(born_correlation(s), 1e-3), "symmetric correlation")
    c.check(check_sufficient_conditions(s, "conjugation") and not check_sufficient_conditions(s, "identity"),
            "conjugation-kind true, identity-kind false")
    rep = seesaw(f, SeesawConfig(local_dim=2, restarts=20, seed=0))
    c.check(rep.best_value >= 0.6712, "see-saw >= 0.6712")
    npa2 = npa_upper_bound(f, "2")
    c.check(abs(npa2 - 0.6722) <= 5e-3, f"NPA level 2 within 5e-3 of 0.6722 (got {npa2:.5f})")
    sqs = sqs_lower_bound(f, ParamOptConfig(local_dim=2, restarts=200, seed=0))
    c.check(abs(sqs.best_value - 0.5682) <= 1e-3, f"SQS best 0.5682 (got {sqs.best_value:.5f})")
    c.check(max(sqs.per_restart) <= 0.60, "SQS never exceeds 0.60")
    c.note(f"see-saw {rep.best_value:.5f}, SQS {sqs.best_value:.5f}")
    c.finish(capsys)


def test_criterion_6_i9(capsys):
    c = Criterion(6, 30 * 60)
    f = catalog.i9().functional
    c.check(abs(evaluate(f, born_correlation(strategy_i9_max())) - (12 * R2 + 3)) <= 1e-9, "strategy_i9_max")
    sym_value = 6 * math.sqrt(3) + 9
    c.check(abs(evaluate(f, born_correlation(strategy_i9_sym())) - sym_value) <= 1e-9, "strategy_i9_sym")
    rep = sqs_lower_bound(f, ParamOptConfig(local_dim=2, restarts=100, seed=0))
    c.check(max(rep.per_restart) <= sym_value + 1e-4, "SQS never exceeds 6 sqrt 3 + 9")
    c.note(f"SQS best {rep.best_value:.6f}")
    c.finish(capsys)


def test_criterion_7_property_suites(capsys):
    c = Criterion(7, 60)
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(200):
        s = sym_suite.random_symmetric_correlation_strategy(rng)
        t = sym_suite.symmetrize_pure(s)
        bad += not (np.abs(born_correlation(t).table - born_correlation(s).table).max() <= 1e-10
                    and check_sufficient_conditions(t, "identity"))
        m = sym_suite.random_mixed_symmetric_strategy(rng)
        t = sym_suite.symmetrize_mixed(m)
        bad += not (np.abs(born_correlation(t).table - born_correlation(m).table).max() <= 1e-10
                    and check_sufficient_conditions(t, "identity"))
        p = born_correlation(sym_suite.random_mirror_strategy(rng)).table
        bad += not np.abs(p - p.transpose(1, 0, 3, 2)).max() <= 1e-10
    c.check(bad == 0, f"symmetrisation/mirror cases ({bad} bad)")
    none_fail = rot_fail = 0
    for _ in range(500):
        a = sym_suite.unit(rng, 3)
        while abs(np.linalg.det(a)) < 1e-3:
            a = sym_suite.unit(rng, 3)
        none_fail += sym_suite.find_aligning_rotation(a, a @ sym_suite.MIRROR.T) is not None
        b = sym_suite.unit(rng, int(rng.integers(1, 6)))
        rot = sym_suite.random_rotation(rng)
        r = sym_suite.find_aligning_rotation(b, b @ rot.T)
        rot_fail += r is None or np.abs(b @ r.T - b @ rot.T).max() > 1e-9
    c.check(none_fail == 0 and rot_fail == 0, "rotation suites")
    worst = max(np.abs(cglmp_unitary(d).conj().T @ cglmp_unitary(d) - np.eye(d)).max() for d in range(2, 20))
    c.check(worst <= 1e-10, "W unitarity")
    c.finish(capsys)


def test_criterion_8_asymmetric_chsh(capsys):
    c = Criterion(8, 10)
    bound = npa_upper_bound(catalog.chsh_asymmetric().functional, "1ab", symmetric=True)
    c.check(bound <= 2 + 1e-6, "twirled NPA 1+AB <= 2")
    f = catalog.chsh().functional
    p = born_correlation(strategy_chsh_max())
    vals = [evaluate(f, flat_segment(f, p, t)) for t in (0, 0.25, 0.5, 0.75, 1)]
    c.check(max(vals) - min(vals) <= 1e-12, "flat segment constant")
    c.note(f"twirled bound {bound:.9f}")
    c.finish(capsys)


def test_criterion_9_octagon_family(capsys):
    c = Criterion(9, 20 * 60)
    pts = np.linspace(-0.5, 0.5, 21)
    grid = [(a, b) for a in pts for b in pts if catalog.in_octagon(a, b)]
    p_t = born_correlation(strategy_chsh_max())
    worst_gap, worst_npa = np.inf, 0.0
    for r0, r1 in grid:
        f = catalog.i_r0r1(r0, r1).functional
        v = evaluate(f, p_t)
        worst_gap = min(worst_gap, v - catalog.local_bound_g(r0, r1))
        worst_npa = max(worst_npa, abs(npa_upper_bound(f, "2") - v))
    c.check(worst_gap > 0, "P_T violates local_bound_g everywhere")
    c.check(worst_npa <= 1e-4, "NPA level 2 matches the P_T value")
    c.note(f"{len(grid)} interior points, min violation {worst_gap:.3e}, max NPA gap {worst_npa:.1e}")
    c.finish(capsys)
