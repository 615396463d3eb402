"""Acceptance checks for the quantitative claims the library makes.

Each test covers one numbered criterion and prints a PASS line on
success; tolerances are pinned here and must not be loosened to make a
failing build green.
"""

import math
import time

import numpy as np

from conftest import random_simple_slit
from loewner import (
    DISK,
    Hull,
    PolylineSlit,
    SegmentSpec,
    alpha_mu_lambda_check,
    branch_sweep,
    bridge_check,
    counterexample_capacity_table,
    disjoint_sum_check,
    hcap_mc,
    hcap_zipper,
    kinked_reparam_demo,
    lmr_of_boundary_slit,
    map_hull_forward,
    refine,
    scale,
    segment_capacity,
    trace,
    weld,
)


def test_criterion_01_segment_capacity():
    assert segment_capacity(math.pi / 2, 1.0) == 0.5
    z = hcap_zipper(PolylineSlit(0.0, (1j,)))
    assert abs(z.value - 0.5) <= 1e-3 * 0.5

    want = 1.0 / (2.0 * math.sqrt(3.0))
    got = segment_capacity(math.pi / 4, 1.0)
    assert abs(got - want) <= 1e-12 * want
    tip = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    z4 = hcap_zipper(PolylineSlit(0.0, (tip,)))
    assert abs(z4.value - want) <= 1e-3 * want
    print("PASS: criterion 1 (segment capacity, closed form and zipper)")


def test_criterion_02_capacity_axioms():
    t0 = time.monotonic()

    # scaling by c**2, via the welded capacity directly
    s = random_simple_slit(np.random.default_rng(1), n_verts=8)
    base_cap = weld(s)[0].b[-1]
    for c in (0.5, 2.0, 3.0):
        sc = scale(Hull((s,)), c).slits[0]
        got = weld(sc)[0].b[-1]
        assert abs(got - c * c * base_cap) <= 1e-5 * c * c * base_cap

    # fixed corpus of 10 disjoint pairs: strict subadditivity, strict
    # pushforward monotonicity (computed on the mapped hull, not by
    # algebra on the union), and the chain rule
    rng = np.random.default_rng(42)
    for k in range(10):
        A = random_simple_slit(rng, base=-3.0, n_verts=6)
        B = random_simple_slit(rng, base=3.0, n_verts=6)
        eA = hcap_zipper(A)
        eB = hcap_zipper(B)
        eAB = hcap_zipper(Hull((A, B)))
        img = map_hull_forward(weld(A)[1], refine(B, 0.02 * B.diam()))
        eI = hcap_zipper(img)

        sub_margin = eA.value + eB.value - eAB.value
        assert sub_margin > 3.0 * (eA.err + eB.err + eAB.err), f"pair {k}"

        mono_margin = eB.value - eI.value
        assert mono_margin > 3.0 * (eB.err + eI.err), f"pair {k}"

        chain_resid = abs(eAB.value - eA.value - eI.value)
        assert chain_resid <= eAB.err + eA.err + eI.err, f"pair {k}"

    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    print(f"PASS: criterion 2 (capacity axioms on 10 pairs, {elapsed:.1f}s)")


def test_criterion_03_welding_round_trip():
    t0 = time.monotonic()
    rng = np.random.default_rng(2025)
    for k in range(20):
        n_verts = int(rng.integers(4, 13))
        size = float(rng.uniform(0.6, 1.3))
        s = random_simple_slit(rng, n_verts=n_verts, size=size)
        p1, _ = weld(s)
        assert p1.b[-1] <= 1.0, f"slit {k} misses the capacity bound"
        back = trace(p1)
        assert abs(back.tip - s.tip) <= max(1e-3, 0.01 * s.diam()), f"slit {k}"
        p2, _ = weld(back)
        u2 = np.interp(p1.b, p2.b, p2.U)
        assert np.max(np.abs(u2 - p1.U)) <= 1e-3, f"slit {k}"
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(f"PASS: criterion 3 (20 welding round trips, {elapsed:.1f}s)")


def test_criterion_04_monte_carlo():
    s = PolylineSlit(0.0, (1j,))
    est = hcap_mc(s, 10**6, seed=2026, threads=2)
    assert est.err <= 0.01
    assert abs(est.value - 0.5) <= 3.0 * est.err
    again = hcap_mc(s, 10**6, seed=2026, threads=2)
    assert again.to_json() == est.to_json()
    print(f"PASS: criterion 4 (monte carlo {est.value:.5f} +- {est.err:.5f})")


def test_criterion_05_branch_point():
    equal = branch_sweep([(math.pi / 3, math.pi / 3)], 1.0, 1.0)
    assert abs(equal.rows[0][4] - 1.0) <= 1e-3

    pairs = [
        (0.4 * math.pi, 0.6 * math.pi),
        (0.25 * math.pi, 0.75 * math.pi),
        (0.05 * math.pi, 0.95 * math.pi),
    ]
    res = branch_sweep(pairs, 1.0, 1.0)
    cds = [r[4] for r in res.rows]
    assert cds[0] < cds[1] < cds[2]
    assert 1.8 <= cds[2] < 2.0

    degenerate = branch_sweep([(0.3 * math.pi, 0.7 * math.pi)], 0.0, 1.0)
    assert degenerate.rows[0][4] == 1.0
    print(f"PASS: criterion 5 (branch point, widest rate {cds[2]:.4f})")


def test_criterion_06_disjoint_additivity():
    s1 = SegmentSpec(math.pi / 2, base=-5.0, capacity=1.0)
    s2 = SegmentSpec(math.pi / 2, base=5.0, capacity=0.5)
    tab = disjoint_sum_check(s1, s2, [1e-2, 1e-3])
    t, c, ratio = tab.rows[-1]
    assert t == 1e-3
    assert abs(ratio - 1.5) <= 0.02 * 1.5
    print(f"PASS: criterion 6 (disjoint additivity, c(t)/t = {ratio:.4f})")


def test_criterion_07_counterexample():
    for eps, levels in ((0.0, 10), (0.02, 8)):
        tab = counterexample_capacity_table(eps, n_levels=levels)
        resid = tab.report["selfsim_residuals"]
        assert len(resid) >= 4
        assert max(resid) <= 0.01, f"eps={eps}"
        assert tab.report["quotient"] < 1.0, f"eps={eps}"
        assert tab.report["cT_over_T"] > 1.0, f"eps={eps}"
    print("PASS: criterion 7 (capacity is nonlinear on the self-similar hull)")


def test_criterion_08_bridge():
    radial = PolylineSlit(1.0 + 0.0j, (0.55 + 0.0j,), chart=DISK)
    tilted_tip = 1.0 - 0.45 * complex(math.cos(0.35), math.sin(0.35))
    tilted = PolylineSlit(1.0 + 0.0j, (tilted_tip,), chart=DISK)
    v_mid = 1.0 - 0.28 * complex(math.cos(-0.25), math.sin(-0.25))
    v_tip = v_mid - 0.26 * complex(math.cos(0.55), math.sin(0.55))
    vee = PolylineSlit(1.0 + 0.0j, (v_mid, v_tip), chart=DISK)

    for name, hull in (("radial", radial), ("tilted", tilted), ("v", vee)):
        rows = bridge_check(hull, [1e-2, 3e-3, 1e-3])
        ratio = rows[-1][3]
        assert 0.98 <= ratio <= 1.02, name

    oracle = lmr_of_boundary_slit(PolylineSlit(1.0, (0.5,), chart=DISK))
    assert abs(oracle.value - math.log(9.0 / 8.0)) <= 1e-6
    print("PASS: criterion 8 (bridge ratios and the radial lmr oracle)")


def test_criterion_09_lambda_alpha_mu():
    s1 = PolylineSlit(0.0, (0.9j,))
    s2 = PolylineSlit(1.0, (1.0 + 1j,))
    rows, report, checks = alpha_mu_lambda_check(s1, s2, 0.0, [1e-2, 3e-3, 1e-3])
    smallest = rows[-1][1]
    assert abs(smallest - 0.5) <= 0.03 * 0.5
    assert checks["lambda_alpha_mu"]
    print(f"PASS: criterion 9 (rate identity, ratio {smallest:.4f} at delta 1e-3)")


def test_criterion_10_joint_parametrization():
    s1 = PolylineSlit(-10.0, (-10.0 + 1.2j,))
    s2 = PolylineSlit(10.0, (10.0 + 1.5j,))
    rows, report, checks = kinked_reparam_demo(s1, s2, 0.1, n_grid=24)
    assert report["total_dev"] <= 1e-4
    assert report["lambda_sum_dev"] <= 2e-3
    assert abs(report["jump"] - 0.2) <= 0.2 * 0.2
    assert report["slope_dev"] <= 1e-3
    print(f"PASS: criterion 10 (joint parametrization, jump {report['jump']:.4f})")
