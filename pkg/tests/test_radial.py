import math

import numpy as np
import pytest

from loewner import (
    DISK,
    LmrValue,
    PolylineSlit,
    RadialDrivingPath,
    bridge_check,
    lmr_of_boundary_slit,
    radial_solve_forward,
    write_bridge_csv,
)


def radial_slit(s, rot=1.0):
    # slit [s, 1] on a rotated ray; lmr closed form is log((1+s)^2 / (4s))
    return PolylineSlit(rot, (s * rot,), chart=DISK)


# ------------------------------------------------------------ driving paths


def test_radial_path_validation():
    t = np.array([0.0, 0.1, 0.2])
    xi = np.exp(1j * t)
    c = np.array([0.0, 0.05, 0.1])
    RadialDrivingPath(t, xi, c)
    with pytest.raises(ValueError):
        RadialDrivingPath(t[:2], xi, c)
    with pytest.raises(ValueError):
        RadialDrivingPath(t + 0.1, xi, c)
    with pytest.raises(ValueError):
        RadialDrivingPath(t, 1.5 * xi, c)
    with pytest.raises(ValueError):
        RadialDrivingPath(t, xi, c[::-1].copy())
    with pytest.raises(ValueError):
        RadialDrivingPath(t[:1], xi[:1], c[:1])


def test_radial_path_normalizes_xi():
    t = np.array([0.0, 1.0])
    xi = np.array([1.0 + 1e-13j, 1j * (1.0 - 1e-13)])
    p = RadialDrivingPath(t, xi, np.array([0.0, 0.5]))
    assert np.all(np.abs(np.abs(p.xi) - 1.0) <= 1e-16)


# ------------------------------------------------------------ forward solve


def test_radial_solve_fixed_points_and_domain():
    t = np.linspace(0.0, 0.2, 41)
    p = RadialDrivingPath(t, np.ones_like(t, dtype=complex), t)
    assert radial_solve_forward(p, 0.0) == 0j
    with pytest.raises(ValueError):
        radial_solve_forward(p, 1.0 + 0j)
    with pytest.raises(ValueError):
        radial_solve_forward(p, 1.2j)


def test_radial_solve_derivative_at_origin():
    # g'(0) = e^c; Richardson in z kills the O(z) term
    T = 0.2
    t = np.linspace(0.0, T, 41)
    p = RadialDrivingPath(t, np.ones_like(t, dtype=complex), t)
    r1 = radial_solve_forward(p, -1e-3) / -1e-3
    r2 = radial_solve_forward(p, -2e-3) / -2e-3
    assert abs(2.0 * r1 - r2 - math.exp(T)) <= 1e-5


def test_radial_solve_real_axis_symmetry():
    t = np.linspace(0.0, 0.2, 41)
    p = RadialDrivingPath(t, np.ones_like(t, dtype=complex), t)
    g = radial_solve_forward(p, -0.5)
    assert abs(g.imag) <= 1e-12
    # growth at 1 pushes the far side outward
    assert g.real < -0.5
    assert abs(g) < 1.0


def test_radial_solve_swallows_near_driving_point():
    t = np.linspace(0.0, 0.3, 61)
    p = RadialDrivingPath(t, np.ones_like(t, dtype=complex), t)
    with pytest.raises(ValueError):
        radial_solve_forward(p, 0.999)


def test_radial_solve_rotating_driving_stays_inside():
    t = np.linspace(0.0, 0.25, 51)
    p = RadialDrivingPath(t, np.exp(2j * t), 0.8 * t)
    g = radial_solve_forward(p, 0.3 - 0.2j)
    assert abs(g) < 1.0


# ---------------------------------------------------------------------- lmr


def test_lmr_radial_slit_closed_form():
    for s in (0.5, 0.25):
        got = lmr_of_boundary_slit(radial_slit(s))
        want = math.log((1.0 + s) ** 2 / (4.0 * s))
        assert abs(got.value - want) <= 1e-6
        assert got.err <= 1e-6


def test_lmr_rotation_invariance():
    base = lmr_of_boundary_slit(radial_slit(0.5))
    turned = lmr_of_boundary_slit(radial_slit(0.5, rot=np.exp(0.7j)))
    assert abs(base.value - turned.value) <= 1e-9


def test_lmr_empty_slit():
    got = lmr_of_boundary_slit(PolylineSlit(1.0, (), chart=DISK))
    assert got == LmrValue(0.0, 0.0)


def test_lmr_monotone_in_depth():
    shallow = lmr_of_boundary_slit(radial_slit(0.5))
    deep = lmr_of_boundary_slit(radial_slit(0.4))
    assert deep.value - shallow.value > 3.0 * (deep.err + shallow.err)


def test_lmr_requires_disk_chart():
    with pytest.raises(ValueError):
        lmr_of_boundary_slit(PolylineSlit(0.0, (1j,)))


def test_lmr_rejects_slit_through_origin():
    s = PolylineSlit(1.0, (0.5, -0.5), chart=DISK)
    with pytest.raises(ValueError):
        lmr_of_boundary_slit(s)


def test_lmr_clamps_tiny_negative():
    assert LmrValue(-1e-14, 0.0).value == 0.0
    with pytest.raises(ValueError):
        LmrValue(-1e-9, 0.0)


# ------------------------------------------------------------------- bridge


def test_bridge_check_radial_slit():
    ts = [0.01, 0.003]
    rows = bridge_check(radial_slit(0.55), ts)
    assert [r[0] for r in rows] == ts
    for _, hc, lm, ratio in rows:
        assert hc > 0.0 and lm > 0.0
        assert 0.98 < ratio < 1.02
    assert abs(rows[-1][3] - 1.0) <= 2e-3


def test_bridge_check_validation():
    s = radial_slit(0.55)
    with pytest.raises(ValueError):
        bridge_check(s, [0.003, 0.01])
    with pytest.raises(ValueError):
        bridge_check(s, [0.01, -0.003])
    with pytest.raises(ValueError):
        bridge_check(s, [])
    with pytest.raises(ValueError):
        bridge_check(s, [10.0])  # beyond the slit's capacity
    with pytest.raises(ValueError):
        bridge_check(PolylineSlit(1.0, (), chart=DISK), [0.01])
    off = PolylineSlit(np.exp(0.3j), (0.5 * np.exp(0.3j),), chart=DISK)
    with pytest.raises(ValueError):
        bridge_check(off, [0.01])


def test_write_bridge_csv_round_trip(tmp_path):
    rows = [(0.01, 0.0099, 0.00499, 0.9919), (0.003, 0.00299, 0.0015, 0.99666)]
    out = tmp_path / "bridge.csv"
    write_bridge_csv(rows, out)
    text = out.read_text()
    assert text.splitlines()[0] == "t,hcap,lmr,ratio"
    back = np.loadtxt(out, delimiter=",", skiprows=1)
    assert np.array_equal(back, np.array(rows))
