import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewner import (
    DISK,
    HALF_PLANE,
    Hull,
    PolylineSlit,
    exp_transform,
    log_transform,
    read_polyline,
    reflect,
    reflect_slit,
    refine,
    scale,
    translate,
    write_polyline,
)


def test_slit_basic_invariants():
    s = PolylineSlit(0.0, (0.2 + 0.5j, 1j))
    assert not s.is_empty
    assert s.tip == 1j
    assert s.points()[0] == 0.0
    e = PolylineSlit(1.5, ())
    assert e.is_empty
    assert e.tip == 1.5 + 0j


def test_slit_rejects_bad_geometry():
    with pytest.raises(ValueError):
        PolylineSlit(0.0, (0.5 - 0.1j,))  # below the axis
    with pytest.raises(ValueError):
        PolylineSlit(0.0, (0.0 + 0j,))  # first vertex equals base
    with pytest.raises(ValueError):
        PolylineSlit(0.0, (1j, 1j))  # repeated vertex
    # bowtie self-intersection
    with pytest.raises(ValueError):
        PolylineSlit(0.0, (1 + 1j, 1 + 2j, -1 + 1.5j, 2 + 1.5j))
    with pytest.raises(ValueError):
        PolylineSlit(0.5 + 0.1j, (1j,), chart=DISK)  # disk base off the circle
    with pytest.raises(ValueError):
        PolylineSlit(1.0, (1.5 + 0.5j,), chart=DISK)  # disk vertex outside


def test_disk_base_normalized():
    base = (1.0 + 3e-15) * np.exp(0.3j)
    s = PolylineSlit(base, (0.8 * np.exp(0.3j),), chart=DISK)
    assert abs(abs(s.base) - 1.0) <= 1e-14


def test_hull_disjointness():
    a = PolylineSlit(-1.0, (-1 + 1j,))
    b = PolylineSlit(1.0, (1 + 1j,))
    Hull((a, b))
    crossing = PolylineSlit(1.0, (-2 + 0.5j,))
    with pytest.raises(ValueError):
        Hull((a, crossing))
    # shared base point is allowed
    Hull((PolylineSlit(0.0, (1j,)), PolylineSlit(0.0, (1 + 1j,))))


def test_refine_vertical_quarters():
    s = PolylineSlit(0.0, (1j,))
    r = refine(s, 0.25)
    assert len(r.verts) == 4
    assert r.tip == s.tip
    assert np.allclose(np.diff(r.points()), 0.25j)


def test_refine_identity_when_fine():
    s = PolylineSlit(0.0, (0.1j, 0.1 + 0.2j))
    r = refine(s, 1.0)
    assert len(r.verts) == len(s.verts)
    assert np.allclose(np.asarray(r.verts), np.asarray(s.verts), rtol=0, atol=1e-15)


def test_refine_zigzag_count():
    # segment lengths 0.35 and 0.22: ceil(3.5) + ceil(2.2) = 7 pieces
    s = PolylineSlit(0.0, (0.35j, 0.35j + 0.22))
    r = refine(s, 0.1)
    assert len(r.verts) == 7
    assert r.tip == s.tip


def test_refine_idempotent():
    s = PolylineSlit(0.0, (0.3 + 0.7j, 1.2j))
    r1 = refine(s, 0.13)
    r2 = refine(r1, 0.13)
    assert len(r1.verts) == len(r2.verts)
    assert np.allclose(np.asarray(r1.verts), np.asarray(r2.verts), rtol=0, atol=1e-15)


def test_affine_maps():
    h = Hull((PolylineSlit(0.0, (1j,)),))
    assert scale(h, 2.0).slits[0].tip == 2j
    assert translate(h, 3.0).slits[0].base == 3.0
    g = Hull((PolylineSlit(1.0, (1 + 1j,)),))
    assert reflect(g).slits[0].tip == -1 + 1j
    with pytest.raises(ValueError):
        scale(Hull((PolylineSlit(1.0, (0.5,), chart=DISK),)), 2.0)


def test_scale_composes():
    h = Hull((PolylineSlit(0.5, (0.5 + 1j, 1 + 2j)),))
    ab = scale(scale(h, 0.7), 3.0)
    once = scale(h, 2.1)
    assert np.allclose(np.asarray(ab.slits[0].verts), np.asarray(once.slits[0].verts))
    assert ab.slits[0].base == pytest.approx(once.slits[0].base)


def test_reflect_involution():
    s = PolylineSlit(0.3, (0.5 + 1j, -0.2 + 1.5j))
    back = reflect_slit(reflect_slit(s))
    assert np.allclose(np.asarray(back.verts), np.asarray(s.verts))
    assert back.base == s.base


def test_log_transform_radial_example():
    s = PolylineSlit(1.0, (0.9,), chart=DISK)
    L = log_transform(s)
    assert L.chart == HALF_PLANE
    assert L.base == pytest.approx(0.0, abs=1e-14)
    assert L.verts[0] == pytest.approx(-1j * np.log(0.9), abs=1e-14)


def test_log_exp_round_trip():
    s = PolylineSlit(np.exp(0.4j), (0.9 * np.exp(0.5j), 0.8 * np.exp(0.3j)), chart=DISK)
    back = exp_transform(log_transform(s))
    assert back.chart == DISK
    assert abs(back.base - s.base) <= 1e-12
    assert np.allclose(np.asarray(back.verts), np.asarray(s.verts), atol=1e-12)


@given(
    st.floats(min_value=-1.0, max_value=1.0),
    st.lists(
        st.tuples(
            st.floats(min_value=-0.5, max_value=0.5),
            st.floats(min_value=0.05, max_value=1.5),
        ),
        min_size=1,
        max_size=6,
    ),
)
def test_refine_preserves_tip_and_length(base, offsets):
    # build a staircase going strictly upward so it is always simple
    verts = []
    z = complex(base, 0.0)
    y = 0.0
    for dx, dy in offsets:
        y += dy
        z = complex(z.real + dx, y)
        verts.append(z)
    s = PolylineSlit(base, tuple(verts))
    r = refine(s, 0.07)
    assert r.tip == pytest.approx(s.tip, abs=1e-12)
    assert r.arclength() == pytest.approx(s.arclength(), rel=1e-12)
    assert max(abs(np.diff(r.points()))) <= 0.07 * (1 + 1e-12)


def test_polyline_file_round_trip(tmp_path):
    s = PolylineSlit(0.25, (0.3 + 0.8j, -0.1 + 1.4j))
    p = tmp_path / "slit.csv"
    write_polyline(s, str(p))
    head = p.read_text().splitlines()[0]
    assert head.startswith("chart=half-plane base=")
    back = read_polyline(str(p))
    assert back.base == s.base
    assert np.array_equal(np.asarray(back.verts), np.asarray(s.verts))


def test_polyline_file_disk_round_trip(tmp_path):
    s = PolylineSlit(np.exp(0.2j), (0.7 * np.exp(0.2j),), chart=DISK)
    p = tmp_path / "disk.csv"
    write_polyline(s, str(p))
    back = read_polyline(str(p))
    assert back.chart == DISK
    assert abs(back.base - s.base) <= 1e-15
