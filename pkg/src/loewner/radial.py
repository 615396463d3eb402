"""Radial Loewner flow and the logarithmic mapping radius.

A hull attached to the unit circle is removed by a disk-preserving map
g with g(0) = 0 and g'(0) > 0; lmr = log g'(0) plays the role capacity
plays in the half-plane.  lmr is computed by transporting the slit to
the half plane with the Cayley map m(z) = i(1-z)/(1+z), welding there,
and reading log g'(0) off the hyperbolic metric at the Cayley image of
the origin: lmr = log(|G'(i)| / Im G(i)) for the welded chain G.

bridge_check compares hcap of the hull's image under -i log z with
2*lmr of the hull itself along a family shrinking to the attachment
point; the ratio tends to 1.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .chordal import map_hull_forward, truncate_from_weld, weld
from .geom import DISK, Hull, PolylineSlit, exp_transform, log_transform, refine
from .capacity import hcap_zipper, _first_chord_angle


@dataclass(frozen=True)
class LmrValue:
    value: float
    err: float

    def __post_init__(self):
        if self.value < 0.0:
            if self.value < -1e-12:
                raise ValueError("mapping radius cannot shrink")
            object.__setattr__(self, "value", 0.0)


class RadialDrivingPath:
    """Sampled driving (t, xi, c): unit-circle attachment point and cumulative lmr."""

    __slots__ = ("t", "xi", "c")

    def __init__(self, t, xi, c):
        t = np.array(t, dtype=float)
        xi = np.array(xi, dtype=complex)
        c = np.array(c, dtype=float)
        if not (t.ndim == xi.ndim == c.ndim == 1) or not (len(t) == len(xi) == len(c)):
            raise ValueError("t, xi, c must be 1-d arrays of equal length")
        if len(t) < 2:
            raise ValueError("need at least two samples")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("t must increase strictly from 0")
        if np.any(np.abs(np.abs(xi) - 1.0) > 1e-12):
            raise ValueError("driving point must stay on the unit circle")
        if c[0] != 0.0 or np.any(np.diff(c) < 0):
            raise ValueError("c must be non-decreasing from 0")
        self.t = t
        self.xi = xi / np.abs(xi)
        self.c = c
        for a in (self.t, self.xi, self.c):
            a.setflags(write=False)


def _rhs(g, xi, cdot):
    return cdot * g * (xi + g) / (xi - g)


def radial_solve_forward(path, z):
    """Flow z through the radial Loewner ODE driven by the sampled path."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError("starting point must lie inside the unit disk")
    if z == 0:
        return 0j
    theta = np.unwrap(np.angle(path.xi))
    g = z
    for k in range(len(path.t) - 1):
        t0, t1 = path.t[k], path.t[k + 1]
        dc = path.c[k + 1] - path.c[k]
        if dc == 0.0:
            continue
        cdot = dc / (t1 - t0)
        th0 = theta[k]
        dth = (theta[k + 1] - th0) / (t1 - t0)
        t = t0
        dt = t1 - t0
        while t < t1:
            dt = min(dt, t1 - t)

            def step(g0, ta, h):
                k1 = _rhs(g0, cmath.exp(1j * (th0 + (ta - t0) * dth)), cdot)
                xm = cmath.exp(1j * (th0 + (ta + 0.5 * h - t0) * dth))
                k2 = _rhs(g0 + 0.5 * h * k1, xm, cdot)
                k3 = _rhs(g0 + 0.5 * h * k2, xm, cdot)
                k4 = _rhs(g0 + h * k3, cmath.exp(1j * (th0 + (ta + h - t0) * dth)), cdot)
                return g0 + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

            xi_now = cmath.exp(1j * (th0 + (t - t0) * dth))
            if abs(xi_now - g) < 1e-6:
                raise ValueError("z swallowed by the flow")
            full = step(g, t, dt)
            half = step(step(g, t, 0.5 * dt), t + 0.5 * dt, 0.5 * dt)
            xi_end = cmath.exp(1j * (th0 + (t + dt - t0) * dth))
            if abs(full - half) <= 1e-9 and abs(xi_end - half) >= 1e-6:
                g = half
                t += dt
                dt *= 2.0
            else:
                dt *= 0.5
                if dt < 1e-14 * max(path.t[-1], 1.0):
                    raise ValueError("z swallowed by the flow")
    return g


_CAYLEY_I = 1j  # image of the disk origin under m(z) = i(1-z)/(1+z)


def _cayley(z):
    return 1j * (1.0 - z) / (1.0 + z)


def _rotated_to_one(slit):
    rot = 1.0 / complex(slit.base)
    return PolylineSlit._trusted(1.0 + 0j, slit.verts * rot, DISK)


def _halfplane_image(slit, max_seg_len):
    """Cayley image of a refined disk slit, as a half-plane polyline."""
    fine = refine(slit, max_seg_len)
    return PolylineSlit(0.0, tuple(_cayley(v) for v in fine.verts))


def _chain_lmr(hull_hp, max_cap_step, max_seg_len):
    """log(|G'(i)|/Im G(i)) for the welded chain removing a half-plane hull."""
    slits = [s for s in hull_hp.slits if not s.is_empty]
    if len(slits) == 1:
        _, cm = weld(refine(slits[0], max_seg_len), max_cap_step=max_cap_step)
        chains = [cm]
    else:
        s1, s2 = slits
        a1, a2 = _first_chord_angle(s1), _first_chord_angle(s2)
        first, other = (s1, s2) if a1 >= a2 else (s2, s1)
        _, cm1 = weld(refine(first, max_seg_len), max_cap_step=max_cap_step)
        side = "right" if abs(other.base - first.base) < 1e-12 else None
        image = map_hull_forward(cm1, refine(other, max_seg_len), base_side=side)
        _, cm2 = weld(image, max_cap_step=max_cap_step)
        chains = [cm1, cm2]
    w, dw = _CAYLEY_I, 1.0 + 0j
    for cm in chains:
        w, d = cm.apply_with_deriv(w)
        dw *= d
    return math.log(abs(dw) / w.imag)


def _lmr_disk_hull(hull):
    """lmr of a disk hull whose slits are already attached at 1."""
    slits = [s for s in hull.slits if not s.is_empty]
    if not slits:
        return LmrValue(0.0, 0.0)
    for s in slits:
        pts = s.points()
        for k in range(len(pts) - 1):
            a, b = pts[k], pts[k + 1]
            ab = b - a
            u = min(max(-(a.real * ab.real + a.imag * ab.imag) / abs(ab) ** 2, 0.0), 1.0)
            if abs(a + u * ab) < 1e-12:
                raise ValueError("slit passes through the origin")
    d = max(_halfplane_image(s, 0.02 * s.diam()).diam() for s in slits)

    def once(scale):
        hp = tuple(_halfplane_image(s, scale * 0.02 * s.diam()) for s in slits)
        hull_hp = Hull(hp, disjoint=hull.disjoint)
        return _chain_lmr(hull_hp, scale * 5e-4 * d * d, scale * 0.02 * d)

    coarse = once(1.0)
    fine = once(0.5)
    return LmrValue(fine, abs(fine - coarse))


def lmr_of_boundary_slit(disk_slit):
    """Logarithmic mapping radius of a slit attached to the unit circle."""
    if disk_slit.chart != DISK:
        raise ValueError("expected a disk slit")
    if disk_slit.is_empty:
        return LmrValue(0.0, 0.0)
    return _lmr_disk_hull(Hull((_rotated_to_one(disk_slit),)))


def bridge_check(disk_hull, t_list):
    """Rows (t, hcap, lmr, ratio) along truncations of a hull attached at 1.

    Each slit is log-transformed to the half plane and truncated to
    half-plane capacity t (per slit); hcap is the capacity of the
    truncated union and lmr is evaluated on the same hull carried back
    to the disk, so both sides see identical geometry.
    """
    ts = [float(t) for t in t_list]
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("capacities must be positive")
    if any(ts[i + 1] >= ts[i] for i in range(len(ts) - 1)):
        raise ValueError("capacities must be strictly decreasing")
    if isinstance(disk_hull, PolylineSlit):
        disk_hull = Hull((disk_hull,))
    slits = [s for s in disk_hull.slits if not s.is_empty]
    if not slits:
        raise ValueError("bridge check needs a nonempty hull")
    for s in slits:
        if abs(complex(s.base) - 1.0) > 1e-12:
            raise ValueError("hull must be attached at 1")
    t_min = ts[-1]
    tables = []
    for s in slits:
        L = log_transform(s)
        d = L.diam()
        # markers must bracket the smallest truncation; the capacity
        # coordinate itself is already accurate at the default step
        seg = min(0.02 * d, 0.25 * math.sqrt(2.0 * t_min))
        path, cm = weld(refine(L, seg), max_cap_step=5e-4 * d * d, keep_markers=True)
        if path.b[-1] < ts[0]:
            raise ValueError("truncation capacity exceeds the slit capacity")
        tables.append((L.base, path, cm))
    rows = []
    for t in ts:
        trunc = [truncate_from_weld(base, path, cm, t) for base, path, cm in tables]
        hc = hcap_zipper(Hull(tuple(trunc), disjoint=disk_hull.disjoint)).value
        back = tuple(exp_transform(s) for s in trunc)
        lm = _lmr_disk_hull(Hull(back, disjoint=disk_hull.disjoint)).value
        rows.append((t, hc, lm, hc / (2.0 * lm)))
    return rows


def write_bridge_csv(rows, path):
    lines = ["t,hcap,lmr,ratio"]
    for r in rows:
        lines.append(",".join("%.17g" % v for v in r))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
