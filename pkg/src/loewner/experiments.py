"""Reproduction drivers for the headline quantitative claims.

Five experiments built on the capacity and welding layers:

* branch_sweep: growth rate of a two-slit branch point against its
  max/sum bounds as the opening angles widen;
* disjoint_sum_check: additivity of growth rates for separated slits;
* the self-similar counterexample: a dyadic tower of square blobs whose
  capacity parametrization is provably non-linear;
* joint_parametrization: recovering the second slit's capacity budget
  when the total is pinned to s, with per-slit rates lambda;
* alpha_mu_lambda_check: the rate identity lambda = alpha^2 mu, checked
  through two independent routes (probe capacities vs boundary
  derivative of the welded chain).

Each driver returns plain rows plus a `checks` mapping of named bounds
to pass/fail, so callers can render CSV and a JSON verdict without
re-deriving anything.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .chordal import (
    ComposedMap,
    ElementaryMap,
    map_hull_forward,
    truncate_from_weld,
    weld,
)
from .capacity import SegmentSpec, hcap_union_two_slits, hcap_zipper
from .geom import HALF_PLANE, Hull, PolylineSlit, refine, reflect_slit


def _csv(path, header, rows, fmt="%.12g"):
    lines = [header]
    for r in rows:
        lines.append(",".join(fmt % v for v in r))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple  # (alpha1, alpha2, b1, b2, cdot0, lower, upper)
    errs: tuple
    checks: dict = field(default_factory=dict)

    def write_csv(self, path):
        _csv(path, "alpha1,alpha2,b1,b2,cdot0,lower,upper", self.rows)


@dataclass(frozen=True)
class CapacityTable:
    rows: tuple  # (t, c, c/t)
    report: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def write_csv(self, path):
        _csv(path, "t,c,ratio", self.rows)


def branch_sweep(angle_pairs, b1, b2):
    """Growth rate at a two-slit branch point for each angle pair.

    The rate at time zero equals the capacity of the union of the two
    straight rate-slits, which is what each row evaluates.
    """
    if b1 < 0 or b2 < 0:
        raise ValueError("rates must be nonnegative")
    rows = []
    errs = []
    for a1, a2 in angle_pairs:
        if not (0.0 < a1 <= a2 < math.pi):
            raise ValueError("need 0 < alpha1 <= alpha2 < pi")
        est = hcap_union_two_slits(
            SegmentSpec(a1, 0.0, capacity=b1), SegmentSpec(a2, 0.0, capacity=b2)
        )
        rows.append((a1, a2, b1, b2, est.value, max(b1, b2), b1 + b2))
        errs.append(est.err)
    lower_ok = all(r[4] >= r[5] - 3.0 * e for r, e in zip(rows, errs))
    upper_ok = all(
        r[4] < r[6] - 3.0 * e for r, e in zip(rows, errs) if r[2] > 0 and r[3] > 0 and r[0] != r[1]
    )
    checks = {"lower_bound": lower_ok, "upper_bound": upper_ok}
    a1s = [r[0] for r in rows]
    a2s = [r[1] for r in rows]
    if len(rows) > 1 and all(x >= y for x, y in zip(a1s, a1s[1:])) and all(
        x <= y for x, y in zip(a2s, a2s[1:])
    ):
        # nested widening sweep: the rate must increase
        cds = [r[4] for r in rows]
        checks["monotone_cdot0"] = all(x < y for x, y in zip(cds, cds[1:]))
    return SweepResult(tuple(rows), tuple(errs), checks)


def disjoint_sum_check(s1, s2, t_list):
    """Table of c(t)/t for two separated slits grown at rates b1, b2."""
    if not isinstance(s1, SegmentSpec) or not isinstance(s2, SegmentSpec):
        raise TypeError("expected SegmentSpec")
    if s1.base == s2.base:
        raise ValueError("bases must be distinct")
    ts = [float(t) for t in t_list]
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("times must be positive")
    if any(ts[i + 1] >= ts[i] for i in range(len(ts) - 1)):
        raise ValueError("times must be strictly decreasing")
    if s1.capacity > 0 and s2.capacity > 0:
        Hull((s1.to_slit(), s2.to_slit()))  # raises if the full slits intersect
    rows = []
    for t in ts:
        c = hcap_union_two_slits(
            s1.truncated(s1.capacity * t), s2.truncated(s2.capacity * t)
        ).value
        rows.append((t, c, c / t))
    target = s1.capacity + s2.capacity
    checks = {"additivity": bool(abs(rows[-1][2] - target) <= 0.02 * target)}
    return CapacityTable(tuple(rows), report={"target": target}, checks=checks)


def build_selfsimilar_slit(eps, n_levels):
    """The self-similar slit plus its mirror image.

    One generator copy connects 3/4 i + eps/2 to i + eps, 1/2 + i,
    1/2 + 3/2 i and 3/2 i + eps; the slit is the union of the copies
    scaled by 2^-n, attached to 0 through the deepest one.  At eps = 0
    the two slits overlap along the imaginary axis, so the hull skips
    the disjointness check there.
    """
    if not 0.0 <= eps < 0.5:
        raise ValueError("eps must lie in [0, 1/2)")
    if int(n_levels) != n_levels or n_levels < 1:
        raise ValueError("n_levels must be a positive integer")
    verts = []
    for n in range(int(n_levels) - 1, -1, -1):
        s = 2.0 ** (-n)
        if not verts:
            verts.append(s * (0.5 * eps + 0.75j))
        verts += [s * (eps + 1j), s * (0.5 + 1j), s * (0.5 + 1.5j), s * (eps + 1.5j)]
    gamma = PolylineSlit(0.0, tuple(verts), chart=HALF_PLANE)
    return Hull((gamma, reflect_slit(gamma)), disjoint=eps > 0)


def _tower_pieces(n_levels):
    """eps = 0 decomposition: axis walls alternating with blob levels."""
    scales = [2.0 ** (-n) for n in range(int(n_levels) - 1, -1, -1)]
    pieces = [("axis", 0j, scales[0] * 1j)]
    for i, s in enumerate(scales):
        pieces.append(("blob", s))
        if i + 1 < len(scales):
            pieces.append(("axis", 1.5j * s, 2j * s))
    return pieces


def _piece_segments(piece):
    if piece[0] == "axis":
        return [(piece[1], piece[2])]
    s = piece[1]
    pts = [1j * s, s * (0.5 + 1j), s * (0.5 + 1.5j), 1.5j * s]
    return list(zip(pts[:-1], pts[1:]))


def _locate_on_tower(pieces, z):
    for pi, piece in enumerate(pieces):
        for si, (a, b) in enumerate(_piece_segments(piece)):
            ab = b - a
            L2 = abs(ab) ** 2
            t = ((z - a).real * ab.real + (z - a).imag * ab.imag) / L2
            if -1e-9 <= t <= 1.0 + 1e-9 and abs(z - (a + t * ab)) <= 1e-9 * abs(ab):
                return pi, si, min(max(t, 0.0), 1.0)
    raise ValueError("truncation point is not on the slit")


def _subdiv(a, b, m):
    return [a + (b - a) * (j / m) for j in range(1, m + 1)]


def _arc_points(segs, m, tail_to=None):
    """Subdivided polyline through segs; optionally a geometric tail at the end.

    The tail accumulates points toward the final endpoint so a bubble
    weld can approach its touchdown without ever reaching it.
    """
    pts = []
    for a, b in segs[:-1]:
        pts += _subdiv(a, b, m)
    a, b = segs[-1]
    if tail_to is None:
        pts += _subdiv(a, b, m)
    else:
        pts += _subdiv(a, b, m)[:-1]
        f = 1.0 / m
        while f > 1e-5:
            f *= 0.5
            pts.append(b + (a - b) * f)
    return pts


def _tower_capacity(pi_t, n_levels, m, capfac):
    """Capacity of the eps = 0 hull truncated at the slit point pi_t.

    The mirrored slit overlaps the axis walls, so those are welded once;
    each blob level welds its right arc as a slit and its left arc as a
    bubble closing onto the right arc's landing point.  The capacity of
    the sliver left by stopping each bubble short of touchdown is added
    to the error bound.
    """
    pieces = _tower_pieces(n_levels)
    loc_pi, loc_si, loc_fr = _locate_on_tower(pieces, pi_t)
    chain = []
    total = 0.0
    err = 0.0
    u = 0.0

    def fwd(pts):
        arr = np.asarray(pts, dtype=complex)
        for cmp_ in chain:
            arr = cmp_.apply(arr)
        return arr

    def weld_piece(base, img_pts):
        slit = PolylineSlit(base, np.asarray(img_pts))
        d = slit.diam()
        path, cmw = weld(slit, max_cap_step=capfac * d * d)
        chain.append(cmw)
        return path

    for pi, piece in enumerate(pieces):
        at_end = pi == loc_pi
        if piece[0] == "axis":
            a, bnd = piece[1], piece[2]
            end = a + (bnd - a) * loc_fr if at_end else bnd
            if abs(end - a) > 1e-15 * abs(bnd - a):
                if not chain:
                    # the stem is genuinely vertical: one exact map
                    em = ElementaryMap(0.0, 0.5 * abs(end) ** 2, 0.5)
                    chain.append(ComposedMap((em,)))
                    total += em.delta
                    u = em.u + em.wstar
                else:
                    path = weld_piece(u, fwd(_subdiv(a, end, max(2, m))))
                    total += path.b[-1]
                    u = path.U[-1]
            if at_end:
                break
            continue
        s = piece[1]
        segs = _piece_segments(piece)
        full = not at_end or (loc_si == 2 and loc_fr >= 1.0 - 1e-9)
        if not full:
            kept = segs[:loc_si] + [(segs[loc_si][0], segs[loc_si][0] + (segs[loc_si][1] - segs[loc_si][0]) * loc_fr)]
            phys_r = _arc_points(kept, m)
            path_r = weld_piece(u, fwd(phys_r))
            total += path_r.b[-1]
            cm_r = chain[-1]
            x_left = cm_r.apply_real(u, side="left")
            phys_l = [-p.conjugate() for p in phys_r]
            path_l = weld_piece(x_left, fwd(phys_l))
            total += path_l.b[-1]
            break
        phys_r = _arc_points(segs, m)
        path_r = weld_piece(u, fwd(phys_r))
        total += path_r.b[-1]
        cm_r = chain[-1]
        p_land = path_r.U[-1]  # image of the arc tip 1.5 i s, now real
        x_left = cm_r.apply_real(u, side="left")
        phys_l = [-p.conjugate() for p in _arc_points(segs, m, tail_to=True)]
        path_l = weld_piece(x_left, fwd(phys_l))
        total += path_l.b[-1]
        cm_l = chain[-1]
        try:
            u = cm_l.apply_real(p_land, side="right")
        except ValueError:
            u = path_l.U[-1]
        gap = abs(path_l.U[-1] - u)
        err += 2.0 * gap * gap
        if at_end:
            break
    return total, err


def _gamma_weld(hull):
    gamma = hull.slits[0]
    d = gamma.diam()
    path, cm = weld(refine(gamma, 0.02 * d), max_cap_step=5e-4 * d * d, keep_markers=True)
    return gamma, path, cm


def _marker_capacity(path, cm, target):
    idx = int(np.argmin(np.abs(np.asarray(cm.markers) - target)))
    if abs(cm.markers[idx] - target) > 1e-9:
        raise ValueError("template vertex missing from the weld table")
    return float(path.b[idx + 1]) if idx + 1 < len(path.b) else float(path.b[-1])


def counterexample_capacity_table(eps, n_levels=8, t_grid=None):
    """c(t) for the self-similar hull truncated at per-slit capacity t.

    For eps > 0 the two slits are disjoint and the two-slit zipper
    applies; at eps = 0 they overlap along the axis and the capacity is
    assembled by the blob-tower decomposition instead.  The report
    carries the difference quotient across the overlap window [t1, t2]
    and the dyadic self-similarity residuals.
    """
    hull = build_selfsimilar_slit(eps, n_levels)
    gamma, path, cm = _gamma_weld(hull)
    t1 = _marker_capacity(path, cm, 0.5 * eps + 0.75j)
    t2 = _marker_capacity(path, cm, eps + 1j)
    t5 = _marker_capacity(path, cm, eps + 1.5j)
    if t_grid is None:
        t_grid = [t5 / 4.0 ** k for k in range(5)]
    ts = [float(t) for t in t_grid]
    if any(t <= 0 for t in ts):
        raise ValueError("times must be positive")
    if any(t > path.b[-1] for t in ts):
        raise ValueError("time beyond the truncation range")

    def c_of(t):
        trunc = _decimate(truncate_from_weld(0.0, path, cm, t))
        if eps > 0.0:
            return hcap_zipper(Hull((reflect_slit(trunc), trunc))).value
        # discretization error here sits two orders below the 1% question
        # being asked, so one tower pass is enough
        val, _ = _tower_capacity(trunc.points()[-1], n_levels, 10, 1e-3)
        return val

    rows = []
    for t in sorted(ts, reverse=True):
        c = c_of(t)
        rows.append((t, c, c / t))
    c1, c2 = c_of(t1), c_of(t2)
    quotient = (c2 - c1) / (t2 - t1)
    T, cT = rows[0][0], rows[0][1]
    resid = []
    by_t = {t: c for t, c, _ in rows}
    for t, c, _ in rows:
        for tq, cq in by_t.items():
            if abs(tq - 0.25 * t) <= 1e-9 * t:
                resid.append(abs(4.0 * cq / c - 1.0))
    report = {
        "t1": t1,
        "t2": t2,
        "c_t1": c1,
        "c_t2": c2,
        "quotient": quotient,
        "cT_over_T": cT / T,
        "selfsim_residuals": resid,
    }
    checks = {
        "quotient_below_1": bool(quotient < 1.0),
        "cT_over_T_above_1": bool(cT / T > 1.0),
        "selfsimilar": bool(resid) and bool(max(resid) <= 0.01),
    }
    return CapacityTable(tuple(rows), report=report, checks=checks)


def _decimate(slit):
    """Drop interior vertices collinear with their neighbors.

    Weld tables mark every capacity split point, most of which lie on
    straight chords; removing them is geometrically exact and keeps the
    polylines cheap to map and re-weld.
    """
    pts = slit.points()
    if len(pts) < 3:
        return slit
    u = pts[1:-1] - pts[:-2]
    v = pts[2:] - pts[1:-1]
    cr = np.abs(u.real * v.imag - u.imag * v.real)
    tol = 1e-13 * np.max(np.abs(pts)) * (np.abs(u) + np.abs(v))
    keep = np.ones(len(pts), dtype=bool)
    keep[1:-1] = cr > tol
    return PolylineSlit._trusted(complex(slit.base), pts[keep][1:], HALF_PLANE)


def _slit_table(slit):
    d = slit.diam()
    path, cm = weld(refine(slit, 0.02 * d), max_cap_step=5e-4 * d * d, keep_markers=True)
    return path, cm


def _union_chain(trunc1, f):
    d = trunc1.diam()
    p, c = weld(refine(trunc1, f * 0.02 * d), max_cap_step=f * 5e-4 * d * d)
    return p, c


def _joint_capacity(chain1_cap, cm1, trunc2, f):
    if trunc2.is_empty:
        return chain1_cap
    img = map_hull_forward(cm1, refine(trunc2, f * 0.02 * trunc2.diam()))
    di = img.diam()
    p, _ = weld(img, max_cap_step=f * 5e-4 * di * di)
    return chain1_cap + p.b[-1]


def _joint_parametrization_full(s1, s2, u1_samples, s_grid, tol=1e-10):
    s = np.asarray(s_grid, dtype=float)
    u1 = np.asarray(u1_samples, dtype=float)
    if s.ndim != 1 or s.shape != u1.shape or len(s) < 2:
        raise ValueError("need matching 1-d grids with at least two points")
    if s[0] <= 0 or np.any(np.diff(s) <= 0):
        raise ValueError("s grid must be positive and strictly increasing")
    if u1[0] < 0 or np.any(np.diff(u1) <= 0):
        raise ValueError("u1 must be nonnegative and strictly increasing")
    if np.any(np.diff(u1) >= np.diff(s)) or np.any(u1 >= s):
        raise ValueError("u1 must be Lipschitz with constant below 1")
    if s1.base == s2.base:
        raise ValueError("bases must be distinct")
    Hull((s1, s2))
    path1, cm1 = _slit_table(s1)
    path2, cm2 = _slit_table(s2)
    if u1[-1] > path1.b[-1]:
        raise ValueError("u1 exceeds the capacity of slit 1")
    n = len(s)
    v2 = np.empty(n)
    totals = np.empty(n)
    chains = {}

    def chain_at(uu, f=1.0):
        key = (round(uu, 14), f)
        if key not in chains:
            trunc = _decimate(truncate_from_weld(s1.base, path1, cm1, uu))
            if trunc.is_empty:
                chains[key] = (0.0, ComposedMap(()))
            else:
                p, c = _union_chain(trunc, f)
                chains[key] = (p.b[-1], c)
        return chains[key]

    def C(uu, vv, f):
        cap1, c1 = chain_at(uu, f)
        trunc2 = _decimate(truncate_from_weld(s2.base, path2, cm2, vv))
        return _joint_capacity(cap1, c1, trunc2, f)

    # bisection and the lambda quotients share one resolution so their
    # discretization bias cancels in differences; the totals column is
    # recomputed at the standard resolution as an independent check
    fq = 2.0
    lo_prev = 0.0
    for i in range(n):
        hi = min(float(s[i]), float(path2.b[-1]))
        lo = lo_prev
        if C(u1[i], hi, fq) < s[i]:
            raise ValueError("slit 2 cannot supply the required capacity")
        if i > 0:
            # v2 cannot gain more capacity than the joint time step supplies
            hi_t = v2[i - 1] + 1.2 * (s[i] - s[i - 1]) + 1e-9
            if hi_t < hi and C(u1[i], hi_t, fq) >= s[i]:
                hi = hi_t
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if C(u1[i], mid, fq) < s[i]:
                lo = mid
            else:
                hi = mid
        v2[i] = 0.5 * (lo + hi)
        totals[i] = C(u1[i], v2[i], 1.0)
        lo_prev = v2[i] - 10 * tol
    if np.any(np.diff(v2) <= 0):
        raise RuntimeError("recovered v2 is not strictly increasing")
    lam1 = np.empty(n - 1)
    lam2 = np.empty(n - 1)
    for i in range(n - 1):
        h = s[i + 1] - s[i]
        lam1[i] = (C(u1[i + 1], v2[i], fq) - s[i]) / h
        lam2[i] = (C(u1[i], v2[i + 1], fq) - s[i]) / h
    return v2, lam1, lam2, totals


def joint_parametrization(s1, s2, u1_samples, s_grid):
    """Recover v2(s) with joint capacity pinned to s, and the rates lambda.

    u1 hands slit 1 its capacity budget at joint time s; v2 is found by
    monotone bisection so the union's capacity equals s.  The rates are
    one-sided difference quotients obtained by growing one slit at a
    time.  Returns (v2, lambda1, lambda2); the lambda arrays omit the
    last grid point.
    """
    v2, lam1, lam2, _ = _joint_parametrization_full(s1, s2, u1_samples, s_grid)
    return v2, lam1, lam2


def kinked_reparam_demo(s1, s2, eps, n_grid=40):
    """Reparametrization with a kink: u1 slopes 1/2 + eps then 1/2 - eps.

    The per-slit rate lambda1 jumps by about 2 eps across s = 1/2 while
    the total capacity keeps unit slope: the joint parametrization stays
    differentiable through a kink in the split.
    """
    if not 0.0 <= eps < 0.5:
        raise ValueError("eps must lie in [0, 1/2)")
    if n_grid % 2 != 0 or n_grid < 8:
        raise ValueError("n_grid must be even and at least 8")
    s = np.linspace(1.0 / n_grid, 1.0, n_grid)
    u1 = np.where(s <= 0.5, (0.5 + eps) * s, (0.5 + eps) * 0.5 + (0.5 - eps) * (s - 0.5))
    v2, lam1, lam2, totals = _joint_parametrization_full(s1, s2, u1, s)
    k = int(np.argmin(np.abs(s - 0.5)))
    jump = float(lam1[k - 1] - lam1[k])
    slopes = np.diff(totals) / np.diff(s)
    slope_dev = float(np.max(np.abs(slopes - 1.0)))
    lamsum_dev = float(np.max(np.abs(lam1 + lam2 - 1.0)))
    total_dev = float(np.max(np.abs(totals - s)))
    rows = [
        (s[i], u1[i], v2[i], totals[i], lam1[i] if i < len(lam1) else float("nan"),
         lam2[i] if i < len(lam2) else float("nan"))
        for i in range(len(s))
    ]
    checks = {
        "total_capacity": total_dev <= 1e-4,
        "unit_slope": slope_dev <= 1e-3,
        "lambda_sum": lamsum_dev <= 2e-3,
    }
    if eps > 0:
        checks["jump_2eps"] = abs(jump - 2.0 * eps) <= 0.2 * 2.0 * eps
    else:
        checks["no_jump"] = abs(jump) <= 0.02
    report = {
        "jump": jump,
        "expected_jump": 2.0 * eps,
        "slope_dev": slope_dev,
        "lambda_sum_dev": lamsum_dev,
        "total_dev": total_dev,
    }
    return rows, report, checks


def alpha_mu_lambda_check(s1, s2, t0, delta_list):
    """Two routes to the rate identity lambda = alpha^2 mu.

    Route A pushes short probes at slit 1's growth point through the
    other hull and measures capacity ratios; route B squares the
    boundary derivative of the other hull's welded chain at that point.
    The two are computed independently and compared.
    """
    from .capacity import pushforward_capacity_ratio

    deltas = [float(x) for x in delta_list]
    if t0 < 0:
        raise ValueError("t0 must be nonnegative")
    if t0 == 0.0:
        x1 = float(s1.base)
        image2 = s2
    else:
        path1, cm1 = _slit_table(s1)
        if t0 >= path1.b[-1]:
            raise ValueError("t0 beyond the capacity of slit 1")
        trunc = _decimate(truncate_from_weld(s1.base, path1, cm1, t0))
        p, c = _union_chain(trunc, 1.0)
        x1 = float(p.U[-1])
        image2 = map_hull_forward(c, refine(s2, 0.02 * s2.diam()))
    if image2.is_empty:
        ratios = [1.0 for _ in deltas]
        deriv = 1.0
    else:
        ratios = pushforward_capacity_ratio(image2, x1, deltas)
        d = image2.diam()
        _, cb = weld(refine(image2, 0.02 * d), max_cap_step=5e-4 * d * d)
        deriv = cb.deriv_real(x1)
    dsq = float(deriv * deriv)
    agreement = float(abs(ratios[-1] - dsq) / dsq)
    rows = [(dl, float(r)) for dl, r in zip(deltas, ratios)]
    checks = {"lambda_alpha_mu": bool(agreement <= 0.03)}
    if not image2.is_empty:
        checks["ratio_below_1"] = all(r < 1.0 for r in ratios)
    report = {"x1": x1, "deriv": deriv, "deriv_sq": dsq, "agreement": agreement}
    return rows, report, checks
