"""Chordal Loewner machinery on the upper half-plane.

The flow dg/dt = db/dt / (g - U(t)) is integrated not by generic ODE
stepping, which is singular at the tip, but by composing elementary
maps that each remove one straight slit exactly.  An elementary map of
angle fraction a = alpha/pi and capacity delta is the inverse of the
creating map

    f(w) = u + (w - u + p)^(1-a) * (w - u - q)^a,
    p = a*s,  q = (1-a)*s,  s = sqrt(2*delta / (a*(1-a))),

whose slit tip sits at u + s*(1-a)^(1-a)*a^a*exp(i*pi*a) and whose tip
preimage is u + s*(1-2a).  Welding factors a polyline slit into such
steps, recovering the driving function; tracing runs the factorization
backward from a driving function.
"""

import cmath
import math

import numpy as np
from scipy.optimize import brentq

from .geom import HALF_PLANE, PolylineSlit, refine

_AMIN = 1e-6
_NEWTON_ITERS = 60
_CAP_UNDERFLOW = 1e-14


def _lfac(a):
    # |tip| / s for the unit-speed creating map
    return (1.0 - a) ** (1.0 - a) * a ** a


def _fmap(w, p, q, a):
    w = np.asarray(w, dtype=complex)
    return np.exp((1.0 - a) * np.log(w + p) + a * np.log(w - q))


def _dlogf(w, p, q, a):
    return (1.0 - a) / (w + p) + a / (w - q)


def _invert_newton(zeta, w0, p, q, a, s):
    """Damped Newton in log space for fmap(w) = zeta, elementwise.

    Iterates are folded back into the closed upper half-plane (the map
    commutes with conjugation on the reals) and steps are capped so no
    iterate jumps over the endpoint singularities at -p and q.
    Returns (w, residual).
    """
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    w = np.atleast_1d(np.asarray(w0, dtype=complex)).copy()
    scale = np.abs(zeta) + 0.1 * s
    tol = 1e-13 * scale
    res = np.full(zeta.shape, np.inf)
    idx = np.arange(zeta.size)
    for _ in range(_NEWTON_ITERS):
        wa = w[idx]
        wa = np.where(wa.imag < 0.0, np.conj(wa), wa)
        w[idx] = wa
        fa = _fmap(wa, p, q, a)
        ra = np.abs(fa - zeta[idx])
        res[idx] = ra
        live = (ra > tol[idx]) & np.isfinite(ra)
        idx = idx[live]
        if idx.size == 0:
            break
        wa, fa = wa[live], fa[live]
        with np.errstate(all="ignore"):
            step = np.log(fa / zeta[idx]) / _dlogf(wa, p, q, a)
        ok = np.isfinite(step)
        # dead iterates keep their residual and fall through to reseeding
        idx, wa, step = idx[ok], wa[ok], step[ok]
        cap = 0.5 * np.minimum(np.abs(wa + p), np.abs(wa - q)) + 1e-3 * s
        mag = np.abs(step)
        shrink = mag > cap
        step[shrink] *= cap[shrink] / mag[shrink]
        w[idx] = wa - step
    bad = w.imag < 0.0
    if bad.any():
        w[bad] = np.conj(w[bad])
        res[bad] = np.abs(_fmap(w[bad], p, q, a) - zeta[bad])
    return w, res


def _interval_seed(z1, p, q, a, s):
    """Seed on the preimage interval of the slit side containing z1.

    |fmap| is monotone from 0 at the interval endpoint to the tip value
    at w* = q - p, and the preimages crowd exponentially toward the
    endpoint, so the bisection runs in the log of the distance to it.
    """
    L = s * _lfac(a)
    t = abs(z1)
    wst = q - p
    if t >= L:
        return complex(wst)
    left = (z1 * cmath.exp(-1j * math.pi * a)).imag > 0.0
    end = -p if left else q
    lo, hi = 0.0, 700.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        w = end + (wst - end) * math.exp(-mid)
        val = (w + p) ** (1.0 - a) * abs(w - q) ** a
        if val > t:
            lo = mid
        else:
            hi = mid
    return complex(end + (wst - end) * math.exp(-0.5 * (lo + hi)))


def _rescue(z1, p, q, a, s):
    """Reseeded solves for targets near the slit where the plain seed fails."""
    L = s * _lfac(a)
    tip = L * cmath.exp(1j * math.pi * a)
    wst = q - p
    seeds = []
    # quadratic behavior at the tip: f - tip ~ C (w - w*)^2
    C = -tip / (2.0 * s * s * a * (1.0 - a))
    sig = cmath.sqrt((z1 - tip) / C)
    seeds += [wst + sig, wst - sig]
    # endpoint asymptotics, in log form to survive extreme angles
    with np.errstate(all="ignore"):
        try:
            seeds.append(q + cmath.exp(cmath.log(z1 / (p + q) ** (1.0 - a)) / a))
        except (OverflowError, ValueError):
            pass
        try:
            seeds.append(
                -p
                + cmath.exp(
                    cmath.log(z1 * cmath.exp(-1j * math.pi * a) / (p + q) ** a) / (1.0 - a)
                )
            )
        except (OverflowError, ValueError):
            pass
    seeds.append(_interval_seed(z1, p, q, a, s))
    best_w, best_r = complex(wst), math.inf
    scale = abs(z1) + 0.1 * s
    for sd in seeds:
        if not (cmath.isfinite(sd)):
            continue
        w, r = _invert_newton([z1], [sd], p, q, a, s)
        if r[0] < best_r:
            best_w, best_r = complex(w[0]), float(r[0])
        if best_r <= 1e-13 * scale:
            break
    return best_w, best_r


def _real_preimage(zeta, p, q, a, side=None):
    """Real solution of fmap(w) = zeta for real zeta, exact side handling."""
    s = p + q
    if zeta == 0.0:
        if side == "right":
            return q
        if side == "left":
            return -p
        raise ValueError("boundary point at the slit base needs side='left'/'right'")
    if zeta > 0.0:
        # w = q + t, (t + s)^(1-a) t^a = zeta, monotone in t
        lz = math.log(zeta)

        def h(lam):
            return (1.0 - a) * math.log(math.exp(lam) + s) + a * lam - lz

        lam_asym = (lz - (1.0 - a) * math.log(s)) / a
        lo = min(lam_asym, lz - math.log(s) if s > 0 else lz) - 10.0
        hi = max(lz, lam_asym, 0.0) + 10.0
        while h(lo) >= 0.0:
            lo -= 30.0
        while h(hi) <= 0.0:
            hi += 30.0
        lam = brentq(h, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
        return q + math.exp(lam)
    # zeta < 0: w = -p - t, t^(1-a) (t + s)^a = |zeta|
    lz = math.log(-zeta)

    def h(lam):
        return (1.0 - a) * lam + a * math.log(math.exp(lam) + s) - lz

    lam_asym = (lz - a * math.log(s)) / (1.0 - a)
    lo = lam_asym - 10.0
    hi = max(lz, lam_asym, 0.0) + 10.0
    while h(lo) >= 0.0:
        lo -= 30.0
    while h(hi) <= 0.0:
        hi += 30.0
    lam = brentq(h, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    return -p - math.exp(lam)


class ElementaryMap:
    """Normalized map of the upper half-plane removing one straight slit.

    u: base point on the real line; delta: half-plane capacity of the
    removed slit; a: angle fraction in (0,1), with a = 1/2 the vertical
    case.  apply computes the removing direction g, invert the creating
    direction f (closed form).
    """

    __slots__ = ("u", "delta", "a", "s", "p", "q")

    def __init__(self, u, delta, a=0.5):
        if not 0.0 < a < 1.0:
            raise ValueError("angle fraction a must lie in (0,1)")
        if not delta > 0.0:
            raise ValueError("capacity must be positive")
        self.u = float(u)
        self.delta = float(delta)
        self.a = float(a)
        self.s = math.sqrt(2.0 * delta / (a * (1.0 - a)))
        self.p = self.a * self.s
        self.q = (1.0 - self.a) * self.s

    @property
    def kind(self):
        return "vertical" if self.a == 0.5 else "tilted"

    @property
    def wstar(self):
        """Real preimage of the slit tip, relative to u."""
        return self.s * (1.0 - 2.0 * self.a)

    @property
    def length(self):
        return self.s * _lfac(self.a)

    @property
    def tip(self):
        return self.u + self.length * cmath.exp(1j * math.pi * self.a)

    def _on_slit(self, zeta):
        rel = zeta * cmath.exp(-1j * math.pi * self.a)
        return (
            abs(rel.imag) <= 1e-14 * abs(zeta)
            and -1e-14 * self.length <= rel.real <= self.length * (1.0 + 1e-14)
        )

    def apply(self, z, side=None):
        """Removing direction: g(z) for z in the closed half-plane off the slit."""
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        zeta = z_arr - self.u
        if np.any(zeta.imag < -1e-12 * (np.abs(zeta) + self.s)):
            raise ValueError("point below the real axis")
        zeta = np.where(zeta.imag < 0.0, zeta.real, zeta)
        out = np.empty_like(zeta)
        real_mask = zeta.imag == 0.0
        for i in np.nonzero(real_mask)[0]:
            x = zeta[i].real
            if x == 0.0 and side is None:
                raise ValueError("point at the slit base; use side='left'/'right'")
            out[i] = self._real_apply(x, side)
        interior = ~real_mask
        if interior.any():
            zi = zeta[interior]
            if any(self._on_slit(complex(v)) for v in zi):
                raise ValueError("point on the removed slit")
            if self.a == 0.5:
                # branch cut of the root coincides with the slit
                w = zi * np.sqrt(1.0 + 2.0 * self.delta / (zi * zi))
            else:
                w = self._apply_tilted(zi)
            out[interior] = w
        res = out + self.u
        return res if np.ndim(z) else complex(res[0])

    def _real_apply(self, x, side):
        w = _real_preimage(x, self.p, self.q, self.a, side=side)
        return complex(w)

    def _apply_tilted(self, zeta):
        p, q, a, s = self.p, self.q, self.a, self.s
        w, res = _invert_newton(zeta, zeta, p, q, a, s)
        scale = np.abs(zeta) + 0.1 * s
        bad = np.nonzero(res > 1e-13 * scale)[0]
        for i in bad:
            w[i], res[i] = _rescue(complex(zeta[i]), p, q, a, s)
        worst = np.nanmax(res / scale) if res.size else 0.0
        if not np.all(res <= 1e-10 * scale):
            raise RuntimeError(f"slit map inversion failed, residual {worst:.2e}")
        w = np.where(w.imag < 0.0, np.conj(w), w)
        return w

    def apply_real(self, x, side=None):
        """g at a real boundary point; side resolves the base x == u."""
        return float(self._real_apply(float(x) - self.u, side).real + self.u)

    def deriv_real(self, x, side=None):
        x = float(x)
        if x == self.u:
            return 0.0  # g'(u) vanishes like the slit-opening power
        w = _real_preimage(x - self.u, self.p, self.q, self.a, side=side)
        return 1.0 / ((x - self.u) * _dlogf(w, self.p, self.q, self.a)).real

    def apply_with_deriv(self, z):
        """Return (g(z), g'(z)); derivative from the creating map's chain rule."""
        g = self.apply(z)
        zeta = np.asarray(z, dtype=complex) - self.u
        w = np.asarray(g, dtype=complex) - self.u
        dv = 1.0 / (zeta * _dlogf(w, self.p, self.q, self.a))
        return g, (dv if np.ndim(z) else complex(dv))

    def invert(self, w):
        """Creating direction: f(w), closed form.

        Real w strictly inside the welded gap (u-p, u+q) has no preimage
        off the slit and is rejected.
        """
        w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
        rel = w_arr - self.u
        gap = (rel.imag == 0.0) & (rel.real > -self.p) & (rel.real < self.q)
        if gap.any():
            raise ValueError("point inside the welded gap")
        out = _fmap(rel, self.p, self.q, self.a) + self.u
        # boundary rays map to boundary rays; kill rounding fuzz there
        on_r = (rel.imag == 0.0)
        out = np.where(on_r, out.real, out)
        return out if np.ndim(w) else complex(out[0])

    def __repr__(self):
        return f"ElementaryMap({self.kind}, u={self.u:.6g}, delta={self.delta:.6g}, a={self.a:.6g})"


class ComposedMap:
    """Ordered composition of elementary maps (last applied last).

    total_capacity is the exact sum of step capacities.  Welds attach
    markers: the physical point pulled to the real axis by each step.
    """

    def __init__(self, steps, markers=None):
        self.steps = tuple(steps)
        self.total_capacity = float(sum(m.delta for m in self.steps))
        self.markers = None if markers is None else np.asarray(markers, dtype=complex)

    def apply(self, z):
        for m in self.steps:
            z = m.apply(z)
        return z

    def apply_real(self, x, side=None):
        x = float(x)
        used = False
        for m in self.steps:
            if x == m.u:
                if used or side is None:
                    raise ValueError("boundary point swallowed by the composed hull")
                x = m.apply_real(x, side)
                used = True
            else:
                x = m.apply_real(x)
        return x

    def deriv_real(self, x, side=None):
        x = float(x)
        d = 1.0
        used = False
        for m in self.steps:
            if x == m.u:
                if used or side is None:
                    raise ValueError("boundary point swallowed by the composed hull")
                d = 0.0
                x = m.apply_real(x, side)
                used = True
            else:
                d *= m.deriv_real(x)
                x = m.apply_real(x)
        return d

    def apply_with_deriv(self, z):
        d = np.ones(np.shape(z), dtype=complex) if np.ndim(z) else 1.0 + 0.0j
        for m in self.steps:
            z, dz = m.apply_with_deriv(z)
            d = d * dz
        return z, d

    def invert(self, w):
        for m in reversed(self.steps):
            w = m.invert(w)
        return w

    def expansion_residual(self, y):
        """|g(iy) - iy - b/(iy)|, the hydrodynamic normalization defect."""
        b = self.total_capacity
        g = self.apply(complex(0.0, y))
        return abs(g - 1j * y - b / (1j * y))

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return f"ComposedMap(nsteps={len(self.steps)}, total_capacity={self.total_capacity:.6g})"


class DrivingPath:
    """Sampled driving function: times t, positions U, capacities b."""

    def __init__(self, t, U, b):
        t = np.array(t, dtype=float).reshape(-1)
        U = np.array(U, dtype=float).reshape(-1)
        b = np.array(b, dtype=float).reshape(-1)
        if not (t.size == U.size == b.size) or t.size == 0:
            raise ValueError("t, U, b must be equal-length and nonempty")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(U)) and np.all(np.isfinite(b))):
            raise ValueError("non-finite driving sample")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0.0):
            raise ValueError("t must increase strictly from 0")
        if b[0] != 0.0 or np.any(np.diff(b) < 0.0):
            raise ValueError("b must be non-decreasing from 0")
        t.setflags(write=False)
        U.setflags(write=False)
        b.setflags(write=False)
        self.t, self.U, self.b = t, U, b

    @property
    def t_end(self):
        return float(self.t[-1])

    @property
    def total_capacity(self):
        return float(self.b[-1])

    def __len__(self):
        return len(self.t)


def write_driving_csv(path, file_path):
    lines = ["t,U,b"]
    for t, u, b in zip(path.t, path.U, path.b):
        lines.append(f"{t:.17g},{u:.17g},{b:.17g}")
    with open(file_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_driving_csv(file_path):
    with open(file_path, "r", encoding="utf-8") as fh:
        raw = [ln.strip() for ln in fh if ln.strip()]
    if not raw or raw[0] != "t,U,b":
        raise ValueError(f"{file_path}: expected 't,U,b' header")
    rows = [tuple(float(x) for x in ln.split(",")) for ln in raw[1:]]
    arr = np.asarray(rows, dtype=float).reshape(-1, 3)
    return DrivingPath(arr[:, 0], arr[:, 1], arr[:, 2])


def _chord_step(u, w_end):
    """Elementary map consuming the straight chord from the base u to w_end."""
    chord = w_end - u
    if chord.imag <= 0.0:
        raise ValueError("slit touches the real axis away from its base")
    a = min(max(math.atan2(chord.imag, chord.real) / math.pi, _AMIN), 1.0 - _AMIN)
    s = abs(chord) / _lfac(a)
    delta = a * (1.0 - a) * s * s / 2.0
    return ElementaryMap(u, delta, a), delta


def _weld_core(targets, u0, max_cap_step, phys=None, phys_base=None):
    """Pull an ordered family of image points to the real axis, one chord at a time.

    targets are the current-plane images of the slit's sample points, in
    base-to-tip order with Im > 0.  Each step removes the straight chord
    from the running base to the next target; chords exceeding
    max_cap_step in capacity are split into equal-capacity pieces.
    Returns (steps, deltas, u_list, markers); markers track the physical
    positions consumed per step when phys is given.
    """
    if max_cap_step <= _CAP_UNDERFLOW:
        raise ValueError("capacity step underflow")
    steps, deltas, u_list, markers = [], [], [], []
    u = float(u0)
    pending = list(np.asarray(targets, dtype=complex))
    pend_phys = None if phys is None else list(np.asarray(phys, dtype=complex))
    phys_u = None if phys is None else complex(phys_base)
    while pending:
        w1 = pending[0]
        chord = w1 - u
        if chord.imag <= 0.0:
            raise ValueError("slit touches the real axis away from its base")
        a_est = min(max(math.atan2(chord.imag, chord.real) / math.pi, _AMIN), 1.0 - _AMIN)
        s_est = abs(chord) / _lfac(a_est)
        d_est = a_est * (1.0 - a_est) * s_est * s_est / 2.0
        if d_est < _CAP_UNDERFLOW:
            # degenerate zero-capacity step: drop, merging into the next chord
            pending.pop(0)
            if pend_phys is not None:
                phys_u = pend_phys.pop(0)
            continue
        if d_est > max_cap_step:
            # straight-chord capacity scales as the squared length fraction
            m_sub = int(math.ceil(d_est / max_cap_step))
            fracs = np.sqrt(np.arange(1, m_sub) / m_sub)
            pending[0:0] = list(u + fracs * chord)
            if pend_phys is not None:
                # physical split points stay exactly on the chord; the chain
                # opens a square-root at its tip, so image fraction f stands
                # for physical fraction f^2 once any step has been welded
                fr = fracs if not steps else fracs * fracs
                pend_phys[0:0] = list(phys_u + fr * (pend_phys[0] - phys_u))
            continue
        em, delta = _chord_step(u, w1)
        u = u + em.wstar
        steps.append(em)
        deltas.append(delta)
        u_list.append(u)
        pending.pop(0)
        if pend_phys is not None:
            phys_u = pend_phys.pop(0)
            markers.append(phys_u)
        if pending:
            arr = em.apply(np.asarray(pending, dtype=complex))
            pending = list(arr)
    return steps, deltas, u_list, markers


def default_weld_resolution(slit):
    """(max_cap_step, max_seg_len) giving a few hundred steps at the slit's scale."""
    d = max(slit.diam(), 1e-12)
    return 5e-4 * d * d, 0.02 * d


def weld(slit, max_cap_step=None, max_seg_len=None, keep_markers=False):
    """Factor a half-plane slit into elementary maps; recover its driving path.

    Returns (DrivingPath, ComposedMap).  The path is in capacity
    parametrization, b(t) = t, sampled at every elementary step.
    """
    if slit.chart != HALF_PLANE:
        raise ValueError("weld expects a half-plane slit")
    cap_d, seg_d = default_weld_resolution(slit)
    if max_cap_step is None:
        max_cap_step = cap_d
    if max_seg_len is None:
        max_seg_len = seg_d
    u0 = float(slit.base)
    if slit.is_empty:
        path = DrivingPath([0.0], [u0], [0.0])
        return path, ComposedMap([])
    fine = refine(slit, max_seg_len)
    phys = fine.verts if keep_markers else None
    steps, deltas, u_list, markers = _weld_core(
        fine.verts, u0, max_cap_step, phys=phys, phys_base=fine.base
    )
    b = np.concatenate(([0.0], np.cumsum(deltas)))
    U = np.concatenate(([u0], u_list))
    path = DrivingPath(b, U, b)
    cm = ComposedMap(steps, markers=markers if keep_markers else None)
    return path, cm


def _lerp(x0, x1, f):
    return x0 + f * (x1 - x0)


def path_steps(path, dt_max=None):
    """Elementary-map factorization of a driving path.

    Steps are capped at dt_max and at a tenth of the local time scale,
    matching the square-root growth of the tip near t = 0.  Intervals of
    zero capacity gain contribute no map.
    """
    if dt_max is None:
        dt_max = max(path.t_end, 1e-12)
    if dt_max <= 0.0:
        raise ValueError("dt_max must be positive")
    out = []
    for k in range(len(path) - 1):
        t0, t1 = path.t[k], path.t[k + 1]
        U0, U1 = path.U[k], path.U[k + 1]
        b0, b1 = path.b[k], path.b[k + 1]
        if b1 - b0 <= 0.0:
            continue
        dt_eff = min(dt_max, 0.1 * max(t0, dt_max))
        m = max(1, int(math.ceil((t1 - t0) / dt_eff)))
        for j in range(m):
            f0, f1 = j / m, (j + 1) / m
            db = (b1 - b0) / m
            if db <= 0.0:
                continue
            du = _lerp(U0, U1, f1) - _lerp(U0, U1, f0)
            r = du / (2.0 * math.sqrt(2.0 * db))
            c = r / math.hypot(1.0, r)
            a = min(max((1.0 - c) / 2.0, _AMIN), 1.0 - _AMIN)
            out.append(ElementaryMap(_lerp(U0, U1, f0), db, a))
    return out


def trace(path, dt_max=None):
    """Run a driving path forward and return the slit it grows.

    Inverse of weld up to discretization: the returned polyline's tip
    reproduces the welded slit tip within the round-trip tolerance.
    """
    steps = path_steps(path, dt_max=dt_max)
    base = float(path.U[0])
    if not steps:
        return PolylineSlit(base, (), chart=HALF_PLANE)
    pts = np.empty(0, dtype=complex)
    for em in reversed(steps):
        pts = em.invert(pts) if pts.size else pts
        pts = np.concatenate(([em.tip], pts))
    keep = np.ones(pts.size, dtype=bool)
    keep[1:] = np.abs(np.diff(pts)) > 0.0
    return PolylineSlit(base, pts[keep], chart=HALF_PLANE)


def solve_forward(path, z, T=None, dt_max=None):
    """Evaluate g_T(z) by folding the elementary factorization of the path."""
    sub = _truncate_path(path, T)
    steps = path_steps(sub, dt_max=dt_max)
    z = complex(z)
    for em in steps:
        if z.imag == 0.0 and z.real == em.u:
            raise ValueError("point swallowed by the hull")
        z = em.apply(z)
    return z


def _truncate_path(path, T):
    if T is None or T >= path.t_end:
        return path
    if T < 0.0:
        raise ValueError("negative time")
    if T == 0.0:
        return DrivingPath([0.0], [path.U[0]], [0.0])
    k = int(np.searchsorted(path.t, T, side="right"))
    if path.t[k - 1] == T:
        return DrivingPath(path.t[:k], path.U[:k], path.b[:k])
    f = (T - path.t[k - 1]) / (path.t[k] - path.t[k - 1])
    t = np.concatenate((path.t[:k], [T]))
    U = np.concatenate((path.U[:k], [_lerp(path.U[k - 1], path.U[k], f)]))
    b = np.concatenate((path.b[:k], [_lerp(path.b[k - 1], path.b[k], f)]))
    return DrivingPath(t, U, b)


def multi_solve_forward(path1, path2, lam1, lam2, z, T=None, dt_max=1e-3):
    """Two-slit forward ODE dg/dt = lam1/(g-U1) + lam2/(g-U2), RK4.

    The weights lam_k >= 0 are the capacity growth rates themselves,
    sampled on the common time grid of the two paths.
    """
    if not np.array_equal(path1.t, path2.t):
        raise ValueError("paths must share one time grid")
    t = path1.t
    lam1 = np.asarray(lam1, dtype=float).reshape(-1)
    lam2 = np.asarray(lam2, dtype=float).reshape(-1)
    if lam1.size != t.size or lam2.size != t.size:
        raise ValueError("weights must be sampled on the path grid")
    if np.any(lam1 < 0.0) or np.any(lam2 < 0.0):
        raise ValueError("weights must be non-negative")
    t_end = path1.t_end if T is None else float(T)
    if t_end > path1.t_end or t_end < 0.0:
        raise ValueError("T outside the sampled range")
    scale = 1.0 + float(np.max(np.abs(path1.U)) + np.max(np.abs(path2.U)))

    def rate(ti, g):
        u1 = np.interp(ti, t, path1.U)
        u2 = np.interp(ti, t, path2.U)
        l1 = np.interp(ti, t, lam1)
        l2 = np.interp(ti, t, lam2)
        if l1 > 0.0 and l2 > 0.0 and abs(u1 - u2) < 1e-12 * scale:
            raise ValueError("driving collision U1 = U2 with both weights positive")
        d1 = g - u1
        d2 = g - u2
        if (l1 > 0.0 and abs(d1) < 1e-9 * scale) or (l2 > 0.0 and abs(d2) < 1e-9 * scale):
            raise ValueError("point swallowed by the hull")
        out = 0.0 + 0.0j
        if l1 > 0.0:
            out += l1 / d1
        if l2 > 0.0:
            out += l2 / d2
        return out

    g = complex(z)
    ti = 0.0
    while ti < t_end - 1e-15 * max(t_end, 1.0):
        h = min(dt_max, t_end - ti)
        k1 = rate(ti, g)
        k2 = rate(ti + h / 2.0, g + h / 2.0 * k1)
        k3 = rate(ti + h / 2.0, g + h / 2.0 * k2)
        k4 = rate(ti + h, g + h * k3)
        g = g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ti += h
    return g


def truncate_from_weld(base, path, cm, t):
    """Initial piece of a welded slit with capacity exactly t.

    Vertices are the marker points recorded by weld(keep_markers=True)
    for the steps of capacity below t, plus one partial point placed on
    the final physical chord, so the truncation stays exactly on the
    slit.  In the image plane a straight chord truncated to the length
    fraction f = sqrt((t - b_k)/delta) loses capacity in exactly that
    proportion; the welded chain opens a square-root at its tip, so the
    physical fraction along the chord is f^2 except on the first chord.
    """
    if cm.markers is None:
        raise ValueError("weld was run without keep_markers")
    b = path.b
    total = path.total_capacity
    if t < 0.0 or t > total * (1.0 + 1e-12):
        raise ValueError("truncation capacity outside the welded range")
    if t <= 0.0:
        return PolylineSlit(float(base), (), chart=HALF_PLANE)
    if t >= total:
        return PolylineSlit._trusted(complex(base), cm.markers, HALF_PLANE)
    k = int(np.searchsorted(b, t, side="right")) - 1  # t in [b_k, b_{k+1})
    verts = list(cm.markers[:k])
    if t > b[k]:
        frac = math.sqrt((t - b[k]) / cm.steps[k].delta)
        if k > 0:
            frac *= frac
        p0 = cm.markers[k - 1] if k > 0 else complex(base)
        verts.append(p0 + frac * (cm.markers[k] - p0))
    return PolylineSlit._trusted(complex(base), np.asarray(verts), HALF_PLANE)


def truncate_by_capacity(slit, t, max_cap_step=None, max_seg_len=None):
    """Weld a slit and cut it back to the piece of capacity exactly t."""
    path, cm = weld(slit, max_cap_step=max_cap_step, max_seg_len=max_seg_len, keep_markers=True)
    return truncate_from_weld(slit.base, path, cm, t)


def map_hull_forward(cm, slit, base_side=None):
    """Image of a slit under a composed map whose hull is disjoint from it."""
    if slit.chart != HALF_PLANE:
        raise ValueError("map_hull_forward expects a half-plane slit")
    if not cm.steps:
        return slit
    base = cm.apply_real(float(slit.base), side=base_side)
    if slit.is_empty:
        return PolylineSlit._trusted(complex(base), (), HALF_PLANE)
    verts = cm.apply(np.asarray(slit.verts, dtype=complex))
    return PolylineSlit._trusted(complex(base), verts, HALF_PLANE)
