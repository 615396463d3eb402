"""Planar primitives shared by the rest of the package.

Slits are simple polylines attached to the boundary of their chart:
the real line for the upper half-plane, the unit circle for the disk.
Vertices are stored in order from the attachment point outward, so the
last vertex is the growing tip.  A slit with no vertices is the empty
slit (base point only).  All transforms return new objects; nothing
here mutates in place.
"""

import cmath
import numpy as np

HALF_PLANE = "half-plane"
DISK = "disk"

_BASE_UNIT_TOL = 1e-14


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def _seg_pairs_clash(A1, B1, A2, B2, tol, skip):
    """Vectorized segment-intersection test between two segment families.

    A1[i]->B1[i] against A2[j]->B2[j]; pairs where skip[i,j] is True are
    ignored.  Touching counts as a clash, up to tol on the orientation
    determinants (which scale like length squared).
    """
    a1 = A1[:, None]
    b1 = B1[:, None]
    a2 = A2[None, :]
    b2 = B2[None, :]
    d1 = b1 - a1
    d2 = b2 - a2
    # orientation of each endpoint relative to the other segment
    s1 = _cross(d2, a1 - a2)
    s2 = _cross(d2, b1 - a2)
    s3 = _cross(d1, a2 - a1)
    s4 = _cross(d1, b2 - a1)
    proper = (((s1 > tol) & (s2 < -tol)) | ((s1 < -tol) & (s2 > tol))) & (
        ((s3 > tol) & (s4 < -tol)) | ((s3 < -tol) & (s4 > tol))
    )

    def on_seg(pa, pb, r):
        return (
            (r.real >= np.minimum(pa.real, pb.real) - tol)
            & (r.real <= np.maximum(pa.real, pb.real) + tol)
            & (r.imag >= np.minimum(pa.imag, pb.imag) - tol)
            & (r.imag <= np.maximum(pa.imag, pb.imag) + tol)
        )

    touch = (
        ((np.abs(s1) <= tol) & on_seg(a2, b2, a1))
        | ((np.abs(s2) <= tol) & on_seg(a2, b2, b1))
        | ((np.abs(s3) <= tol) & on_seg(a1, b1, a2))
        | ((np.abs(s4) <= tol) & on_seg(a1, b1, b2))
    )
    bad = (proper | touch) & ~skip
    return bool(bad.any())


def _polyline_is_simple(pts, tol):
    """Self-intersection check for a vertex chain.

    Consecutive segments may share their common endpoint but must not
    fold back onto each other; all other pairs must be disjoint.
    """
    n = len(pts) - 1
    if n <= 0:
        return True
    A, B = pts[:-1], pts[1:]
    # consecutive pairs: reject a collinear fold-back of the next vertex
    for i in range(n - 1):
        if abs(_cross(B[i] - A[i], B[i + 1] - A[i])) <= tol:
            r = B[i + 1]
            if (
                min(A[i].real, B[i].real) - tol <= r.real <= max(A[i].real, B[i].real) + tol
                and min(A[i].imag, B[i].imag) - tol <= r.imag <= max(A[i].imag, B[i].imag) + tol
            ):
                return False
    if n <= 2:
        return True
    idx = np.arange(n)
    block = 256
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        skip = idx[None, :] <= (idx[i0:i1, None] + 1)  # lower triangle and adjacency
        if _seg_pairs_clash(A[i0:i1], B[i0:i1], A, B, tol, skip):
            return False
    return True


class PolylineSlit:
    """A simple polyline slit grown from a boundary base point.

    base: attachment point, a real number in the half-plane chart or a
          unit-modulus complex number in the disk chart.
    verts: complex vertices from the first interior point to the tip;
           may be empty (degenerate slit).
    """

    def __init__(self, base, verts=(), chart=HALF_PLANE):
        if chart not in (HALF_PLANE, DISK):
            raise ValueError(f"unknown chart {chart!r}")
        verts = np.asarray(verts, dtype=complex).reshape(-1).copy()
        base = complex(base)
        if not (np.all(np.isfinite(verts.real) & np.isfinite(verts.imag)) and cmath.isfinite(base)):
            raise ValueError("non-finite slit data")

        if chart == HALF_PLANE:
            if abs(base.imag) > 0:
                raise ValueError("half-plane base must be real")
            base = base.real
            if np.any(verts.imag <= 0):
                raise ValueError("half-plane vertices must satisfy Im > 0")
        else:
            r = abs(base)
            if abs(r - 1.0) > _BASE_UNIT_TOL:
                raise ValueError("disk base must lie on the unit circle")
            base = base / r
            mod = np.abs(verts)
            if np.any(mod >= 1.0) or np.any(mod <= 0.0):
                raise ValueError("disk vertices must satisfy 0 < |z| < 1")

        pts = np.concatenate(([complex(base)], verts))
        if np.any(np.abs(np.diff(pts)) == 0.0):
            raise ValueError("repeated consecutive point")
        scale = max(np.ptp(pts.real), np.ptp(pts.imag), 1e-30)
        if not _polyline_is_simple(pts, 1e-12 * scale * scale):
            raise ValueError("slit polyline is not simple")

        verts.setflags(write=False)
        self.chart = chart
        self.base = base
        self.verts = verts

    @classmethod
    def _trusted(cls, base, verts, chart):
        # fast path for images of already-validated slits under injective maps
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.base = base.real if chart == HALF_PLANE else base
        verts = np.asarray(verts, dtype=complex).reshape(-1).copy()
        verts.setflags(write=False)
        obj.verts = verts
        return obj

    @property
    def is_empty(self):
        return self.verts.size == 0

    @property
    def tip(self):
        return complex(self.verts[-1]) if self.verts.size else complex(self.base)

    def points(self):
        """Base followed by all vertices, as one complex array."""
        return np.concatenate(([complex(self.base)], self.verts))

    def diam(self):
        # bounding-box diagonal; used only to set scales, not as an exact diameter
        pts = self.points()
        return float(np.hypot(np.ptp(pts.real), np.ptp(pts.imag)))

    def arclength(self):
        return float(np.sum(np.abs(np.diff(self.points()))))

    def __repr__(self):
        return (
            f"PolylineSlit(chart={self.chart}, base={self.base}, "
            f"nverts={len(self.verts)}, tip={self.tip:.6g})"
        )


class Hull(object):
    """One or two slits treated as a single compact boundary hull.

    With two slits the open parts are normally required to be disjoint
    (a shared base point is allowed); pass disjoint=False to skip that
    check for unions that deliberately overlap.
    """

    def __init__(self, slits, disjoint=True):
        slits = tuple(slits)
        if not 1 <= len(slits) <= 2:
            raise ValueError("hull holds one or two slits")
        charts = {s.chart for s in slits}
        if len(charts) != 1:
            raise ValueError("mixed charts in hull")
        self.chart = slits[0].chart
        self.slits = slits
        self.disjoint = bool(disjoint)
        if len(slits) == 2 and self.disjoint:
            if not (slits[0].is_empty or slits[1].is_empty):
                self._check_disjoint()

    def _check_disjoint(self):
        a, b = self.slits
        pa, pb = a.points(), b.points()
        allpts = np.concatenate((pa, pb))
        scale = max(np.ptp(allpts.real), np.ptp(allpts.imag), 1e-30)
        tol = 1e-12 * scale * scale
        skip = np.zeros((len(pa) - 1, len(pb) - 1), dtype=bool)
        if abs(complex(a.base) - complex(b.base)) <= tol:
            skip[0, 0] = True  # first segments may share the common base point
            if abs(_cross(pa[1] - pa[0], pb[1] - pa[0])) <= tol or abs(
                _cross(pb[1] - pb[0], pa[1] - pb[0])
            ) <= tol:
                raise ValueError("slits overlap at common base")
        if _seg_pairs_clash(pa[:-1], pa[1:], pb[:-1], pb[1:], tol, skip):
            raise ValueError("slits are not disjoint")

    def diam(self):
        pts = np.concatenate([s.points() for s in self.slits])
        return float(np.hypot(np.ptp(pts.real), np.ptp(pts.imag)))

    def is_empty(self):
        return all(s.is_empty for s in self.slits)

    def __repr__(self):
        return f"Hull(chart={self.chart}, nslits={len(self.slits)})"


def refine(slit, max_seg_len):
    """Subdivide every edge of the polyline to length <= max_seg_len.

    Inserted points lie exactly on the original chords, so the refined
    slit traces the same set.
    """
    if max_seg_len <= 0:
        raise ValueError("max_seg_len must be positive")
    if slit.is_empty:
        return slit
    pts = slit.points()
    out = []
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        m = max(1, int(np.ceil(abs(b - a) / max_seg_len)))
        frac = np.arange(1, m + 1) / m
        out.append(a + frac * (b - a))
    return PolylineSlit._trusted(complex(slit.base), np.concatenate(out), slit.chart)


def _affine_slit(slit, f):
    return PolylineSlit._trusted(f(complex(slit.base)), f(slit.verts), HALF_PLANE)


def _hull_map(hull, f):
    return Hull([_affine_slit(s, f) for s in hull.slits], disjoint=hull.disjoint)


def scale(hull, c):
    """Dilate a half-plane hull by c > 0 about the origin."""
    if hull.chart != HALF_PLANE:
        raise ValueError("scaling is a half-plane operation")
    c = float(c)
    if c <= 0:
        raise ValueError("scale factor must be positive")
    return _hull_map(hull, lambda z: c * z)


def translate(hull, dx):
    if hull.chart != HALF_PLANE:
        raise ValueError("translation is a half-plane operation")
    dx = float(dx)
    return _hull_map(hull, lambda z: z + dx)


def reflect(hull):
    """Reflect a half-plane hull across the imaginary axis, z -> -conj(z)."""
    if hull.chart != HALF_PLANE:
        raise ValueError("reflection is a half-plane operation")
    return _hull_map(hull, lambda z: -np.conj(z))


def reflect_slit(slit):
    if slit.chart != HALF_PLANE:
        raise ValueError("reflection is a half-plane operation")
    return PolylineSlit._trusted(-complex(slit.base), -np.conj(slit.verts), HALF_PLANE)


def log_transform(slit):
    """Send a disk slit to the half-plane chart via w = x0 - i Log(z e^{-i x0}).

    x0 = arg(base), so the base goes to the real point x0 and the disk
    interior near it opens into Im w > 0.  The branch cut sits on the ray
    through -base; a slit that crosses it cannot be represented and is
    rejected.
    """
    if slit.chart != DISK:
        raise ValueError("log_transform expects a disk slit")
    x0 = cmath.phase(complex(slit.base))
    if slit.is_empty:
        return PolylineSlit._trusted(complex(x0), (), HALF_PLANE)
    zeta = slit.verts * np.exp(-1j * x0)
    if np.any((zeta.real < 0) & (np.abs(zeta.imag) < 1e-15)):
        raise ValueError("slit touches the branch cut opposite the base")
    # a segment crossing the negative real axis also crosses the cut
    for k in range(len(zeta) - 1):
        a, b = zeta[k], zeta[k + 1]
        if a.imag * b.imag < 0:
            x = a.real + (b.real - a.real) * a.imag / (a.imag - b.imag)
            if x < 0:
                raise ValueError("slit crosses the branch cut opposite the base")
    w = x0 - 1j * np.log(zeta)
    return PolylineSlit._trusted(complex(x0), w, HALF_PLANE)


def exp_transform(slit):
    """Inverse of log_transform: half-plane slit to the disk via z = e^{i w}."""
    if slit.chart != HALF_PLANE:
        raise ValueError("exp_transform expects a half-plane slit")
    x0 = float(slit.base)
    if slit.is_empty:
        return PolylineSlit._trusted(np.exp(1j * x0), (), DISK)
    span = slit.verts.real - x0
    if np.any(np.abs(span) >= np.pi):
        raise ValueError("slit leaves the principal angular window of the base")
    return PolylineSlit._trusted(np.exp(1j * x0), np.exp(1j * slit.verts), DISK)


def write_polyline(slit, path):
    """Write one slit per file: a chart/base header line, then re,im rows."""
    b = complex(slit.base)
    lines = [f"chart={slit.chart} base={b.real:.17g},{b.imag:.17g}"]
    for v in slit.verts:
        lines.append(f"{v.real:.17g},{v.imag:.17g}")
    data = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)


def read_polyline(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = [ln.strip() for ln in fh if ln.strip()]
    if not raw or not raw[0].startswith("chart="):
        raise ValueError(f"{path}: missing polyline header")
    fields = dict(part.split("=", 1) for part in raw[0].split())
    chart = fields.get("chart")
    if chart not in (HALF_PLANE, DISK):
        raise ValueError(f"{path}: bad chart {chart!r}")
    bre, bim = (float(x) for x in fields["base"].split(","))
    base = complex(bre, bim)
    verts = []
    for ln in raw[1:]:
        re, im = (float(x) for x in ln.split(","))
        verts.append(complex(re, im))
    if chart == HALF_PLANE:
        base = base.real
    return PolylineSlit(base, verts, chart=chart)
