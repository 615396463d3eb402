import cmath
import math

from loewner import PolylineSlit


def random_simple_slit(rng, base=0.0, n_verts=8, size=1.0):
    """Draw a random simple polyline slit attached at base.

    Headings drift but stay loosely upward; candidates that dip to the
    axis or self-intersect are rejected and redrawn, so the result is
    deterministic for a seeded generator.
    """
    for _ in range(500):
        heading = rng.uniform(0.35 * math.pi, 0.65 * math.pi)
        z = complex(base, 0.0)
        pts = []
        ok = True
        for _k in range(n_verts):
            step = size * rng.uniform(0.4, 1.0) / n_verts
            z = z + step * cmath.exp(1j * heading)
            if z.imag <= 1e-3 * size:
                ok = False
                break
            pts.append(z)
            heading += rng.normal(0.0, 0.55)
            heading = min(max(heading, -0.45), math.pi + 0.45)
        if not ok:
            continue
        try:
            return PolylineSlit(base, tuple(pts))
        except ValueError:
            continue
    raise RuntimeError("could not draw a simple slit")


def dist_to_polyline(z, pts):
    """Exact distance from a point to a polyline given as complex points."""
    best = float("inf")
    for a, b in zip(pts[:-1], pts[1:]):
        d = b - a
        L2 = abs(d) ** 2
        t = 0.0 if L2 == 0.0 else ((z - a) * d.conjugate()).real / L2
        t = min(max(t, 0.0), 1.0)
        best = min(best, abs(z - (a + t * d)))
    return best
