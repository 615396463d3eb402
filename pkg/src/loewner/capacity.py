"""Half-plane capacity of compact hulls.

Three routes to hcap(K), cross-checkable against each other:

* closed form for a straight segment leaving the real axis at angle
  alpha, via the tilted-slit normal form;
* the zipper route: weld the hull into a driving path and read the
  capacity off the conformal chain (deterministic, with a Richardson
  error estimate from a once-refined rerun);
* Monte Carlo, 2*y*E[Im B_tau] for Brownian motion started at iy,
  extrapolated in y to kill the O(1/y) tail.

Capacity behaves like area under scaling, hcap(cK) = c^2 hcap(K), and
is monotone and subadditive; the tests lean on those invariants.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .chordal import ComposedMap, ElementaryMap, weld, default_weld_resolution, map_hull_forward
from .geom import HALF_PLANE, Hull, PolylineSlit, refine


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    method: str  # closed_form | zipper | monte_carlo
    err: float
    n_samples: int = 0
    seed: int = 0

    def to_json(self):
        return json.dumps(
            {
                "value": self.value,
                "method": self.method,
                "err": self.err,
                "n_samples": self.n_samples,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(
            value=float(d["value"]),
            method=str(d["method"]),
            err=float(d["err"]),
            n_samples=int(d.get("n_samples", 0)),
            seed=int(d.get("seed", 0)),
        )


def tip_modulus(alpha):
    """|gamma_alpha(1)| for the capacity-parametrized tilted slit of angle alpha."""
    if not 0.0 < alpha < math.pi:
        raise ValueError("angle must lie strictly between 0 and pi")
    a = alpha / math.pi
    return math.sqrt(2.0) * a ** (a - 0.5) * (1.0 - a) ** (0.5 - a)


def segment_capacity(alpha, length):
    """hcap of a straight slit of the given length at angle alpha from the axis."""
    if length < 0.0:
        raise ValueError("length must be nonnegative")
    if not 0.0 < alpha < math.pi:
        raise ValueError("angle must lie strictly between 0 and pi")
    # same quantity as (length / tip_modulus)**2, arranged so the
    # perpendicular case comes out exactly length**2 / 2
    a = alpha / math.pi
    return 0.5 * length * length * a ** (1.0 - 2.0 * a) * (1.0 - a) ** (2.0 * a - 1.0)


def segment_length(alpha, capacity):
    """Inverse of segment_capacity in the length variable."""
    if capacity < 0.0:
        raise ValueError("capacity must be nonnegative")
    return math.sqrt(capacity) * tip_modulus(alpha)


@dataclass(frozen=True)
class SegmentSpec:
    """A straight slit pinned at a real base, sized by capacity or by length."""

    alpha: float
    base: float = 0.0
    capacity: float = None
    length: float = None

    def __post_init__(self):
        if not 0.0 < self.alpha < math.pi:
            raise ValueError("angle must lie strictly between 0 and pi")
        if (self.capacity is None) == (self.length is None):
            raise ValueError("specify exactly one of capacity and length")
        if self.capacity is None:
            object.__setattr__(self, "capacity", segment_capacity(self.alpha, self.length))
        else:
            if self.capacity < 0.0:
                raise ValueError("capacity must be nonnegative")
            object.__setattr__(self, "length", segment_length(self.alpha, self.capacity))

    def truncated(self, b):
        if not 0.0 <= b <= self.capacity + 1e-15:
            raise ValueError("truncation capacity out of range")
        return SegmentSpec(self.alpha, self.base, capacity=min(b, self.capacity))

    def to_slit(self):
        if self.length == 0.0:
            return PolylineSlit(self.base, (), chart=HALF_PLANE)
        tip = self.base + self.length * complex(math.cos(self.alpha), math.sin(self.alpha))
        return PolylineSlit(self.base, (tip,), chart=HALF_PLANE)


def _first_chord_angle(slit):
    pts = slit.points()
    return math.atan2((pts[1] - pts[0]).imag, (pts[1] - pts[0]).real) % math.pi


def _zipper_once(hull, max_cap_step, max_seg_len):
    slits = [s for s in hull.slits if not s.is_empty]
    if not slits:
        return 0.0
    if len(slits) == 1:
        path, _ = weld(refine(slits[0], max_seg_len), max_cap_step=max_cap_step)
        return path.b[-1]
    if not hull.disjoint:
        raise ValueError("two-slit zipper needs a disjoint hull")
    s1, s2 = slits
    # peel the slit with the larger first-chord angle first, so a shared
    # base leaves the other slit on a known side of the welded gap
    a1, a2 = _first_chord_angle(s1), _first_chord_angle(s2)
    first, other = (s1, s2) if a1 >= a2 else (s2, s1)
    path1, cm1 = weld(refine(first, max_seg_len), max_cap_step=max_cap_step)
    side = None
    if abs(other.base - first.base) < 1e-12 * max(hull.diam(), 1.0):
        # the remaining slit has the smaller angle, so it sits on the
        # right flank of the welded gap
        side = "right"
    image = map_hull_forward(cm1, refine(other, max_seg_len), base_side=side)
    path2, _ = weld(image, max_cap_step=max_cap_step)
    return path1.b[-1] + path2.b[-1]


def hcap_zipper(hull, max_cap_step=None, max_seg_len=None):
    """Capacity of a one- or two-slit hull via welding, with Richardson error."""
    if isinstance(hull, PolylineSlit):
        hull = Hull((hull,))
    if hull.is_empty():
        return CapacityEstimate(0.0, "zipper", 0.0)
    d = hull.diam()
    if max_cap_step is None:
        max_cap_step = 5e-4 * d * d
    if max_seg_len is None:
        max_seg_len = 0.02 * d
    coarse = _zipper_once(hull, max_cap_step, max_seg_len)
    fine = _zipper_once(hull, 0.5 * max_cap_step, 0.5 * max_seg_len)
    return CapacityEstimate(fine, "zipper", abs(fine - coarse))


def hcap_union_two_slits(spec1, spec2, max_cap_step=None, max_seg_len=None):
    """Capacity of the union of two straight slits, one exact peel then a weld.

    The first peel uses the exact tilted-slit map for the larger slit, so
    only the image of the smaller slit is discretized.
    """
    for sp in (spec1, spec2):
        if not isinstance(sp, SegmentSpec):
            raise TypeError("expected SegmentSpec")
    if spec1.capacity == 0.0 and spec2.capacity == 0.0:
        return CapacityEstimate(0.0, "closed_form", 0.0)
    if spec1.capacity == 0.0 or spec2.capacity == 0.0:
        big = spec1 if spec2.capacity == 0.0 else spec2
        return CapacityEstimate(big.capacity, "closed_form", 0.0)
    same_base = spec1.base == spec2.base
    if same_base and abs(spec1.alpha - spec2.alpha) <= 1e-12:
        # nested slits: the union is the longer one
        return CapacityEstimate(max(spec1.capacity, spec2.capacity), "closed_form", 0.0)
    # disjointness is delegated to the hull validator
    hull = Hull((spec1.to_slit(), spec2.to_slit()))
    big, small = (spec1, spec2) if spec1.capacity >= spec2.capacity else (spec2, spec1)
    em = ElementaryMap(big.base, big.capacity, big.alpha / math.pi)
    side = None
    if same_base:
        side = "right" if small.alpha < big.alpha else "left"
    cm = ComposedMap((em,))
    # resolution follows the small slit, not the hull: far-apart bases must
    # not starve a short slit of subdivision
    seg0 = max_seg_len if max_seg_len is not None else 0.02 * small.length

    def once(f):
        image = map_hull_forward(cm, refine(small.to_slit(), f * seg0), base_side=side)
        di = image.diam()
        cap = f * (max_cap_step if max_cap_step is not None else 5e-4 * di * di)
        path, _ = weld(image, max_cap_step=cap)
        return big.capacity + path.b[-1]

    coarse = once(1.0)
    fine = once(0.5)
    return CapacityEstimate(fine, "zipper", abs(fine - coarse))


def _hull_segments(hull):
    segs = []
    for s in hull.slits:
        pts = s.points()
        for i in range(len(pts) - 1):
            segs.append((pts[i], pts[i + 1]))
    return np.array(segs, dtype=np.complex128)


def hcap_mc(hull, n, seed, threads=None):
    """Monte Carlo capacity: y*E[Im B_tau] with two heights extrapolated.

    Arms at y = 50*diam and 100*diam; value = 2*E(100) - E(50) cancels the
    O(1/y) bias, err is the one-sigma width of that combination.  Walker
    streams are keyed by (seed, walker id), so results do not depend on
    the thread count.
    """
    if isinstance(hull, PolylineSlit):
        hull = Hull((hull,))
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    if hull.is_empty():
        return CapacityEstimate(0.0, "monte_carlo", 0.0, n_samples=n, seed=seed)
    from . import _mc

    if threads is not None:
        _mc.set_threads(threads)
    segs = _hull_segments(hull)
    pts = np.concatenate([segs[:, 0], segs[:, 1]])
    cx = 0.5 * (pts.real.min() + pts.real.max())
    segs = segs - cx
    rmax = max(np.abs(segs).max(), 1e-12)
    R = 2.0 * rmax
    d = hull.diam()
    sigma0 = 0.25 * d
    eps = 1e-4 * d
    n1 = n // 2
    n2 = n - n1
    means = []
    variances = []
    for y, cnt, id0 in ((50.0 * d, n1, 0), (100.0 * d, n2, n1)):
        contrib = _mc.run_arm(segs, R, y, sigma0, eps, cnt, seed, id0)
        w = y * _mc.reach_probability(R, y)
        means.append(w * contrib.mean())
        variances.append(w * w * contrib.var() / cnt)
    value = 2.0 * means[1] - means[0]
    err = math.sqrt(4.0 * variances[1] + variances[0])
    return CapacityEstimate(max(value, 0.0), "monte_carlo", err, n_samples=n, seed=seed)


def pushforward_capacity_ratio(B, x, delta_list):
    """Capacity ratios hcap(g_B(A_delta)) / delta for short vertical probes at x.

    B may be a PolylineSlit, a ComposedMap from a previous weld, or None
    for the empty hull (all ratios exactly 1).
    """
    deltas = [float(t) for t in delta_list]
    if any(t <= 0.0 for t in deltas):
        raise ValueError("probe capacities must be positive")
    if any(deltas[i + 1] >= deltas[i] for i in range(len(deltas) - 1)):
        raise ValueError("probe capacities must be strictly decreasing")
    if B is None or (isinstance(B, PolylineSlit) and B.is_empty):
        return [1.0 for _ in deltas]
    if isinstance(B, PolylineSlit):
        cm = weld(B)[1]
        probe_guard = B
    elif isinstance(B, ComposedMap):
        cm = B
        probe_guard = None
    else:
        raise TypeError("B must be a PolylineSlit, a ComposedMap, or None")
    ratios = []
    for delta in deltas:
        probe = PolylineSlit(x, (x + 1j * math.sqrt(2.0 * delta),), chart=HALF_PLANE)
        if probe_guard is not None:
            Hull((probe_guard, probe))  # raises if the probe meets B
        image = map_hull_forward(cm, refine(probe, 0.02 * probe.diam()))
        path, _ = weld(image, max_cap_step=5e-4 * image.diam() ** 2)
        ratios.append(path.b[-1] / delta)
    return ratios
