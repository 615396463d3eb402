"""Random-walk kernel for half-plane capacity, JIT-compiled.

A walker meant to start at iy is launched directly on the circle |z| = R
enclosing the hull, conditioned on reaching it: under the Joukowski map
w = z + R^2/z the circle becomes the segment [-2R, 2R] and the hitting
density of Brownian motion from the image point iY is Cauchy, so the
landing abscissa has a closed-form inverse CDF and the reach probability
P becomes a deterministic weight y*P carried outside the kernel.  A
walker that later exits the circle re-enters the same way, or dies on
the far real axis contributing zero; both branches use the exact
harmonic measure, so the jump introduces no bias.  Near the hull the
walk takes bounded Gaussian steps no longer than a fifth of the distance
to the boundary, so it cannot tunnel through a slit.

Every walker consumes its own splitmix64 stream keyed by (seed, walker
index), and results are written to one slot per walker before a serial
reduction, so estimates are bit-identical for any thread count.
"""

import numpy as np
from numba import njit, prange, set_num_threads

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SALT = np.uint64(0xA0761D6478BD642F)


@njit(cache=True)
def _draw(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def _uniform(state):
    state, z = _draw(state)
    return state, (z >> np.uint64(11)) * 1.1102230246251565e-16  # 2^-53


@njit(cache=True)
def _gauss_pair(state):
    # Box-Muller, rejected until the pair lies in the radius-4 disk
    while True:
        state, u1 = _uniform(state)
        state, u2 = _uniform(state)
        r = np.sqrt(-2.0 * np.log(u1 + 1.1102230246251565e-16))
        g1 = r * np.cos(6.283185307179586 * u2)
        g2 = r * np.sin(6.283185307179586 * u2)
        if g1 * g1 + g2 * g2 <= 16.0:
            return state, g1, g2


@njit(cache=True, parallel=True)
def run_walkers(ar, ai, br, bi, R, y, sigma0, eps, n, seed, id0, out):
    nseg = ar.shape[0]
    Y = y - R * R / y
    a_lo0 = np.arctan(-2.0 * R / Y)
    a_hi0 = np.arctan(2.0 * R / Y)
    for k in prange(n):
        state = np.uint64(seed) ^ (np.uint64(id0 + k) * _SALT)
        state, _ = _draw(state)  # decorrelate the key
        # conditioned start: landing abscissa on [-2R, 2R] from height Y
        state, u = _uniform(state)
        x = Y * np.tan(a_lo0 + u * (a_hi0 - a_lo0))
        zr = 0.5 * x
        zi = np.sqrt(max(R * R - 0.25 * x * x, 0.0))
        contrib = 0.0
        for _ in range(10_000_000):
            # exact distance to the polyline and to the real axis
            dh = 1e300
            pim = 0.0
            for j in range(nseg):
                dxr = br[j] - ar[j]
                dxi = bi[j] - ai[j]
                L2 = dxr * dxr + dxi * dxi
                t = ((zr - ar[j]) * dxr + (zi - ai[j]) * dxi) / L2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                pr = ar[j] + t * dxr
                pi = ai[j] + t * dxi
                dd = np.hypot(zr - pr, zi - pi)
                if dd < dh:
                    dh = dd
                    pim = pi
            d = dh if dh < zi else zi
            if d < eps:
                contrib = pim if dh <= zi else 0.0
                break
            st = sigma0 if sigma0 < 0.2 * d else 0.2 * d
            state, g1, g2 = _gauss_pair(state)
            zr += st * g1
            zi += st * g2
            if zr * zr + zi * zi > R * R:
                # analytic re-entry via w = z + R^2/z, unconditioned
                rho2 = zr * zr + zi * zi
                wr = zr + R * R * zr / rho2
                wi = zi - R * R * zi / rho2
                a_lo = np.arctan((-2.0 * R - wr) / wi)
                a_hi = np.arctan((2.0 * R - wr) / wi)
                state, u = _uniform(state)
                if u > (a_hi - a_lo) / np.pi:
                    contrib = 0.0
                    break
                state, v = _uniform(state)
                x = wr + wi * np.tan(a_lo + v * (a_hi - a_lo))
                zr = 0.5 * x
                zi = np.sqrt(max(R * R - 0.25 * x * x, 0.0))
        out[k] = contrib


def run_arm(segments, R, y, sigma0, eps, n, seed, id0):
    """Launch n walkers (ids id0..id0+n-1) from height y; per-walker Im values."""
    ar = np.ascontiguousarray(segments[:, 0].real)
    ai = np.ascontiguousarray(segments[:, 0].imag)
    br = np.ascontiguousarray(segments[:, 1].real)
    bi = np.ascontiguousarray(segments[:, 1].imag)
    out = np.empty(n, dtype=np.float64)
    run_walkers(ar, ai, br, bi, R, y, sigma0, eps, n, np.uint64(seed & (2**64 - 1)), id0, out)
    return out


def reach_probability(R, y):
    """P(Brownian motion from iy hits the circle |z| = R before the far real axis)."""
    Y = y - R * R / y
    return 2.0 * np.arctan(2.0 * R / Y) / np.pi


def set_threads(k):
    # results do not depend on the thread count, so clamping is safe
    from numba import config

    set_num_threads(max(1, min(int(k), config.NUMBA_NUM_THREADS)))
