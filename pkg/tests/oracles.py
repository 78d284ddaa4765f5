"""Independent reference implementations used by the tests.

Everything here is written from the definitions, deliberately avoiding the
package's own fast paths (no stable half-width formula, no sweep line, no
tree evaluation).
"""

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ntdecay.geometry import DiskSequence


def in_stolz(z, theta, alpha):
    """|1 - z e^{-i theta}| < (1 + alpha)(1 - |z|)."""
    return abs(1 - z * np.exp(-1j * theta)) < (1 + alpha) * (1 - abs(z))


def phi_brute(z, theta, alpha):
    z = np.asarray(z, dtype=complex)
    return int(np.sum(np.abs(1 - z * np.exp(-1j * theta)) < (1 + alpha) * (1 - np.abs(z))))


def naive_half_width(rho, alpha):
    """arccos form of the Stolz arc half width."""
    if rho < 1e-300:
        return math.pi
    c = (1 + rho * rho - (1 + alpha) ** 2 * (1 - rho) ** 2) / (2 * rho)
    return math.acos(max(-1.0, min(1.0, c)))


def grid_coverage(z, alpha, G=10**6):
    """m(n) from counting arcs at the G midpoints (i + 1/2) 2pi/G."""
    cell = 2 * math.pi / G
    diff = np.zeros(G + 1, np.int64)
    full = 0
    for w in np.asarray(z, dtype=complex):
        h = naive_half_width(abs(w), alpha)
        if h >= math.pi:
            full += 1
            continue
        c = math.atan2(w.imag, w.real) % (2 * math.pi)
        lo = math.floor((c - h) / cell - 0.5) + 1
        hi = math.ceil((c + h) / cell - 0.5) - 1
        if lo > hi:
            continue
        if lo < 0:
            diff[lo % G] += 1
            diff[G] -= 1
            diff[0] += 1
            diff[hi + 1] -= 1
        elif hi >= G:
            diff[lo] += 1
            diff[G] -= 1
            diff[0] += 1
            diff[hi - G + 1] -= 1
        else:
            diff[lo] += 1
            diff[hi + 1] -= 1
    depth = np.cumsum(diff[:G]) + full
    counts = np.bincount(depth, minlength=depth.max() + 2)
    return np.cumsum(counts[::-1])[::-1] * cell


def random_separated(rng, n, delta=0.2, max_level=12):
    zs = []
    while len(zs) < n:
        lv = rng.integers(0, max_level)
        r = 1 - 2.0 ** -(lv + rng.uniform(0, 1))
        z = r * np.exp(1j * rng.uniform(0, 2 * math.pi))
        if zs:
            zz = np.asarray(zs)
            if np.min(np.abs(zz - z) / np.abs(1 - np.conj(zz) * z)) < delta:
                continue
        zs.append(z)
    return DiskSequence.from_complex(np.asarray(zs))


def levels_by_max(gt):
    """l_n = max{k >= 0 : k <= log2 max(gtilde(n-j), 1) + j for 0 <= j <= n}."""
    out = []
    for n in range(len(gt)):
        k = 0
        while all(math.ldexp(1.0, k + 1 - j) <= max(gt[n - j], 1.0) for j in range(n + 1)):
            k += 1
        out.append(k)
    return out


def poisson_quad(t1, t2, z):
    r2 = abs(z) ** 2
    f = lambda t: (1 - r2) / abs(np.exp(1j * t) - z) ** 2
    pts = [math.atan2(z.imag, z.real) % (2 * math.pi)]
    pts = [p for p in pts + [p - 2 * math.pi for p in pts] if t1 < p < t2]
    return quad(f, t1, t2, epsabs=0, epsrel=1e-13, limit=400, points=pts or None)[0]


def herglotz_imag_quad(t1, t2, z):
    f = lambda t: ((np.exp(1j * t) + z) / (np.exp(1j * t) - z)).imag
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(f, t1, t2, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
