"""Pseudo-hyperbolic geometry of the unit disk.

Gleason distance, Stolz angles and the arcs they cut out on the circle, and
the dyadic arc/cube decomposition used by every counting argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2.0 * math.pi

# Default Stolz aperture. Large enough that nested dyadic points see each
# other's arcs (see construction_aperture()).
DEFAULT_ALPHA = 3.0


def normalize_angle(theta):
    """Reduce an angle (or array of angles) to [0, 2pi)."""
    t = np.mod(theta, TWO_PI)
    if np.ndim(t) == 0:
        t = float(t)
        return 0.0 if t >= TWO_PI else t
    t[t >= TWO_PI] = 0.0
    return t


@dataclass(frozen=True)
class DiskPoint:
    rho: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"rho must lie in [0, 1), got {self.rho!r}")
        object.__setattr__(self, "phi", normalize_angle(float(self.phi)))

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        return cls(abs(z), math.atan2(z.imag, z.real))

    @property
    def z(self) -> complex:
        return complex(self.rho * math.cos(self.phi), self.rho * math.sin(self.phi))

    def rotated(self, angle: float) -> "DiskPoint":
        return DiskPoint(self.rho, self.phi + angle)


@dataclass
class DiskSequence:
    """A finite sequence of disk points stored column-wise.

    ``tags`` is an optional per-point integer label (the construction uses it
    to mark which sub-family a point belongs to).
    """

    rho: np.ndarray
    phi: np.ndarray
    tags: np.ndarray | None = None

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float).reshape(-1)
        self.phi = normalize_angle(np.asarray(self.phi, dtype=float).reshape(-1).copy())
        if self.rho.shape != self.phi.shape:
            raise ValueError("rho and phi must have the same length")
        if self.rho.size and (self.rho.min() < 0.0 or self.rho.max() >= 1.0):
            raise ValueError("every rho must lie in [0, 1)")
        if self.tags is not None:
            self.tags = np.asarray(self.tags, dtype=np.int64).reshape(-1)
            if self.tags.shape != self.rho.shape:
                raise ValueError("tags must match the number of points")

    @classmethod
    def empty(cls) -> "DiskSequence":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def from_points(cls, points: Iterable[DiskPoint]) -> "DiskSequence":
        pts = list(points)
        return cls(np.array([p.rho for p in pts], dtype=float), np.array([p.phi for p in pts], dtype=float))

    @classmethod
    def from_complex(cls, z) -> "DiskSequence":
        z = np.asarray(z, dtype=complex).reshape(-1)
        return cls(np.abs(z), np.angle(z))

    def __len__(self) -> int:
        return int(self.rho.size)

    def __iter__(self) -> Iterator[DiskPoint]:
        for r, p in zip(self.rho, self.phi):
            yield DiskPoint(float(r), float(p))

    @property
    def z(self) -> np.ndarray:
        return self.rho * np.exp(1j * self.phi)

    def subset(self, mask) -> "DiskSequence":
        tags = None if self.tags is None else self.tags[mask]
        return DiskSequence(self.rho[mask], self.phi[mask], tags)

    def rotated(self, angle: float) -> "DiskSequence":
        return DiskSequence(self.rho, self.phi + angle, self.tags)

    def levels(self) -> np.ndarray:
        """Dyadic level n of each point, i.e. 1 - 2^-n <= rho < 1 - 2^-(n+1)."""
        return dyadic_levels(self.rho)


def as_sequence(a) -> DiskSequence:
    if isinstance(a, DiskSequence):
        return a
    return DiskSequence.from_points(a)


def concat(*seqs: DiskSequence) -> DiskSequence:
    seqs = [as_sequence(s) for s in seqs]
    if not seqs:
        return DiskSequence.empty()
    tags = None
    if all(s.tags is not None for s in seqs):
        tags = np.concatenate([s.tags for s in seqs])
    return DiskSequence(np.concatenate([s.rho for s in seqs]), np.concatenate([s.phi for s in seqs]), tags)


# --------------------------------------------------------------------------
# distances and Stolz angles


def gleason_distance(z: DiskPoint, w: DiskPoint) -> float:
    """Pseudo-hyperbolic distance |z - w| / |1 - conj(w) z|."""
    zc, wc = z.z, w.z
    return abs(zc - wc) / abs(1.0 - wc.conjugate() * zc)


def gleason_distance_c(z, w):
    """Vectorized Gleason distance on complex inputs."""
    z = np.asarray(z)
    w = np.asarray(w)
    return np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)


def stolz_contains(z: DiskPoint, theta: float, alpha: float) -> bool:
    """Strict membership of z in the Stolz angle of aperture alpha at e^{i theta}."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return abs(1.0 - z.z * complex(math.cos(theta), -math.sin(theta))) < (1.0 + alpha) * (1.0 - z.rho)


EMPTY, PROPER, FULL = "empty", "proper", "fullCircle"


@dataclass(frozen=True)
class CircleArc:
    """Open arc {theta : |theta - center| < half_width (mod 2pi)} on the circle."""

    center: float
    half_width: float
    kind: str = field(default=PROPER)

    def __post_init__(self):
        object.__setattr__(self, "center", normalize_angle(self.center))
        hw = self.half_width
        if not 0.0 <= hw <= math.pi:
            raise ValueError("half_width must lie in [0, pi]")
        kind = FULL if hw >= math.pi else EMPTY if hw == 0.0 else PROPER
        object.__setattr__(self, "kind", kind)

    @property
    def length(self) -> float:
        return 2.0 * self.half_width

    def contains(self, theta) -> bool:
        if self.kind == FULL:
            return True
        d = np.abs(np.mod(np.asarray(theta) - self.center + math.pi, TWO_PI) - math.pi)
        return d < self.half_width


def _arc_half_widths(rho: np.ndarray, alpha: float) -> np.ndarray:
    """Half widths of the Stolz arcs I_z for |z| = rho (vectorized).

    Uses 1 - c and 1 + c in factored form so that points very close to the
    circle keep full relative precision.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rho = np.asarray(rho, dtype=float)
    k2 = (1.0 + alpha) ** 2
    x = 1.0 - rho
    out = np.full(rho.shape, math.pi)
    pos = rho > 0
    r = rho[pos]
    xp = x[pos]
    with np.errstate(over="ignore", divide="ignore"):
        # subnormal rho overflows to +-inf, which correctly gives the full circle
        one_minus_c = (k2 - 1.0) * xp * xp / (2.0 * r)
        one_plus_c = ((1.0 + r) ** 2 - k2 * xp * xp) / (2.0 * r)
    hw = 2.0 * np.arcsin(np.sqrt(np.clip(one_minus_c / 2.0, 0.0, 1.0)))
    hw = np.where(one_plus_c <= 0.0, math.pi, hw)
    out[pos] = np.minimum(hw, math.pi)
    return out


def arc_half_widths(rho, alpha: float):
    out = _arc_half_widths(np.atleast_1d(rho), alpha)
    return float(out[0]) if np.ndim(rho) == 0 else out


def stolz_arc(z: DiskPoint, alpha: float) -> CircleArc:
    """The set of boundary points whose Stolz angle contains z."""
    return CircleArc(z.phi, float(_arc_half_widths(np.array([z.rho]), alpha)[0]))


# --------------------------------------------------------------------------
# dyadic decomposition


@dataclass(frozen=True)
class DyadicIndex:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.k < 2**self.n:
            raise ValueError(f"invalid dyadic index ({self.n}, {self.k})")

    def arc(self) -> tuple[float, float]:
        w = TWO_PI * 2.0**-self.n
        return self.k * w, (self.k + 1) * w

    def radii(self) -> tuple[float, float]:
        return 1.0 - 2.0**-self.n, 1.0 - 2.0 ** -(self.n + 1)

    def contains(self, z: DiskPoint) -> bool:
        r0, r1 = self.radii()
        t0, t1 = self.arc()
        return r0 <= z.rho < r1 and t0 <= z.phi < t1


def dyadic_levels(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    x = 1.0 - rho
    # frexp gives the exact floor(log2(1/x)) for x a power of two
    mant, expo = np.frexp(x)
    n = np.where(mant == 0.5, 1 - expo, -expo).astype(np.int64)
    n = np.maximum(n, 0)
    # guard rounding in 1 - rho
    lo = 1.0 - np.ldexp(1.0, -n)
    hi = 1.0 - np.ldexp(1.0, -(n + 1))
    n = np.where(rho < lo, n - 1, n)
    n = np.where(rho >= hi, n + 1, n)
    return np.maximum(n, 0)


def dyadic_positions(n: np.ndarray, phi: np.ndarray) -> np.ndarray:
    scale = np.ldexp(1.0, n.astype(np.int64)) / TWO_PI
    k = np.floor(np.asarray(phi) * scale).astype(np.int64)
    top = np.left_shift(np.int64(1), n.astype(np.int64)) - 1
    return np.clip(k, 0, top)


def dyadic_index_of(z: DiskPoint) -> DyadicIndex:
    n = int(dyadic_levels(np.array([z.rho]))[0])
    k = int(dyadic_positions(np.array([n]), np.array([z.phi]))[0])
    return DyadicIndex(n, k)


def _cube_boundary_samples(n: int, samples: int = 65) -> np.ndarray:
    r0, r1 = 1.0 - 2.0**-n, 1.0 - 2.0 ** -(n + 1)
    w = TWO_PI * 2.0**-n
    t = np.linspace(0.0, w, samples)
    r = np.linspace(r0, r1, samples)
    edges = [r0 * np.exp(1j * t), r1 * np.exp(1j * t), r * np.exp(1j * t[0]), r * np.exp(1j * t[-1])]
    return np.concatenate(edges)


def cube_diameter(n: int, samples: int = 65) -> float:
    """Largest Gleason distance between boundary points of a level-n cube."""
    pts = _cube_boundary_samples(n, samples)
    return float(gleason_distance_c(pts[:, None], pts[None, :]).max())


def cube_diameter_bound(max_level: int = 20, samples: int = 65) -> float:
    """Numerical value of the global cube diameter bound delta_0 < 1."""
    return max(cube_diameter(n, samples) for n in range(max_level + 1))


# --------------------------------------------------------------------------
# separation


@dataclass(frozen=True)
class SeparationReport:
    delta: float
    separated: bool
    max_per_cube: int
    closest_pair: tuple[int, int] | None
    exact: bool = True

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "separated": self.separated,
            "max_per_cube": self.max_per_cube,
            "closest_pair": list(self.closest_pair) if self.closest_pair else None,
            "exact": self.exact,
        }


def max_points_per_cube(a: DiskSequence) -> int:
    a = as_sequence(a)
    if len(a) == 0:
        return 0
    n = a.levels()
    k = dyadic_positions(n, a.phi)
    keys = np.stack([n, k], axis=1)
    _, counts = np.unique(keys, axis=0, return_counts=True)
    return int(counts.max())


def _brute_force_min(z: np.ndarray) -> tuple[float, tuple[int, int]]:
    best, pair = math.inf, None
    m = z.size
    chunk = max(1, 4_000_000 // max(m, 1))
    for s in range(0, m, chunk):
        block = z[s : s + chunk]
        d = gleason_distance_c(block[:, None], z[None, :])
        rows = np.arange(block.size)
        d[rows, s + rows] = np.inf
        idx = np.unravel_index(np.argmin(d), d.shape)
        if d[idx] < best:
            best, pair = float(d[idx]), (int(s + idx[0]), int(idx[1]))
    return best, tuple(sorted(pair))


def _near_pairs_min(z: np.ndarray, levels: np.ndarray, t: float):
    """Exact minimum Gleason distance among pairs closer than t, if any.

    A pair with d_G <= t satisfies |z - w| <= t (1 - |z|^2) / (1 - t) for the
    deeper point z, so each point only needs to look at shallower-or-equal
    points inside that Euclidean ball.
    """
    reach = t / (1.0 - t)
    extra = int(math.ceil(math.log2(1.0 + 2.0 * reach))) + 1
    best, pair = math.inf, None
    order = np.argsort(levels, kind="stable")
    lv_sorted = levels[order]
    for n in np.unique(levels):
        lo = np.searchsorted(lv_sorted, n - extra, side="left")
        hi = np.searchsorted(lv_sorted, n, side="right")
        cand = order[lo:hi]
        here = order[np.searchsorted(lv_sorted, n, side="left") : hi]
        tree = cKDTree(np.column_stack([z[cand].real, z[cand].imag]))
        radii = reach * (1.0 - np.abs(z[here]) ** 2) * (1.0 + 1e-9)
        hits = tree.query_ball_point(np.column_stack([z[here].real, z[here].imag]), radii)
        for i, lst in zip(here, hits):
            if len(lst) <= 1:
                continue
            js = cand[np.asarray(lst)]
            js = js[js != i]
            if js.size == 0:
                continue
            d = gleason_distance_c(z[i], z[js])
            m = int(np.argmin(d))
            if d[m] < best:
                best, pair = float(d[m]), tuple(sorted((int(i), int(js[m]))))
    if best <= t:
        return best, pair
    return None


def separation_constant(a, brute_force_limit: int = 3000) -> SeparationReport:
    """Separation constant delta (inf of pairwise Gleason distances) and N.

    N is the maximal number of points falling in one dyadic cube.
    """
    a = as_sequence(a)
    if len(a) < 2:
        raise ValueError("separation needs at least two points")
    z = a.z
    n_max = max_points_per_cube(a)
    if len(a) <= brute_force_limit:
        delta, pair = _brute_force_min(z)
        return SeparationReport(delta, delta > 0.0, n_max, pair)
    levels = a.levels()
    for t in (0.5, 0.9, 0.99):
        found = _near_pairs_min(z, levels, t)
        if found is not None:
            delta, pair = found
            return SeparationReport(delta, delta > 0.0, n_max, pair)
    # every pair is farther than 0.99 apart: report the bound, not a value
    return SeparationReport(0.99, True, n_max, None, exact=False)


# --------------------------------------------------------------------------
# neighbor cover of Stolz angles by dyadic cubes


def _level_arc_sup(n: int, alpha: float, samples: int = 257) -> float:
    r0, r1 = 1.0 - 2.0**-n, 1.0 - 2.0 ** -(n + 1)
    rho = np.linspace(r0, r1, samples)
    return float(_arc_half_widths(rho, alpha).max())


def neighbor_cover_width(alpha: float, max_level: int = 48) -> int:
    """Least M1 with Gamma_alpha(e^{i theta}) inside the M1-neighbourhoods of
    the cubes met by the radius at theta.

    A point of the Stolz angle lying at level n is at angular distance less
    than the arc half width from theta, so its cube index differs from the
    radius' cube index by at most ceil(half_width / cube_width). At level n
    there are only 2^n cubes, which caps the requirement at 2^(n-1).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    need = 0
    for n in range(max_level + 1):
        h = _level_arc_sup(n, alpha)
        w = TWO_PI * 2.0**-n
        cap = (2**n) // 2
        m = cap if h >= math.pi else min(cap, int(math.ceil(h / w)))
        need = max(need, m)
    return need


def construction_aperture() -> float:
    """Smallest aperture for which every dyadic point p_{k,j} sees the whole
    arc I_{k,j} (so that ancestors stack up in the count).

    Requires half_width(1 - 2^-k) > pi 2^-k for all k >= 1; the binding case
    is k -> infinity, giving alpha^2 + 2 alpha > pi^2.
    """
    return -1.0 + math.sqrt(1.0 + math.pi**2)
