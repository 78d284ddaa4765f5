"""Dyadic Cantor-type sequences and measures built from a decrease function.

Given gtilde, the level exponents l_n are the largest integers with
l_n <= log2 gtilde(n) and l_n <= l_{n+1} <= l_n + 1. Position sets J_n
keep both children of every selected dyadic arc when l stays flat and only
the first (even) child when l steps up. The points p_{n,j} sit above the
midpoints of the selected arcs; the uniform measure on the deepest selected
arcs has Poisson integral of order 2^{l_n} at p_{n,j}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ntdecay.classes import DecreaseFunction, WeightSequence, criterion_limsup, criterion_theoremB
from ntdecay.counting import coverage_distribution
from ntdecay.geometry import (
    DEFAULT_ALPHA,
    TWO_PI,
    DiskSequence,
    arc_half_widths,
    concat,
    cube_diameter_bound,
    gleason_distance_c,
)
from ntdecay.series import FAILS, HOLDS, Growth


class ConstructionRefused(Exception):
    """The requested construction would be vacuous; carries the certificate."""

    def __init__(self, message: str, certificate: dict):
        super().__init__(message)
        self.certificate = certificate


def floor_log2(x) -> np.ndarray:
    """Exact floor(log2 x) for x > 0 (frexp based); -1 << 62 for x = 0."""
    x = np.asarray(x, dtype=float)
    mant, expo = np.frexp(x)
    out = (expo - 1).astype(np.int64)
    return np.where(x > 0, out, np.int64(-(1 << 62)))


# --------------------------------------------------------------------------
# level selection


@dataclass(frozen=True)
class LevelSelection:
    """Level exponents l_0..l_N and the position sets J_n they induce.

    Levels where gtilde < 2^l_n (only possible when gtilde < 1 at the start,
    so that l is clamped at 0) are listed in ``clamped``.
    """

    l: np.ndarray
    gt: np.ndarray
    spec: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def depth(self) -> int:
        return int(self.l.size - 1)

    @property
    def exponent(self) -> np.ndarray:
        """l_n - l_0: the union of selected arcs at level n has length 2 pi 2^-(l_n - l_0)."""
        return self.l - self.l[0]

    @property
    def jumps(self) -> np.ndarray:
        """jumps[n] is True when l_{n+1} = l_n + 1 (n = 0..N-1)."""
        return np.diff(self.l) == 1

    @property
    def clamped(self) -> np.ndarray:
        return np.nonzero(np.ldexp(1.0, self.l) > self.gt)[0]

    def count(self, n: int) -> int:
        return 1 << int(n - self.exponent[n])

    def mass(self, n: int) -> float:
        """mu(I_{n,j}) for j in J_n."""
        return math.ldexp(1.0, int(self.exponent[n] - n))

    def union_length(self, n: int) -> float:
        return TWO_PI * math.ldexp(1.0, -int(self.exponent[n]))

    def positions(self, n: int) -> np.ndarray:
        """Sorted J_n."""
        if n in self._cache:
            return self._cache[n]
        if n == 0:
            J = np.zeros(1, dtype=np.int64)
        else:
            prev = self.positions(n - 1)
            if self.jumps[n - 1]:
                J = 2 * prev
            else:
                J = np.empty(2 * prev.size, dtype=np.int64)
                J[0::2] = 2 * prev
                J[1::2] = 2 * prev + 1
        self._cache[n] = J
        return J

    def forbidden_mask(self, n: int) -> int:
        """Bits of j that must vanish for j in J_n (one per halving step)."""
        mask = 0
        for k in np.nonzero(self.jumps[:n])[0]:
            mask |= 1 << int(n - k - 1)
        return mask

    def selected(self, n: int, j) -> np.ndarray:
        j = np.asarray(j, dtype=np.int64)
        return (j >= 0) & (j < (1 << n)) & ((j & self.forbidden_mask(n)) == 0)


def build_level_selection(g: DecreaseFunction, N: int) -> LevelSelection:
    """l_n = floor(min_{0<=j<=n} (log2 max(gtilde(n-j), 1) + j)) for n <= N."""
    if N < 0:
        raise ValueError("depth must be nonnegative")
    gt = g.levels(N)
    if np.any(np.diff(gt) < 0):
        raise ValueError("gtilde must be nondecreasing")
    bound = np.maximum(floor_log2(gt), 0)
    l = np.empty(N + 1, dtype=np.int64)
    l[0] = bound[0]
    for n in range(1, N + 1):
        l[n] = min(bound[n], l[n - 1] + 1)
    return LevelSelection(l, gt, g.spec)


def dyadic_point(n, j) -> np.ndarray:
    """p_{n,j} = (1 - 2^-n) exp(2 pi i 2^-n (j + 1/2)) as (rho, phi)."""
    n = np.asarray(n, dtype=np.int64)
    j = np.asarray(j, dtype=float)
    return 1.0 - np.ldexp(1.0, -n), TWO_PI * np.ldexp(j + 0.5, -n)


def level_points(sel: LevelSelection, levels) -> DiskSequence:
    """All p_{n,j}, j in J_n, for n in ``levels``; tags hold the level."""
    rho, phi, tag = [], [], []
    for n in levels:
        J = sel.positions(int(n))
        r, p = dyadic_point(np.full(J.size, n), J)
        rho.append(r)
        phi.append(p)
        tag.append(np.full(J.size, n, dtype=np.int64))
    if not rho:
        return DiskSequence.empty()
    return DiskSequence(np.concatenate(rho), np.concatenate(phi), np.concatenate(tag))


# --------------------------------------------------------------------------
# measure


@dataclass(frozen=True)
class DyadicMeasure:
    """Probability measure with density 2^(l_D - l_0) / 2pi on the level-D selected arcs."""

    selection: LevelSelection

    @property
    def depth(self) -> int:
        return self.selection.depth

    @property
    def total_mass(self) -> float:
        return 1.0

    def support(self) -> np.ndarray:
        return self.selection.positions(self.depth)

    def cylinder_mass(self, n: int, j) -> np.ndarray:
        """mu(I_{n,j}) for any n <= depth, zero off the selection."""
        if n > self.depth:
            raise ValueError("cylinder below the measure depth")
        sel = self.selection
        return np.where(sel.selected(n, j), sel.mass(n), 0.0)

    def arcs(self) -> tuple[np.ndarray, np.ndarray, float]:
        """Left endpoints and width of the support arcs, and the density per unit angle."""
        D = self.depth
        J = self.support()
        width = TWO_PI * math.ldexp(1.0, -D)
        return J * width, width, self.selection.mass(D) / width

    def normalized_moments(self, K: int) -> np.ndarray:
        """E[x^k], k < K, of the mass inside a selected level-n arc mapped onto [-1, 1].

        Every selected arc of a given level carries the same sub-measure,
        so one row per level suffices. Row n is computed from row n+1 by
        placing the child(ren) at -1/2 (and +1/2) with half the scale.
        """
        D = self.depth
        k = np.arange(K)
        mom = np.zeros((D + 1, K))
        mom[D] = np.where(k % 2 == 0, 1.0 / (k + 1), 0.0)
        binom = np.array([[math.comb(kk, i) for i in range(K)] for kk in range(K)], dtype=float)
        scale = np.ldexp(1.0, -k)
        jumps = self.selection.jumps
        for n in range(D - 1, -1, -1):
            child = mom[n + 1]
            neg = np.array([np.dot(binom[kk, : kk + 1] * (-1.0) ** (kk - np.arange(kk + 1)), child[: kk + 1]) for kk in range(K)])
            if jumps[n]:
                mom[n] = scale * neg
            else:
                pos = np.array([np.dot(binom[kk, : kk + 1], child[: kk + 1]) for kk in range(K)])
                mom[n] = scale * 0.5 * (neg + pos)
        return mom


def build_measure(sel: LevelSelection) -> DyadicMeasure:
    return DyadicMeasure(sel)


# --------------------------------------------------------------------------
# split


@dataclass(frozen=True)
class SplitResult:
    p_levels: np.ndarray
    b_levels: np.ndarray
    p: DiskSequence
    b: DiskSequence

    @property
    def empty_p(self) -> bool:
        return len(self.p) == 0


def blaschke_levels(sel: LevelSelection, N: int | None = None) -> np.ndarray:
    """A = {n : 2^(l_n + 1) < gtilde(n)}."""
    N = sel.depth if N is None else N
    l, gt = sel.l[: N + 1], sel.gt[: N + 1]
    return np.nonzero(np.ldexp(1.0, l + 1) < gt)[0]


def split_p_b(sel: LevelSelection, N: int | None = None) -> SplitResult:
    """Split p^0 (levels <= N) into p (2^l_n <= gtilde(n) <= 2^(l_n+1)) and b."""
    N = sel.depth if N is None else N
    A = blaschke_levels(sel, N)
    rest = np.setdiff1d(np.arange(N + 1), A)
    return SplitResult(rest, A, level_points(sel, rest), level_points(sel, A))


# --------------------------------------------------------------------------
# Lemma-type construction


@dataclass
class CantorConstruction:
    g: DecreaseFunction
    N: int
    selection: LevelSelection
    measure: DyadicMeasure
    split: SplitResult
    criterion: object
    flags: list[str] = field(default_factory=list)

    @property
    def p(self) -> DiskSequence:
        return self.split.p

    @property
    def b(self) -> DiskSequence:
        return self.split.b

    @property
    def points(self) -> DiskSequence:
        return concat(self.split.p, self.split.b)


def construct_lemma61(g: DecreaseFunction, N: int, margin: int = 8) -> CantorConstruction:
    """Cantor construction to depth N, with the measure carried to depth N + margin.

    Refuses when sum 1/gtilde(n) is certified convergent: p would then be
    empty from some level on and nothing could be concluded.
    """
    crit = criterion_theoremB(g, horizon=max(N, 64))
    if crit.verdict == HOLDS:
        raise ConstructionRefused(
            "sum 1/gtilde(n) converges; the construction would only produce a Blaschke sequence",
            crit.to_dict(),
        )
    sel = build_level_selection(g, N + margin)
    flags = []
    if crit.verdict != FAILS:
        flags.append("divergence of sum 1/gtilde only observed at horizon")
    clamped = [int(n) for n in sel.clamped if n <= N]
    if clamped:
        flags.append(f"gtilde < 1 at levels {clamped}: l clamped at 0")
    if N > 0 and sel.l[N] == sel.l[0]:
        flags.append("l constant up to the depth: every dyadic arc is selected")
    split = split_p_b(sel, N)
    if split.empty_p:
        flags.append("p is empty up to the depth")
    return CantorConstruction(g, N, sel, build_measure(sel), split, crit, flags)


def check_lemma61(con: CantorConstruction, alpha: float = DEFAULT_ALPHA) -> dict:
    """Violation counts for every structural property of the construction."""
    sel, N = con.selection, con.N
    l, gt = sel.l, sel.gt
    out: dict = {}
    out["step"] = int(np.sum((np.diff(l) < 0) | (np.diff(l) > 1)))
    bound = np.maximum(floor_log2(gt), 0)
    out["bound"] = int(np.sum(l > bound))
    # raising any single l_n must break the bound or a step condition
    bad = 0
    for n in range(sel.depth + 1):
        up = l[n] + 1
        ok_bound = up <= bound[n]
        ok_prev = n == 0 or up - l[n - 1] <= 1
        ok_next = n == sel.depth or l[n + 1] >= up
        bad += int(ok_bound and ok_prev and ok_next)
    out["maximality"] = bad
    e = sel.exponent
    cnt = sum(int(sel.positions(n).size != (1 << int(n - e[n]))) for n in range(N + 1))
    out["count_identity"] = cnt
    # masses: children sum to the parent on every selected cylinder
    mass_bad = 0
    mu = con.measure
    for n in range(min(N, mu.depth - 1) + 1):
        J = sel.positions(n)
        parent = mu.cylinder_mass(n, J)
        kids = mu.cylinder_mass(n + 1, 2 * J) + mu.cylinder_mass(n + 1, 2 * J + 1)
        exact = math.ldexp(1.0, int(e[n] - n))
        mass_bad += int(np.sum(parent != exact) + np.sum(kids != parent))
    out["mass"] = mass_bad
    cov = coverage_distribution(con.points, alpha)
    levels = [n for n in range(1, N + 1) if gt[n] > 0]
    out["coverage"] = int(sum(cov(n) < 1.0 / gt[n] for n in levels))
    out["coverage_union"] = int(sum(cov(n) < sel.union_length(n) * (1 - 1e-12) for n in range(1, N + 1)))
    A = con.split.b_levels
    out["distinct_l_on_A"] = int(A.size - np.unique(l[A]).size)
    b_sum = math.fsum(1.0 - con.b.rho)
    out["b_blaschke"] = int(b_sum > 2.0 * (1 + 1e-12))
    return out


# --------------------------------------------------------------------------
# thickening and the necessity construction


def thicken(a: DiskSequence, M: int, radius: float) -> tuple[DiskSequence, np.ndarray]:
    """Adjoin M points on the Gleason circle of given radius around every point.

    Returns the thickened sequence (parents first) and the parent index of
    every point.
    """
    if M < 0 or not 0 < radius < 1:
        raise ValueError("need M >= 0 and 0 < radius < 1")
    z = a.z
    K = z.size
    if M == 0 or K == 0:
        return a, np.arange(K)
    zeta = radius * np.exp(1j * (TWO_PI * (np.arange(M) + 0.5) / M))
    w = (z[:, None] + zeta[None, :]) / (1.0 + np.conj(z)[:, None] * zeta[None, :])
    comp = DiskSequence.from_complex(w.ravel())
    tags = None
    if a.tags is not None:
        tags = np.concatenate([a.tags, np.repeat(a.tags, M)])
    out = concat(DiskSequence(a.rho, a.phi), comp)
    out.tags = tags
    return out, np.concatenate([np.arange(K), np.repeat(np.arange(K), M)])


def companion_separation(M: int, radius: float) -> float:
    """Gleason distance between neighbouring companions (Moebius invariant)."""
    if M < 2:
        return 1.0
    zeta = radius * np.exp(1j * TWO_PI * np.arange(2) / M)
    return float(gleason_distance_c(zeta[0], zeta[1]))


@dataclass
class NecessityConstruction:
    v: WeightSequence
    g: DecreaseFunction
    C: int
    E: tuple[int, ...]
    A: float
    g1: DecreaseFunction
    base: CantorConstruction
    E1: tuple[int, ...]
    q: DiskSequence
    a: DiskSequence
    q_thick: DiskSequence
    a_thick: DiskSequence
    b_thick: DiskSequence
    M: int
    radius: float
    flags: list[str] = field(default_factory=list)

    @property
    def blaschke_part(self) -> DiskSequence:
        return concat(self.a_thick, self.b_thick)

    @property
    def union(self) -> DiskSequence:
        return concat(self.q_thick, self.a_thick, self.b_thick)


def construct_necessity_thm2(
    v: WeightSequence,
    g: DecreaseFunction,
    C: int = 1,
    E=(),
    N: int = 12,
    M: int = 4,
    margin: int = 8,
) -> NecessityConstruction:
    """Sequence in L'_v carrying a harmonic h >= log 1/g, when the products
    gtilde(n // C) v_n stay bounded off a finite set E.
    """
    E = tuple(sorted({int(e) for e in E}))
    if any(e < 0 for e in E):
        raise ValueError("E must contain nonnegative integers")
    v.validate()
    flags = []
    v0 = float(v(0))
    if v0 > 1:
        v = v.scaled(1.0 / v0)
        flags.append(f"v normalized by 1/{v0:g}")
    D = N + margin
    horizon = C * (D + 2)
    inst = criterion_limsup(g, v, C, E, horizon)
    if inst.verdict == HOLDS:
        raise ConstructionRefused("gtilde(n // C) v_n is unbounded off E; g is a minorant for this instance", inst.to_dict())
    A = float(inst.evidence["sup_at_horizon"])
    if not (A > 0 and math.isfinite(A)):
        raise ConstructionRefused("sup of products is not a finite positive number at horizon", inst.to_dict())
    vv = v.values(C * (D + 1))
    g1_vals = A / vv[C * (np.arange(D + 1) + 1) - 1]
    g1 = DecreaseFunction.from_table(g1_vals, spec=f"g1[A={A:.17g},C={C}]")
    base = construct_lemma61(g1, N, margin)
    flags.extend(base.flags)
    E1 = tuple(sorted({e // C for e in E}))
    p = base.p
    in_a = np.isin(p.levels(), E1)
    a, q = p.subset(in_a), p.subset(~in_a)
    radius = cube_diameter_bound() / 2.0
    qt, _ = thicken(q, M, radius)
    at, _ = thicken(a, M, radius)
    bt, _ = thicken(base.b, M, radius)
    return NecessityConstruction(v, g, C, E, A, g1, base, E1, q, a, qt, at, bt, M, radius, flags)


def measured_C_prime(m_base, m_thick, C: int, n_max: int) -> int | None:
    """Smallest integer C' > C with m_thick(C' n) >= m_base(n) for 1 <= n <= n_max."""
    for Cp in range(C + 1, 64 * (C + 1)):
        if all(m_thick(Cp * n) >= m_base(n) * (1 - 1e-12) for n in range(1, n_max + 1)):
            return Cp
    return None


def check_necessity(con: NecessityConstruction, alpha: float = DEFAULT_ALPHA) -> dict:
    """Blaschke bound for the removed part, L_v evidence and the gtilde <= gtilde_1 table."""
    N = con.base.N
    sel = con.base.selection
    out: dict = {}
    A_levels = con.base.split.b_levels
    ab = con.blaschke_part
    level_sum = np.bincount(ab.levels(), weights=1.0 - ab.rho, minlength=1)
    out["blaschke_sum"] = math.fsum(level_sum)
    # b carries one level per l value and a occupies finitely many levels
    distinct = int(A_levels.size == np.unique(sel.l[A_levels]).size)
    out["blaschke_certificate"] = (
        "b levels carry distinct l values (sum <= 2 per companion, geometric); a lives on the finite level set E1"
        if distinct
        else None
    )
    cov = coverage_distribution(con.union, alpha)
    vv = con.v.values(N)
    ratios = [cov(m) / (vv[m] / con.A) for m in range(1, N + 1)]
    out["L_v_ratio_min"] = float(min(ratios)) if ratios else math.inf
    out["L_v_violations"] = int(sum(r < 1.0 for r in ratios))
    base_cov = coverage_distribution(con.base.points, alpha)
    out["C_prime"] = measured_C_prime(base_cov, cov, con.C, N)
    q_levels = np.unique(con.q.levels())
    gt = np.atleast_1d(con.g.gtilde(q_levels.astype(float)))
    g1 = np.atleast_1d(con.g1.gtilde(q_levels.astype(float)))
    out["g_vs_g1"] = [[int(n), float(x), float(y)] for n, x, y in zip(q_levels, gt, g1)]
    out["g_vs_g1_violations"] = int(np.sum(gt > g1 * (1 + 1e-12)))
    return out


# --------------------------------------------------------------------------
# ring sequences


def _ring_window(n: int, alpha: float) -> tuple[bool, float]:
    """(arc is the full circle, hw 2^n / pi) for a ring point at level n.

    For n <= 52 the radius 1 - 2^-n is exact and the usual half width is
    used. Deeper rings use hw = 2 arcsin(y), y = x s / (2 sqrt(1 - x)),
    x = 2^-n, s = sqrt(alpha^2 + 2 alpha), evaluated as hw / x directly so
    nothing overflows.
    """
    if n <= 52:
        hw = float(arc_half_widths(1.0 - math.ldexp(1.0, -n), alpha))
        return hw >= math.pi, math.ldexp(hw, n) / math.pi
    x = math.ldexp(1.0, -n)
    sq = math.sqrt(alpha * alpha + 2 * alpha)
    y = x * sq / (2.0 * math.sqrt(1.0 - x))
    ratio = math.asin(y) / y if y > 0 else 1.0
    return False, sq / math.sqrt(1.0 - x) * ratio / math.pi


@dataclass(frozen=True)
class RingSequence:
    """Union of full rings: 2^n points at radius 1 - 2^-n, angles 2 pi j 2^-n.

    ``rule`` describes how the listed levels continue ("pow2": n_k = 2^k,
    "linear": consecutive levels) for symbolic certificates; None means the
    family is exactly the listed rings.
    """

    ring_levels: tuple[int, ...]
    rule: str | None = None

    def __post_init__(self):
        lv = self.ring_levels
        if any(n < 0 for n in lv) or any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError("ring levels must be strictly increasing nonnegative integers")
        if self.rule not in (None, "pow2", "linear"):
            raise ValueError(f"unknown ring rule {self.rule!r}")

    @property
    def count(self) -> int:
        return len(self.ring_levels)

    @property
    def infinite(self) -> bool:
        return self.rule is not None

    def per_ring_min(self, alpha: float = DEFAULT_ALPHA) -> list[int]:
        """Exact min over theta of the number of ring points seen from e^{i theta}.

        The arcs are open, of length 2 hw, centered on a lattice of step
        2 pi 2^-n; a sliding open window of length L over a lattice of step
        s always contains at least ceil(L / s) - 1 lattice points.
        """
        out = []
        for n in self.ring_levels:
            full, L = _ring_window(n, alpha)
            out.append(1 << n if full else int(math.ceil(L)) - 1)
        return out

    def per_ring_max(self, alpha: float = DEFAULT_ALPHA) -> list[int]:
        out = []
        for n in self.ring_levels:
            full, L = _ring_window(n, alpha)
            out.append(1 << n if full else int(math.floor(L)) + 1)
        return out

    def min_phi(self, alpha: float = DEFAULT_ALPHA) -> int:
        """Certified lower bound for min_theta phi_a(theta)."""
        return int(sum(self.per_ring_min(alpha)))

    def uniform_ring_min(self, alpha: float = DEFAULT_ALPHA) -> int:
        """Lower bound valid for every ring at every level.

        hw >= sqrt(alpha^2 + 2 alpha) 2^-n for a proper arc, so each ring
        sees at least ceil(sqrt(alpha^2 + 2 alpha) / pi) - 1 points.
        """
        return int(math.ceil(math.sqrt(alpha * alpha + 2 * alpha) / math.pi)) - 1

    def every_ring_covers(self, alpha: float = DEFAULT_ALPHA) -> bool:
        listed = all(m >= 1 for m in self.per_ring_min(alpha))
        if not self.infinite:
            return listed
        return listed and self.uniform_ring_min(alpha) >= 1

    def blaschke_partial_sums(self) -> list[float]:
        """Each ring contributes 2^n (1 - |a|) = 1."""
        return [float(k + 1) for k in range(self.count)]

    def weight_growth_along_levels(self, w: WeightSequence) -> Growth | None:
        """Growth in k of w(n_k), for the symbolic continuation rule."""
        if self.rule is None or w.growth is None:
            return None
        gr = w.growth
        if self.rule == "linear":
            return gr
        if gr.a < 0:
            return Growth(-1.0, 0.0, 0.0)
        return Growth(gr.b, gr.c, 0.0)

    def expand(self, max_level: int = 22) -> DiskSequence:
        if self.ring_levels and self.ring_levels[-1] > max_level:
            raise ValueError(f"refusing to enumerate a ring of 2^{self.ring_levels[-1]} points")
        rho, phi, tag = [], [], []
        for n in self.ring_levels:
            k = 1 << n
            rho.append(np.full(k, 1.0 - 2.0**-n))
            phi.append(TWO_PI * np.arange(k) / k)
            tag.append(np.full(k, n, dtype=np.int64))
        if not rho:
            return DiskSequence.empty()
        return DiskSequence(np.concatenate(rho), np.concatenate(phi), np.concatenate(tag))


def ring_counterexample(levels, rule: str | None = None) -> RingSequence:
    return RingSequence(tuple(int(n) for n in levels), rule)


def pow2_rings(K: int, start: int = 0) -> RingSequence:
    """Rings at n_k = 2^k, k = start .. start + K - 1, continued by the same rule."""
    return RingSequence(tuple(2**k for k in range(start, start + K)), "pow2")
