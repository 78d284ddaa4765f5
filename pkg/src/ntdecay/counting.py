"""Nontangential counting: phi_a, its distribution m_a(n), maximal functions.

Everything here is exact arc-union arithmetic. The sets {phi_a >= n} and
{p* > lambda} are finite unions of arcs, so a sweep over sorted endpoints
gives their measures without any angular grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ntdecay.geometry import (
    DEFAULT_ALPHA,
    TWO_PI,
    DiskSequence,
    _arc_half_widths,
    as_sequence,
    separation_constant,
)
from ntdecay.series import geometric_tail


def arcs_of(a: DiskSequence, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Centers and half widths of the Stolz arcs I_{a_k}."""
    a = as_sequence(a)
    return a.phi.copy(), _arc_half_widths(a.rho, alpha)


def _events(centers: np.ndarray, hws: np.ndarray):
    """Split open arcs into non-wrapping pieces on [0, 2pi].

    Returns (full_count, starts, ends) for the proper arcs. Empty arcs are
    dropped; full-circle arcs only contribute to full_count.
    """
    full = hws >= math.pi
    proper = (hws > 0.0) & ~full
    c = centers[proper]
    h = hws[proper]
    s = np.mod(c - h, TWO_PI)
    e = s + 2.0 * h
    wrap = e > TWO_PI
    starts = np.concatenate([s, np.zeros(int(wrap.sum()))])
    ends = np.concatenate([np.where(wrap, TWO_PI, e), e[wrap] - TWO_PI])
    return int(full.sum()), starts, ends


def sweep_depths(families: Sequence[tuple[np.ndarray, np.ndarray]]):
    """Common refinement of the circle by the endpoints of several arc families.

    Returns (lengths, depths) where depths[f, i] is the number of arcs of
    family f covering elementary segment i.
    """
    pos, inc, fam, offsets = [], [], [], []
    for f, (c, h) in enumerate(families):
        full, s, e = _events(np.asarray(c, float), np.asarray(h, float))
        offsets.append(full)
        pos += [s, e]
        inc += [np.ones(s.size, np.int64), -np.ones(e.size, np.int64)]
        fam += [np.full(s.size, f), np.full(e.size, f)]
    nf = len(families)
    if pos:
        pos = np.concatenate(pos)
        inc = np.concatenate(inc)
        fam = np.concatenate(fam)
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    bounds = np.concatenate([[0.0], pos, [TWO_PI]])
    lengths = np.diff(bounds)
    depths = np.zeros((nf, lengths.size), dtype=np.int64)
    for f in range(nf):
        step = np.where(fam[order] == f, inc[order], 0)
        depths[f, 1:] = np.cumsum(step)
        depths[f] += offsets[f]
    return lengths, depths


@dataclass(frozen=True)
class CoverageTable:
    """Distribution m_a(n) = |{phi_a >= n}|, tabulated for n = 1..max_coverage.

    m(0) is taken to be 2pi by convention; m(n) = 0 beyond max_coverage.
    """

    m: tuple[float, ...]
    alpha: float
    arc_total: float = 0.0

    @property
    def max_coverage(self) -> int:
        return len(self.m)

    def __call__(self, n: int) -> float:
        if n <= 0:
            return TWO_PI
        return self.m[n - 1] if n <= len(self.m) else 0.0

    def entries(self) -> list[tuple[int, float]]:
        return [(i + 1, v) for i, v in enumerate(self.m)]

    def total(self) -> float:
        return math.fsum(self.m)

    def nt_measure_estimate(self) -> float:
        return self.m[-1] if self.m else 0.0

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "max_coverage": self.max_coverage, "m": list(self.m), "arc_total": self.arc_total}


def _table_from_depths(lengths: np.ndarray, depth: np.ndarray, alpha: float, arc_total: float) -> CoverageTable:
    dmax = int(depth.max()) if depth.size else 0
    per_depth = np.bincount(depth, weights=lengths, minlength=dmax + 1)
    # m(n) = sum_{d >= n} L_d
    tail = np.cumsum(per_depth[::-1])[::-1]
    m = tuple(float(v) for v in tail[1:])
    while m and m[-1] <= 0.0:
        m = m[:-1]
    return CoverageTable(m, alpha, arc_total)


def coverage_distribution(a, alpha: float = DEFAULT_ALPHA) -> CoverageTable:
    """Exact m_a(n) for every n by an endpoint sweep."""
    c, h = arcs_of(as_sequence(a), alpha)
    lengths, depths = sweep_depths([(c, h)])
    return _table_from_depths(lengths, depths[0], alpha, math.fsum(2.0 * h))


def phi_at(a, theta, alpha: float = DEFAULT_ALPHA):
    """Number of points of a inside the Stolz angle at e^{i theta}.

    theta may be a scalar or an array.
    """
    c, h = arcs_of(as_sequence(a), alpha)
    full, s, e = _events(c, h)
    # pieces starting at 0 come from wrapped arcs and contain theta = 0
    s = np.where(s == 0.0, -1.0, s)
    s.sort()
    e.sort()
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    count = np.searchsorted(s, t, side="left") - np.searchsorted(e, t, side="right") + full
    return int(count) if np.ndim(count) == 0 else count


def arc_union_measure(c: np.ndarray, h: np.ndarray) -> float:
    lengths, depths = sweep_depths([(c, h)])
    return float(math.fsum(lengths[depths[0] > 0]))


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UnionBoundReport:
    holds: bool
    checked: int
    first_violation: int | None
    slack: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {"holds": self.holds, "checked": self.checked, "first_violation": self.first_violation}


def union_distribution_bound(ma: CoverageTable, mb: CoverageTable, mab: CoverageTable, tol: float = 1e-9) -> UnionBoundReport:
    """Check m_{a u b}(n) <= m_a(n // 2) + m_b(n // 2) for every tabulated n."""
    if not (ma.alpha == mb.alpha == mab.alpha):
        raise ValueError("coverage tables computed at different apertures")
    top = max(mab.max_coverage, 2 * max(ma.max_coverage, mb.max_coverage) + 1)
    slack, first = [], None
    for n in range(1, top + 1):
        s = ma(n // 2) + mb(n // 2) - mab(n)
        slack.append(s)
        if s < -tol and first is None:
            first = n
    return UnionBoundReport(first is None, top, first, tuple(slack))


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BlaschkeReport:
    partial_sum: float
    verdict: str  # "convergent-with-bound" | "divergent-at-horizon"
    horizon: int
    bound: float | None
    level_sums: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "partial_sum": self.partial_sum,
            "verdict": self.verdict,
            "horizon": self.horizon,
            "bound": self.bound,
            "level_sums": list(self.level_sums),
        }


def blaschke_sum(a) -> BlaschkeReport:
    """Partial Blaschke sum with a per-dyadic-level divergence diagnostic.

    Points are grouped by dyadic level; if the level sums decay geometrically
    over the last half of the levels present, the sum is reported convergent
    with the geometric tail added as a bound. Otherwise it is divergent at
    the horizon (the deepest level present).
    """
    a = as_sequence(a)
    if len(a) == 0:
        return BlaschkeReport(0.0, "convergent-with-bound", 0, 0.0, ())
    lv = a.levels()
    horizon = int(lv.max())
    sums = np.bincount(lv, weights=1.0 - a.rho, minlength=horizon + 1)
    partial = math.fsum(1.0 - a.rho)
    tail = geometric_tail(sums)
    if tail is None:
        return BlaschkeReport(partial, "divergent-at-horizon", horizon, None, tuple(map(float, sums)))
    return BlaschkeReport(partial, "convergent-with-bound", horizon, partial + tail, tuple(map(float, sums)))


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MaximalDistribution:
    """lambda -> |{p* > lambda}| for a function p carried by finitely many points.

    thresholds are the distinct positive values in decreasing order and
    measures[i] = |union of arcs with value >= thresholds[i]|.
    """

    thresholds: tuple[float, ...]
    measures: tuple[float, ...]

    def __call__(self, lam: float) -> float:
        if lam < 0:
            return TWO_PI
        out = 0.0
        for t, m in zip(self.thresholds, self.measures):
            if t > lam:
                out = m
            else:
                break
        return out

    def at_least(self, t: float) -> float:
        """|{p* >= t}| (values are attained, so this is a union of arcs)."""
        out = 0.0
        for v, m in zip(self.thresholds, self.measures):
            if v >= t:
                out = m
            else:
                break
        return out

    def weak_l1_constant(self) -> float:
        """sup over lambda of lambda |{p* > lambda}|.

        On [t_{i+1}, t_i) the distribution equals measures[i], so the
        supremum is max_i t_i * measures[i] (approached from below).
        """
        if not self.thresholds:
            return 0.0
        return max(t * m for t, m in zip(self.thresholds, self.measures))


def maximal_distribution(a, values, alpha: float = DEFAULT_ALPHA) -> MaximalDistribution:
    a = as_sequence(a)
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size != len(a):
        raise ValueError("one value per point is required")
    if values.size and values.min() < 0:
        raise ValueError("values must be nonnegative")
    c, h = arcs_of(a, alpha)
    thresholds = sorted({float(v) for v in values if v > 0}, reverse=True)
    measures = []
    for t in thresholds:
        sel = values >= t
        measures.append(arc_union_measure(c[sel], h[sel]))
    return MaximalDistribution(tuple(thresholds), tuple(measures))


def level_set_excess(a, values, thresholds_for: Callable[[int], float], alpha: float = DEFAULT_ALPHA, n_max: int | None = None):
    """Measure of {phi_a >= n} minus {p* >= t_n} for n = 1..n_max.

    Zero everywhere means the inclusion {phi_a >= n} in {p* >= t_n} holds
    (up to null sets).
    """
    a = as_sequence(a)
    values = np.asarray(values, dtype=float)
    c, h = arcs_of(a, alpha)
    if n_max is None:
        n_max = coverage_distribution(a, alpha).max_coverage
    by_t: dict[float, list[int]] = {}
    for n in range(1, n_max + 1):
        by_t.setdefault(float(thresholds_for(n)), []).append(n)
    excess = np.zeros(n_max + 1)
    for t, ns in by_t.items():
        sel = values >= t
        lengths, depths = sweep_depths([(c, h), (c[sel], h[sel])])
        outside = depths[1] == 0
        dmax = int(depths[0].max()) if depths[0].size else 0
        per = np.bincount(depths[0][outside], weights=lengths[outside], minlength=max(dmax, n_max) + 2)
        tail = np.cumsum(per[::-1])[::-1]
        for n in ns:
            excess[n] = tail[n]
    return excess[1:]


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceProfile:
    blaschke: BlaschkeReport
    separation: float | None
    max_per_cube: int
    coverage: CoverageTable

    @property
    def blaschke_sum(self) -> float:
        return self.blaschke.partial_sum

    @property
    def nt_measure_estimate(self) -> float:
        return self.coverage.nt_measure_estimate()

    def to_dict(self) -> dict:
        return {
            "blaschke": self.blaschke.to_dict(),
            "separation": self.separation,
            "max_per_cube": self.max_per_cube,
            "coverage": self.coverage.to_dict(),
            "nt_measure_estimate": self.nt_measure_estimate,
        }


def sequence_profile(a, alpha: float = DEFAULT_ALPHA) -> SequenceProfile:
    a = as_sequence(a)
    sep = separation_constant(a) if len(a) >= 2 else None
    return SequenceProfile(
        blaschke_sum(a),
        None if sep is None else sep.delta,
        0 if sep is None else sep.max_per_cube,
        coverage_distribution(a, alpha),
    )
