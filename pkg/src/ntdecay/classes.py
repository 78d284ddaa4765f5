"""Weight sequences, decrease functions and the essential-minorant criteria.

A decrease function g is handled through its dyadic transform
gtilde(lambda) = log 1/g(1 - 2^-lambda). Weight sequences w, v are
nonincreasing bounded sequences indexed from 0. Both come either from a
named parametric family (whose asymptotic Growth certifies convergence
verdicts) or from a finite table (verdicts are then "at horizon").
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from ntdecay.counting import arcs_of, blaschke_sum, coverage_distribution, _events
from ntdecay.geometry import DEFAULT_ALPHA, DiskSequence, as_sequence, neighbor_cover_width, separation_constant
from ntdecay.series import (
    FAILS,
    HOLDS,
    UNDETERMINED,
    CriterionReport,
    Growth,
    integral_tail,
    partial_sum_evidence,
    series_trend,
)

LN2 = math.log(2.0)


def _as_array_fn(fn):
    def wrapped(x):
        return np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)

    return wrapped


# --------------------------------------------------------------------------
# decrease functions


@dataclass(frozen=True)
class DecreaseFunction:
    """A radial decrease bound g, carried by its transform gtilde."""

    spec: str
    _gtilde: Callable = field(repr=False, compare=False)
    growth: Growth | None = None
    table: tuple[float, ...] | None = None

    def gtilde(self, lam):
        """log 1/g(1 - 2^-lam), vectorized; values are capped below at 0 (g <= 1)."""
        lam = np.asarray(lam, dtype=float)
        if np.any(lam < 0):
            raise ValueError("lambda must be nonnegative")
        out = np.maximum(self._gtilde(lam), 0.0)
        if not np.all(np.isfinite(out)):
            raise ValueError(f"{self.spec}: g vanishes (gtilde infinite) at some lambda")
        return float(out) if out.ndim == 0 else out

    def levels(self, horizon: int) -> np.ndarray:
        return np.atleast_1d(self.gtilde(np.arange(horizon + 1, dtype=float)))

    def g(self, r):
        r = np.asarray(r, dtype=float)
        lam = -np.log2(1.0 - r)
        out = np.exp(-self.gtilde(lam))
        return float(out) if np.ndim(out) == 0 else out

    def log_inv_g(self, r):
        """log 1/g(r) without underflow."""
        r = np.asarray(r, dtype=float)
        return self.gtilde(-np.log2(1.0 - r))

    # named families -----------------------------------------------------

    @classmethod
    def power(cls, beta: float, shift: float = 0.0) -> "DecreaseFunction":
        """g(r) = (2^-shift (1 - r))^beta, gtilde = beta (lambda + shift) log 2."""
        _positive(beta, "beta")
        return cls(f"power:{beta:g},{shift:g}", lambda x: beta * LN2 * (x + shift), Growth(0, 1, 0))

    @classmethod
    def exponential(cls, beta: float) -> "DecreaseFunction":
        """g(r) = exp(-(1 - r)^-beta), gtilde = 2^(beta lambda)."""
        _positive(beta, "beta")
        return cls(f"exp:{beta:g}", lambda x: np.exp2(beta * x), Growth(beta, 0, 0))

    @classmethod
    def logpow(cls, gamma: float, shift: float = 0.0) -> "DecreaseFunction":
        """g(r) = exp(-log^gamma(2^shift / (1 - r))), gtilde = ((lambda + shift) log 2)^gamma."""
        _positive(gamma, "gamma")
        return cls(f"logpow:{gamma:g},{shift:g}", lambda x: (LN2 * (x + shift)) ** gamma, Growth(0, gamma, 0))

    @classmethod
    def poly(cls, gamma: float, shift: float = 1.0, scale: float = 1.0) -> "DecreaseFunction":
        """gtilde = scale (lambda + shift)^gamma."""
        _positive(gamma, "gamma")
        _positive(scale, "scale")
        return cls(f"poly:{gamma:g},{shift:g},{scale:g}", lambda x: scale * (x + shift) ** gamma, Growth(0, gamma, 0))

    @classmethod
    def log(cls, gamma: float = 1.0, shift: float = 2.0) -> "DecreaseFunction":
        """gtilde = log(lambda + shift)^gamma (very slow decrease)."""
        _positive(gamma, "gamma")
        if shift < 1:
            raise ValueError("shift must be >= 1 so that gtilde >= 0")
        return cls(f"log:{gamma:g},{shift:g}", lambda x: np.log(x + shift) ** gamma, Growth(0, 0, gamma))

    @classmethod
    def from_table(cls, values: Iterable[float], spec: str | None = None) -> "DecreaseFunction":
        """gtilde piecewise constant on [n, n+1); the last value is held beyond the table."""
        t = np.asarray(list(values), dtype=float)
        if t.size == 0:
            raise ValueError("empty gtilde table")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ValueError("gtilde table values must be finite and >= 0 (g in (0, 1])")
        if np.any(np.diff(t) < 0):
            raise ValueError("gtilde table must be nondecreasing (g nonincreasing)")
        last = t.size - 1

        def gt(x):
            return t[np.minimum(np.floor(x).astype(np.int64), last)]

        return cls(spec or "table:" + ",".join(f"{v:.17g}" for v in t), gt, None, tuple(float(v) for v in t))

    @classmethod
    def from_gtilde(cls, fn: Callable, growth: Growth | None = None, spec: str = "custom") -> "DecreaseFunction":
        return cls(spec, _as_array_fn(fn), growth)


def _positive(v: float, name: str):
    if not v > 0:
        raise ValueError(f"{name} must be positive")


def gtilde(g: DecreaseFunction, lam):
    return g.gtilde(lam)


# --------------------------------------------------------------------------
# weight sequences


@dataclass(frozen=True)
class WeightSequence:
    """Nonincreasing bounded nonnegative weights w_0, w_1, ..."""

    spec: str
    _fn: Callable = field(repr=False, compare=False)
    growth: Growth | None = None
    table: tuple[float, ...] | None = None
    role: str = "w"

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        out = self._fn(n)
        return float(out) if np.ndim(out) == 0 else out

    def values(self, horizon: int) -> np.ndarray:
        return np.atleast_1d(self(np.arange(horizon + 1, dtype=float)))

    def with_role(self, role: str) -> "WeightSequence":
        return WeightSequence(self.spec, self._fn, self.growth, self.table, role)

    def scaled(self, factor: float) -> "WeightSequence":
        fn = self._fn
        return WeightSequence(f"{self.spec}*{factor:.17g}", lambda n: factor * fn(n), self.growth, None, self.role)

    def sum_diverges(self) -> bool | None:
        if self.growth is None:
            return None
        return not self.growth.series_converges()

    def validate(self, horizon: int = 64):
        v = self.values(horizon)
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError(f"{self.spec}: weights must be finite and nonnegative")
        if np.any(np.diff(v) > 1e-15 * np.maximum(1.0, np.abs(v[:-1]))):
            raise ValueError(f"{self.spec}: weights must be nonincreasing")
        return self

    def require_admissible(self):
        """Classes S_w, L_v need sum w_n = infinity; reject a certified finite sum."""
        self.validate()
        if self.sum_diverges() is False:
            raise ValueError(f"{self.spec}: sum of weights converges, not an admissible weight")
        return self

    # families -------------------------------------------------------------

    @classmethod
    def constant(cls, c: float = 1.0) -> "WeightSequence":
        _positive(c, "c")
        return cls(f"const:{c:g}", lambda n: np.full(np.shape(n), c, dtype=float), Growth(0, 0, 0))

    @classmethod
    def power(cls, beta: float, shift: float = 1.0) -> "WeightSequence":
        """w_n = (n + shift)^-beta."""
        if beta < 0 or shift <= 0:
            raise ValueError("need beta >= 0 and shift > 0")
        return cls(f"power:{beta:g},{shift:g}", lambda n: (n + shift) ** (-beta), Growth(0, -beta, 0))

    @classmethod
    def geometric(cls, gamma: float) -> "WeightSequence":
        """w_n = 2^(-gamma n)."""
        _positive(gamma, "gamma")
        return cls(f"geom:{gamma:g}", lambda n: np.exp2(-gamma * n), Growth(-gamma, 0, 0))

    @classmethod
    def bertrand(cls, c: float, shift: float = 2.0) -> "WeightSequence":
        """w_n = 1 / ((n + shift) log^c (n + shift))."""
        if shift <= 1:
            raise ValueError("shift must exceed 1")
        return cls(f"bertrand:{c:g},{shift:g}", lambda n: 1.0 / ((n + shift) * np.log(n + shift) ** c), Growth(0, -1, -c))

    @classmethod
    def from_table(cls, values: Iterable[float], spec: str | None = None) -> "WeightSequence":
        """Tabled weights; zero beyond the table."""
        t = np.asarray(list(values), dtype=float)
        last = t.size - 1

        def fn(n):
            n = np.asarray(n)
            i = np.floor(n).astype(np.int64)
            return np.where(i <= last, t[np.minimum(i, last)], 0.0)

        return cls(spec or "table:" + ",".join(f"{v:.17g}" for v in t), fn, None, tuple(float(v) for v in t)).validate(last)

    @classmethod
    def from_f(cls, f: Callable[[float], float], horizon: int, spec: str = "from_f") -> "WeightSequence":
        """w(n) = f(2^-n) / 2^-n, with f taken constant on (2^-n-1, 2^-n]."""
        vals = [f(2.0**-n) * 2.0**n for n in range(horizon + 1)]
        return cls.from_table(vals, spec)


# --------------------------------------------------------------------------
# criteria


def _first_positive(gt: np.ndarray) -> int:
    pos = np.nonzero(gt > 0)[0]
    if pos.size == 0:
        raise ValueError("gtilde vanishes on the whole horizon")
    return int(pos[0])


def _sum_report(name: str, g: DecreaseFunction, w: WeightSequence, horizon: int, term_fn=None) -> CriterionReport:
    gt = g.levels(horizon)
    n0 = _first_positive(gt)
    n = np.arange(horizon + 1)
    if term_fn is None:
        terms = np.where(n >= n0, w.values(horizon) / np.where(gt > 0, gt, 1.0), 0.0)
    else:
        terms = term_fn(n, n0)
    evidence = partial_sum_evidence(terms)
    evidence["skipped_prefix"] = n0
    if g.growth is not None and w.growth is not None:
        cls = w.growth / g.growth
        converges = cls.series_converges()
        evidence["term_class"] = cls.describe()
        if converges:
            tail = integral_tail(lambda x: float(w(x)) / float(g.gtilde(x)), horizon + 1)
            evidence["tail_estimate"] = tail
        cert = f"Bertrand test on terms ~ {cls.describe()}"
        return CriterionReport(name, HOLDS if converges else FAILS, horizon, cert, evidence)
    trend, info = series_trend(terms)
    evidence["trend"] = {"verdict": trend, **info}
    return CriterionReport(name, UNDETERMINED, horizon, None, evidence)


def criterion_sum(g: DecreaseFunction, w: WeightSequence, horizon: int = 200) -> CriterionReport:
    """Is g an essential minorant for S_w?  Holds iff sum w_n / gtilde(n) < inf.

    Leading levels where gtilde vanishes (g = 1 near the origin) are skipped;
    they cannot affect convergence.
    """
    if w.sum_diverges() is False:
        raise ValueError("S_w needs a weight with divergent sum")
    return _sum_report("sum", g, w, horizon)


def criterion_theoremB(g: DecreaseFunction, horizon: int = 200) -> CriterionReport:
    """Essential minorant for separated non-Blaschke sequences iff sum 1/gtilde(n) < inf."""
    rep = _sum_report("theoremB", g, WeightSequence.constant(1.0), horizon)
    return rep


def criterion_integral(g: DecreaseFunction, w: WeightSequence, horizon: int = 200) -> CriterionReport:
    """Summatory-class criterion in integral form.

    With f(x) = x w(n) on (2^-n-1, 2^-n], the integral
    int_0^1 f(1-r) dr / ((1-r)^2 log 1/g(r)) splits over dyadic annuli into
    log 2 * sum_n w_n int_n^{n+1} dlambda / gtilde(lambda).
    """
    from scipy.integrate import quad

    def terms(n, n0):
        out = np.zeros(n.size)
        for i in n:
            if i < n0:
                continue
            if g.table is not None:
                out[i] = LN2 * w(i) / g.gtilde(i)
                continue
            val, _ = quad(lambda x: 1.0 / max(float(g.gtilde(x)), 1e-300), i, i + 1, limit=100)
            out[i] = LN2 * w(i) * val
        return out

    # the first level with a zero gtilde makes the annulus integral infinite
    gt = g.levels(horizon)
    n0 = _first_positive(gt)
    if n0 < horizon and g.table is None and g.gtilde(float(n0)) > 0:
        pass
    return _sum_report("integral", g, w, horizon, term_fn=lambda n, _: terms(n, n0 + 1 if gt[n0] == 0 else n0))


def _products(g: DecreaseFunction, v: WeightSequence, C: int, horizon: int) -> np.ndarray:
    n = np.arange(horizon + 1)
    return np.atleast_1d(g.gtilde((n // C).astype(float))) * v.values(horizon)


def criterion_limsup(g: DecreaseFunction, v: WeightSequence, C: int = 1, E: Iterable[int] = (), horizon: int = 200) -> CriterionReport:
    """One instance of the L_v condition: limsup over n not in E of gtilde(n // C) v_n.

    "holds" means the limsup is infinite. E must be finite (its v-sum is then
    trivially finite).
    """
    if int(C) != C or C < 1:
        raise ValueError("C must be a positive integer")
    C = int(C)
    E = sorted({int(e) for e in E})
    prod = _products(g, v, C, horizon)
    mask = np.ones(horizon + 1, dtype=bool)
    mask[[e for e in E if e <= horizon]] = False
    kept = np.where(mask, prod, -np.inf)
    A = float(kept.max())
    tail = prod[mask][-min(8, int(mask.sum())) :]
    evidence = {
        "C": C,
        "E": E,
        "sup_at_horizon": A,
        "argmax": int(np.argmax(kept)),
        "tail_products": [float(x) for x in tail],
    }
    if g.growth is not None and v.growth is not None:
        cls = g.growth.at_multiple(1.0 / C) * v.growth
        lim = cls.limit()
        evidence["product_class"] = cls.describe()
        cert = f"products ~ {cls.describe()} tend to {lim}"
        return CriterionReport("limsup", HOLDS if lim == "inf" else FAILS, horizon, cert, evidence)
    trend = "increasing" if tail.size > 1 and tail[-1] > tail[0] else "flat-or-decreasing"
    evidence["trend"] = trend
    return CriterionReport("limsup", UNDETERMINED, horizon, None, evidence)


@dataclass(frozen=True)
class ViolatingPair:
    C: int
    E: tuple[int, ...]
    A: float
    certified: bool

    def to_dict(self) -> dict:
        return {"C": self.C, "E": list(self.E), "A": self.A, "certified": self.certified}


def search_violating_pair(g: DecreaseFunction, v: WeightSequence, C_max: int = 4, budget: float = 1.0, horizon: int = 200):
    """Look for (C, E) with sum_E v_n <= budget and bounded products off E.

    For each C the indices with the largest products are put into E
    greedily while the budget allows; the remaining supremum A is the
    candidate bound. Returns the pair with the smallest A, plus all tried.
    """
    tried = []
    vv = v.values(horizon)
    for C in range(1, C_max + 1):
        prod = _products(g, v, C, horizon)
        E, spent = [], 0.0
        for i in np.argsort(-prod, kind="stable"):
            if spent + vv[i] <= budget:
                E.append(int(i))
                spent += vv[i]
            # keep scanning: smaller v further down may still fit
        mask = np.ones(horizon + 1, dtype=bool)
        mask[E] = False
        if not mask.any():
            continue
        rep = criterion_limsup(g, v, C, E, horizon)
        A = rep.evidence["sup_at_horizon"]
        tried.append((ViolatingPair(C, tuple(sorted(E)), A, rep.certified and rep.verdict == FAILS), rep))
    best = min(tried, key=lambda t: t[0].A) if tried else None
    return best, tried


def lstable_check(v: WeightSequence, eta1: float = 2.0, horizon: int = 200) -> CriterionReport:
    """Look for eta2 > 0 with v_[eta1 n] >= eta2 v_n (stability under Blaschke removal)."""
    if eta1 <= 1:
        raise ValueError("eta1 must exceed 1")
    n = np.arange(1, horizon + 1, dtype=float)
    num = np.atleast_1d(v(np.floor(eta1 * n)))
    den = np.atleast_1d(v(n))
    ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
    eta2 = float(ratio.min())
    evidence = {"eta1": eta1, "eta2_at_horizon": eta2, "ratio_tail": [float(x) for x in ratio[-4:]]}
    if v.growth is not None:
        if v.growth.a < 0:
            return CriterionReport("lstable", FAILS, horizon, "ratio ~ 2^(a (eta1-1) n) -> 0", evidence)
        limit = eta1**v.growth.b
        evidence["ratio_limit"] = limit
        evidence["L_prime_equals_L"] = True
        return CriterionReport("lstable", HOLDS, horizon, f"ratio -> eta1^b = {limit:.6g} > 0", evidence)
    evidence["L_prime_equals_L"] = eta2 > 0
    return CriterionReport("lstable", UNDETERMINED, horizon, None, evidence)


def minorant_for_L(g: DecreaseFunction, v: WeightSequence, C_max: int = 4, budget: float = 1.0, horizon: int = 200) -> CriterionReport:
    """Universal L_v condition (every C, every E with finite v-sum).

    Verdict comes from the violating-pair search; when v is stable in the
    sense of lstable_check the simplified test limsup gtilde(n) v_n = inf is
    evaluated too and reported as the fast path.
    """
    best, tried = search_violating_pair(g, v, C_max, budget, horizon)
    evidence: dict = {"tried": [t[0].to_dict() for t in tried]}
    if best is not None:
        evidence["best_pair"] = best[0].to_dict()
    stable = lstable_check(v, 2.0, horizon)
    evidence["lstable"] = stable.verdict
    if stable.verdict == HOLDS:
        fast = criterion_limsup(g, v, 1, (), horizon)
        evidence["fast_path"] = {"verdict": fast.verdict, "certificate": fast.certificate}
    if any(t[0].certified for t in tried):
        pair = best[0] if best is not None and best[0].certified else next(t[0] for t in tried if t[0].certified)
        return CriterionReport("L_v", FAILS, horizon, f"violating pair C={pair.C}, |E|={len(pair.E)}", evidence)
    if tried and all(t[1].certified and t[1].verdict == HOLDS for t in tried):
        cert = "products tend to infinity for every C; removing a set of finite v-sum leaves an infinite tail"
        return CriterionReport("L_v", HOLDS, horizon, cert, evidence)
    return CriterionReport("L_v", UNDETERMINED, horizon, None, evidence)


def relation_check(v: WeightSequence, w: WeightSequence, horizon: int = 200) -> CriterionReport:
    """L_v is contained in S_w iff sum v_n w_n diverges ("holds" = inclusion)."""
    terms = v.values(horizon) * w.values(horizon)
    evidence = partial_sum_evidence(terms)
    if v.growth is not None and w.growth is not None:
        cls = v.growth * w.growth
        conv = cls.series_converges()
        return CriterionReport("L_v in S_w", FAILS if conv else HOLDS, horizon, f"Bertrand test on {cls.describe()}", evidence)
    trend, info = series_trend(terms)
    evidence["trend"] = {"verdict": trend, **info}
    return CriterionReport("L_v in S_w", UNDETERMINED, horizon, None, evidence)


# --------------------------------------------------------------------------
# class membership


def _trend_verdict(trend: str) -> str:
    return {"divergent": HOLDS, "convergent": FAILS}.get(trend, UNDETERMINED)


def depth_increments_S(a: DiskSequence, w: WeightSequence, alpha: float) -> np.ndarray:
    """Increments of S(d) = sum_n m_{a_d}(n) w_n where a_d keeps levels <= d."""
    lv = a.levels()
    D = int(lv.max())
    S = []
    for d in range(D + 1):
        cov = coverage_distribution(a.subset(lv <= d), alpha)
        if cov.max_coverage == 0:
            S.append(0.0)
            continue
        wn = w.values(cov.max_coverage)[1:]
        S.append(math.fsum(np.asarray(cov.m) * wn))
    return np.diff(np.concatenate([[0.0], S]))


def class_membership(a, weights: WeightSequence, cls: str, alpha: float = DEFAULT_ALPHA, horizon: int | None = None) -> CriterionReport:
    """Membership of a sequence in S_w, L_v or P_w.

    a is either a finite DiskSequence (verdicts at horizon, unless it is
    visibly Blaschke) or a symbolic ring family (certified verdicts).
    """
    if cls not in ("S", "L", "P"):
        raise ValueError("class must be one of 'S', 'L', 'P'")
    if hasattr(a, "ring_levels"):
        return _ring_membership(a, weights, cls, alpha, horizon)
    a = as_sequence(a)
    if len(a) >= 2:
        sep = separation_constant(a)
        if not sep.separated:
            raise ValueError("classes are defined for separated sequences; duplicate points found")
    name = f"{cls}_{weights.spec}"
    lv = a.levels()
    D = int(lv.max()) if len(a) else 0
    horizon = D if horizon is None else horizon
    evidence: dict = {"depth": D}
    if cls == "P":
        level_mass = np.bincount(lv, weights=1.0 - a.rho, minlength=D + 1)
        terms = level_mass * weights.values(D)
        evidence.update(partial_sum_evidence(terms))
        trend, info = series_trend(terms)
        evidence["trend"] = {"verdict": trend, **info}
        return CriterionReport(name, _trend_verdict(trend), horizon, None, evidence)
    bl = blaschke_sum(a)
    evidence["blaschke"] = bl.verdict
    if cls == "S":
        terms = depth_increments_S(a, weights, alpha)
        evidence.update(partial_sum_evidence(terms))
        if bl.verdict == "convergent-with-bound":
            return CriterionReport(name, FAILS, horizon, "Blaschke sequence (geometric level tail)", evidence)
        trend, info = series_trend(terms)
        evidence["trend"] = {"verdict": trend, **info}
        return CriterionReport(name, _trend_verdict(trend), horizon, None, evidence)
    # L_v
    cov = coverage_distribution(a, alpha)
    if bl.verdict == "convergent-with-bound":
        return CriterionReport(name, FAILS, horizon, "Blaschke sequence (geometric level tail)", evidence)
    N = cov.max_coverage
    if N < 4:
        return CriterionReport(name, UNDETERMINED, horizon, None, evidence)
    vn = weights.values(N)[1:]
    ratio = np.asarray(cov.m) / vn
    lo, hi = max(1, N // 4), max(2, N // 2)
    window = ratio[lo - 1 : hi]
    evidence["ratio_min_first_half"] = float(ratio[:hi].min())
    evidence["ratio_window"] = [float(x) for x in window]
    x = np.log(np.arange(lo, lo + window.size) + 1.0)
    slope = float(np.polyfit(x, np.log(window), 1)[0]) if window.size >= 2 and np.all(window > 0) else -math.inf
    evidence["ratio_log_slope"] = slope
    verdict = HOLDS if slope > -0.5 else FAILS
    return CriterionReport(name, verdict, horizon, None, evidence)


def _ring_membership(rings, weights: WeightSequence, cls: str, alpha: float, horizon):
    name = f"{cls}_{weights.spec}"
    horizon = rings.count if horizon is None else horizon
    min_phi = rings.min_phi(alpha)
    every_ring = rings.every_ring_covers(alpha)
    evidence = {"rings": rings.count, "min_phi": min_phi, "every_ring_covers_circle": every_ring, "levels": list(rings.ring_levels)}
    if cls == "P":
        vals = np.array([weights(n) for n in rings.ring_levels])
        evidence.update(partial_sum_evidence(vals))
        cls_growth = rings.weight_growth_along_levels(weights)
        if cls_growth is not None:
            conv = cls_growth.series_converges()
            cert = f"sum_k w(n_k) with terms ~ {cls_growth.describe()}"
            return CriterionReport(name, FAILS if conv else HOLDS, horizon, cert, evidence)
        trend, info = series_trend(vals)
        evidence["trend"] = {"verdict": trend, **info}
        return CriterionReport(name, _trend_verdict(trend), horizon, None, evidence)
    if not (rings.infinite and every_ring):
        evidence["m_lower_bound"] = f"m(n) = 2pi for n <= {min_phi}"
        return CriterionReport(name, UNDETERMINED, horizon, None, evidence)
    if cls == "S":
        div = weights.sum_diverges()
        if div is None:
            return CriterionReport(name, UNDETERMINED, horizon, None, evidence)
        cert = "m_a(n) = 2pi for all n (every ring covers the circle); sum w_n " + ("diverges" if div else "converges")
        return CriterionReport(name, HOLDS if div else FAILS, horizon, cert, evidence)
    return CriterionReport(name, HOLDS, horizon, "m_a(n) = 2pi for all n and v is bounded", evidence)


# --------------------------------------------------------------------------
# W_a


@dataclass(frozen=True)
class WaReport:
    integral: float
    s_sum: float
    s_sum_shifted: float
    M: int
    chain_checked: int
    chain_violations: int

    @property
    def ratio(self) -> float:
        return self.integral / self.s_sum if self.s_sum > 0 else math.inf

    def to_dict(self) -> dict:
        return {
            "integral": self.integral,
            "sum_m_w": self.s_sum,
            "sum_m_w_shifted": self.s_sum_shifted,
            "ratio": self.ratio,
            "M": self.M,
            "chain_checked": self.chain_checked,
            "chain_violations": self.chain_violations,
        }


class WaFunction:
    """W_a(theta) = sum_k chi_{I_{a_k}}(theta) w(level of a_k)."""

    def __init__(self, a, w: WeightSequence, alpha: float = DEFAULT_ALPHA):
        self.a = as_sequence(a)
        self.w = w
        self.alpha = alpha
        c, h = arcs_of(self.a, alpha)
        self.weights = np.atleast_1d(w(self.a.levels().astype(float)))
        self._c, self._h = c, h
        full = h >= math.pi
        self._full_weight = float(self.weights[full].sum())
        proper = (h > 0) & ~full
        s = np.mod(c[proper] - h[proper], 2 * math.pi)
        e = s + 2 * h[proper]
        wt = self.weights[proper]
        wrap = e > 2 * math.pi
        starts = np.concatenate([s, np.full(int(wrap.sum()), -1.0)])
        ends = np.concatenate([np.where(wrap, 2 * math.pi, e), e[wrap] - 2 * math.pi])
        wts = np.concatenate([wt, wt[wrap]])
        so, eo = np.argsort(starts), np.argsort(ends)
        self._s, self._sw = starts[so], np.concatenate([[0.0], np.cumsum(wts[so])])
        self._e, self._ew = ends[eo], np.concatenate([[0.0], np.cumsum(wts[eo])])

    def __call__(self, theta):
        t = np.mod(np.asarray(theta, dtype=float), 2 * math.pi)
        i = np.searchsorted(self._s, t, side="left")
        j = np.searchsorted(self._e, t, side="right")
        return self._sw[i] - self._ew[j] + self._full_weight

    def integral(self) -> float:
        return math.fsum(2.0 * self._h * self.weights)


def wa_function(a, w: WeightSequence, alpha: float = DEFAULT_ALPHA, samples: int = 4096, seed: int = 0) -> tuple[WaFunction, WaReport]:
    """W_a with its exact integral and the chain bounds comparing it to sum m_a(n) w_n.

    Pointwise: at theta with phi_a(theta) = n, W_a(theta) <= M sum_{i < ceil(n/M)} w_i
    where M = N (2 M1 + 1) bounds the number of points per level in a
    Stolz angle.
    """
    from ntdecay.counting import phi_at

    a = as_sequence(a)
    W = WaFunction(a, w, alpha)
    sep = separation_constant(a) if len(a) >= 2 else None
    N = sep.max_per_cube if sep else 1
    M = max(1, N * (2 * neighbor_cover_width(alpha) + 1))
    cov = coverage_distribution(a, alpha)
    K = cov.max_coverage
    wv = w.values(K + 1)
    s_sum = math.fsum(np.asarray(cov.m) * wv[1 : K + 1]) if K else 0.0
    s_shift = math.fsum(np.asarray(cov.m) * wv[:K]) if K else 0.0
    theta = np.random.default_rng(seed).uniform(0, 2 * math.pi, samples)
    phis = np.atleast_1d(phi_at(a, theta, alpha))
    vals = np.atleast_1d(W(theta))
    cums = np.concatenate([[0.0], np.cumsum(w.values(int(phis.max()) + 1 if phis.size else 1))])
    bound = M * cums[np.ceil(phis / M).astype(int)]
    viol = int(np.sum(vals > bound * (1 + 1e-12) + 1e-12))
    return W, WaReport(W.integral(), s_sum, s_shift, M, samples, viol)


# --------------------------------------------------------------------------
# spec strings


def _read_table(path: str) -> list[float]:
    with open(path) as fh:
        text = fh.read()
    text = text.strip()
    if text.startswith("["):
        import json

        return [float(x) for x in json.loads(text)]
    return [float(x) for x in text.replace(",", " ").split()]


def _params(spec: str, body: str, lo: int, hi: int) -> list[float]:
    try:
        vals = [float(x) for x in body.split(",") if x.strip()] if body else []
    except ValueError as exc:
        raise ValueError(f"bad parameters in {spec!r}") from exc
    if not lo <= len(vals) <= hi:
        raise ValueError(f"{spec!r}: expected {lo}..{hi} parameters")
    return vals


def parse_g(spec: str) -> DecreaseFunction:
    """Decrease function from "family:params" or "@file" (a gtilde table).

    Families: power:beta[,shift], exp:beta, logpow:gamma[,shift],
    poly:gamma[,shift[,scale]], log:gamma[,shift], table:v0,v1,...
    """
    if spec.startswith("@"):
        return DecreaseFunction.from_table(_read_table(spec[1:]), spec)
    fam, _, body = spec.partition(":")
    if fam == "table":
        return DecreaseFunction.from_table(_params(spec, body, 1, 1 << 30), spec)
    makers = {
        "power": (DecreaseFunction.power, 1, 2),
        "exp": (DecreaseFunction.exponential, 1, 1),
        "logpow": (DecreaseFunction.logpow, 1, 2),
        "poly": (DecreaseFunction.poly, 1, 3),
        "log": (DecreaseFunction.log, 0, 2),
    }
    if fam not in makers:
        raise ValueError(f"unknown decrease family {fam!r}")
    fn, lo, hi = makers[fam]
    return fn(*_params(spec, body, lo, hi))


def parse_weights(spec: str, role: str = "w") -> WeightSequence:
    """Weights from "family:params" or "@file".

    Families: const:c, power:beta[,shift], geom:gamma, bertrand:c[,shift],
    table:v0,v1,...
    """
    if spec.startswith("@"):
        return WeightSequence.from_table(_read_table(spec[1:]), spec).with_role(role)
    fam, _, body = spec.partition(":")
    if fam == "table":
        return WeightSequence.from_table(_params(spec, body, 1, 1 << 30), spec).with_role(role)
    makers = {
        "const": (WeightSequence.constant, 0, 1),
        "power": (WeightSequence.power, 1, 2),
        "geom": (WeightSequence.geometric, 1, 1),
        "bertrand": (WeightSequence.bertrand, 1, 2),
    }
    if fam not in makers:
        raise ValueError(f"unknown weight family {fam!r}")
    fn, lo, hi = makers[fam]
    return fn(*_params(spec, body, lo, hi)).with_role(role).validate()
