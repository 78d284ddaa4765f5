"""Convergence bookkeeping for infinite series evaluated at a finite horizon.

Divergence of an infinite sum can only be certified when the terms come
from a parametric family with known asymptotics. Such terms carry a
Growth: term(n) ~ K 2^(a n) n^b (log n)^c, and Bertrand's test decides the
series. Everything else is reported "at horizon" with trend data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

HOLDS, FAILS, UNDETERMINED = "holds", "fails", "undetermined-at-horizon"


@dataclass(frozen=True)
class Growth:
    """Asymptotic class 2^(a n) n^b (log n)^c of a positive sequence."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __mul__(self, other: "Growth") -> "Growth":
        return Growth(self.a + other.a, self.b + other.b, self.c + other.c)

    def inverse(self) -> "Growth":
        return Growth(-self.a, -self.b, -self.c)

    def __truediv__(self, other: "Growth") -> "Growth":
        return self * other.inverse()

    def at_multiple(self, C: float) -> "Growth":
        """Class of n -> s(C n) (also valid for floor(n / C) with C -> 1/C)."""
        return Growth(self.a * C, self.b, self.c)

    def _sign(self) -> int:
        for v in (self.a, self.b, self.c):
            if v > 0:
                return 1
            if v < 0:
                return -1
        return 0

    def limit(self) -> str:
        return {1: "inf", -1: "zero", 0: "finite"}[self._sign()]

    def series_converges(self) -> bool:
        """Bertrand's test for sum 2^(a n) n^b (log n)^c."""
        if self.a != 0:
            return self.a < 0
        if self.b != -1:
            return self.b < -1
        return self.c < -1

    def describe(self) -> str:
        parts = []
        if self.a:
            parts.append(f"2^({self.a:g} n)")
        if self.b:
            parts.append(f"n^{self.b:g}")
        if self.c:
            parts.append(f"(log n)^{self.c:g}")
        return " ".join(parts) or "1"


@dataclass(frozen=True)
class CriterionReport:
    name: str
    verdict: str
    horizon: int
    certificate: str | None = None
    evidence: dict[str, Any] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.certificate is not None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "horizon": self.horizon,
            "certificate": self.certificate,
            "evidence": self.evidence,
        }


def checkpoints(horizon: int) -> list[int]:
    """0, 1, 2, 4, ... up to and including horizon."""
    out, n = [0], 1
    while n < horizon:
        out.append(n)
        n *= 2
    if horizon > 0:
        out.append(horizon)
    return out


def partial_sum_evidence(terms) -> dict:
    terms = np.asarray(terms, dtype=float)
    cums = np.cumsum(terms)
    h = terms.size - 1
    return {
        "partial_sums": [[n, float(cums[n])] for n in checkpoints(h)] if terms.size else [],
        "total_at_horizon": float(math.fsum(terms)),
    }


def geometric_tail(terms, window: float = 0.5, q_max: float = 0.9):
    """Tail bound if the last part of a nonnegative sequence decays geometrically.

    Uses the largest successive ratio over the final window as the rate.
    Returns None when no such decay is visible.
    """
    t = np.asarray(terms, dtype=float)
    if t.size == 0:
        return 0.0
    start = int(t.size * (1.0 - window))
    w = t[start:]
    if not np.any(w > 0):
        return 0.0
    if np.any(w <= 0) or w.size < 3:
        return None
    q = float(np.max(w[1:] / w[:-1]))
    if q > q_max:
        return None
    return float(w[-1] * q / (1.0 - q))


def series_trend(terms, window: float = 0.5, power_cut: float = -1.5) -> tuple[str, dict]:
    """Heuristic convergence trend from finitely many nonnegative terms.

    Returns ("convergent" | "divergent" | "undetermined", info). The last
    window of terms is fitted both geometrically and as a power of n; decay
    faster than n^power_cut counts as convergent.
    """
    t = np.asarray(terms, dtype=float)
    if t.size < 4:
        return "undetermined", {"reason": "too few terms"}
    start = int(t.size * (1.0 - window))
    idx = np.arange(start, t.size)
    w = t[start:]
    if not np.any(w > 0):
        return "convergent", {"reason": "terms vanish"}
    pos = w > 0
    if pos.sum() < 3:
        return "undetermined", {"reason": "too few nonzero terms"}
    if geometric_tail(w, window=1.0) is not None:
        return "convergent", {"fit": "geometric", "ratio": float(np.max(w[1:] / w[:-1]))}
    x = np.log(idx[pos] + 1.0)
    y = np.log(w[pos])
    slope = float(np.polyfit(x, y, 1)[0])
    verdict = "convergent" if slope < power_cut else "divergent"
    return verdict, {"fit": "power", "exponent": slope}


def integral_tail(fn, start: float) -> float | None:
    """Integral-test estimate of sum_{n > start} fn(n) for a decreasing fn.

    Returns None when quadrature does not report convergence.
    """
    import warnings

    from scipy.integrate import IntegrationWarning, quad

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            val, _ = quad(fn, start, math.inf, limit=200)
    except Exception:  # pragma: no cover - quad edge cases
        return None
    return float(val) if math.isfinite(val) else None
