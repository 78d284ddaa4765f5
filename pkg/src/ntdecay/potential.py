"""Poisson and Herglotz integrals of circle measures, Blaschke products and
the bounded-function witnesses built from them.

The Herglotz kernel is (e^{it} + z)/(e^{it} - z) = -i cot((t - t*)/2) with
t* = arg z + i log(1/|z|). Arcs of uniform density are integrated in closed
form; for the dyadic Cantor measures a tree walk replaces distant arcs by a
Taylor expansion of cot around the arc center, using per-level moments
(every selected arc of a level carries the same sub-measure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ntdecay.construction import DyadicMeasure
from ntdecay.geometry import TWO_PI, DiskPoint, DiskSequence, as_sequence

SERIES_TERMS = 16
ACCEPT_RATIO = 1.0 / 8.0


def _as_complex(z) -> np.ndarray:
    if isinstance(z, DiskPoint):
        z = z.z
    elif isinstance(z, DiskSequence):
        z = z.z
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("evaluation points must lie in the open unit disk")
    return z


def _scalar_or_array(out, z):
    return out.item() if np.ndim(z) == 0 and not isinstance(z, DiskSequence) else out


# --------------------------------------------------------------------------
# closed-form arcs


def arc_poisson(theta1, theta2, z) -> np.ndarray:
    """int_{theta1}^{theta2} (1 - |z|^2)/|e^{it} - z|^2 dt for 0 <= theta2 - theta1 <= 2 pi."""
    theta1, theta2 = np.asarray(theta1, float), np.asarray(theta2, float)
    z = np.asarray(z, dtype=complex)
    r, phi = np.abs(z), np.angle(z)
    delta = theta2 - theta1
    a = 0.5 * (theta2 - phi)
    b = 0.5 * (theta1 - phi)
    num = (1.0 - r) * (1.0 + r) * np.sin(0.5 * delta)
    den = (1.0 - r) ** 2 * np.cos(a) * np.cos(b) + (1.0 + r) ** 2 * np.sin(a) * np.sin(b)
    out = 2.0 * np.arctan2(num, den)
    return np.where(delta >= TWO_PI, TWO_PI, out)


def arc_herglotz(theta1, theta2, z) -> np.ndarray:
    """int_{theta1}^{theta2} (e^{it} + z)/(e^{it} - z) dt.

    Real part from arc_poisson; imaginary part is
    -2 log|sin((theta2 - t*)/2) / sin((theta1 - t*)/2)|, written with log1p.
    """
    theta1, theta2 = np.asarray(theta1, float), np.asarray(theta2, float)
    z = np.asarray(z, dtype=complex)
    r, phi = np.abs(z), np.angle(z)
    a = 0.5 * (theta2 - phi)
    mid = 0.5 * (theta1 + theta2) - phi
    delta = theta2 - theta1
    den = 4.0 * r * np.sin(a) ** 2 + (1.0 - r) ** 2
    imag = np.log1p(-4.0 * r * np.sin(0.5 * delta) * np.sin(mid) / den)
    return arc_poisson(theta1, theta2, z) + 1j * imag


def poisson_kernel(t, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (1.0 - np.abs(z) ** 2) / np.abs(np.exp(1j * np.asarray(t, float)) - z) ** 2


def herglotz_kernel(t, z) -> np.ndarray:
    e = np.exp(1j * np.asarray(t, float))
    return (e + z) / (e - z)


# --------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class CircleMeasure:
    """Atoms plus an optional dyadic Cantor part (scaled by ``dyadic_weight``)."""

    dyadic: DyadicMeasure | None = None
    atom_angles: tuple[float, ...] = ()
    atom_masses: tuple[float, ...] = ()
    dyadic_weight: float = 1.0

    def __post_init__(self):
        if len(self.atom_angles) != len(self.atom_masses):
            raise ValueError("atom angles and masses differ in length")
        if any(m < 0 for m in self.atom_masses) or self.dyadic_weight < 0:
            raise ValueError("masses must be nonnegative")

    @classmethod
    def atoms(cls, angles, masses) -> "CircleMeasure":
        return cls(None, tuple(float(a) for a in angles), tuple(float(m) for m in masses), 0.0)

    @classmethod
    def from_dyadic(cls, mu: DyadicMeasure) -> "CircleMeasure":
        return cls(mu)

    @property
    def total_mass(self) -> float:
        dy = self.dyadic_weight * self.dyadic.total_mass if self.dyadic is not None else 0.0
        return math.fsum(self.atom_masses) + dy


def _tree_herglotz(mu: DyadicMeasure, z: np.ndarray, K: int = SERIES_TERMS, ratio: float = ACCEPT_RATIO) -> np.ndarray:
    """Herglotz integral of a dyadic measure at the points z (1-d array)."""
    sel = mu.selection
    D = mu.depth
    mom = mu.normalized_moments(K)
    _, _, density = mu.arcs()
    jumps = sel.jumps
    out = np.zeros(z.size, dtype=complex)
    r = np.abs(z)
    phi = np.angle(z)
    L = np.where(r > 0, -np.log(np.where(r > 0, r, 1.0)), np.inf)
    P = np.arange(z.size)
    J = np.zeros(z.size, dtype=np.int64)
    for k in range(D + 1):
        width = TWO_PI * math.ldexp(1.0, -k)
        if k == D:
            t1 = J * width
            vals = density * arc_herglotz(t1, t1 + width, z[P])
            np.add.at(out, P, vals)
            break
        c = (J + 0.5) * width
        half = 0.5 * width
        dphi = np.angle(np.exp(1j * (c - phi[P])))
        rho = np.hypot(dphi, L[P])
        far = half <= ratio * rho
        if np.any(far):
            Pf, Jf = P[far], J[far]
            cf = (Jf + 0.5) * width
            q = z[Pf] * np.exp(-1j * cf)
            h = 0.5 * half
            beta = np.zeros((Pf.size, K), dtype=complex)
            beta[:, 0] = 1j * (1.0 + q) / (1.0 - q)
            for kk in range(K - 1):
                conv = np.einsum("pi,pi->p", beta[:, : kk + 1], beta[:, kk::-1])
                if kk == 0:
                    conv = conv + 1.0
                beta[:, kk + 1] = -h * conv / (kk + 1)
            vals = -1j * sel.mass(k) * (beta @ mom[k])
            np.add.at(out, Pf, vals)
        near = ~far
        P, J = P[near], J[near]
        if jumps[k]:
            J = 2 * J
        else:
            P = np.repeat(P, 2)
            J = np.stack([2 * J, 2 * J + 1], axis=1).ravel()
        if P.size == 0:
            break
    return out


def _brute_herglotz(mu: DyadicMeasure, z: np.ndarray) -> np.ndarray:
    """Sum of closed-form arc integrals over every support arc (reference)."""
    left, width, density = mu.arcs()
    out = np.zeros(z.size, dtype=complex)
    for i, zz in enumerate(z):
        out[i] = density * math.fsum(arc_herglotz(left, left + width, zz).real) + 1j * density * math.fsum(
            arc_herglotz(left, left + width, zz).imag
        )
    return out


def herglotz_transform(mu: CircleMeasure, z, method: str = "tree"):
    """H(z) = int (e^{it} + z)/(e^{it} - z) dmu(t); Re H is the Poisson integral."""
    zz = _as_complex(z)
    flat = np.atleast_1d(zz).ravel()
    out = np.zeros(flat.size, dtype=complex)
    for t, m in zip(mu.atom_angles, mu.atom_masses):
        out += m * herglotz_kernel(t, flat)
    if mu.dyadic is not None and mu.dyadic_weight > 0:
        fn = _tree_herglotz if method == "tree" else _brute_herglotz
        out += mu.dyadic_weight * fn(mu.dyadic, flat)
    out = out.reshape(np.shape(zz)) if np.ndim(zz) else out[0]
    return _scalar_or_array(np.asarray(out), z)


def poisson_integral(mu: CircleMeasure, z, method: str = "tree"):
    """P[mu](z) = int (1 - |z|^2)/|e^{it} - z|^2 dmu(t)."""
    zz = _as_complex(z)
    flat = np.atleast_1d(zz).ravel()
    out = np.zeros(flat.size)
    for t, m in zip(mu.atom_angles, mu.atom_masses):
        out += m * poisson_kernel(t, flat)
    if mu.dyadic is not None and mu.dyadic_weight > 0:
        if method == "tree":
            out += mu.dyadic_weight * _tree_herglotz(mu.dyadic, flat).real
        else:
            left, width, density = mu.dyadic.arcs()
            out += mu.dyadic_weight * density * np.array([math.fsum(arc_poisson(left, left + width, w)) for w in flat])
    out = out.reshape(np.shape(zz)) if np.ndim(zz) else out[0]
    return _scalar_or_array(np.asarray(out), z)


# --------------------------------------------------------------------------
# Blaschke products


def blaschke_log_modulus(zeros, z) -> np.ndarray:
    """log|B(z)|, summed factor-wise as 0.5 log1p(-(1-|b|^2)(1-|z|^2)/|1 - conj(b) z|^2)."""
    b = _zeros_array(zeros)
    zz = np.atleast_1d(_as_complex(z)).ravel()
    out = np.zeros(zz.size)
    chunk = max(1, 2_000_000 // max(1, zz.size))
    for s in range(0, b.size, chunk):
        bb = b[s : s + chunk][None, :]
        x = (1.0 - np.abs(bb) ** 2) * (1.0 - np.abs(zz[:, None]) ** 2) / np.abs(1.0 - np.conj(bb) * zz[:, None]) ** 2
        with np.errstate(divide="ignore"):
            out += 0.5 * np.log1p(-np.minimum(x, 1.0)).sum(axis=1)
    return out


def blaschke_product(zeros, z):
    """B(z) = prod (|b|/b)(b - z)/(1 - conj(b) z), with factor z for b = 0."""
    b = _zeros_array(zeros)
    zz = np.atleast_1d(_as_complex(z)).ravel()
    logmod = blaschke_log_modulus(b, zz) if b.size else np.zeros(zz.size)
    arg = np.zeros(zz.size)
    for s in range(0, b.size, 4096):
        bb = b[s : s + 4096][None, :]
        zc = zz[:, None]
        unit = np.where(bb == 0, 1.0, np.abs(bb) / np.where(bb == 0, 1.0, bb))
        fac = np.where(bb == 0, zc, unit * (bb - zc) / (1.0 - np.conj(bb) * zc))
        arg += np.angle(fac).sum(axis=1)
    out = np.exp(logmod) * np.exp(1j * arg)
    out = np.where(np.isneginf(logmod), 0.0, out)
    return out.item() if np.ndim(z) == 0 and not isinstance(z, DiskSequence) else out


def _zeros_array(zeros) -> np.ndarray:
    if zeros is None:
        return np.zeros(0, complex)
    if not isinstance(zeros, (np.ndarray, DiskSequence, DiskPoint, complex)):
        zeros = np.asarray([p.z if isinstance(p, DiskPoint) else p for p in zeros], dtype=complex)
    return np.atleast_1d(_as_complex(zeros)).ravel()


# --------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class HarmonicWitness:
    """h = C P[base]; with zeros, f = B exp(-C H[base])."""

    C: float
    base: CircleMeasure
    zeros: DiskSequence | None = None

    def h(self, z):
        return self.C * np.asarray(poisson_integral(self.base, z))

    def log_abs_f(self, z):
        val = -self.h(z)
        if self.zeros is not None and len(self.zeros):
            val = val + blaschke_log_modulus(self.zeros.z, np.atleast_1d(_as_complex(z))).reshape(np.shape(val))
        return val


def bounded_function(w: HarmonicWitness, z):
    """f(z) = B(z) exp(-C H(z)); |f| <= 1 since Re H >= 0 and |B| <= 1."""
    H = np.asarray(herglotz_transform(w.base, z)) if w.C != 0 else np.zeros(np.shape(_as_complex(z)), complex)
    f = np.exp(-w.C * H)
    if w.zeros is not None and len(w.zeros):
        f = f * np.asarray(blaschke_product(w.zeros.z, z)).reshape(np.shape(f))
    return f.item() if np.ndim(f) == 0 else f


def calibrate_C(h_values, targets) -> float:
    """Smallest power of two C with C h_k >= target_k for every k."""
    h = np.asarray(h_values, float)
    t = np.asarray(targets, float)
    if np.any(h <= 0):
        raise ValueError("harmonic values must be positive")
    ratio = float(np.max(t / h)) if t.size else 0.0
    if ratio <= 0:
        return 1.0
    C = math.ldexp(1.0, math.ceil(math.log2(ratio)))
    while np.any(C * h < t):
        C *= 2.0
    return C


@dataclass
class WitnessReport:
    C: float
    n_points: int
    min_margin: float
    violations: int
    violation_levels: dict = field(default_factory=dict)
    quantiles: list = field(default_factory=list)
    f_bound_violations: int = 0

    @property
    def holds(self) -> bool:
        return self.violations == 0 and self.f_bound_violations == 0

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "n_points": self.n_points,
            "min_margin": self.min_margin,
            "violations": self.violations,
            "violation_levels": {str(k): v for k, v in sorted(self.violation_levels.items())},
            "margin_quantiles": self.quantiles,
            "f_bound_violations": self.f_bound_violations,
            "holds": self.holds,
        }


def verify_minorant_witness(points, targets, witness: HarmonicWitness, h_values=None) -> WitnessReport:
    """Check h(a_k) >= target_k (and hence |f(a_k)| <= exp(-target_k)) at every point.

    Points that are zeros of the witness' Blaschke factor satisfy the
    bound for f trivially and are skipped.
    """
    a = as_sequence(points)
    t = np.asarray(targets, float)
    if t.size != len(a):
        raise ValueError("one target per point is required")
    if len(a) == 0:
        return WitnessReport(witness.C, 0, math.inf, 0)
    h = witness.C * np.asarray(h_values) if h_values is not None else np.atleast_1d(witness.h(a.z))
    margin = h - t
    if witness.zeros is not None and len(witness.zeros):
        logB = blaschke_log_modulus(witness.zeros.z, a.z)
        margin = np.where(np.isneginf(logB), np.inf, margin)
        logf = logB - h
    else:
        logf = -h
    bad = margin < 0
    lv = a.levels()
    levels = {int(n): int(c) for n, c in zip(*np.unique(lv[bad], return_counts=True))}
    fin = margin[np.isfinite(margin)]
    q = [float(x) for x in np.quantile(fin, [0.0, 0.1, 0.5, 0.9, 1.0])] if fin.size else []
    f_bad = int(np.sum(logf > -t + 1e-12 * np.maximum(1.0, np.abs(t))))
    return WitnessReport(witness.C, len(a), float(margin.min()), int(bad.sum()), levels, q, f_bad)


# --------------------------------------------------------------------------
# area integral


@dataclass
class AreaReport:
    contributions: list
    partial_sums: list
    verdict: str

    def to_dict(self) -> dict:
        return {"contributions": self.contributions, "partial_sums": self.partial_sums, "verdict": self.verdict}


def area_integral_check(u, g, w, n_max: int = 12, n_radial: int = 16, n_angular: int = 256) -> AreaReport:
    """Integral of f(1-|z|)/(1-|z|)^2 over {u > log 1/g(|z|)}, annulus by annulus.

    f is tied to w by f(x) = x w(n) on (2^-n-1, 2^-n]; u is any callable on
    complex arrays. Angular resolution grows like 2^n (capped) so the set is
    resolved at the scale of the annulus.
    """
    from ntdecay.series import series_trend

    contrib = []
    for n in range(n_max + 1):
        r0, r1 = 1.0 - 2.0**-n, 1.0 - 2.0 ** -(n + 1)
        dr = (r1 - r0) / n_radial
        r = r0 + dr * (np.arange(n_radial) + 0.5)
        m = int(min(n_angular * 2**n, 1 << 16))
        dt = TWO_PI / m
        t = dt * (np.arange(m) + 0.5)
        zz = r[:, None] * np.exp(1j * t[None, :])
        thresh = np.atleast_1d(g.log_inv_g(r))[:, None]
        inside = np.asarray(u(zz)) > thresh
        dens = float(w(n)) / (1.0 - r)
        contrib.append(float(np.sum(inside * (dens * r)[:, None]) * dr * dt))
    sums = np.cumsum(contrib)
    trend, _ = series_trend(contrib)
    verdict = "finite" if trend == "convergent" else ("divergent-at-resolution" if trend == "divergent" else "undetermined")
    return AreaReport(contrib, [float(s) for s in sums], verdict)


# --------------------------------------------------------------------------
# convenience for constructions


def lemma_witness(con, C: float | None = None) -> tuple[HarmonicWitness, WitnessReport]:
    """Calibrated witness for a Cantor construction: C P[mu](p_k) >= gtilde(level of p_k),
    with the Blaschke factor vanishing on b.
    """
    mu = CircleMeasure.from_dyadic(con.measure)
    p = con.p
    targets = np.atleast_1d(con.g.log_inv_g(p.rho)) if len(p) else np.zeros(0)
    h0 = np.atleast_1d(poisson_integral(mu, p.z)) if len(p) else np.zeros(0)
    if C is None:
        C = calibrate_C(h0, targets) if len(p) else 1.0
    w = HarmonicWitness(C, mu, con.b)
    rep = verify_minorant_witness(p, targets, w, h_values=h0)
    return w, rep
