import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntdecay.geometry import (
    CircleArc,
    DiskPoint,
    DiskSequence,
    arc_half_widths,
    construction_aperture,
    cube_diameter_bound,
    dyadic_index_of,
    dyadic_levels,
    gleason_distance,
    neighbor_cover_width,
    separation_constant,
    stolz_arc,
    stolz_contains,
)
from oracles import in_stolz, naive_half_width

radii = st.floats(min_value=0.0, max_value=0.999999, allow_nan=False)
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
apertures = st.floats(min_value=0.05, max_value=20.0)


def test_gleason_distance_known_value():
    assert gleason_distance(DiskPoint(0.5, 0.0), DiskPoint(0.5, math.pi)) == pytest.approx(0.8)
    assert gleason_distance(DiskPoint(0.3, 1.0), DiskPoint(0.3, 1.0)) == 0.0


@given(radii, angles, radii, angles)
def test_gleason_symmetric_and_bounded(r1, t1, r2, t2):
    z, w = DiskPoint(r1, t1), DiskPoint(r2, t2)
    d = gleason_distance(z, w)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(gleason_distance(w, z), abs=1e-12)


@given(radii, angles, radii, angles, angles)
def test_gleason_rotation_invariant(r1, t1, r2, t2, s):
    z, w = DiskPoint(r1, t1), DiskPoint(r2, t2)
    assert gleason_distance(z.rotated(s), w.rotated(s)) == pytest.approx(gleason_distance(z, w), abs=1e-9)


def test_disk_point_rejects_boundary():
    with pytest.raises(ValueError):
        DiskPoint(1.0, 0.0)
    with pytest.raises(ValueError):
        DiskPoint(-0.1, 0.0)


def test_stolz_examples():
    assert not stolz_contains(DiskPoint(0.5, 0.0), math.pi, 1.0)
    assert stolz_contains(DiskPoint(0.5, 0.0), 0.0, 1.0)
    # the origin is seen from everywhere
    assert stolz_contains(DiskPoint(0.0, 0.0), 2.0, 0.1)


def test_arc_half_width_matches_arccos():
    assert arc_half_widths(0.5, 1.0) == pytest.approx(math.acos(0.25), rel=1e-14)


@given(radii, apertures)
def test_half_width_agrees_with_arccos_form(rho, alpha):
    assert arc_half_widths(rho, alpha) == pytest.approx(naive_half_width(rho, alpha), abs=1e-7)


@settings(max_examples=200)
@given(radii, angles, apertures, angles)
def test_arc_membership_is_stolz_membership(rho, phi, alpha, theta):
    z = DiskPoint(rho, phi)
    arc = stolz_arc(z, alpha)
    inside = in_stolz(z.z, theta, alpha)
    # skip angles within rounding distance of the arc endpoints
    gap = abs(abs(math.remainder(theta - phi, 2 * math.pi)) - arc.half_width)
    if gap > 1e-9:
        assert arc.contains(theta) == inside


def test_arc_kinds():
    assert CircleArc(0.0, 0.0).kind == "empty"
    assert CircleArc(0.0, math.pi).kind == "fullCircle"
    with pytest.raises(ValueError):
        CircleArc(0.0, 4.0)
    assert CircleArc(1.0, 0.5).kind == "proper"
    assert CircleArc(1.0, 0.5).length == pytest.approx(1.0)


def test_half_width_keeps_precision_near_circle():
    rho = 1 - 2.0**-40
    hw = arc_half_widths(rho, 3.0)
    assert hw / 2.0**-40 == pytest.approx(math.sqrt(15.0), rel=1e-9)


def test_dyadic_index():
    idx = dyadic_index_of(DiskPoint(0.6, math.pi))
    assert (idx.n, idx.k) == (1, 1)
    assert idx.contains(DiskPoint(0.6, math.pi))


@given(st.integers(min_value=0, max_value=50))
def test_levels_exact_at_ring_radii(n):
    assert dyadic_levels(np.array([1 - 2.0**-n]))[0] == n
    assert dyadic_levels(np.array([np.nextafter(1 - 2.0**-n, 0)]))[0] == max(n - 1, 0)


def test_cube_diameter_below_one():
    d0 = cube_diameter_bound()
    assert 0.9 < d0 < 1.0


def test_separation_on_ring():
    n = 5
    seq = DiskSequence(np.full(2**n, 1 - 2.0**-n), 2 * np.pi * np.arange(2**n) / 2**n)
    rep = separation_constant(seq)
    assert rep.separated and rep.exact
    a, b = DiskPoint(1 - 2.0**-n, 0.0), DiskPoint(1 - 2.0**-n, 2 * np.pi / 2**n)
    assert rep.delta == pytest.approx(gleason_distance(a, b), rel=1e-12)


def test_separation_large_input_matches_brute_force():
    rng = np.random.default_rng(3)
    z = 0.99 * np.sqrt(rng.uniform(0, 1, 1500)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 1500))
    seq = DiskSequence.from_complex(z)
    fast = separation_constant(seq, brute_force_limit=10)
    slow = separation_constant(seq)
    assert fast.delta == pytest.approx(slow.delta, rel=1e-12)


def test_duplicate_points_not_separated():
    seq = DiskSequence(np.array([0.5, 0.5]), np.array([1.0, 1.0]))
    assert not separation_constant(seq).separated


def test_neighbor_cover_width_monotone():
    widths = [neighbor_cover_width(a) for a in (0.5, 1.0, 3.0, 10.0)]
    assert widths == sorted(widths)
    assert neighbor_cover_width(3.0) == 1


def test_construction_aperture():
    a = construction_aperture()
    assert a * a + 2 * a == pytest.approx(math.pi**2)
    # above the threshold every p_{k,j} sees its whole dyadic arc
    for k in range(1, 30):
        assert arc_half_widths(1 - 2.0**-k, a + 1e-6) > math.pi * 2.0**-k
