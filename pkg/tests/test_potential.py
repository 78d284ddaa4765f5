import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntdecay.classes import DecreaseFunction, WeightSequence
from ntdecay.construction import build_level_selection, build_measure, construct_lemma61
from ntdecay.geometry import DiskPoint, DiskSequence, gleason_distance_c
from ntdecay.potential import (
    CircleMeasure,
    HarmonicWitness,
    arc_herglotz,
    arc_poisson,
    area_integral_check,
    blaschke_product,
    bounded_function,
    calibrate_C,
    herglotz_transform,
    lemma_witness,
    poisson_integral,
    verify_minorant_witness,
)
from oracles import herglotz_imag_quad, poisson_quad

unit_atom = CircleMeasure.atoms([0.0], [1.0])


def test_atom_closed_form():
    for r in (0.0, 0.3, 0.9):
        assert poisson_integral(unit_atom, complex(r, 0)) == pytest.approx((1 + r) / (1 - r))
        h = herglotz_transform(unit_atom, complex(r, 0))
        assert h.real == pytest.approx((1 + r) / (1 - r)) and h.imag == pytest.approx(0.0, abs=1e-15)


def test_mean_value_dyadic():
    mu = CircleMeasure.from_dyadic(build_measure(build_level_selection(DecreaseFunction.power(1.0), 12)))
    assert abs(poisson_integral(mu, 0.0) - 1.0) < 1e-12
    assert herglotz_transform(mu, 0.0) == pytest.approx(1.0)


def test_reject_boundary_points():
    with pytest.raises(ValueError):
        poisson_integral(unit_atom, 1.0)
    with pytest.raises(ValueError):
        blaschke_product([DiskPoint(0.5, 0.0)], 1.0 + 0j)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0, 2 * math.pi),
    st.floats(1e-4, 2 * math.pi - 1e-4),
    st.floats(0, 0.995),
    st.floats(-math.pi, math.pi),
)
def test_arc_closed_forms_vs_quadrature(t1, d, r, phi):
    z = r * complex(math.cos(phi), math.sin(phi))
    H = arc_herglotz(t1, t1 + d, z)
    ref = poisson_quad(t1, t1 + d, z)
    assert H.real == pytest.approx(ref, rel=1e-10)
    assert arc_poisson(t1, t1 + d, z) == pytest.approx(ref, rel=1e-10)
    assert H.imag == pytest.approx(herglotz_imag_quad(t1, t1 + d, z), rel=1e-8, abs=1e-10)


def test_tree_matches_brute_force():
    con = construct_lemma61(DecreaseFunction.power(1.0), 8, margin=4)
    mu = CircleMeasure.from_dyadic(con.measure)
    rng = np.random.default_rng(0)
    z = np.concatenate([con.points.z, np.sqrt(rng.uniform(0, 0.99, 50)) * np.exp(1j * rng.uniform(0, 6.3, 50))])
    a = herglotz_transform(mu, z)
    b = herglotz_transform(mu, z, method="brute")
    np.testing.assert_allclose(a, b, rtol=1e-11)


def test_real_part_of_herglotz_is_poisson():
    mu = CircleMeasure(build_measure(build_level_selection(DecreaseFunction.log(1.0), 10)), (1.0, 4.0), (0.5, 0.25))
    rng = np.random.default_rng(2)
    z = np.sqrt(rng.uniform(0, 0.998, 300)) * np.exp(1j * rng.uniform(0, 6.3, 300))
    np.testing.assert_allclose(herglotz_transform(mu, z).real, poisson_integral(mu, z), rtol=1e-9)
    assert mu.total_mass == pytest.approx(1.75)


def test_harnack_on_pairs():
    mu = CircleMeasure.from_dyadic(build_measure(build_level_selection(DecreaseFunction.power(1.0), 12)))
    rng = np.random.default_rng(4)
    z = np.sqrt(rng.uniform(0, 0.999, 400)) * np.exp(1j * rng.uniform(0, 6.3, 400))
    a = 0.4 * np.exp(1j * rng.uniform(0, 6.3, 400))
    w = (z + a) / (1 + np.conj(a) * z)
    d = gleason_distance_c(z, w)
    hz, hw = poisson_integral(mu, z), poisson_integral(mu, w)
    assert np.all(hz / hw <= (1 + d) / (1 - d) * (1 + 1e-9))


def test_blaschke_product_basics():
    assert blaschke_product([], 0.3j) == 1.0
    assert abs(blaschke_product([DiskPoint(0.5, 0.0)], 0.0)) == pytest.approx(0.5)
    zeros = DiskSequence.from_complex(np.array([0.5, 0.3j, -0.7 + 0.1j, 0.0]))
    assert np.all(np.abs(blaschke_product(zeros, zeros.z)) < 1e-7)
    rng = np.random.default_rng(1)
    z = 0.99 * np.sqrt(rng.uniform(0, 1, 200)) * np.exp(1j * rng.uniform(0, 6.3, 200))
    B = blaschke_product(zeros, z)
    assert np.all(np.abs(B) <= 1.0)
    direct = np.ones(200, complex)
    for b in zeros.z:
        direct *= z if b == 0 else (abs(b) / b) * (b - z) / (1 - np.conj(b) * z)
    np.testing.assert_allclose(B, direct, rtol=1e-12, atol=1e-15)


def test_bounded_function_simple_cases():
    assert bounded_function(HarmonicWitness(0.0, unit_atom), 0.4) == 1.0
    f0 = bounded_function(HarmonicWitness(1.0, CircleMeasure.from_dyadic(build_measure(build_level_selection(DecreaseFunction.power(1.0), 6)))), 0.0)
    assert abs(f0) == pytest.approx(math.exp(-1.0))


def test_witness_log_decomposition():
    con = construct_lemma61(DecreaseFunction.power(1.0), 8)
    w = HarmonicWitness(2.0, CircleMeasure.from_dyadic(con.measure), con.b if len(con.b) else DiskSequence.from_complex(np.array([0.5])))
    rng = np.random.default_rng(5)
    z = 0.98 * np.sqrt(rng.uniform(0, 1, 100)) * np.exp(1j * rng.uniform(0, 6.3, 100))
    f = bounded_function(w, z)
    assert np.all(np.abs(f) <= 1.0)
    np.testing.assert_allclose(np.log(np.abs(f)), w.log_abs_f(z), rtol=1e-9, atol=1e-9)


def test_calibrate_C():
    assert calibrate_C([1.0, 2.0], [3.0, 1.0]) == 4.0
    assert calibrate_C([1.0], [0.0]) == 1.0
    assert calibrate_C([4.0], [1.0]) == 0.25


def test_verify_trivial_and_halved():
    rep = verify_minorant_witness(DiskSequence.empty(), [], HarmonicWitness(1.0, unit_atom))
    assert rep.holds and rep.n_points == 0
    con = construct_lemma61(DecreaseFunction.power(1.0), 12)
    w, rep = lemma_witness(con)
    assert rep.holds
    _, low = lemma_witness(con, C=w.C / 2)
    assert low.violations > 0
    deepest = max(low.violation_levels)
    assert deepest >= 10


def test_lower_bound_by_level():
    con = construct_lemma61(DecreaseFunction.power(1.0, 1.0), 12)
    mu = CircleMeasure.from_dyadic(con.measure)
    pts = con.points
    h = poisson_integral(mu, pts.z)
    c = h / np.ldexp(1.0, con.selection.l[pts.levels()])
    assert c.min() > 0.1


def test_area_integral_examples():
    zero = lambda z: np.zeros(np.shape(z))
    rep = area_integral_check(zero, DecreaseFunction.power(1.0), WeightSequence.constant(), n_max=4)
    assert all(c == 0 for c in rep.contributions)
    atom = lambda z: poisson_integral(unit_atom, z)
    rep = area_integral_check(atom, DecreaseFunction.logpow(2.0, 1.0), WeightSequence.constant(), n_max=10)
    assert rep.verdict == "finite"
    const = lambda z: np.full(np.shape(z), 50.0)
    rep = area_integral_check(const, DecreaseFunction.log(1.0), WeightSequence.constant(), n_max=10)
    assert rep.verdict == "divergent-at-resolution"
