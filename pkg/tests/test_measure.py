"""Quadrature measures, grid decompositions and weak-convergence gaps."""

import math

import numpy as np
import pytest

from currentlab import (Chain, build_complex, integrate, mass,
                        mass_on_grid, quadrature_measure, weak_gap)
from currentlab.errors import NonFiniteValue, UnsupportedOrder
from currentlab.measure import (MassMeasure, measure_from_csv,
                                measure_to_csv, simplex_rule)
from currentlab.scenarios import gen_circle, gen_sphere, gen_square


def test_totals_match_mass_at_every_order(square_chain):
    for order in (1, 2, 3):
        mu = quadrature_measure(square_chain, order)
        assert mu.total == pytest.approx(mass(square_chain), rel=1e-14)


def test_rule_weights_are_positive_and_normalized():
    for dim in (1, 2):
        for order in (1, 2, 3):
            bary, w = simplex_rule(dim, order)
            assert np.all(w > 0)
            assert w.sum() == pytest.approx(1.0, abs=1e-15)
            assert np.allclose(bary.sum(axis=1), 1.0)


def test_segment_rules_integrate_polynomials_exactly():
    # order-q Gauss rules are exact through degree 2q - 1
    pts = np.array([[0.0], [1.0]])
    cx = build_complex(pts, [(0, 1)])
    ch = Chain(cx, 1, np.array([1.0]))
    for order, degree in ((1, 1), (2, 3), (3, 5)):
        mu = quadrature_measure(ch, order)
        for d in range(degree + 1):
            got = integrate(mu, lambda P, d=d: P[:, 0] ** d)
            assert got == pytest.approx(1.0 / (d + 1), rel=1e-13)


def test_triangle_rules_integrate_monomials():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    cx = build_complex(pts, [(0, 1, 2)])
    mu = quadrature_measure(Chain(cx, 2, np.array([1.0])), 2)
    # int over the unit right triangle of x^a y^b = a! b! / (a+b+2)!
    def exact(a, b):
        return (math.factorial(a) * math.factorial(b)
                / math.factorial(a + b + 2))
    for a, b in ((0, 0), (1, 0), (1, 1), (2, 1), (2, 2)):
        got = integrate(mu, lambda P, a=a, b=b: P[:, 0] ** a * P[:, 1] ** b)
        assert got == pytest.approx(exact(a, b), rel=1e-12)


def test_multiplicity_scales_weights(square_chain):
    doubled = Chain(square_chain.complex, 2,
                    2.0 * square_chain.multiplicities)
    mu1 = quadrature_measure(square_chain, 2)
    mu2 = quadrature_measure(doubled, 2)
    assert np.allclose(mu2.weights, 2.0 * mu1.weights)
    assert np.array_equal(mu2.points, mu1.points)


def test_integrate_rejects_bad_fields(square_chain):
    mu = quadrature_measure(square_chain, 1)
    with pytest.raises(NonFiniteValue):
        integrate(mu, lambda P: np.full(len(P), np.nan))
    with pytest.raises(ValueError):
        integrate(mu, lambda P: np.ones(len(P) + 1))


def test_unsupported_orders():
    with pytest.raises(UnsupportedOrder):
        simplex_rule(1, 4)
    with pytest.raises(UnsupportedOrder):
        simplex_rule(3, 2)


def test_mass_on_grid_conserves_total():
    mu = quadrature_measure(gen_circle(segments=64), 2)
    rep = mass_on_grid(mu, 0.3, offset_seed=5)
    binned = sum(rep.cube_masses.values()) + rep.leftover
    assert binned == pytest.approx(mu.total, rel=1e-12)
    assert rep.leftover <= 1e-6 * mu.total
    assert all(v > 0 for v in rep.cube_masses.values())


def test_mass_on_grid_is_seeded():
    mu = quadrature_measure(gen_circle(segments=32), 1)
    a = mass_on_grid(mu, 0.4, offset_seed=3)
    b = mass_on_grid(mu, 0.4, offset_seed=3)
    assert a.offset == pytest.approx(b.offset)
    assert a.cube_masses == b.cube_masses


def test_weak_gap_shrinks_under_refinement():
    ref = quadrature_measure(gen_circle(segments=1024), 2)
    seq = [quadrature_measure(gen_circle(segments=n), 2)
           for n in (16, 64, 256)]
    tests = [lambda P: P[:, 0] ** 2, lambda P: P[:, 1]]
    gaps = weak_gap(seq, ref, tests)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] < 1e-3
    with pytest.raises(ValueError):
        weak_gap(seq, ref, [])


def test_measure_csv_roundtrip(tmp_path):
    mu = quadrature_measure(gen_sphere(subdivisions=1), 1)
    path = tmp_path / "measure.csv"
    measure_to_csv(mu, path)
    back = measure_from_csv(path)
    assert np.array_equal(back.points, mu.points)
    assert np.array_equal(back.weights, mu.weights)


def test_measure_validation():
    with pytest.raises(ValueError):
        MassMeasure(np.zeros((2, 2)), np.array([1.0, 0.0]), 1)
    with pytest.raises(ValueError):
        MassMeasure(np.zeros((2, 2)), np.array([1.0]), 1)


def test_quadrature_skips_null_simplices():
    sq = gen_square(2)
    theta = sq.multiplicities.copy()
    theta[::2] = 0.0
    half = Chain(sq.complex, 2, theta)
    mu = quadrature_measure(half, 2)
    assert mu.total == pytest.approx(mass(half), rel=1e-14)
    assert len(mu.points) < len(quadrature_measure(sq, 2).points)
