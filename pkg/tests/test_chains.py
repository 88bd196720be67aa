"""Complex construction, boundary algebra, mass and serialization."""

import math

import numpy as np
import pytest
from scipy.spatial import Delaunay

from currentlab import (Chain, boundary, build_complex, chain_from_json,
                        chain_to_json, chain_union, load_chain,
                        lower_density, mass, quadrature_measure, save_chain,
                        set_of, simplex_volume, zero_chain)
from currentlab.errors import (DegenerateSimplex, DimensionMismatch,
                               DimensionZero, EmptyRadii, IndexOutOfRange,
                               NonIntegerMultiplicity, NonUniformArity)
from currentlab.scenarios import gen_circle, gen_interval


def test_volumes_of_known_simplices():
    pts = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 3.0, 0.0],
                    [0.0, 0.0, 4.0]])
    cx = build_complex(pts, [(0, 1, 2, 3)])
    assert simplex_volume(cx, 3, 0) == pytest.approx(4.0)  # 2*3*4/6
    # faces: area of the (0,1,2) right triangle is 3
    tris = [tuple(s) for s in cx.simplices(2)]
    idx = tris.index((0, 1, 2))
    assert simplex_volume(cx, 2, idx) == pytest.approx(3.0)
    edges = [tuple(s) for s in cx.simplices(1)]
    assert simplex_volume(cx, 1, edges.index((0, 1))) == pytest.approx(2.0)


def test_face_counts(square_host):
    assert square_host.n_simplices(0) == 4
    assert square_host.n_simplices(1) == 5
    assert square_host.n_simplices(2) == 2


def test_mass_is_weighted_volume(square_host):
    theta = np.array([2.0, -3.0])
    ch = Chain(square_host, 2, theta)
    assert mass(ch) == pytest.approx(2.0 * 0.5 + 3.0 * 0.5)
    assert mass(zero_chain(square_host, 1)) == 0.0


def test_boundary_of_filled_square_is_perimeter(square_chain):
    bd = boundary(square_chain)
    assert mass(bd) == pytest.approx(4.0)  # diagonal cancels
    assert mass(boundary(bd)) == pytest.approx(0.0)


def test_boundary_squared_vanishes_on_random_chains():
    rng = np.random.default_rng(7)
    for trial in range(20):
        pts = rng.uniform(-1.0, 1.0, size=(12, 2))
        tri = Delaunay(pts)
        cx = build_complex(pts, [tuple(s) for s in tri.simplices])
        theta = rng.integers(-3, 4, size=cx.n_simplices(2)).astype(float)
        bb = boundary(boundary(Chain(cx, 2, theta)))
        assert np.all(bb.multiplicities == 0.0)


def test_chain_arithmetic(square_host):
    a = Chain(square_host, 2, np.array([1.0, 0.0]), integer=True)
    b = Chain(square_host, 2, np.array([0.0, 2.0]), integer=True)
    s = a + b
    assert np.array_equal(s.multiplicities, [1.0, 2.0])
    assert s.integer
    d = a - b
    assert np.array_equal(d.multiplicities, [1.0, -2.0])
    n = -a
    assert np.array_equal(n.multiplicities, [-1.0, 0.0])
    assert mass(2.5 * a) == pytest.approx(2.5 * 0.5)
    assert not (0.5 * a).integer
    assert (2.0 * a).integer


def test_set_of_skips_null_multiplicities(square_host):
    ch = Chain(square_host, 2, np.array([1.0, 0.0]))
    sup = set_of(ch)
    assert len(sup) == 1
    assert set(sup.vertex_indices()) == {0, 1, 2}


def test_chain_union_masses_add():
    a = gen_circle(center=(-3.0, 0.0), segments=64)
    b = gen_circle(center=(3.0, 0.0), segments=64)
    u = chain_union(a, b)
    assert mass(u) == pytest.approx(mass(a) + mass(b), rel=1e-12)
    assert np.all(boundary(u).multiplicities == 0.0)
    assert u.complex.n_simplices(0) == 128


def test_chain_union_rejects_mixed_dimensions(square_host, square_chain):
    seg = gen_interval(0.0, 1.0, 4)
    with pytest.raises(DimensionMismatch):
        chain_union(square_chain, seg)


def test_cross_complex_arithmetic_rejected(square_host):
    other = build_complex(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]),
                          [(0, 1, 2)])
    a = Chain(square_host, 2, np.array([1.0, 1.0]))
    b = Chain(other, 2, np.array([1.0]))
    with pytest.raises(DimensionMismatch):
        a + b


def test_json_roundtrip(tmp_path, square_chain):
    data = chain_to_json(square_chain)
    back = chain_from_json(data)
    assert np.array_equal(back.complex.vertices,
                          square_chain.complex.vertices)
    assert np.array_equal(back.multiplicities,
                          square_chain.multiplicities)
    path = tmp_path / "chain.json"
    save_chain(boundary(square_chain), path)
    loaded = load_chain(path)
    assert loaded.dim == 1
    assert mass(loaded) == pytest.approx(4.0)


def test_lower_density_of_a_line():
    # a ball of radius r catches an arc of length 2r, so the ratio
    # mass(B_r) / r is 2 for a straight unit-multiplicity segment
    seg = gen_interval(-2.0, 2.0, 256)
    mu = quadrature_measure(seg, 2)
    d = lower_density(mu, np.array([0.0, 0.0]), 1, [0.5, 0.25])
    assert d == pytest.approx(2.0, rel=0.03)
    doubled = Chain(seg.complex, 1, 2.0 * seg.multiplicities)
    d2 = lower_density(quadrature_measure(doubled, 2),
                       np.array([0.0, 0.0]), 1, [0.5])
    assert d2 == pytest.approx(2.0 * lower_density(
        mu, np.array([0.0, 0.0]), 1, [0.5]), rel=1e-12)
    with pytest.raises(EmptyRadii):
        lower_density(mu, np.array([0.0, 0.0]), 1, [])


def test_construction_errors():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(DegenerateSimplex):
        build_complex(pts, [(0, 1, 1)])
    with pytest.raises(NonUniformArity):
        build_complex(pts, [(0, 1, 2), (0, 1)])
    with pytest.raises(IndexOutOfRange):
        build_complex(pts, [(0, 1, 7)])
    with pytest.raises(DegenerateSimplex):
        build_complex(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
                      [(0, 1, 2)])


def test_chain_validation(square_host):
    with pytest.raises(NonIntegerMultiplicity):
        Chain(square_host, 2, np.array([0.5, 1.0]), integer=True)
    with pytest.raises(DimensionZero):
        boundary(Chain(square_host, 0, np.zeros(4)))
    with pytest.raises(DimensionMismatch):
        Chain(square_host, 2, np.ones(3))
