"""Spline and RBF trial spaces: evaluation, filtering, rank probes."""

import numpy as np
import pytest

from currentlab import (default_basis_for_chain, filter_dirichlet,
                        gram_rank, make_rbf_basis, make_spline_basis,
                        set_of)
from currentlab.chains import boundary
from currentlab.errors import (BoxDegenerate, DuplicateCenters,
                               EmptyAfterFilter)
from currentlab.scenarios import gen_circle, gen_interval


BOX2 = ((-1.0, -1.0), (1.0, 1.0))


def test_spline_atom_count():
    b = make_spline_basis(BOX2, (4, 6))
    assert len(b) == (4 + 3) * (6 + 3)
    b1 = make_spline_basis(((0.0,), (2.0,)), 5)
    assert len(b1) == 8


def test_partition_of_unity_inside_box():
    b = make_spline_basis(BOX2, (5, 5))
    rng = np.random.default_rng(21)
    pts = rng.uniform(-1.0, 1.0, size=(200, 2))
    values, grads = b.evaluate(pts)
    assert np.allclose(values.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(grads.sum(axis=1), 0.0, atol=1e-10)


def test_spline_gradients_match_finite_differences():
    b = make_spline_basis(BOX2, (4, 4))
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.9, 0.9, size=(40, 2))
    values, grads = b.evaluate(pts)
    eps = 1e-6
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = eps
        vp, _ = b.evaluate(pts + shift)
        vm, _ = b.evaluate(pts - shift)
        fd = (vp - vm) / (2.0 * eps)
        assert np.allclose(grads[:, :, axis], fd, atol=1e-6)


def test_spline_smooth_across_knots():
    # values and gradients stay continuous at a knot line
    b = make_spline_basis(((0.0,), (1.0,)), 4)
    x = np.array([[0.25 - 1e-10], [0.25 + 1e-10]])
    values, grads = b.evaluate(x)
    assert np.allclose(values[0], values[1], atol=1e-8)
    assert np.allclose(grads[0], grads[1], atol=1e-6)


def test_rbf_evaluation_matches_closed_form():
    centers = np.array([[0.0, 0.0], [1.0, 0.0]])
    b = make_rbf_basis(centers, 0.5)
    pts = np.array([[0.25, 0.1]])
    values, grads = b.evaluate(pts)
    diff = pts[0] - centers
    expected = np.exp(-np.sum(diff ** 2, axis=1) / 0.25)
    assert np.allclose(values[0], expected)
    expected_grad = (-2.0 / 0.25) * diff * expected[:, None]
    assert np.allclose(grads[0], expected_grad)


def test_default_basis_covers_chain():
    circle = gen_circle(segments=64)
    b = default_basis_for_chain(circle)
    lo, hi = b.lo, b.hi
    verts = circle.complex.vertices
    assert np.all(verts >= lo) and np.all(verts <= hi)
    values, _ = b.evaluate(verts)
    assert np.allclose(values.sum(axis=1), 1.0, atol=1e-12)


def test_default_basis_pads_flat_axes():
    seg = gen_interval(-2.0, 2.0, 16, embed_dim=2)
    b = default_basis_for_chain(seg)
    assert b.hi[1] > b.lo[1]


def test_filter_dirichlet_drops_atoms_near_endpoints():
    seg = gen_interval(-2.0, 2.0, 64, embed_dim=2)
    ends = set_of(boundary(seg))
    b = make_spline_basis(((-2.2, -0.2), (2.2, 0.2)), (20, 2))
    kept = filter_dirichlet(b, ends, 0.05)
    assert 0 < len(kept) < len(b)
    # every surviving support box stays clear of both endpoints
    boxes = kept.support_boxes
    for p in (np.array([-2.0, 0.0]), np.array([2.0, 0.0])):
        q = np.clip(p, boxes[:, 0, :], boxes[:, 1, :])
        d = np.linalg.norm(q - p, axis=1)
        assert np.all(d > 0.05)


def test_filter_dirichlet_segment_obstacle():
    # a vertical segment through the box center removes the middle atoms
    pts = np.array([[0.0, -1.0], [0.0, 1.0], [5.0, 0.0]])
    import currentlab.chains as chains
    cx = chains.build_complex(pts, [(0, 1), (1, 2)])
    ch = chains.Chain(cx, 1, np.array([1.0, 0.0]))
    b = make_spline_basis(BOX2, (8, 8))
    kept = filter_dirichlet(b, set_of(ch), 0.1)
    assert len(kept) < len(b)
    for lo, hi in kept.support_boxes:
        assert lo[0] > 0.1 or hi[0] < -0.1 or lo[1] > 1.0 or hi[1] < -1.0


def test_filter_dirichlet_can_empty():
    seg = gen_interval(-2.0, 2.0, 8, embed_dim=2)
    ends = set_of(boundary(seg))
    b = make_spline_basis(((-2.0, -0.1), (2.0, 0.1)), (2, 2))
    with pytest.raises(EmptyAfterFilter):
        filter_dirichlet(b, ends, 3.0)


def test_gram_rank_full_and_deficient():
    b = make_spline_basis(((0.0,), (1.0,)), 3)
    xs = np.linspace(-3.0, 4.0, 400)[:, None]
    assert gram_rank(b, xs) == len(b)
    # probing only half the box cannot see all atoms independently
    xs_half = np.linspace(0.0, 0.4, 200)[:, None]
    assert gram_rank(b, xs_half) < len(b)


def test_construction_errors():
    with pytest.raises(BoxDegenerate):
        make_spline_basis(((0.0, 0.0), (1.0, 0.0)), (4, 4))
    with pytest.raises(ValueError):
        make_spline_basis(BOX2, (1, 4))
    with pytest.raises(ValueError):
        make_spline_basis(BOX2, (4, 4), degree=2)
    with pytest.raises(DuplicateCenters):
        make_rbf_basis(np.array([[0.0, 0.0], [0.0, 0.0]]), 1.0)
    with pytest.raises(ValueError):
        make_rbf_basis(np.array([[0.0, 0.0]]), -1.0)
