"""Scenario generators against closed-form geometry oracles."""

import math

import numpy as np
import pytest

from currentlab import boundary, mass
from currentlab.errors import (BadRadius, CurrentLabError, EpsOutOfRange,
                               HolesOverlap, TooFewSegments)
from currentlab.scenarios import (OmegaMesh, ScenarioSpec, gen_circle,
                                  gen_dumbbell, gen_example1_curve,
                                  gen_interval, gen_omega, gen_sphere,
                                  gen_square, gen_strip_pair,
                                  gen_swiss_cheese, gen_two_circles,
                                  generate, poincare_check, scenario_names)


def _is_closed(chain):
    return bool(np.all(boundary(chain).multiplicities == 0.0))


def test_circle_mass_is_chord_perimeter():
    n = 64
    ch = gen_circle(segments=n)
    assert mass(ch) == pytest.approx(2.0 * n * math.sin(math.pi / n),
                                     rel=1e-12)
    assert _is_closed(ch)
    r = np.linalg.norm(ch.complex.vertices, axis=1)
    assert np.allclose(r, 1.0, atol=1e-12)


def test_two_circles_is_one_complex():
    ch = gen_two_circles(segments=64)
    assert ch.complex.n_simplices(1) == 128
    assert mass(ch) == pytest.approx(2.0 * mass(gen_circle(segments=64)),
                                     rel=1e-12)
    assert _is_closed(ch)


def test_pinched_curve_length_oracle():
    for eps in (0.2, 0.05):
        ch = gen_example1_curve(eps, 64)
        a = 2.0 * math.pi * eps / (1.0 + 2.0 * eps)
        L = 4.0 * math.pi / (1.0 + 2.0 * eps) + 4.0 * (3.0 - math.cos(a))
        got = mass(ch)
        assert got < L  # chords undershoot the arcs
        assert got == pytest.approx(L, rel=1e-3)
        assert _is_closed(ch)


def test_pinched_curve_shrinks_to_two_circles():
    # as eps drops, mass approaches the two-circle limit plus 8
    limit = mass(gen_two_circles(segments=256))
    gaps = [mass(gen_example1_curve(eps, 64)) - limit
            for eps in (0.2, 0.1, 0.05)]
    assert gaps[0] < gaps[1] < gaps[2] < 8.0


def test_interval_is_exact():
    ch = gen_interval(-2.0, 2.0, 33)
    assert mass(ch) == pytest.approx(4.0, rel=1e-14)
    bd = boundary(ch)
    assert np.sum(bd.multiplicities != 0.0) == 2


def test_sphere_area_and_closedness():
    ch = gen_sphere(subdivisions=2)
    assert _is_closed(ch)
    area = mass(ch)
    assert area < 4.0 * math.pi
    assert area == pytest.approx(4.0 * math.pi, rel=0.02)
    r = np.linalg.norm(ch.complex.vertices, axis=1)
    assert np.allclose(r, 1.0, atol=1e-12)
    shifted = gen_sphere(center=(5.0, 1.0, 0.0), radius=2.0,
                         subdivisions=1)
    assert mass(shifted) == pytest.approx(4.0 * mass(
        gen_sphere(subdivisions=1)), rel=1e-12)


def test_dumbbell_matches_smooth_area():
    eps = 0.05
    ch = gen_dumbbell(eps, azimuthal=32, axial=128)
    assert _is_closed(ch)
    a = 2.0 * math.pi * eps / (1.0 + 2.0 * eps)
    caps = 2.0 * (4.0 * math.pi - 2.0 * math.pi * (1.0 - math.cos(a)))
    tube = 2.0 * math.pi * math.sin(a) * 2.0 * (3.0 - math.cos(a))
    smooth = caps + tube
    got = mass(ch)
    assert got < smooth
    assert got == pytest.approx(smooth, rel=0.02)


def test_swiss_cheese_euler_characteristic():
    for level in (1, 2, 3):
        ch = gen_swiss_cheese(level)
        cx = ch.complex
        chi = (cx.n_simplices(0) - cx.n_simplices(1) + cx.n_simplices(2))
        assert chi == 1 - (2 ** level - 1) ** 2
        assert np.all(ch.multiplicities == 1.0)
        assert 0.0 < mass(ch) < 1.0


def test_swiss_cheese_mass_decreases_with_holes():
    m1 = mass(gen_swiss_cheese(1))
    hole = math.pi * (2.0 ** -2.5) ** 2
    # one interior hole plus four half and four quarter edge/corner bites
    carved = hole * (1.0 + 4.0 * 0.5 + 4.0 * 0.25)
    assert m1 == pytest.approx(1.0 - carved, rel=0.02)


def test_omega_mesh_and_poincare():
    omega = gen_omega(1.0, 0.25)
    assert isinstance(omega, OmegaMesh)
    r = np.linalg.norm(omega.chain.complex.vertices[omega.arc_vertices],
                       axis=1)
    assert np.allclose(r, 0.25, atol=1e-12)
    fine = gen_omega(1.0, 0.25, resolution=2)
    assert fine.chain.complex.n_simplices(2) == \
        4 * omega.chain.complex.n_simplices(2)
    ratio, bound = poincare_check(fine)
    assert 0.0 < ratio <= bound
    assert bound == pytest.approx(2.0 * math.sqrt(2.0) / 0.75)


def test_square_and_strip():
    sq = gen_square(8)
    assert mass(sq) == pytest.approx(1.0, rel=1e-14)
    assert sq.complex.n_simplices(2) == 128
    strip = gen_strip_pair()
    assert mass(strip) == pytest.approx(2.0, rel=1e-14)
    assert not _is_closed(strip)
    assert strip.complex.n_simplices(2) > 0


def test_generate_dispatch():
    names = scenario_names()
    assert names == sorted(names)
    assert "dumbbell" in names and "omega" in names
    ch = generate(ScenarioSpec("circle", {"segments": 16}))
    assert ch.complex.n_simplices(1) == 16
    with pytest.raises(ValueError):
        generate(ScenarioSpec("moebius", {}))


def test_parameter_validation():
    with pytest.raises(EpsOutOfRange):
        gen_example1_curve(0.3, 64)
    with pytest.raises(EpsOutOfRange):
        gen_dumbbell(0.5)
    with pytest.raises(TooFewSegments):
        gen_circle(segments=2)
    with pytest.raises(BadRadius):
        gen_circle(radius=-1.0)
    with pytest.raises(TooFewSegments):
        gen_example1_curve(0.1, 4)
    with pytest.raises(HolesOverlap):
        gen_swiss_cheese(1, R0=0.4)
    with pytest.raises(CurrentLabError):
        gen_omega(1.0, 2.0)
