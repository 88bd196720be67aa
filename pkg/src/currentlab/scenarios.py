"""Scenario families for the convergence studies.

Curve families (circles, the pinched two-circle loop), surfaces of
revolution (dumbbell), icospheres, perforated squares, the quarter-square
Poincare domain, and plain structured hosts for flat-norm experiments.
All generators return integer chains with consistent orientation and are
deterministic in their parameters.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial import Delaunay, cKDTree

from .chains import Chain, SimplicialComplex, boundary, build_complex
from .errors import (BadRadius, CurrentLabError, EpsOutOfRange,
                     HolesOverlap, TooFewSegments)
from .spectral import intrinsic_surface_spectrum

GRADING_RATIO = 1.2
GRADING_CAP_STEPS = 9


def gen_circle(center=(0.0, 0.0), radius=1.0, segments=64, orientation=1):
    """Closed polygonal circle, counterclockwise for orientation +1."""
    if radius <= 0:
        raise BadRadius("radius must be positive")
    if segments < 3:
        raise TooFewSegments("a circle needs at least 3 segments")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    center = np.asarray(center, dtype=np.float64)
    ang = 2.0 * np.pi * np.arange(segments) / segments
    ring = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    pts = np.zeros((segments, center.shape[0]))
    pts[:, :2] = ring
    pts += center
    edges = [(i, (i + 1) % segments) for i in range(segments)]
    cx = build_complex(pts, edges)
    return Chain(cx, 1, float(orientation) * np.ones(segments),
                 integer=True)


def gen_two_circles(centers=((-3.0, 0.0), (3.0, 0.0)), radius=1.0,
                    segments=128):
    """Disjoint union of two circles as a single chain (one complex)."""
    if radius <= 0:
        raise BadRadius("radius must be positive")
    if segments < 3:
        raise TooFewSegments("a circle needs at least 3 segments")
    c0 = np.asarray(centers[0], dtype=np.float64)
    c1 = np.asarray(centers[1], dtype=np.float64)
    ang = 2.0 * np.pi * np.arange(segments) / segments
    ring = radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    pts = np.vstack([ring + c0, ring + c1])
    edges = [(i, (i + 1) % segments) for i in range(segments)]
    edges += [(segments + i, segments + (i + 1) % segments)
              for i in range(segments)]
    cx = build_complex(pts, edges)
    return Chain(cx, 1, np.ones(2 * segments), integer=True)


def _pinch_angle(eps):
    return 2.0 * math.pi * eps / (1.0 + 2.0 * eps)


def gen_example1_curve(eps, segments_per_piece=64):
    """Closed curve joining two unit circles by two horizontal rods.

    For pinch parameter eps in (0, 0.25) the loop consists of an arc of
    the circle around (-3, 0) missing the angular sector (-a, a) with
    a = 2 pi eps / (1 + 2 eps), a bottom rod at height -sin a, the
    mirrored arc around (3, 0), and a top rod at +sin a. As eps -> 0 the
    underlying current converges to the two full circles (the rods
    cancel in the limit) while the curve length tends to 4 pi + 8.
    """
    if not (0.0 < eps < 0.25):
        raise EpsOutOfRange("eps must lie in (0, 0.25)")
    if segments_per_piece < 8:
        raise TooFewSegments("at least 8 segments per piece")
    s = int(segments_per_piece)
    a = _pinch_angle(eps)
    sweep = 2.0 * math.pi - 2.0 * a

    left = np.array([math.cos(a) - 3.0, math.sin(a)])
    left_low = np.array([math.cos(a) - 3.0, -math.sin(a)])
    right_low = np.array([3.0 - math.cos(a), -math.sin(a)])
    right = np.array([3.0 - math.cos(a), math.sin(a)])

    pts = [left]
    # arc around (-3, 0), angle from a to 2 pi - a, counterclockwise
    for j in range(1, s):
        phi = a + sweep * j / s
        pts.append(np.array([math.cos(phi) - 3.0, math.sin(phi)]))
    pts.append(left_low)
    for j in range(1, s):
        t = j / s
        pts.append((1.0 - t) * left_low + t * right_low)
    pts.append(right_low)
    # arc around (3, 0): (3 - cos phi, -sin phi), phi from a to 2 pi - a
    for j in range(1, s):
        phi = a + sweep * j / s
        pts.append(np.array([3.0 - math.cos(phi), -math.sin(phi)]))
    pts.append(right)
    for j in range(1, s):
        t = j / s
        pts.append((1.0 - t) * right + t * left)

    pts = np.asarray(pts)
    n = pts.shape[0]
    edges = [(i, (i + 1) % n) for i in range(n)]
    cx = build_complex(pts, edges)
    return Chain(cx, 1, np.ones(n), integer=True)


def gen_interval(a=-2.0, b=2.0, segments=256, embed_dim=2):
    """Straight segment chain from (a, 0, ...) to (b, 0, ...)."""
    if segments < 1:
        raise TooFewSegments("at least 1 segment")
    if b <= a:
        raise ValueError("need b > a")
    x = np.linspace(a, b, segments + 1)
    pts = np.zeros((segments + 1, embed_dim))
    pts[:, 0] = x
    cx = build_complex(pts, [(i, i + 1) for i in range(segments)])
    return Chain(cx, 1, np.ones(segments), integer=True)


def _icosahedron():
    g = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
        [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
        [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts[0])
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return verts, faces


def _subdivide_faces(verts, faces):
    """One midpoint 4-split of every triangle; orientation preserved."""
    verts = list(map(np.asarray, verts))
    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            cache[key] = len(verts)
            verts.append(0.5 * (verts[i] + verts[j]))
        return cache[key]

    out = []
    for (i, j, k) in faces:
        ij, jk, ki = midpoint(i, j), midpoint(j, k), midpoint(k, i)
        out.extend([(i, ij, ki), (ij, j, jk), (ki, jk, k), (ij, jk, ki)])
    return np.asarray(verts), out


def gen_sphere(center=(0.0, 0.0, 0.0), radius=1.0, subdivisions=3):
    """Icosphere chain: subdivided icosahedron projected to the sphere,
    oriented outward. Inscribed, so its mass increases to the sphere
    area with refinement."""
    if radius <= 0:
        raise BadRadius("radius must be positive")
    if not (1 <= subdivisions <= 6):
        raise ValueError("subdivisions must be in [1, 6]")
    verts, faces = _icosahedron()
    for _ in range(subdivisions):
        verts, faces = _subdivide_faces(verts, faces)
        verts = verts / np.linalg.norm(verts, axis=1)[:, None]
    # outward orientation: face normal aligned with the centroid ray
    fixed = []
    for (i, j, k) in faces:
        n = np.cross(verts[j] - verts[i], verts[k] - verts[i])
        if np.dot(n, verts[i] + verts[j] + verts[k]) < 0:
            fixed.append((i, k, j))
        else:
            fixed.append((i, j, k))
    pts = np.asarray(center, dtype=np.float64) + radius * verts
    cx = build_complex(pts, fixed)
    return Chain(cx, 2, np.ones(len(fixed)), integer=True)


def _graded_sizes(n, cluster):
    """n interval weights growing geometrically away from the clustered
    end(s), capped after GRADING_CAP_STEPS steps."""
    i = np.arange(n, dtype=np.float64)
    if cluster == "start":
        steps = i
    elif cluster == "end":
        steps = i[::-1]
    elif cluster == "both":
        steps = np.minimum(i, i[::-1])
    else:
        raise ValueError("cluster must be start, end or both")
    return GRADING_RATIO ** np.minimum(steps, GRADING_CAP_STEPS)


def _graded_partition(a, b, n, cluster):
    """n+1 points from a to b with geometrically graded spacing."""
    w = _graded_sizes(n, cluster)
    t = np.concatenate([[0.0], np.cumsum(w)]) / w.sum()
    return a + (b - a) * t


def gen_dumbbell(eps, azimuthal=32, axial=128):
    """Surface of revolution of the lower half of the pinched two-circle
    curve: two near-spheres of radius 1 at x = -3 and x = 3 joined by a
    tube of radius sin(a), a = 2 pi eps / (1 + 2 eps). Closed, outward
    oriented; axial sampling is graded toward the sphere-tube junctions.
    """
    if not (0.0 < eps <= 0.1):
        raise EpsOutOfRange("eps must lie in (0, 0.1]")
    if azimuthal < 16:
        raise TooFewSegments("at least 16 azimuthal segments")
    if axial < 64:
        raise TooFewSegments("at least 64 axial segments")
    a = _pinch_angle(eps)
    arc_len = math.pi - a
    rod_len = 6.0 - 2.0 * math.cos(a)
    total = 2.0 * arc_len + rod_len
    n_arc = max(8, int(round(axial * arc_len / total)))
    n_rod = max(8, int(axial) - 2 * n_arc)

    # generatrix (x, r), r >= 0, from the pole (-4, 0) to the pole (4, 0)
    xj_left = math.cos(a) - 3.0
    xj_right = 3.0 - math.cos(a)
    r_rod = math.sin(a)
    gen_pts = [(-4.0, 0.0)]
    for phi in _graded_partition(math.pi, 2.0 * math.pi - a, n_arc,
                                 "end")[1:-1]:
        gen_pts.append((math.cos(phi) - 3.0, -math.sin(phi)))
    gen_pts.append((xj_left, r_rod))
    for x in _graded_partition(xj_left, xj_right, n_rod, "both")[1:-1]:
        gen_pts.append((x, r_rod))
    gen_pts.append((xj_right, r_rod))
    for phi in _graded_partition(a, math.pi, n_arc, "start")[1:-1]:
        gen_pts.append((3.0 - math.cos(phi), math.sin(phi)))
    gen_pts.append((4.0, 0.0))

    return revolve_generatrix(gen_pts, azimuthal)


def revolve_generatrix(gen_pts, azimuthal):
    """Closed surface of revolution of an (x, r) polyline around the
    x-axis. The polyline must start and end on the axis (r = 0) and stay
    strictly positive in between."""
    gen_pts = np.asarray(gen_pts, dtype=np.float64)
    if gen_pts[0, 1] != 0.0 or gen_pts[-1, 1] != 0.0:
        raise ValueError("generatrix must start and end on the axis")
    if gen_pts.shape[0] < 3 or (gen_pts[1:-1, 1] <= 0.0).any():
        raise ValueError("interior generatrix radii must be positive")
    m = int(azimuthal)
    rings = gen_pts[1:-1]
    nr = rings.shape[0]
    ang = 2.0 * np.pi * np.arange(m) / m
    ca, sa = np.cos(ang), np.sin(ang)

    pts = np.zeros((2 + nr * m, 3))
    pts[0] = (gen_pts[0, 0], 0.0, 0.0)
    pts[1] = (gen_pts[-1, 0], 0.0, 0.0)
    for i, (x, r) in enumerate(rings):
        block = 2 + i * m
        pts[block:block + m, 0] = x
        pts[block:block + m, 1] = r * ca
        pts[block:block + m, 2] = r * sa

    def ring_v(i, j):
        return 2 + i * m + (j % m)

    faces = []
    for j in range(m):
        faces.append((0, ring_v(0, j + 1), ring_v(0, j)))
    for i in range(nr - 1):
        for j in range(m):
            v00, v01 = ring_v(i, j), ring_v(i, j + 1)
            v10, v11 = ring_v(i + 1, j), ring_v(i + 1, j + 1)
            faces.append((v00, v01, v11))
            faces.append((v00, v11, v10))
    for j in range(m):
        faces.append((1, ring_v(nr - 1, j), ring_v(nr - 1, j + 1)))

    pts, faces = _orient_outward(pts, faces)
    cx = build_complex(pts, faces)
    chain = Chain(cx, 2, np.ones(len(faces)), integer=True)
    bd = boundary(chain)
    if np.abs(bd.multiplicities).max() > 0:
        raise AssertionError("revolved surface is not closed")
    return chain


def _orient_outward(pts, faces):
    """Flip all faces if the signed volume of the closed surface is
    negative (consistent winding assumed)."""
    p = np.asarray(pts)
    f = np.asarray(faces, dtype=np.int64)
    vol6 = np.einsum("ij,ij->i", p[f[:, 0]],
                     np.cross(p[f[:, 1]], p[f[:, 2]])).sum()
    if vol6 < 0:
        f = f[:, [0, 2, 1]]
    return p, [tuple(row) for row in f]


def gen_swiss_cheese(level, R0=None, hole_segments=32, bg_divisions=8):
    """Unit square with the lattice-of-holes pattern of the given level.

    Disks of radius R0 (default 2**(-5 level / 2)) around every point of
    the lattice (2**-level) Z^2 inside [0, 1]^2, including its boundary
    points, are removed. The mesh is an unstructured triangulation with
    rings graded around each hole.
    """
    if level not in (1, 2, 3):
        raise ValueError("level must be 1, 2 or 3")
    spacing = 2.0 ** (-level)
    if R0 is None:
        R0 = 2.0 ** (-2.5 * level)
    if R0 <= 0:
        raise BadRadius("hole radius must be positive")
    if R0 >= spacing / 2.0:
        raise HolesOverlap("radius %.4g reaches the neighbouring hole at "
                           "spacing %.4g" % (R0, spacing))
    if hole_segments < 16:
        raise TooFewSegments("at least 16 segments per hole")
    hole_segments = int(4 * round(hole_segments / 4))

    k = int(round(1.0 / spacing))
    centers = np.array([(a * spacing, b * spacing)
                        for a in range(k + 1) for b in range(k + 1)])

    ring_ratio = 1.8
    max_ring = 0.35 * spacing
    radii = [R0]
    while radii[-1] * ring_ratio < max_ring:
        radii.append(radii[-1] * ring_ratio)

    ang = 2.0 * np.pi * np.arange(hole_segments) / hole_segments
    circle = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    cloud = []
    for c in centers:
        for r in radii:
            cloud.append(c + r * circle)
    cloud = np.vstack(cloud)
    # snap points that should lie exactly on the square's edges
    cloud[np.abs(cloud) < 1e-12] = 0.0
    cloud[np.abs(cloud - 1.0) < 1e-12] = 1.0
    inside = (cloud >= 0.0).all(axis=1) & (cloud <= 1.0).all(axis=1)
    cloud = cloud[inside]

    bg = spacing / bg_divisions
    g = np.arange(0.0, 1.0 + 0.5 * bg, bg)
    Gx, Gy = np.meshgrid(g, g)
    grid = np.stack([Gx.ravel(), Gy.ravel()], axis=1)
    tree = cKDTree(centers)
    d_center, _ = tree.query(grid)
    keep_r = radii[-1] + 0.5 * bg
    grid = grid[d_center > keep_r]
    ring_tree = cKDTree(cloud)
    d_ring, _ = ring_tree.query(grid)
    grid = grid[d_ring > 0.4 * bg]

    points = np.vstack([cloud, grid])
    tri = Delaunay(points)
    simplices = tri.simplices
    cent = points[simplices].mean(axis=1)
    d_cent, _ = tree.query(cent)
    keep = d_cent >= 0.999 * R0
    simplices = simplices[keep]

    p0, p1, p2 = (points[simplices[:, i]] for i in range(3))
    signed = ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
              - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0]))
    flip = signed < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]

    cx = build_complex(points, [tuple(r) for r in simplices])
    return Chain(cx, 2, np.ones(simplices.shape[0]), integer=True)


@dataclass(frozen=True, eq=False)
class OmegaMesh:
    """Quarter-square Poincare domain with its clamped inner arc."""

    chain: Chain
    arc_vertices: np.ndarray
    L: float
    R0: float


def gen_omega(L, R0, resolution=1):
    """Mesh of the quarter square [0, L]^2 minus the quarter disk of
    radius R0 at the origin, in polar coordinates. resolution >= 1 sets
    the number of nested refinements: the base polar mesh is subdivided
    affinely (no reprojection), so the FEM spaces of increasing
    resolution are nested."""
    if not (0.0 < R0 < L):
        raise BadRadius("need 0 < R0 < L")
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    n_phi, n_r = 24, 6
    phi = np.linspace(0.0, np.pi / 2.0, n_phi + 1)
    r_out = L / np.maximum(np.cos(phi), np.sin(phi))

    idx = {}
    pts = []
    for i in range(n_phi + 1):
        for j in range(n_r + 1):
            r = R0 + (r_out[i] - R0) * j / n_r
            idx[(i, j)] = len(pts)
            pts.append((r * math.cos(phi[i]), r * math.sin(phi[i])))
    faces = []
    for i in range(n_phi):
        for j in range(n_r):
            A = idx[(i, j)]
            B = idx[(i + 1, j)]
            C = idx[(i + 1, j + 1)]
            D = idx[(i, j + 1)]
            faces.append((A, B, C))
            faces.append((A, C, D))
    pts = np.asarray(pts)
    arc = {idx[(i, 0)] for i in range(n_phi + 1)}

    for _ in range(resolution - 1):
        pts, faces, arc = _subdivide_with_tags(pts, faces, arc)

    cx = build_complex(pts, faces)
    chain = Chain(cx, 2, np.ones(len(faces)), integer=True)
    return OmegaMesh(chain, np.array(sorted(arc), dtype=np.int64),
                     float(L), float(R0))


def _subdivide_with_tags(pts, faces, tagged):
    verts = list(map(np.asarray, pts))
    cache = {}
    new_tags = set(tagged)

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            cache[key] = len(verts)
            verts.append(0.5 * (verts[i] + verts[j]))
            if i in tagged and j in tagged:
                new_tags.add(cache[key])
        return cache[key]

    out = []
    for (i, j, k) in faces:
        ij, jk, ki = midpoint(i, j), midpoint(j, k), midpoint(k, i)
        out.extend([(i, ij, ki), (ij, j, jk), (ki, jk, k), (ij, jk, ki)])
    return np.asarray(verts), out, new_tags


def poincare_check(omega, tolerance=0.05):
    """Ratio sup |u|^2 / |grad u|^2 over FEM functions vanishing on the
    inner arc (the reciprocal of the first mixed eigenvalue) against the
    closed-form bound 2 sqrt(2) L^3 / (3 R0). Raises if the ratio
    exceeds the bound by more than the tolerance."""
    res = intrinsic_surface_spectrum(omega.chain, "dirichlet", 1,
                                     constrained_vertices=omega.arc_vertices)
    mu = res.values[0]
    ratio = 1.0 / mu
    bound = 2.0 * math.sqrt(2.0) * omega.L ** 3 / (3.0 * omega.R0)
    if ratio > bound * (1.0 + tolerance):
        raise CurrentLabError(
            "Poincare ratio %.6g exceeds the bound %.6g" % (ratio, bound))
    return ratio, bound


def gen_square(resolution=16, side=1.0):
    """Structured triangulation of [0, side]^2, all multiplicities 1."""
    if resolution < 1:
        raise TooFewSegments("resolution must be at least 1")
    n = int(resolution)
    xs = np.linspace(0.0, side, n + 1)
    pts = np.stack(np.meshgrid(xs, xs, indexing="ij"),
                   axis=2).reshape(-1, 2)

    def v(i, j):
        return i * (n + 1) + j

    faces = []
    for i in range(n):
        for j in range(n):
            faces.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            faces.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))
    cx = build_complex(pts, faces)
    return Chain(cx, 2, np.ones(len(faces)), integer=True)


def gen_strip_pair(length=1.0, height=0.1, nx=16, ny=2):
    """Two opposite-orientation parallel segments on a strip host: the
    bottom edge of [0, length] x [0, height] with multiplicity +1 and
    the top edge with -1. The host's triangles admit a filling, so the
    flat norm is far below the mass 2 * length."""
    if nx < 2 or ny < 1:
        raise TooFewSegments("need nx >= 2 and ny >= 1")
    xs = np.linspace(0.0, length, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"),
                   axis=2).reshape(-1, 2)

    def v(i, j):
        return i * (ny + 1) + j

    faces = []
    for i in range(nx):
        for j in range(ny):
            faces.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            faces.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))
    cx = build_complex(pts, faces)
    theta = np.zeros(cx.n_simplices(1))
    for i in range(nx):
        bottom = cx.simplex_index(1, (v(i, 0), v(i + 1, 0)))
        top = cx.simplex_index(1, (v(i, ny), v(i + 1, ny)))
        theta[bottom] = 1.0   # edge (lo, hi) points in +x
        theta[top] = -1.0
    return Chain(cx, 1, theta, integer=True)


_FAMILIES = {}


def _register(name, fn):
    _FAMILIES[name] = fn


_register("circle", gen_circle)
_register("two_circles", gen_two_circles)
_register("example1", gen_example1_curve)
_register("interval", gen_interval)
_register("sphere", gen_sphere)
_register("dumbbell", gen_dumbbell)
_register("swiss_cheese", gen_swiss_cheese)
_register("omega", gen_omega)
_register("square", gen_square)
_register("strip_pair", gen_strip_pair)


@dataclass(frozen=True)
class ScenarioSpec:
    """Named scenario with keyword parameters, for configs and the CLI."""

    name: str
    params: dict


def scenario_names():
    return sorted(_FAMILIES)


def generate(spec):
    """Instantiate a scenario. Returns a Chain (or an OmegaMesh for the
    "omega" family)."""
    if spec.name not in _FAMILIES:
        raise ValueError("unknown scenario %r (known: %s)"
                         % (spec.name, ", ".join(scenario_names())))
    return _FAMILIES[spec.name](**spec.params)
