"""Simplicial complexes and polyhedral chains in Euclidean space.

A complex stores one simplex table per dimension together with integer
incidence matrices; a chain is a vector of real multiplicities over the
simplices of one dimension. Mass, boundary, support extraction and JSON
round-trips live here.
"""

import json
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.sparse as sp

from .errors import (DegenerateSimplex, DimensionMismatch, DimensionZero,
                     EmptyRadii, IndexOutOfRange, NonIntegerMultiplicity,
                     NonUniformArity)

# a d-simplex is degenerate when vol < DEGENERACY_FACTOR * (longest edge)^d
DEGENERACY_FACTOR = 1e-12

# multiplicities with |theta| <= SUPPORT_TOL are treated as absent
SUPPORT_TOL = 1e-9


def _sort_parity(seq):
    """Sign of the permutation taking seq to sorted order (+1 or -1)."""
    inv = 0
    n = len(seq)
    for a in range(n):
        for b in range(a + 1, n):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv & 1 else 1


class SimplicialComplex:
    """Finite simplicial complex embedded in R^N.

    Built from its top-dimensional simplices; all lower faces are
    enumerated deterministically (sorted vertex tuples, lexicographic
    order) and signed incidence matrices are assembled so that the
    boundary of a boundary vanishes identically.
    """

    def __init__(self, vertices, top_simplices):
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.ndim != 2 or vertices.shape[0] == 0:
            raise ValueError("vertices must be a nonempty (V, N) array")
        if not np.isfinite(vertices).all():
            raise ValueError("vertex coordinates must be finite")

        arities = {len(s) for s in top_simplices}
        if len(top_simplices) == 0:
            raise ValueError("at least one top simplex is required")
        if len(arities) != 1:
            raise NonUniformArity("top simplices have mixed vertex counts "
                                  "%s" % sorted(arities))
        arity = arities.pop()
        top = np.asarray([list(s) for s in top_simplices], dtype=np.int64)
        if top.min() < 0 or top.max() >= vertices.shape[0]:
            raise IndexOutOfRange("simplex vertex index outside [0, %d)"
                                  % vertices.shape[0])
        for row in top:
            if len(set(row.tolist())) != arity:
                raise DegenerateSimplex("repeated vertex index in simplex "
                                        "%s" % row.tolist())
        seen = set()
        for row in top:
            key = tuple(sorted(row.tolist()))
            if key in seen:
                raise ValueError("duplicate top simplex %s" % (key,))
            seen.add(key)

        self.vertices = vertices
        self.vertices.setflags(write=False)
        self.ambient_dim = vertices.shape[1]
        self.top_dim = arity - 1

        self._simplices = [None] * (self.top_dim + 1)
        self._simplices[self.top_dim] = top
        self._incidence = [None] * (self.top_dim + 1)
        self._index_maps = [None] * (self.top_dim + 1)
        self._index_maps[self.top_dim] = {
            tuple(sorted(row.tolist())): i for i, row in enumerate(top)}

        for d in range(self.top_dim, 0, -1):
            cur = self._simplices[d]
            keys = set()
            for row in cur:
                row_l = row.tolist()
                for i in range(d + 1):
                    keys.add(tuple(sorted(row_l[:i] + row_l[i + 1:])))
            ordered = sorted(keys)
            index = {k: i for i, k in enumerate(ordered)}
            rows, cols, vals = [], [], []
            for s_idx, row in enumerate(cur):
                row_l = row.tolist()
                for i in range(d + 1):
                    face = row_l[:i] + row_l[i + 1:]
                    sign = (-1 if i & 1 else 1) * _sort_parity(face)
                    rows.append(index[tuple(sorted(face))])
                    cols.append(s_idx)
                    vals.append(sign)
            D = sp.coo_matrix((vals, (rows, cols)),
                              shape=(len(ordered), len(cur)),
                              dtype=np.int64).tocsr()
            self._simplices[d - 1] = np.asarray(ordered, dtype=np.int64)
            self._index_maps[d - 1] = index
            self._incidence[d] = D

        for d in range(2, self.top_dim + 1):
            prod = self._incidence[d - 1] @ self._incidence[d]
            prod.eliminate_zeros()
            if prod.nnz:
                raise AssertionError("boundary of boundary is nonzero")

        self._volumes = [None] * (self.top_dim + 1)
        for d in range(self.top_dim + 1):
            self._volumes[d] = self._compute_volumes(d)

    # tables

    def n_simplices(self, dim):
        if dim < 0:
            raise ValueError("negative dimension")
        if dim > self.top_dim:
            return 0
        return self._simplices[dim].shape[0]

    def simplices(self, dim):
        """(S, dim+1) int array of vertex indices."""
        if dim < 0 or dim > self.top_dim:
            raise ValueError("no simplices of dimension %d" % dim)
        return self._simplices[dim]

    def simplex_index(self, dim, vertex_tuple):
        """Index of the simplex with the given vertex set, or None."""
        return self._index_maps[dim].get(tuple(sorted(vertex_tuple)))

    def incidence(self, dim):
        """Signed incidence matrix taking dim-multiplicities to
        (dim-1)-multiplicities. Empty for dim > top_dim."""
        if dim < 1:
            raise ValueError("incidence defined for dim >= 1")
        if dim == self.top_dim + 1:
            return sp.csr_matrix((self.n_simplices(self.top_dim), 0),
                                 dtype=np.int64)
        if dim > self.top_dim:
            return sp.csr_matrix((0, 0), dtype=np.int64)
        return self._incidence[dim]

    def volumes(self, dim):
        """(S,) array of d-volumes; 0-simplices have volume 1."""
        if dim > self.top_dim:
            return np.zeros(0)
        return self._volumes[dim]

    def coordinates(self, dim, indices=None):
        """(S, dim+1, N) coordinate array for the chosen simplices."""
        simp = self.simplices(dim)
        if indices is not None:
            simp = simp[np.asarray(indices, dtype=np.int64)]
        return self.vertices[simp]

    def bounding_box(self):
        used = np.unique(self._simplices[self.top_dim])
        pts = self.vertices[used]
        return pts.min(axis=0), pts.max(axis=0)

    def _compute_volumes(self, dim):
        simp = self._simplices[dim]
        if dim == 0:
            return np.ones(simp.shape[0])
        pts = self.vertices[simp]                    # (S, d+1, N)
        edges = pts[:, 1:, :] - pts[:, :1, :]        # (S, d, N)
        gram = np.einsum("sdn,sen->sde", edges, edges)
        det = np.linalg.det(gram)
        vol = np.sqrt(np.clip(det, 0.0, None)) / factorial(dim)
        longest = np.zeros(simp.shape[0])
        for a in range(dim + 1):
            for b in range(a + 1, dim + 1):
                e = np.linalg.norm(pts[:, a, :] - pts[:, b, :], axis=1)
                np.maximum(longest, e, out=longest)
        bad = (vol < DEGENERACY_FACTOR * longest ** dim) | (longest == 0.0)
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            raise DegenerateSimplex(
                "simplex %s of dimension %d has volume %.3e below the "
                "degeneracy threshold" % (simp[i].tolist(), dim, vol[i]))
        return vol


@dataclass(frozen=True, eq=False)
class Chain:
    """Real multiplicities over the dim-simplices of a complex."""

    complex: SimplicialComplex
    dim: int
    multiplicities: np.ndarray
    integer: bool = False

    def __post_init__(self):
        theta = np.asarray(self.multiplicities, dtype=np.float64)
        if theta.ndim != 1:
            raise ValueError("multiplicities must be one-dimensional")
        if self.dim < 0 or self.dim > self.complex.top_dim + 1:
            raise ValueError("chain dimension %d not supported by this "
                             "complex" % self.dim)
        if theta.shape[0] != self.complex.n_simplices(self.dim):
            raise DimensionMismatch(
                "expected %d multiplicities for dimension %d, got %d"
                % (self.complex.n_simplices(self.dim), self.dim,
                   theta.shape[0]))
        if not np.isfinite(theta).all():
            raise ValueError("multiplicities must be finite")
        if self.integer:
            if theta.size and np.abs(theta - np.round(theta)).max() > 1e-9:
                raise NonIntegerMultiplicity(
                    "chain flagged integer but multiplicities are not")
        theta = theta.copy()
        theta.setflags(write=False)
        object.__setattr__(self, "multiplicities", theta)

    def _check_compatible(self, other):
        if self.complex is not other.complex or self.dim != other.dim:
            raise DimensionMismatch("chains live on different complexes "
                                    "or dimensions")

    def __add__(self, other):
        self._check_compatible(other)
        return Chain(self.complex, self.dim,
                     self.multiplicities + other.multiplicities,
                     integer=self.integer and other.integer)

    def __sub__(self, other):
        self._check_compatible(other)
        return Chain(self.complex, self.dim,
                     self.multiplicities - other.multiplicities,
                     integer=self.integer and other.integer)

    def __neg__(self):
        return Chain(self.complex, self.dim, -self.multiplicities,
                     integer=self.integer)

    def __mul__(self, scalar):
        s = float(scalar)
        return Chain(self.complex, self.dim, s * self.multiplicities,
                     integer=self.integer and s == round(s))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SimplexSet:
    """A subset of the dim-simplices of a complex (a support set)."""

    complex: SimplicialComplex
    dim: int
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        if idx.size and (idx.min() < 0
                         or idx.max() >= self.complex.n_simplices(self.dim)):
            raise IndexOutOfRange("simplex index outside table")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return int(self.indices.size)

    def coordinates(self):
        """(S, dim+1, N) coordinates of the member simplices."""
        if not len(self):
            return np.zeros((0, self.dim + 1, self.complex.ambient_dim))
        return self.complex.coordinates(self.dim, self.indices)

    def vertex_indices(self):
        if not len(self):
            return np.zeros(0, dtype=np.int64)
        return np.unique(self.complex.simplices(self.dim)[self.indices])


def build_complex(vertices, top_simplices):
    """Build a simplicial complex from vertex coordinates and its
    top-dimensional simplices; all faces are enumerated automatically."""
    return SimplicialComplex(vertices, top_simplices)


def zero_chain(complex, dim, integer=False):
    return Chain(complex, dim, np.zeros(complex.n_simplices(dim)),
                 integer=integer)


def boundary(chain):
    """Boundary chain: signed incidence applied to the multiplicities."""
    if chain.dim < 1:
        raise DimensionZero("0-chains have no boundary")
    D = chain.complex.incidence(chain.dim)
    theta = D @ chain.multiplicities
    return Chain(chain.complex, chain.dim - 1, theta, integer=chain.integer)


def mass(chain):
    """Total mass: sum of |multiplicity| times simplex volume."""
    vols = chain.complex.volumes(chain.dim)
    return float(np.sum(np.abs(chain.multiplicities) * vols))


def simplex_volume(complex, dim, index):
    vols = complex.volumes(dim)
    if index < 0 or index >= vols.shape[0]:
        raise IndexOutOfRange("no simplex %d in dimension %d" % (index, dim))
    return float(vols[index])


def set_of(chain, tol=SUPPORT_TOL):
    """Support of the chain: indices of simplices with |theta| > tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    idx = np.nonzero(np.abs(chain.multiplicities) > tol)[0]
    return SimplexSet(chain.complex, chain.dim, idx)


def chain_union(a, b):
    """Chain on the disjoint union of the two carrier complexes.

    The union complex stacks the vertex arrays and re-enumerates faces;
    multiplicities carry over, so mass(a union b) = mass(a) + mass(b)
    and the boundary operator acts blockwise.
    """
    ca, cb = a.complex, b.complex
    if (ca.ambient_dim != cb.ambient_dim or a.dim != b.dim
            or ca.top_dim != cb.top_dim):
        raise DimensionMismatch(
            "union requires equal ambient dimension, chain dimension and "
            "top dimension")
    off = ca.vertices.shape[0]
    verts = np.vstack([ca.vertices, cb.vertices])
    tops = [tuple(int(v) for v in s) for s in ca.simplices(ca.top_dim)]
    tops += [tuple(int(v) + off for v in s) for s in cb.simplices(cb.top_dim)]
    union = build_complex(verts, tops)
    theta = np.zeros(union.n_simplices(a.dim))
    for src, shift in ((a, 0), (b, off)):
        for local, s in enumerate(src.complex.simplices(src.dim)):
            t = tuple(int(v) + shift for v in s)
            theta[union.simplex_index(src.dim, t)] = \
                src.multiplicities[local]
    return Chain(union, a.dim, theta, integer=a.integer and b.integer)


def lower_density(measure, point, dim, radii):
    """Estimate of the lower dim-density of a mass measure at a point:
    the minimum over the given radii of measure(B(point, r)) / r^dim.
    The radii stand in for the liminf as r -> 0; no extrapolation is
    attempted beyond taking the minimum."""
    radii = np.asarray(radii, dtype=np.float64)
    if radii.size == 0:
        raise EmptyRadii("at least one radius is required")
    if (radii <= 0).any():
        raise ValueError("radii must be positive")
    point = np.asarray(point, dtype=np.float64)
    dist = np.linalg.norm(measure.points - point, axis=1)
    best = np.inf
    for r in radii:
        ball = float(np.sum(measure.weights[dist <= r]))
        best = min(best, ball / r ** dim)
    return best


def chain_to_json(chain):
    """JSON-serializable dict. "simplices" always holds the complex's
    top simplices; "multiplicities" indexes the deterministically
    recomputed simplices of the chain's dimension."""
    cx = chain.complex
    return {
        "ambient_dim": cx.ambient_dim,
        "dim": chain.dim,
        "vertices": cx.vertices.tolist(),
        "simplices": cx.simplices(cx.top_dim).tolist(),
        "multiplicities": chain.multiplicities.tolist(),
    }


def complex_to_json(complex):
    return {
        "ambient_dim": complex.ambient_dim,
        "dim": complex.top_dim,
        "vertices": complex.vertices.tolist(),
        "simplices": complex.simplices(complex.top_dim).tolist(),
        "multiplicities": None,
    }


def chain_from_json(data):
    """Inverse of chain_to_json. Lower-dimensional faces are recomputed,
    never read from the file, so multiplicities for dim below the top
    index the canonical face enumeration."""
    cx = build_complex(np.asarray(data["vertices"], dtype=np.float64),
                       data["simplices"])
    if data["ambient_dim"] != cx.ambient_dim:
        raise ValueError("ambient_dim does not match vertex width")
    theta = data.get("multiplicities")
    if theta is None:
        raise ValueError("file holds a bare complex, not a chain")
    return Chain(cx, int(data["dim"]), np.asarray(theta, dtype=np.float64))


def complex_from_json(data):
    return build_complex(np.asarray(data["vertices"], dtype=np.float64),
                         data["simplices"])


def save_chain(chain, path):
    with open(path, "w") as fh:
        json.dump(chain_to_json(chain), fh)


def load_chain(path):
    with open(path) as fh:
        return chain_from_json(json.load(fh))
