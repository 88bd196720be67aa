"""Ambient function systems on R^N used as trial spaces for the
eigenvalue functionals: tensor-product cubic B-splines on a box and
Gaussian bump atoms. Every atom carries a compact support box so that
Dirichlet filtering can drop atoms near a boundary set geometrically.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .chains import set_of
from .errors import BoxDegenerate, DuplicateCenters, EmptyAfterFilter

DEFAULT_CELLS = 12
DEFAULT_INFLATE = 0.1
RBF_BOX_SIGMAS = 6.0


@dataclass(frozen=True, eq=False)
class SplineBasis:
    """Tensor-product cubic B-spline atoms on a uniform grid.

    The univariate knot sequence on each axis is unclamped and uniform,
    so the atoms form a partition of unity inside the box. `active`
    holds the flat atom indices of the full tensor grid that belong to
    this basis (filtering produces proper subsets).
    """

    lo: np.ndarray
    hi: np.ndarray
    n_cells: np.ndarray
    active: np.ndarray

    kind = "spline"
    degree = 3

    def __post_init__(self):
        for name in ("lo", "hi"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        nc = np.asarray(self.n_cells, dtype=np.int64)
        nc.setflags(write=False)
        object.__setattr__(self, "n_cells", nc)
        act = np.asarray(self.active, dtype=np.int64)
        act.setflags(write=False)
        object.__setattr__(self, "active", act)

    @property
    def h(self):
        return (self.hi - self.lo) / self.n_cells

    @property
    def ambient_dim(self):
        return int(self.lo.shape[0])

    def __len__(self):
        return int(self.active.size)

    def _multi_indices(self):
        n_atoms = self.n_cells + 3
        return np.stack(np.unravel_index(self.active, n_atoms), axis=1)

    @property
    def support_boxes(self):
        """(m, 2, N) per-atom support [lo_box, hi_box]."""
        J = self._multi_indices()
        h = self.h
        lo_box = self.lo + (J - 3) * h
        hi_box = self.lo + (J + 1) * h
        return np.stack([lo_box, hi_box], axis=1)

    def evaluate(self, points):
        """Values (P, m) and gradients (P, m, N) of the active atoms."""
        points = np.asarray(points, dtype=np.float64)
        values, grads = kernels.bspline_eval(points, self.lo, self.h,
                                             self.n_cells)
        return values[:, self.active], grads[:, self.active, :]

    def subset(self, positions):
        positions = np.asarray(positions, dtype=np.int64)
        return SplineBasis(self.lo, self.hi, self.n_cells,
                           self.active[positions])


@dataclass(frozen=True, eq=False)
class RBFBasis:
    """Gaussian bump atoms exp(-|x - c|^2 / w^2) with a common width."""

    centers: np.ndarray
    width: float

    kind = "rbf"

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)

    @property
    def ambient_dim(self):
        return int(self.centers.shape[1])

    def __len__(self):
        return int(self.centers.shape[0])

    @property
    def support_boxes(self):
        """(m, 2, N): center +- 6 widths; atom values outside are below
        1e-15 of the peak."""
        r = RBF_BOX_SIGMAS * self.width
        return np.stack([self.centers - r, self.centers + r], axis=1)

    def evaluate(self, points):
        points = np.asarray(points, dtype=np.float64)
        diff = points[:, None, :] - self.centers[None, :, :]   # (P, m, N)
        r2 = np.sum(diff * diff, axis=2)
        values = np.exp(-r2 / self.width ** 2)
        grads = (-2.0 / self.width ** 2) * diff * values[:, :, None]
        return values, grads

    def subset(self, positions):
        positions = np.asarray(positions, dtype=np.int64)
        return RBFBasis(self.centers[positions], self.width)


def make_spline_basis(box, cells_per_axis, degree=3):
    """Cubic spline basis on the given box.

    box = (lo, hi) arrays; cells_per_axis an int or per-axis sequence,
    at least 2 cells per axis. Only degree 3 is implemented.
    """
    if degree != 3:
        raise ValueError("only cubic (degree 3) splines are implemented")
    lo = np.asarray(box[0], dtype=np.float64)
    hi = np.asarray(box[1], dtype=np.float64)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise BoxDegenerate("box corners must be 1-d arrays of equal size")
    if not (hi - lo > 0).all():
        raise BoxDegenerate("box has a non-positive extent along an axis")
    N = lo.shape[0]
    cells = np.broadcast_to(np.asarray(cells_per_axis, dtype=np.int64),
                            (N,)).copy()
    if (cells < 2).any():
        raise ValueError("at least 2 cells per axis")
    m = int(np.prod(cells + 3))
    return SplineBasis(lo, hi, cells, np.arange(m, dtype=np.int64))


def make_rbf_basis(centers, width):
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] == 0:
        raise ValueError("centers must be a nonempty (m, N) array")
    if width <= 0:
        raise ValueError("width must be positive")
    uniq = np.unique(centers, axis=0)
    if uniq.shape[0] != centers.shape[0]:
        raise DuplicateCenters("two centers coincide")
    return RBFBasis(centers, float(width))


def default_basis_for_chain(chain, cells=DEFAULT_CELLS,
                            inflate=DEFAULT_INFLATE):
    """Spline basis on the support's bounding box inflated by 10% per
    axis. Axes along which the support is flat are padded relative to
    the largest extent so the box never degenerates."""
    support = set_of(chain, tol=0.0)
    if len(support):
        verts = chain.complex.vertices[support.vertex_indices()]
        lo, hi = verts.min(axis=0), verts.max(axis=0)
    else:
        lo, hi = chain.complex.bounding_box()
    extent = hi - lo
    ref = extent.max() if extent.max() > 0 else 1.0
    pad = inflate * np.where(extent > 1e-9 * ref, extent, ref)
    return make_spline_basis((lo - pad, hi + pad), cells)


def _box_point_distance(lo, hi, p):
    """Distances from axis boxes (m, N) to one point."""
    clipped = np.clip(p, lo, hi)
    return np.linalg.norm(clipped - p, axis=-1)


def _box_segment_distance(lo, hi, a, b, iters=100):
    """Distances from axis boxes (m, N) to the segment [a, b].

    The squared distance as a function of the segment parameter is
    convex and piecewise quadratic; its derivative is nondecreasing, so
    bisection on the derivative finds the minimizer.
    """
    e = b - a

    def deriv(t):
        x = a + t[:, None] * e
        r = np.where(x < lo, x - lo, np.where(x > hi, x - hi, 0.0))
        return np.sum(r * e, axis=1)

    m = lo.shape[0]
    t_lo = np.zeros(m)
    t_hi = np.ones(m)
    g_lo = deriv(t_lo)
    g_hi = deriv(t_hi)
    t = np.where(g_lo >= 0.0, 0.0, np.where(g_hi <= 0.0, 1.0, 0.5))
    interior = (g_lo < 0.0) & (g_hi > 0.0)
    if interior.any():
        lo_t = np.zeros(m)
        hi_t = np.ones(m)
        for _ in range(iters):
            mid = 0.5 * (lo_t + hi_t)
            g = deriv(mid)
            neg = g < 0.0
            lo_t = np.where(neg, mid, lo_t)
            hi_t = np.where(neg, hi_t, mid)
        t = np.where(interior, 0.5 * (lo_t + hi_t), t)
    x = a + t[:, None] * e
    return _box_point_distance(lo, hi, x)


def filter_dirichlet(basis, boundary_set, epsilon):
    """Drop atoms whose support box comes within epsilon of the boundary
    set (a SimplexSet of points or segments). Raises EmptyAfterFilter if
    nothing is left."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if len(boundary_set) == 0:
        return basis
    if boundary_set.dim > 1:
        raise ValueError("boundary sets of dimension >= 2 not supported")
    boxes = basis.support_boxes
    lo, hi = boxes[:, 0, :], boxes[:, 1, :]
    dist = np.full(len(basis), np.inf)
    coords = boundary_set.coordinates()
    for simplex in coords:
        if boundary_set.dim == 0:
            d = _box_point_distance(lo, hi, simplex[0])
        else:
            d = _box_segment_distance(lo, hi, simplex[0], simplex[1])
        np.minimum(dist, d, out=dist)
    keep = np.nonzero(dist > epsilon)[0]
    if keep.size == 0:
        raise EmptyAfterFilter("no atom support stays %.3g away from the "
                               "boundary set" % epsilon)
    return basis.subset(keep)


def gram_rank(basis, probe_points, rel_tol=1e-10):
    """Numerical rank of the atom value matrix on a probe cloud; equals
    len(basis) when the atoms are independent as sampled functions."""
    values, _ = basis.evaluate(np.asarray(probe_points, dtype=np.float64))
    s = np.linalg.svd(values, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
