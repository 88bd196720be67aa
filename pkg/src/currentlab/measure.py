"""Mass measures of chains: quadrature discretizations, integration of
scalar fields, randomized cube decompositions and weak-convergence gaps.

A MassMeasure is a weighted point cloud representing |theta| times the
volume measure of a chain. Quadrature nodes use symmetric rules with
strictly positive weights, renormalized so each rule sums to one exactly;
the total weight then equals the chain's mass to roundoff.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GridMassNotAvoidable, NonFiniteValue, UnsupportedOrder

GRID_RETRY_LIMIT = 100
GRID_LEFTOVER_FACTOR = 1e-6
ON_GRID_REL_TOL = 1e-9


def _normalized(bary, w):
    bary = np.asarray(bary, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    return bary, w / w.sum()


def _segment_rule(order):
    if order == 1:
        return _normalized([[0.5, 0.5]], [1.0])
    if order == 2:
        g = 0.5 / np.sqrt(3.0)
        return _normalized([[0.5 + g, 0.5 - g], [0.5 - g, 0.5 + g]],
                           [0.5, 0.5])
    if order == 3:
        g = 0.5 * np.sqrt(0.6)
        return _normalized(
            [[0.5 + g, 0.5 - g], [0.5, 0.5], [0.5 - g, 0.5 + g]],
            [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
    raise UnsupportedOrder("no segment rule of order %s" % order)


def _orbit(a):
    return [[a, a, 1.0 - 2.0 * a],
            [a, 1.0 - 2.0 * a, a],
            [1.0 - 2.0 * a, a, a]]


def _triangle_rule(order):
    if order == 1:
        return _normalized([[1.0 / 3.0] * 3], [1.0])
    if order == 2:
        # 6-point symmetric rule, exact through degree 4, all weights > 0
        a, wa = 0.445948490915965, 0.223381589678011
        b, wb = 0.091576213509771, 0.109951743655322
        return _normalized(_orbit(a) + _orbit(b), [wa] * 3 + [wb] * 3)
    if order == 3:
        # 7-point symmetric rule, exact through degree 5
        a, wa = 0.470142064105115, 0.132394152788506
        b, wb = 0.101286507323456, 0.125939180544827
        return _normalized([[1.0 / 3.0] * 3] + _orbit(a) + _orbit(b),
                           [9.0 / 40.0] + [wa] * 3 + [wb] * 3)
    raise UnsupportedOrder("no triangle rule of order %s" % order)


def simplex_rule(dim, order):
    """Barycentric nodes and weights (summing to 1) for a d-simplex."""
    if order not in (1, 2, 3):
        raise UnsupportedOrder("quadrature order must be 1, 2 or 3")
    if dim == 0:
        return _normalized([[1.0]], [1.0])
    if dim == 1:
        return _segment_rule(order)
    if dim == 2:
        return _triangle_rule(order)
    raise UnsupportedOrder("no quadrature rule for dimension %d" % dim)


@dataclass(frozen=True, eq=False)
class MassMeasure:
    """Weighted point cloud; weights are strictly positive."""

    points: np.ndarray
    weights: np.ndarray
    source_dim: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a (P, N) array")
        if w.shape != (pts.shape[0],):
            raise ValueError("weights must match points")
        if not (np.isfinite(pts).all() and np.isfinite(w).all()):
            raise ValueError("points and weights must be finite")
        if w.size and w.min() <= 0.0:
            raise ValueError("weights must be strictly positive")
        pts = pts.copy()
        w = w.copy()
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def total(self):
        return float(np.sum(self.weights))

    @property
    def ambient_dim(self):
        return int(self.points.shape[1])


def quadrature_measure(chain, order=2):
    """Quadrature discretization of the chain's mass measure.

    Nodes are the rule points of every simplex carrying a nonzero
    multiplicity; node weight = |theta| * volume * rule weight. The total
    equals mass(chain) up to roundoff.
    """
    bary, w = simplex_rule(chain.dim, order)
    theta = chain.multiplicities
    live = np.nonzero(theta != 0.0)[0]
    if live.size == 0:
        return MassMeasure(np.zeros((0, chain.complex.ambient_dim)),
                           np.zeros(0), chain.dim)
    coords = chain.complex.coordinates(chain.dim, live)   # (S, d+1, N)
    vols = chain.complex.volumes(chain.dim)[live]
    nodes = np.einsum("qb,sbn->sqn", bary, coords)
    scale = np.abs(theta[live]) * vols                    # (S,)
    weights = scale[:, None] * w[None, :]                 # (S, Q)
    P = nodes.shape[0] * nodes.shape[1]
    return MassMeasure(nodes.reshape(P, -1), weights.reshape(P), chain.dim)


def integrate(measure, f):
    """Integral of a scalar field against the measure. The field must be
    vectorized: it receives a (P, N) array and returns P values."""
    if measure.points.shape[0] == 0:
        return 0.0
    vals = np.asarray(f(measure.points), dtype=np.float64)
    if vals.shape != (measure.points.shape[0],):
        raise ValueError("field must return one value per point")
    if not np.isfinite(vals).all():
        raise NonFiniteValue("field returned a non-finite value")
    return float(np.sum(measure.weights * vals))


@dataclass(frozen=True)
class GridReport:
    """Cube decomposition of a measure for one accepted grid offset."""

    spacing: float
    offset: np.ndarray
    cube_masses: dict
    leftover: float
    attempts: int

    @property
    def total(self):
        return float(sum(self.cube_masses.values()) + self.leftover)


def mass_on_grid(measure, spacing, offset_seed=0):
    """Split the measure's mass over the open cubes of a shifted grid.

    The grid offset is drawn uniformly from [0, spacing)^N with the given
    seed; a draw is accepted when the nodes lying on the grid hyperplanes
    (within 1e-9 relative to the spacing) carry less than 1e-6 of the
    total mass. Up to 100 draws are attempted.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    pts = measure.points
    w = measure.weights
    total = measure.total
    rng = np.random.default_rng(offset_seed)
    N = pts.shape[1] if pts.size else 1
    tol = ON_GRID_REL_TOL * spacing
    for attempt in range(1, GRID_RETRY_LIMIT + 1):
        offset = rng.uniform(0.0, spacing, size=N)
        if pts.shape[0] == 0:
            return GridReport(spacing, offset, {}, 0.0, attempt)
        y = (pts - offset) / spacing
        frac = np.abs(y - np.round(y)) * spacing
        on_grid = frac.min(axis=1) <= tol
        leftover = float(np.sum(w[on_grid]))
        if leftover >= GRID_LEFTOVER_FACTOR * total and total > 0:
            continue
        cells = np.floor(y[~on_grid]).astype(np.int64)
        masses = {}
        for cell, wt in zip(map(tuple, cells), w[~on_grid]):
            masses[cell] = masses.get(cell, 0.0) + float(wt)
        return GridReport(spacing, offset, masses, leftover, attempt)
    raise GridMassNotAvoidable(
        "no offset kept the on-grid mass below %.1e of the total after "
        "%d draws" % (GRID_LEFTOVER_FACTOR, GRID_RETRY_LIMIT))


def weak_gap(measures, limit, tests):
    """Per-measure gap max_j |int f_j dmu_i - int f_j dlimit| over the
    supplied test fields. A proxy for weak convergence against the
    limit measure; the caller chooses the test set."""
    tests = list(tests)
    if not tests:
        raise ValueError("at least one test field is required")
    ref = np.array([integrate(limit, f) for f in tests])
    gaps = []
    for mu in measures:
        vals = np.array([integrate(mu, f) for f in tests])
        gaps.append(float(np.max(np.abs(vals - ref))))
    return gaps


def measure_to_csv(measure, path):
    """Write the weighted point cloud as CSV with header x1..xN,weight."""
    N = measure.points.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x%d" % (i + 1) for i in range(N)] + ["weight"])
        for p, wt in zip(measure.points, measure.weights):
            writer.writerow([repr(float(v)) for v in p]
                            + [repr(float(wt))])


def measure_from_csv(path):
    """Read a measure written by measure_to_csv. The source dimension is
    not stored in the file and is reported as -1."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [list(map(float, row)) for row in reader]
    data = np.asarray(rows, dtype=np.float64).reshape(len(rows),
                                                      len(header))
    return MassMeasure(data[:, :-1], data[:, -1], -1)
