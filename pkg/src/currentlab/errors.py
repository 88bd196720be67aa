"""Exception hierarchy. Every domain failure raises a CurrentLabError subclass
so the CLI can map them to a stable exit code."""


class CurrentLabError(Exception):
    """Base class for all domain errors raised by this package."""


# complexes and chains

class DegenerateSimplex(CurrentLabError):
    """A listed simplex has (numerically) zero volume."""


class NonUniformArity(CurrentLabError):
    """Top simplices do not all have the same number of vertices."""


class IndexOutOfRange(CurrentLabError):
    """A simplex refers to a vertex index outside the vertex array."""


class DimensionMismatch(CurrentLabError):
    """Two chains that must share a complex and dimension do not."""


class EmptyRadii(CurrentLabError):
    """Density estimation called with an empty radii list."""


class DimensionZero(CurrentLabError):
    """Boundary requested for a 0-dimensional chain."""


class NonIntegerMultiplicity(CurrentLabError):
    """Chain flagged integer but a multiplicity is not within 1e-9 of one."""


# measures

class UnsupportedOrder(CurrentLabError):
    """No quadrature rule of the requested order for this dimension."""


class NonFiniteValue(CurrentLabError):
    """A scalar field returned NaN or infinity on a quadrature node."""


class GridMassNotAvoidable(CurrentLabError):
    """No random grid offset kept the on-grid mass below tolerance."""


# ambient bases

class BoxDegenerate(CurrentLabError):
    """Spline box has a non-positive extent along some axis."""


class DuplicateCenters(CurrentLabError):
    """Two RBF centers coincide."""


class EmptyAfterFilter(CurrentLabError):
    """Dirichlet filtering removed every atom."""


# spectra

class NonFiniteEntry(CurrentLabError):
    """Assembled stiffness or mass matrix contains NaN or infinity."""


class KTooLarge(CurrentLabError):
    """More eigenvalues requested than degrees of freedom available."""


class NotAManifoldChain(CurrentLabError):
    """Chain support is not a manifold of the expected kind (multiplicity
    not ±1, or a vertex/edge shared by too many cells)."""


class NonManifoldEdge(CurrentLabError):
    """An edge of a surface chain borders more than two triangles."""


class DirichletOnClosed(CurrentLabError):
    """Dirichlet conditions requested but the support has no boundary."""


# flat norm

class LPUnbounded(CurrentLabError):
    """The decomposition program is unbounded (cannot happen for valid
    inputs; raised defensively)."""


class LPStall(CurrentLabError):
    """Simplex iteration cap exceeded."""


# scenario generators

class EpsOutOfRange(CurrentLabError):
    """Family parameter outside its admissible interval."""


class HolesOverlap(CurrentLabError):
    """Hole radius so large that neighbouring holes intersect."""


class BadRadius(CurrentLabError):
    """Radius parameter not in the admissible range."""


class TooFewSegments(CurrentLabError):
    """Discretization too coarse for the requested scenario."""


# cli

class ConfigError(CurrentLabError):
    """Malformed or incomplete run configuration."""
