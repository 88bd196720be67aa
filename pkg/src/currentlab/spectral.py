"""Eigenvalue computations.

Two routes to the spectrum of a chain:

- ambient: restrict the Rayleigh quotient of gradient energy over an
  ambient function system to the chain's quadrature mass measure and
  solve the resulting generalized symmetric problem. Trial directions
  carrying no measure mass have an infinite quotient and are reported
  as inf after the requested count is exhausted.
- intrinsic: linear finite elements directly on the support (segments
  for curves, the cotangent form for triangulated surfaces) with
  closed/Neumann or Dirichlet conditions.

Analytic reference spectra for standard shapes live here as well.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

from .chains import SUPPORT_TOL, boundary, mass, set_of
from .basis import filter_dirichlet
from .errors import (DirichletOnClosed, KTooLarge, NonFiniteEntry,
                     NonManifoldEdge, NotAManifoldChain)
from .measure import quadrature_measure

NULL_THRESHOLD = 1e-10
DENSE_CUTOFF = 800


@dataclass(frozen=True, eq=False)
class MatrixPair:
    """Stiffness and mass matrices of one discretized quotient."""

    stiffness: np.ndarray
    mass: np.ndarray

    @property
    def size(self):
        return int(self.mass.shape[0])


@dataclass(frozen=True)
class SpectralResult:
    """Ascending eigenvalues; math.inf marks trial directions with zero
    measure mass. kept_dim is the number of finite-mass directions."""

    values: tuple
    kept_dim: int
    method: str
    bc: str

    @property
    def inf_count(self):
        return sum(1 for v in self.values if v == math.inf)

    @property
    def finite_values(self):
        return tuple(v for v in self.values if v != math.inf)

    def to_json(self):
        return {
            "values": [float(v) for v in self.finite_values],
            "inf_count": self.inf_count,
            "method": self.method,
            "bc": self.bc,
        }


def _mirror(M):
    # exact symmetrization: upper triangle wins
    return np.triu(M) + np.triu(M, 1).T


def assemble(measure, basis):
    """Gradient-energy and value Gram matrices of the atoms against the
    measure: A_ij = int grad f_i . grad f_j, B_ij = int f_i f_j."""
    V, G = basis.evaluate(measure.points)
    w = measure.weights
    B = V.T @ (V * w[:, None])
    A = np.zeros_like(B)
    for axis in range(G.shape[2]):
        Ga = G[:, :, axis]
        A += Ga.T @ (Ga * w[:, None])
    A = _mirror(A)
    B = _mirror(B)
    if not (np.isfinite(A).all() and np.isfinite(B).all()):
        raise NonFiniteEntry("assembled matrices contain non-finite values")
    return MatrixPair(A, B)


def generalized_eigs(pair, k, null_threshold=NULL_THRESHOLD,
                     method="ambient", bc="neumann"):
    """Smallest k values of the pencil (A, B) with B positive
    semidefinite. Directions in the numerical null space of B (relative
    threshold on B's spectrum) are removed; if fewer than k directions
    survive, the tail is reported as inf."""
    if k < 1:
        raise ValueError("k must be at least 1")
    m = pair.size
    if k > m:
        raise KTooLarge("requested %d values from %d atoms" % (k, m))
    if not (np.isfinite(pair.stiffness).all()
            and np.isfinite(pair.mass).all()):
        raise NonFiniteEntry("matrix pair contains non-finite values")
    s, Q = np.linalg.eigh(pair.mass)
    max_diag = float(np.max(np.diag(pair.mass))) if m else 0.0
    keep = s > null_threshold * max_diag
    kept = int(np.count_nonzero(keep))
    if kept == 0:
        return SpectralResult((math.inf,) * k, 0, method, bc)
    S = Q[:, keep] / np.sqrt(s[keep])
    At = _mirror(S.T @ pair.stiffness @ S)
    vals = np.linalg.eigvalsh(At)
    tiny = 1e-10 * max(1.0, float(abs(vals[-1])))
    vals = np.where((vals < 0.0) & (vals > -tiny), 0.0, vals)
    take = min(k, kept)
    out = [float(v) for v in vals[:take]]
    out.extend([math.inf] * (k - take))
    return SpectralResult(tuple(out), kept, method, bc)


def ambient_lambda(chain, basis, k, order=2, null_threshold=NULL_THRESHOLD):
    """Ambient eigenvalues of the chain's mass measure over the span of
    the basis atoms (natural/Neumann variational setting)."""
    if mass(chain) <= 0.0:
        raise ValueError("chain has zero mass")
    mu = quadrature_measure(chain, order)
    pair = assemble(mu, basis)
    return generalized_eigs(pair, k, null_threshold, "ambient", "neumann")


def ambient_lambda_dirichlet(chain, basis, k, epsilon, order=2,
                             null_threshold=NULL_THRESHOLD,
                             boundary_set=None):
    """Ambient eigenvalues with trial atoms vanishing near the boundary:
    atoms whose support box comes within epsilon of the boundary set are
    dropped before assembly. With an empty boundary the result equals
    the natural one."""
    if mass(chain) <= 0.0:
        raise ValueError("chain has zero mass")
    if boundary_set is None:
        boundary_set = set_of(boundary(chain))
    trial = filter_dirichlet(basis, boundary_set, epsilon)
    mu = quadrature_measure(chain, order)
    pair = assemble(mu, trial)
    return generalized_eigs(pair, k, null_threshold, "ambient", "dirichlet")


def _solve_pencil_smallest(K, M, k):
    """Smallest k eigenvalues of sparse SPD-pencil (K, M), ascending.
    Dense below DENSE_CUTOFF dofs, shift-invert Lanczos above (fixed
    start vector, negative shift so the factorized matrix is SPD)."""
    n = K.shape[0]
    if k > n:
        raise KTooLarge("requested %d values from %d dofs" % (k, n))
    if n <= DENSE_CUTOFF or k >= n - 1:
        vals = eigh(K.toarray(), M.toarray(), eigvals_only=True,
                    subset_by_index=[0, k - 1])
    else:
        scale = (K.diagonal().sum() / max(M.diagonal().sum(), 1e-300))
        sigma = -1e-3 * max(scale, 1e-12)
        # deterministic start vector without accidental symmetries: a
        # uniform vector stays inside a symmetric subspace on meshes
        # with repeated identical components and Lanczos then misses
        # every antisymmetric eigenvector
        v0 = np.cos(0.7 * np.arange(n) + 0.3)
        v0 /= np.linalg.norm(v0)
        vals = eigsh(K.tocsc(), k=k, M=M.tocsc(), sigma=sigma,
                     which="LM", v0=v0, return_eigenvectors=False)
        vals = np.sort(vals)
    tiny = 1e-10 * max(1.0, float(abs(vals).max()) if len(vals) else 1.0)
    vals = np.where((vals < 0.0) & (vals > -tiny), 0.0, vals)
    return [float(v) for v in vals]


def _check_unit_multiplicities(theta, live):
    if np.abs(np.abs(theta[live]) - 1.0).max() > 1e-9:
        raise NotAManifoldChain("support multiplicities must be +-1")


def intrinsic_curve_spectrum(chain, bc, k):
    """Linear FEM spectrum on the support of a 1-chain.

    The support must be a 1-manifold: multiplicities +-1 and no vertex
    shared by more than two support edges. bc "closed"/"neumann" leaves
    all dofs free; "dirichlet" clamps the endpoints (vertices of edge
    degree one) and requires that some exist.
    """
    if chain.dim != 1:
        raise ValueError("curve spectrum needs a 1-chain")
    if bc not in ("closed", "neumann", "dirichlet"):
        raise ValueError("unknown bc %r" % (bc,))
    theta = chain.multiplicities
    live = np.nonzero(np.abs(theta) > SUPPORT_TOL)[0]
    if live.size == 0:
        raise ValueError("chain has empty support")
    _check_unit_multiplicities(theta, live)
    edges = chain.complex.simplices(1)[live]
    verts, local = np.unique(edges, return_inverse=True)
    local = local.reshape(edges.shape)
    degree = np.bincount(local.ravel(), minlength=verts.size)
    if degree.max() > 2:
        raise NotAManifoldChain("a vertex is shared by more than two "
                                "support edges")
    nv = verts.size
    lengths = chain.complex.volumes(1)[live]

    i0, i1 = local[:, 0], local[:, 1]
    inv = 1.0 / lengths
    rows = np.concatenate([i0, i1, i0, i1])
    cols = np.concatenate([i0, i1, i1, i0])
    k_vals = np.concatenate([inv, inv, -inv, -inv])
    K = sp.coo_matrix((k_vals, (rows, cols)), shape=(nv, nv)).tocsr()
    m_diag = lengths / 3.0
    m_off = lengths / 6.0
    m_vals = np.concatenate([m_diag, m_diag, m_off, m_off])
    M = sp.coo_matrix((m_vals, (rows, cols)), shape=(nv, nv)).tocsr()

    if bc == "dirichlet":
        free = np.nonzero(degree == 2)[0]
        if free.size == nv:
            raise DirichletOnClosed("support is closed, no endpoints to "
                                    "clamp")
        K = K[free][:, free]
        M = M[free][:, free]
        nv = free.size
    vals = _solve_pencil_smallest(K, M, k)
    return SpectralResult(tuple(vals), nv, "intrinsic", bc)


def intrinsic_surface_spectrum(chain, bc, k, constrained_vertices=None):
    """Cotangent-form FEM spectrum on the support of a 2-chain.

    The support must have multiplicities +-1 and every edge on at most
    two triangles. bc "closed"/"neumann" leaves all dofs free;
    "dirichlet" clamps the boundary vertices (edges on one triangle),
    or an explicit vertex set passed via constrained_vertices (global
    indices), which permits mixed natural/clamped problems.
    """
    if chain.dim != 2:
        raise ValueError("surface spectrum needs a 2-chain")
    if bc not in ("closed", "neumann", "dirichlet"):
        raise ValueError("unknown bc %r" % (bc,))
    theta = chain.multiplicities
    live = np.nonzero(np.abs(theta) > SUPPORT_TOL)[0]
    if live.size == 0:
        raise ValueError("chain has empty support")
    _check_unit_multiplicities(theta, live)
    tris = chain.complex.simplices(2)[live]
    verts, local = np.unique(tris, return_inverse=True)
    local = local.reshape(tris.shape)
    nv = verts.size

    pts = chain.complex.vertices[verts]
    p = pts[local]                                # (S, 3, N)
    # opposite edge vectors; local stiffness (E_i . E_j) / (4 area)
    E = np.stack([p[:, 2] - p[:, 1],
                  p[:, 0] - p[:, 2],
                  p[:, 1] - p[:, 0]], axis=1)     # (S, 3, N)
    area = chain.complex.volumes(2)[live]
    Kloc = np.einsum("sin,sjn->sij", E, E) / (4.0 * area)[:, None, None]
    Mloc = (area / 12.0)[:, None, None] * (np.ones((3, 3))
                                           + np.eye(3))[None, :, :]

    rows = np.repeat(local, 3, axis=1).ravel()
    cols = np.tile(local, (1, 3)).ravel()
    K = sp.coo_matrix((Kloc.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()
    M = sp.coo_matrix((Mloc.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()

    edge_pairs = np.sort(np.concatenate([local[:, [1, 2]],
                                         local[:, [0, 2]],
                                         local[:, [0, 1]]]), axis=1)
    uniq, counts = np.unique(edge_pairs, axis=0, return_counts=True)
    if counts.max() > 2:
        raise NonManifoldEdge("an edge borders more than two support "
                              "triangles")

    if bc == "dirichlet":
        if constrained_vertices is not None:
            gset = set(np.asarray(constrained_vertices,
                                  dtype=np.int64).tolist())
            clamped = np.array([i for i, g in enumerate(verts)
                                if int(g) in gset], dtype=np.int64)
        else:
            rim = uniq[counts == 1]
            clamped = np.unique(rim)
        if clamped.size == 0:
            raise DirichletOnClosed("support is closed, nothing to clamp")
        keep = np.setdiff1d(np.arange(nv), clamped)
        K = K[keep][:, keep]
        M = M[keep][:, keep]
        nv = keep.size
    vals = _solve_pencil_smallest(K, M, k)
    return SpectralResult(tuple(vals), nv, "intrinsic", bc)


def analytic_spectrum(model, k, **params):
    """Reference spectra of standard shapes, ascending with multiplicity.

    models: "circle" (L), "two_circles" (L1, L2), "interval_dirichlet"
    (L), "sphere" (radius).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if model == "circle":
        L = float(params["L"])
        vals = [(2.0 * math.pi * (j // 2) / L) ** 2
                for j in range(1, k + 1)]
        return SpectralResult(tuple(vals), k, "analytic", "closed")
    if model == "two_circles":
        a = analytic_spectrum("circle", k, L=params["L1"])
        b = analytic_spectrum("circle", k, L=params["L2"])
        return merge_spectra([a, b], k)
    if model == "interval_dirichlet":
        L = float(params["L"])
        vals = [(j * math.pi / L) ** 2 for j in range(1, k + 1)]
        return SpectralResult(tuple(vals), k, "analytic", "dirichlet")
    if model == "sphere":
        r = float(params.get("radius", 1.0))
        vals = []
        ell = 0
        while len(vals) < k:
            vals.extend([ell * (ell + 1) / r ** 2] * (2 * ell + 1))
            ell += 1
        return SpectralResult(tuple(vals[:k]), k, "analytic", "closed")
    raise ValueError("unknown model %r" % (model,))


def merge_spectra(spectra, k):
    """Ascending merge of several spectra truncated to k values; the
    spectrum of a disjoint union is the merge of the parts."""
    seqs = []
    kept = 0
    bcs = set()
    for s in spectra:
        if isinstance(s, SpectralResult):
            seqs.append(s.values)
            kept += s.kept_dim
            bcs.add(s.bc)
        else:
            seqs.append(tuple(float(v) for v in s))
            kept += len(seqs[-1])
            bcs.add("unknown")
    merged = []
    for v in heapq.merge(*seqs):
        merged.append(float(v))
        if len(merged) == k:
            break
    if len(merged) < k:
        merged.extend([math.inf] * (k - len(merged)))
    bc = bcs.pop() if len(bcs) == 1 else "mixed"
    return SpectralResult(tuple(merged), kept, "merged", bc)
