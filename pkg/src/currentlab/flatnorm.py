"""Flat norm of polyhedral chains by linear programming.

The flat norm of an n-chain X over a host complex is the least value of
mass(U) + mass(V) over decompositions X = U + boundary(V) with U an
n-chain and V an (n+1)-chain on the host. Splitting each multiplicity
into positive and negative parts turns this into a linear program with
costs given by simplex volumes; a bounded-variable simplex solver with
Bland's rule computes an exact vertex optimum. Multiplicities range over
the reals (the relaxation of the integral problem).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .chains import Chain, boundary, mass, zero_chain
from .errors import DimensionMismatch, LPStall, LPUnbounded

ITERATION_FACTOR = 10


@dataclass(frozen=True, eq=False)
class FlatNormCertificate:
    """Optimal decomposition X = U + boundary(V) with its value."""

    value: float
    U: Chain
    V: Chain


def flat_norm(X, host=None):
    """Flat norm of the chain X over a host complex.

    The host defaults to X's own complex and must be the complex X lives
    on; V ranges over its (n+1)-simplices. When the host has none, the
    optimal decomposition is trivially U = X.
    """
    if host is None:
        host = X.complex
    if host is not X.complex:
        raise DimensionMismatch("X does not live on the host complex")
    n = X.dim
    m = host.n_simplices(n)
    p = host.n_simplices(n + 1)
    if p == 0:
        U = Chain(host, n, X.multiplicities)
        V = zero_chain(host, n + 1)
        return FlatNormCertificate(mass(U), U, V)

    D = host.incidence(n + 1).toarray().astype(np.float64)
    A = np.hstack([np.eye(m), -np.eye(m), D, -D])
    b = X.multiplicities.astype(np.float64)
    vol_n = host.volumes(n)
    vol_p = host.volumes(n + 1)
    c = np.concatenate([vol_n, vol_n, vol_p, vol_p])
    upper = np.full(2 * m + 2 * p, np.inf)
    basis0 = np.where(b >= 0, np.arange(m), m + np.arange(m))

    max_iter = ITERATION_FACTOR * (m + 2 * m + 2 * p)
    x, obj, iters, status = kernels.simplex_solve(A, b, c, upper, basis0,
                                                  max_iter)
    if status == kernels.STATUS_UNBOUNDED:
        raise LPUnbounded("decomposition program is unbounded")
    if status != kernels.STATUS_OPTIMAL:
        raise LPStall("no optimum within %d simplex iterations" % max_iter)

    v = x[2 * m:2 * m + p] - x[2 * m + p:]
    V = Chain(host, n + 1, v)
    U = X - boundary(V)
    return FlatNormCertificate(mass(U) + mass(V), U, V)


def flat_distance(S, T, host=None):
    """Flat distance between two chains on the same complex: the flat
    norm of their difference, with its certificate."""
    if S.complex is not T.complex or S.dim != T.dim:
        raise DimensionMismatch("chains live on different complexes or "
                                "dimensions")
    return flat_norm(S - T, host=host)


def verify_certificate(cert, X, tol=1e-9):
    """Check a certificate against the chain it decomposes: the residual
    X - U - boundary(V) must vanish and the stated value must equal
    mass(U) + mass(V), both within tol (relative for the value)."""
    if cert.U.complex is not X.complex or cert.U.dim != X.dim:
        return False
    if cert.V.dim != X.dim + 1:
        return False
    residual = X.multiplicities - cert.U.multiplicities \
        - boundary(cert.V).multiplicities
    if residual.size and np.abs(residual).max() > tol:
        return False
    stated = cert.value
    actual = mass(cert.U) + mass(cert.V)
    return abs(stated - actual) <= tol * max(1.0, abs(stated))
