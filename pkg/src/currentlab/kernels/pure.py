"""Pure numpy fallback for the compiled kernels.

Both backends implement the same two entry points with identical pivoting
and tie-breaking decisions, so results agree to floating-point roundoff:

- simplex_solve: bounded-variable primal simplex with Bland's rule
- bspline_eval:  batch evaluation of a tensor-product cubic B-spline basis
"""

import numpy as np

STATUS_OPTIMAL = 0
STATUS_STALL = 1
STATUS_UNBOUNDED = 2


def simplex_solve(A, b, c, upper, basis0, max_iter, entering_tol=1e-9,
                  pivot_tol=1e-11):
    """Minimize c @ x subject to A x = b and 0 <= x <= upper.

    Parameters
    ----------
    A : (m, n) float array, dense.
    b : (m,) right-hand side.
    c : (n,) costs.
    upper : (n,) upper bounds, np.inf where absent.
    basis0 : (m,) int, initial basis; column basis0[i] of A must be a
        signed unit vector supported on row i, with b[i] / A[i, basis0[i]]
        nonnegative, so the start is primal feasible.
    max_iter : iteration cap.

    Returns
    -------
    x : (n,) primal solution (best found on stall).
    obj : float, c @ x.
    iterations : int.
    status : STATUS_OPTIMAL, STATUS_STALL or STATUS_UNBOUNDED.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    m, n = A.shape
    basis = np.array(basis0, dtype=np.int64).copy()
    sign = A[np.arange(m), basis]
    T = A / sign[:, None]
    xB = np.asarray(b, dtype=np.float64) / sign
    z = np.asarray(c, dtype=np.float64) - c[basis] @ T
    at_upper = np.zeros(n, dtype=bool)
    upper = np.asarray(upper, dtype=np.float64)

    status = STATUS_STALL
    it = 0
    while it < max_iter:
        it += 1
        eligible = (~at_upper) & (z < -entering_tol)
        eligible |= at_upper & (z > entering_tol)
        eligible[basis] = False
        if not eligible.any():
            status = STATUS_OPTIMAL
            break
        j = int(np.argmax(eligible))  # Bland: smallest eligible index
        from_upper = at_upper[j]
        w = -T[:, j] if from_upper else T[:, j]

        # ratio test: largest step t keeping 0 <= xB - t*w <= upper[basis]
        t_row = np.full(m, np.inf)
        pos = w > pivot_tol
        t_row[pos] = np.maximum(xB[pos], 0.0) / w[pos]
        neg = w < -pivot_tol
        ub = upper[basis[neg]]
        with np.errstate(invalid="ignore"):
            t_neg = (ub - xB[neg]) / (-w[neg])
        t_neg[np.isnan(t_neg)] = np.inf
        t_row[neg] = t_neg

        if t_row.size:
            tmin = t_row.min()
        else:
            tmin = np.inf
        t_bound = upper[j]
        if tmin == np.inf and t_bound == np.inf:
            status = STATUS_UNBOUNDED
            break

        if t_bound <= tmin:
            # the entering variable hits its other bound: no basis change
            xB -= t_bound * w
            at_upper[j] = not from_upper
            continue

        rows = np.nonzero(t_row == tmin)[0]
        r = int(rows[np.argmin(basis[rows])])  # Bland tie-break

        xB -= tmin * w
        xB[r] = upper[j] - tmin if from_upper else tmin
        leaving = basis[r]
        at_upper[leaving] = w[r] < 0.0
        basis[r] = j
        at_upper[j] = False

        piv = T[r, j]
        T[r, :] /= piv
        T[r, j] = 1.0
        col = T[:, j].copy()
        col[r] = 0.0
        T -= col[:, None] * T[r, :][None, :]
        T[:, j] = 0.0
        T[r, j] = 1.0
        z = z - z[j] * T[r, :]
        z[j] = 0.0

    x = np.zeros(n)
    flagged = at_upper.copy()
    flagged[basis] = False
    x[flagged] = upper[flagged]
    x[basis] = xB
    obj = float(c @ x)
    return x, obj, it, status


def _cubic_weights(t):
    """Values and t-derivatives of the four uniform cubic B-spline pieces
    active on a cell, at local coordinate t in [0, 1). Shapes (..., 4)."""
    s = 1.0 - t
    w = np.stack([
        s * s * s / 6.0,
        (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0,
        (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0,
        t * t * t / 6.0,
    ], axis=-1)
    d = np.stack([
        -0.5 * s * s,
        0.5 * (3.0 * t * t - 4.0 * t),
        0.5 * (-3.0 * t * t + 2.0 * t + 1.0),
        0.5 * t * t,
    ], axis=-1)
    return w, d


def bspline_eval(points, lo, h, n_cells):
    """Evaluate every atom of a tensor-product cubic B-spline basis.

    The univariate basis on an axis with C cells has C + 3 atoms on the
    uniform unclamped knot sequence lo + (i - 3) * h; atom j is supported
    on [lo + (j - 3) h, lo + (j + 1) h]. Atoms are numbered by the flat
    C-order multi-index over axes.

    Parameters
    ----------
    points : (P, N) evaluation points.
    lo : (N,) box lower corner.
    h : (N,) cell width per axis.
    n_cells : (N,) int, cells per axis.

    Returns
    -------
    values : (P, M) with M = prod(n_cells + 3).
    grads : (P, M, N).
    """
    points = np.asarray(points, dtype=np.float64)
    P, N = points.shape
    n_atoms = np.asarray(n_cells, dtype=np.int64) + 3
    M = int(np.prod(n_atoms))
    u = (points - lo) / h
    cell = np.floor(u).astype(np.int64)
    t = u - cell
    W, D = _cubic_weights(t)        # (P, N, 4)
    D = D / np.asarray(h, dtype=np.float64)[None, :, None]   # d/dx

    values = np.zeros((P, M))
    grads = np.zeros((P, M, N))
    strides = np.ones(N, dtype=np.int64)
    for a in range(N - 2, -1, -1):
        strides[a] = strides[a + 1] * n_atoms[a + 1]

    rows = np.arange(P)
    for combo in np.ndindex(*(4,) * N):
        j = cell + np.asarray(combo, dtype=np.int64)
        ok = np.all((j >= 0) & (j < n_atoms), axis=1)
        if not ok.any():
            continue
        flat = (j[ok] * strides).sum(axis=1)
        val = np.ones(int(ok.sum()))
        for a in range(N):
            val = val * W[ok, a, combo[a]]
        values[rows[ok], flat] += val
        for g in range(N):
            gv = np.ones(int(ok.sum()))
            for a in range(N):
                fac = D[ok, a, combo[a]] if a == g else W[ok, a, combo[a]]
                gv = gv * fac
            grads[rows[ok], flat, g] += gv
    return values, grads
