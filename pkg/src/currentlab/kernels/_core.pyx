# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: bounded-variable simplex and B-spline batch evaluation.

Mirrors kernels/pure.py; pivot choices and tie-breaks are the same, so the
two backends agree to floating-point roundoff.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, INFINITY

STATUS_OPTIMAL = 0
STATUS_STALL = 1
STATUS_UNBOUNDED = 2


def simplex_solve(A, b, c, upper, basis0, long max_iter,
                  double entering_tol=1e-9, double pivot_tol=1e-11):
    """See kernels.pure.simplex_solve for the contract."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] T_arr = \
        np.array(A, dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xB_arr = \
        np.array(b, dtype=np.float64, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c_arr = \
        np.ascontiguousarray(c, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = \
        np.ascontiguousarray(upper, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] basis = \
        np.array(basis0, dtype=np.int64, copy=True)
    cdef double[:, ::1] T = T_arr
    cdef double[::1] xB = xB_arr
    cdef double[::1] cc = c_arr
    cdef double[::1] ub = u_arr
    cdef long[::1] bas = <long[:basis.shape[0]]> <long*> basis.data

    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t n = T.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z_arr = np.zeros(n)
    cdef double[::1] z = z_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flags = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] basic_f = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] at_upper = flags
    cdef unsigned char[::1] is_basic = basic_f

    cdef Py_ssize_t i, j, k, r
    cdef double s, piv, w_i, t_i, tmin, t_bound, acc
    cdef long it = 0, status = STATUS_STALL
    cdef bint from_upper
    cdef long best_var

    for i in range(m):
        s = T[i, bas[i]]
        for k in range(n):
            T[i, k] /= s
        xB[i] /= s
        is_basic[bas[i]] = 1
    for j in range(n):
        acc = cc[j]
        for i in range(m):
            acc -= cc[bas[i]] * T[i, j]
        z[j] = acc

    while it < max_iter:
        it += 1
        j = -1
        for k in range(n):
            if is_basic[k]:
                continue
            if at_upper[k]:
                if z[k] > entering_tol:
                    j = k
                    break
            else:
                if z[k] < -entering_tol:
                    j = k
                    break
        if j < 0:
            status = STATUS_OPTIMAL
            break
        from_upper = at_upper[j]

        tmin = INFINITY
        r = -1
        best_var = 0
        for i in range(m):
            w_i = -T[i, j] if from_upper else T[i, j]
            if w_i > pivot_tol:
                t_i = xB[i] if xB[i] > 0.0 else 0.0
                t_i = t_i / w_i
            elif w_i < -pivot_tol:
                if ub[bas[i]] == INFINITY:
                    continue
                t_i = (ub[bas[i]] - xB[i]) / (-w_i)
            else:
                continue
            if t_i < tmin or (t_i == tmin and bas[i] < best_var):
                tmin = t_i
                r = i
                best_var = bas[i]

        t_bound = ub[j]
        if tmin == INFINITY and t_bound == INFINITY:
            status = STATUS_UNBOUNDED
            break

        if t_bound <= tmin:
            for i in range(m):
                w_i = -T[i, j] if from_upper else T[i, j]
                xB[i] -= t_bound * w_i
            at_upper[j] = not from_upper
            continue

        for i in range(m):
            w_i = -T[i, j] if from_upper else T[i, j]
            xB[i] -= tmin * w_i
        xB[r] = (ub[j] - tmin) if from_upper else tmin
        w_i = -T[r, j] if from_upper else T[r, j]
        at_upper[bas[r]] = w_i < 0.0
        is_basic[bas[r]] = 0
        bas[r] = j
        is_basic[j] = 1
        at_upper[j] = 0

        piv = T[r, j]
        for k in range(n):
            T[r, k] /= piv
        T[r, j] = 1.0
        for i in range(m):
            if i == r:
                continue
            s = T[i, j]
            if s != 0.0:
                for k in range(n):
                    T[i, k] -= s * T[r, k]
            T[i, j] = 0.0
        s = z[j]
        if s != 0.0:
            for k in range(n):
                z[k] -= s * T[r, k]
        z[j] = 0.0

    x = np.zeros(n)
    for k in range(n):
        if at_upper[k] and not is_basic[k]:
            x[k] = ub[k]
    for i in range(m):
        x[basis[i]] = xB[i]
    obj = float(np.dot(c_arr, x))
    return x, obj, int(it), int(status)


def bspline_eval(points, lo, h, n_cells):
    """See kernels.pure.bspline_eval for the contract. Supports N <= 8."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = \
        np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lo_a = \
        np.ascontiguousarray(lo, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h_a = \
        np.ascontiguousarray(h, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nc = \
        np.ascontiguousarray(n_cells, dtype=np.int64)

    cdef Py_ssize_t P = pts.shape[0]
    cdef Py_ssize_t N = pts.shape[1]
    if N > 8:
        raise ValueError("bspline_eval supports at most 8 ambient dimensions")

    cdef long[8] n_atoms
    cdef long[8] strides
    cdef Py_ssize_t a, g, p
    cdef long M = 1
    for a in range(N):
        n_atoms[a] = nc[a] + 3
    strides[N - 1] = 1
    for a in range(N - 2, -1, -1):
        strides[a] = strides[a + 1] * n_atoms[a + 1]
    for a in range(N):
        M *= n_atoms[a]

    cdef cnp.ndarray[cnp.float64_t, ndim=2] values = np.zeros((P, M))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] grads = np.zeros((P, M, N))
    cdef double[:, ::1] V = values
    cdef double[:, :, ::1] G = grads

    cdef double[8][4] w
    cdef double[8][4] d
    cdef long[8] jb
    cdef long[8] combo
    cdef double u, t, s1, val, gv
    cdef long kk, jj, flat
    cdef bint ok

    for p in range(P):
        for a in range(N):
            u = (pts[p, a] - lo_a[a]) / h_a[a]
            kk = <long> floor(u)
            t = u - kk
            jb[a] = kk
            s1 = 1.0 - t
            w[a][0] = s1 * s1 * s1 / 6.0
            w[a][1] = (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0
            w[a][2] = (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0
            w[a][3] = t * t * t / 6.0
            d[a][0] = -0.5 * s1 * s1 / h_a[a]
            d[a][1] = 0.5 * (3.0 * t * t - 4.0 * t) / h_a[a]
            d[a][2] = 0.5 * (-3.0 * t * t + 2.0 * t + 1.0) / h_a[a]
            d[a][3] = 0.5 * t * t / h_a[a]
        for a in range(N):
            combo[a] = 0
        while True:
            ok = 1
            flat = 0
            for a in range(N):
                jj = jb[a] + combo[a]
                if jj < 0 or jj >= n_atoms[a]:
                    ok = 0
                    break
                flat += jj * strides[a]
            if ok:
                val = 1.0
                for a in range(N):
                    val *= w[a][combo[a]]
                V[p, flat] += val
                for g in range(N):
                    gv = 1.0
                    for a in range(N):
                        if a == g:
                            gv *= d[a][combo[a]]
                        else:
                            gv *= w[a][combo[a]]
                    G[p, flat, g] += gv
            a = N - 1
            while a >= 0:
                combo[a] += 1
                if combo[a] < 4:
                    break
                combo[a] = 0
                a -= 1
            if a < 0:
                break
    return values, grads
