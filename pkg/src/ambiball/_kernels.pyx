# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: simplex pivoting and active-set vertex solves.

Pure-Python twins live in ``_fallback.py``; ``kernels.py`` picks one at import.
"""
import numpy as np
from libc.math cimport fabs

cdef enum:
    OPTIMAL = 0
    UNBOUNDED = 1
    ITERATION_LIMIT = 2


cdef void _pivot(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t p, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0], cols = T.shape[1], i, k
    cdef double piv = T[p, j], fac
    for k in range(cols):
        T[p, k] = T[p, k] / piv
    for i in range(rows):
        if i == p:
            continue
        fac = T[i, j]
        if fac != 0.0:
            for k in range(cols):
                T[i, k] = T[i, k] - fac * T[p, k]
        T[i, j] = 0.0
    T[p, j] = 1.0
    basis[p] = j


def pivot(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t p, Py_ssize_t j):
    _pivot(T, basis, p, j)


def pivot_loop(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t n_enter, double tol, Py_ssize_t max_iter):
    """Bland's-rule primal simplex (minimization). Returns ``(status, iterations)``."""
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it, j, i, p
    cdef Py_ssize_t status = ITERATION_LIMIT, done_iter = max_iter
    cdef double ratio, rmin
    with nogil:
        for it in range(max_iter):
            j = -1
            for i in range(n_enter):
                if T[m, i] < -tol:
                    j = i
                    break
            if j < 0:
                status = OPTIMAL
                done_iter = it
                break
            rmin = 0.0
            p = -1
            for i in range(m):
                if T[i, j] > tol:
                    ratio = T[i, rhs] / T[i, j]
                    if p < 0 or ratio < rmin:
                        rmin = ratio
                        p = i
            if p < 0:
                status = UNBOUNDED
                done_iter = it
                break
            # Bland tie-break: among rows within tol of the minimum ratio,
            # leave on the smallest basic variable index
            for i in range(m):
                if T[i, j] > tol:
                    ratio = T[i, rhs] / T[i, j]
                    if ratio <= rmin + tol and basis[i] < basis[p]:
                        p = i
            _pivot(T, basis, p, j)
    return status, done_iter


cdef bint _solve(double[:, ::1] M, double[::1] x, Py_ssize_t d, double sing_tol) noexcept nogil:
    # Gaussian elimination with partial pivoting on the augmented d x (d+1) matrix
    cdef Py_ssize_t c, r, best, k
    cdef double amax, v, fac, tmp
    for c in range(d):
        best = c
        amax = fabs(M[c, c])
        for r in range(c + 1, d):
            v = fabs(M[r, c])
            if v > amax:
                amax = v
                best = r
        if amax <= sing_tol:
            return False
        if best != c:
            for k in range(d + 1):
                tmp = M[c, k]
                M[c, k] = M[best, k]
                M[best, k] = tmp
        for r in range(c + 1, d):
            fac = M[r, c] / M[c, c]
            if fac != 0.0:
                for k in range(c, d + 1):
                    M[r, k] = M[r, k] - fac * M[c, k]
    for c in range(d - 1, -1, -1):
        v = M[c, d]
        for k in range(c + 1, d):
            v = v - M[c, k] * x[k]
        x[c] = v / M[c, c]
    return True


def active_set_vertices(double[:, ::1] E, double[::1] f, double[:, ::1] A, double[::1] b,
                        Py_ssize_t s, double sing_tol, double feas_tol):
    """Solve every square system built from ``E`` plus ``s`` rows of ``A``.

    Rows are expected pre-normalized (unit max-abs) so ``sing_tol`` is absolute.
    Returns ``(vertices, combos)`` for nonsingular, feasible solutions.
    """
    cdef Py_ssize_t k = A.shape[0], d = A.shape[1], e = E.shape[0]
    if e + s != d:
        raise ValueError("equality rows plus active rows must match the dimension")
    if s > k:
        return np.empty((0, d)), np.empty((0, s), dtype=np.intp)
    cdef Py_ssize_t[::1] comb = np.arange(s, dtype=np.intp)
    cdef double[:, ::1] M = np.empty((d, d + 1))
    cdef double[::1] x = np.empty(d)
    cdef Py_ssize_t r, c, t, q
    cdef double lhs
    cdef bint feasible, done = False
    verts = []
    combos = []
    while not done:
        with nogil:
            for r in range(e):
                for c in range(d):
                    M[r, c] = E[r, c]
                M[r, d] = f[r]
            for t in range(s):
                for c in range(d):
                    M[e + t, c] = A[comb[t], c]
                M[e + t, d] = b[comb[t]]
            feasible = _solve(M, x, d, sing_tol)
            if feasible:
                for q in range(k):
                    lhs = 0.0
                    for c in range(d):
                        lhs = lhs + A[q, c] * x[c]
                    if lhs > b[q] + feas_tol:
                        feasible = False
                        break
        if feasible:
            verts.append(np.asarray(x).copy())
            combos.append(np.asarray(comb).copy())
        # next combination in lexicographic order
        t = s - 1
        while t >= 0 and comb[t] == k - s + t:
            t -= 1
        if t < 0:
            done = True
        else:
            comb[t] += 1
            for q in range(t + 1, s):
                comb[q] = comb[q - 1] + 1
    V = np.array(verts, dtype=float).reshape(-1, d)
    C = np.array(combos, dtype=np.intp).reshape(-1, s)
    return V, C
