"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Pivoting matches the Cython code step for step. ``active_set_vertices``
tests singularity by a relative SVD bound instead of the compiled pivot
threshold, so near-degenerate systems can be classified differently; callers
deduplicate and verify vertices afterwards. ``pivot_loop`` also
accepts object arrays of :class:`fractions.Fraction` with ``tol=0``, which is
how the exact LP path runs.
"""
from itertools import combinations, islice

import numpy as np

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2


def pivot(T, basis, p, j):
    T[p] = T[p] / T[p, j]
    f = T[:, j].copy()
    f[p] = 0
    T -= np.outer(f, T[p])
    T[:, j] = 0
    T[p, j] = 1
    basis[p] = j


def pivot_loop(T, basis, n_enter, tol, max_iter):
    """Bland's-rule primal simplex on a tableau whose last row holds reduced costs.

    Minimizes. Returns ``(status, iterations)``.
    """
    m = T.shape[0] - 1
    for it in range(max_iter):
        obj = T[m, :n_enter]
        cand = np.nonzero(obj < -tol)[0]
        if cand.size == 0:
            return OPTIMAL, it
        j = int(cand[0])
        col = T[:m, j]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            return UNBOUNDED, it
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        tie = rows[ratios <= rmin + tol]
        p = int(tie[np.argmin(basis[tie])])
        pivot(T, basis, p, j)
    return ITERATION_LIMIT, max_iter


def active_set_vertices(E, f, A, b, s, sing_tol, feas_tol, chunk=4096):
    """Solve every square system built from ``E`` plus ``s`` rows of ``A``.

    Returns ``(vertices, combos)``: solutions that are nonsingular and satisfy
    ``A x <= b + feas_tol``, with the row indices that produced them.
    """
    k, d = A.shape
    e = E.shape[0]
    if e + s != d:
        raise ValueError("equality rows plus active rows must match the dimension")
    verts, combos = [], []
    it = combinations(range(k), s)
    while True:
        block = list(islice(it, chunk))
        if not block:
            break
        idx = np.array(block, dtype=np.intp).reshape(len(block), s)
        M = np.empty((len(block), d, d))
        rhs = np.empty((len(block), d))
        M[:, :e, :] = E
        rhs[:, :e] = f
        M[:, e:, :] = A[idx]
        rhs[:, e:] = b[idx]
        sv = np.linalg.svd(M, compute_uv=False)
        ok = sv[:, -1] > sing_tol * np.maximum(sv[:, 0], 1.0)
        if not ok.any():
            continue
        X = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
        feas = np.all(X @ A.T <= b + feas_tol, axis=1)
        verts.extend(X[feas])
        combos.extend(idx[ok][feas])
    V = np.array(verts, dtype=float).reshape(-1, d)
    C = np.array(combos, dtype=np.intp).reshape(-1, s)
    return V, C
