"""Dense-tableau two-phase simplex with Bland's rule.

Small, deterministic and self-contained. The float path runs the pivot loop
in the compiled kernel when available; ``exact=True`` runs the same
algorithm on :class:`fractions.Fraction` tableaux with zero tolerance.

Problems are ``min/max c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``
and ``x >= 0`` (or ``x`` free with ``free=True``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import LPError

LP_TOL = 1e-10
MAX_ITER = 100_000


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None = None
    value: float | Fraction | None = None
    iterations: int = 0

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def _as_matrix(A, ncols, exact):
    if A is None:
        return np.zeros((0, ncols), dtype=object if exact else float)
    if exact:
        M = np.array([[Fraction(v) for v in row] for row in np.asarray(A, dtype=object)], dtype=object)
        return M.reshape(-1, ncols)
    return np.asarray(A, dtype=float).reshape(-1, ncols)


def _as_vector(b, exact):
    if b is None:
        return np.zeros(0, dtype=object if exact else float)
    if exact:
        return np.array([Fraction(v) for v in np.asarray(b, dtype=object).ravel()], dtype=object)
    return np.asarray(b, dtype=float).ravel()


class _Stalled(Exception):
    """Float pivoting hit the iteration cap, usually round-off cycling."""


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, maximize=False,
             exact=False, free=False, tol=None, max_iter=MAX_ITER) -> LPResult:
    """Solve a small LP. Returns an :class:`LPResult`; never raises on
    infeasible or unbounded problems.

    Bland's rule cannot cycle in exact arithmetic, but round-off can make a
    degenerate float solve cycle. When the float path stalls the problem is
    re-solved on rationals and the result converted back to floats.
    """
    args = (c, A_ub, b_ub, A_eq, b_eq)
    try:
        return _solve(*args, maximize=maximize, exact=exact, free=free, tol=tol, max_iter=max_iter)
    except _Stalled:
        res = _solve(*args, maximize=maximize, exact=True, free=free, tol=0, max_iter=max_iter)
        if res.x is not None:
            res.x = np.array([float(v) for v in res.x])
        if res.value is not None:
            res.value = float(res.value)
        return res


def _solve(c, A_ub, b_ub, A_eq, b_eq, *, maximize, exact, free, tol, max_iter) -> LPResult:
    if exact:
        tol = 0
    elif tol is None:
        tol = LP_TOL
    zero = Fraction(0) if exact else 0.0
    c = _as_vector(c, exact)
    n = len(c)
    A_ub, b_ub = _as_matrix(A_ub, n, exact), _as_vector(b_ub, exact)
    A_eq, b_eq = _as_matrix(A_eq, n, exact), _as_vector(b_eq, exact)
    if free:
        res = solve_lp(np.concatenate([c, -c]), np.hstack([A_ub, -A_ub]), b_ub,
                       np.hstack([A_eq, -A_eq]), b_eq, maximize=maximize, exact=exact,
                       tol=tol, max_iter=max_iter)
        if res.x is not None:
            res.x = res.x[:n] - res.x[n:]
        return res
    if maximize:
        res = solve_lp(-c, A_ub, b_ub, A_eq, b_eq, exact=exact, tol=tol, max_iter=max_iter)
        if res.value is not None:
            res.value = -res.value
        return res

    m_ub, m_eq = len(b_ub), len(b_eq)
    m = m_ub + m_eq
    # columns: structural | slack or surplus (one per ub row) | artificial
    need_art = [i for i in range(m_ub) if b_ub[i] < 0] + [m_ub + i for i in range(m_eq)]
    n_art = len(need_art)
    ncol = n + m_ub + n_art
    dtype = object if exact else float
    T = np.zeros((m + 1, ncol + 1), dtype=dtype)
    if exact:
        T[:] = zero
    basis = np.zeros(m, dtype=np.intp)
    art_col = {}
    for k, r in enumerate(need_art):
        art_col[r] = n + m_ub + k
    for i in range(m_ub):
        sign = -1 if b_ub[i] < 0 else 1
        T[i, :n] = sign * A_ub[i]
        T[i, n + i] = sign
        T[i, -1] = sign * b_ub[i]
        basis[i] = art_col.get(i, n + i)
    for i in range(m_eq):
        r = m_ub + i
        sign = -1 if b_eq[i] < 0 else 1
        T[r, :n] = sign * A_eq[i]
        T[r, -1] = sign * b_eq[i]
        basis[r] = art_col[r]
    for r, col in art_col.items():
        T[r, col] = 1

    iters = 0
    n_real = n + m_ub
    # far above what a non-cycling float solve of this size needs
    limit = max_iter if exact else min(max_iter, 1000 + 50 * (m + ncol))
    if n_art:
        # phase 1: minimize the sum of artificials
        for r in art_col:
            T[m] -= T[r]
        for col in art_col.values():
            T[m, col] = zero
        status, it = kernels.pivot_loop(T, basis, n_real, tol, limit)
        iters += it
        if status != kernels.OPTIMAL:
            if not exact:
                raise _Stalled
            raise LPError("phase 1 did not terminate")
        infeas = -T[m, -1]
        if (infeas > 0) if exact else (infeas > 1e-9):
            return LPResult("infeasible", iterations=iters)
        # drive remaining artificials out of the basis; rows with no
        # structural entry left are redundant and dropped
        keep = []
        for r in range(m):
            if basis[r] >= n_real:
                row = T[r, :n_real]
                nz = np.nonzero(row != 0 if exact else np.abs(row) > 1e-9)[0]
                if len(nz):
                    kernels.pivot(T, basis, r, int(nz[0]))
                    keep.append(r)
            else:
                keep.append(r)
        cols = list(range(n_real)) + [ncol]
        T = np.ascontiguousarray(T[keep + [m]][:, cols])
        basis = np.ascontiguousarray(basis[keep])
        m = len(keep)

    # phase 2: reduced costs of the true objective
    cost = np.zeros(n_real, dtype=dtype)
    if exact:
        cost[:] = zero
    cost[:n] = c
    T[m, :] = zero
    T[m, :n_real] = cost
    for r in range(m):
        cb = cost[basis[r]]
        if cb != 0:
            T[m] -= cb * T[r]
    status, it = kernels.pivot_loop(T, basis, n_real, tol, limit)
    iters += it
    if status == kernels.UNBOUNDED:
        return LPResult("unbounded", iterations=iters)
    if status != kernels.OPTIMAL:
        if not exact:
            raise _Stalled
        raise LPError("simplex iteration limit reached")
    x = np.zeros(n_real, dtype=dtype)
    if exact:
        x[:] = zero
    for r in range(m):
        x[basis[r]] = T[r, -1]
    x = x[:n]
    if not exact:
        x[np.abs(x) < 1e-13] = 0.0
    value = sum((ci * xi for ci, xi in zip(c, x)), zero)
    return LPResult("optimal", x, value, iters)
