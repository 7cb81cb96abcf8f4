"""Prokhorov and Kantorovich distances between discrete measures.

Everything reduces to small transport LPs over ``supp(mu1) x supp(mu2)``:

* Kantorovich: minimize ``sum d(x, x') nu(x, x')`` over couplings; the dual
  is solved as a separate LP over 1-Lipschitz potentials on all of X.
* Prokhorov: ``g(t) = min_nu nu{d > t}`` is a nonincreasing step function
  with breakpoints at pairwise distances, and the distance is the least
  ``eps`` with ``g(eps) <= eps`` (closed-set convention, so the minimum is
  attained).

On a finite space the Kantorovich distance is always finite, so the
extended-metric case never arises.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LPError
from .lp import solve_lp
from .measures import Coupling, DiscreteMeasure, _check_same_space

CERT_TOL = 1e-9
# slack used when comparing an LP optimum against a budget
BUDGET_TOL = 1e-12


@dataclass
class TransportLP:
    """Transport problem between two measures with an optional budget row.

    ``cost`` is indexed by the supports of ``mu1`` (rows) and ``mu2``
    (columns). ``extra_budget`` is ``(indicator_cost, eps)`` and adds the
    constraint ``sum indicator_cost * nu <= eps``.
    """

    mu1: DiscreteMeasure
    mu2: DiscreteMeasure
    cost: np.ndarray
    extra_budget: tuple | None = None

    @property
    def row_masses(self):
        return self.mu1.weights

    @property
    def col_masses(self):
        return self.mu2.weights

    def solve(self, exact: bool = False):
        """Return ``(value, coupling)`` for the cheapest feasible plan, or ``None``."""
        r, c = len(self.mu1), len(self.mu2)
        nv = r * c
        A_eq = np.zeros((r + c - 1, nv))
        for i in range(r):
            A_eq[i, i * c:(i + 1) * c] = 1
        # one column constraint is implied by the others
        for j in range(c - 1):
            A_eq[r + j, j::c] = 1
        b_eq = list(self.row_masses) + list(self.col_masses[:-1])
        A_ub = b_ub = None
        if self.extra_budget is not None:
            ind, eps = self.extra_budget
            A_ub = [np.asarray(ind, dtype=object if exact else float).ravel()]
            b_ub = [eps]
        cost = self.cost.ravel()
        res = solve_lp(cost, A_ub, b_ub, A_eq, b_eq, exact=exact)
        if res.status == "infeasible":
            return None
        if not res.success:
            raise LPError(f"transport LP ended {res.status}")
        p1, p2 = self.mu1.points, self.mu2.points
        atoms = [((p1[k // c], p2[k % c]), w) for k, w in enumerate(res.x) if w != 0]
        return res.value, Coupling(self.mu1.space, atoms, exact)


@dataclass
class DualCertificate:
    """A potential ``f`` on X and the value ``int f d(mu1 - mu2)``."""

    potential: np.ndarray
    value: float

    def lipschitz_violation(self, space) -> float:
        """Largest ``|f(x) - f(x')| - d(x, x')`` over pairs (<= 0 when 1-Lipschitz)."""
        f = np.asarray(self.potential, dtype=float)
        gap = np.abs(f[:, None] - f[None, :]) - space.dist
        return float(gap.max())

    def is_lipschitz(self, space, tol: float = CERT_TOL) -> bool:
        return self.lipschitz_violation(space) <= tol


def _exact_mode(*mus, exact=None):
    if exact is not None:
        return exact
    return all(m.exact for m in mus)


def _cost_block(space, mu1, mu2, matrix, exact):
    block = np.asarray(matrix)[np.ix_(mu1.points, mu2.points)]
    if exact:
        return np.array([[Fraction(v) for v in row] for row in block.tolist()], dtype=object)
    return block.astype(float)


def kantorovich(mu1: DiscreteMeasure, mu2: DiscreteMeasure, *, witness: bool = False, exact=None):
    """Optimal transport cost with cost ``d``.

    With ``witness=True`` returns ``(value, coupling)``.
    """
    space = _check_same_space(mu1, mu2)
    exact = _exact_mode(mu1, mu2, exact=exact)
    cost = _cost_block(space, mu1, mu2, space.dist, exact)
    out = TransportLP(mu1, mu2, cost).solve(exact)
    if out is None:
        raise LPError("transport LP infeasible; marginals are inconsistent")
    value, nu = out
    if not exact:
        value = max(float(value), 0.0)
    return (value, nu) if witness else value


def kantorovich_dual(mu1: DiscreteMeasure, mu2: DiscreteMeasure, exact=None) -> DualCertificate:
    """Maximize ``int f d(mu1 - mu2)`` over 1-Lipschitz ``f`` on all of X.

    Potentials are shifted so that ``min f = 0``.
    """
    space = _check_same_space(mu1, mu2)
    exact = _exact_mode(mu1, mu2, exact=exact)
    n = len(space)
    diff = mu1.to_vector() - mu2.to_vector()
    rows, rhs = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                row = np.zeros(n)
                row[i], row[j] = 1.0, -1.0
                rows.append(row)
                rhs.append(Fraction(space.dist[i, j]) if exact else space.dist[i, j])
    # potentials are shift invariant, so f >= 0 loses nothing and keeps the
    # initial slack basis feasible
    res = solve_lp(diff, rows, rhs, maximize=True, exact=exact)
    if not res.success:
        raise LPError(f"dual LP ended {res.status}")
    f = res.x - min(res.x)
    return DualCertificate(f, res.value if exact else float(res.value))


def excess_mass(nu: Coupling, eps) -> float:
    """``nu{d > eps}``, the coupling mass on pairs farther apart than ``eps``."""
    return nu.integrate(nu.space.exceeds(eps))


def strassen_feasible(mu1: DiscreteMeasure, mu2: DiscreteMeasure, eps, *, tol: float = BUDGET_TOL, exact=None):
    """A coupling of ``mu1`` and ``mu2`` with ``nu{d > eps} <= eps``, or ``None``.

    Minimizes ``nu{d > eps}`` over all couplings and accepts the optimum
    when it is within ``tol`` of ``eps``.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    space = _check_same_space(mu1, mu2)
    exact = _exact_mode(mu1, mu2, exact=exact)
    ind = _cost_block(space, mu1, mu2, space.exceeds(eps).astype(int), exact)
    value, nu = TransportLP(mu1, mu2, ind).solve(exact)
    if exact:
        return nu if value <= eps else None
    return nu if value <= eps + tol else None


def _min_excess(mu1, mu2, t, exact):
    ind = _cost_block(mu1.space, mu1, mu2, mu1.space.exceeds(t).astype(int), exact)
    value, _ = TransportLP(mu1, mu2, ind).solve(exact)
    return value


def prokhorov(mu1: DiscreteMeasure, mu2: DiscreteMeasure, exact=None):
    """Exact Prokhorov distance by a sweep over the distance breakpoints.

    On ``[t_k, t_{k+1})`` the minimal excess mass ``g`` is constant, so the
    first interval where ``max(t_k, g(t_k))`` falls inside it yields the
    answer. The sweep always ends by the interval containing 1.
    """
    space = _check_same_space(mu1, mu2)
    exact = _exact_mode(mu1, mu2, exact=exact)
    if mu1 == mu2:
        return Fraction(0) if exact else 0.0
    ts = space.distinct_distances(mu1.points, mu2.points).tolist()
    ts = sorted(set([0.0] + ts))
    if exact:
        ts = [Fraction(t) for t in ts]
    one = Fraction(1) if exact else 1.0
    for k, t in enumerate(ts):
        upper = ts[k + 1] if k + 1 < len(ts) else None
        g = _min_excess(mu1, mu2, t, exact)
        if not exact:
            g = min(max(float(g), 0.0), 1.0)
        cand = max(t, g)
        if upper is None or cand < upper:
            return min(cand, one) if not exact else min(cand, one)
    raise AssertionError("sweep exhausted without an answer")


def ky_fan_check(nu: Coupling, eps, tol: float = BUDGET_TOL) -> bool:
    """True iff ``nu{d > eps} <= eps``, which bounds ``d_Pr(P1 nu, P2 nu)`` by ``eps``."""
    value = excess_mass(nu, eps)
    if isinstance(value, Fraction) and isinstance(eps, (Fraction, int)):
        return value <= eps
    return float(value) <= float(eps) + tol


def transport_cost(nu: Coupling) -> float:
    """``int d dnu`` for a coupling."""
    return nu.integrate(nu.space.dist)
