"""Brute-force ground truth for small instances.

Builds explicit H-representations of the Prokhorov ball (one row per subset
of X) and of the coupling polytope, enumerates their vertices by active sets,
and cross-checks the explicit family supersets against them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import kernels
from .distances import strassen_feasible
from .errors import GammaOutOfBounds, InfeasibleBall, SpaceTooLarge, TooManyBases, Unbounded
from .extreme_sets import CenterSpec, PiFamily, all_indices, pi_element, project_candidates, slot_classes
from .lp import solve_lp
from .measures import Coupling, DiscreteMeasure, _check_same_space
from .metric_space import FiniteMetricSpace, PointSet, from_points, inflate

VERTEX_TOL = 1e-9
ESCALATE_TOL = 1e-7
MAX_BALL_POINTS = 12
MAX_GAMMA_POINTS = 8
MAX_BASES = 2_000_000


@dataclass
class HPolytope:
    """``{x : A[r] x <= b[r]}`` with the rows in ``eq_rows`` held at equality."""

    A: np.ndarray
    b: np.ndarray
    eq_rows: tuple = ()
    dimension: int = 0
    row_labels: tuple = ()

    def __post_init__(self):
        dtype = self.A.dtype if isinstance(self.A, np.ndarray) else float
        self.A = np.asarray(self.A, dtype=dtype)
        self.b = np.asarray(self.b, dtype=self.A.dtype)
        if self.A.ndim != 2 or self.A.shape[0] != len(self.b):
            raise ValueError("constraint matrix and bounds disagree")
        if not self.dimension:
            self.dimension = self.A.shape[1]
        if self.A.shape[1] != self.dimension:
            raise ValueError("constraint matrix width differs from the dimension")
        self.eq_rows = tuple(sorted(set(self.eq_rows)))
        if not self.row_labels:
            self.row_labels = tuple(f"row{i}" for i in range(len(self.b)))

    @property
    def exact(self) -> bool:
        return self.A.dtype == object

    @property
    def ineq_rows(self) -> tuple:
        eq = set(self.eq_rows)
        return tuple(i for i in range(len(self.b)) if i not in eq)

    def face(self, j: int) -> "HPolytope":
        """The face where inequality ``j`` is tight."""
        return HPolytope(self.A, self.b, self.eq_rows + (j,), self.dimension, self.row_labels)

    def slack(self, x) -> np.ndarray:
        return self.b - self.A @ np.asarray(x, dtype=self.A.dtype)

    def contains(self, x, tol: float = VERTEX_TOL) -> bool:
        s = self.slack(x)
        if self.exact and all(isinstance(v, Fraction) for v in np.asarray(x, dtype=object)):
            tol = 0
        eq = list(self.eq_rows)
        ok_eq = all(abs(s[i]) <= tol for i in eq)
        return ok_eq and all(s[i] >= -tol for i in self.ineq_rows)

    def active(self, x, tol: float = VERTEX_TOL) -> tuple:
        s = self.slack(x)
        return tuple(i for i in range(len(s)) if abs(s[i]) <= tol)


@dataclass
class VertexSet:
    vertices: list
    provenance: list = field(default_factory=list)
    exact: bool = False

    def __len__(self):
        return len(self.vertices)

    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in x] for x in self.vertices], dtype=float).reshape(len(self.vertices), -1)


def _frac(v):
    return Fraction(v)


def _center_frac(center: CenterSpec, exact: bool):
    if exact:
        return [Fraction(b) for b in center.beta], Fraction(center.eps)
    return [float(b) for b in center.beta], float(center.eps)


def ball_hrep_prokhorov(center: CenterSpec, closed: bool = True, exact: bool | None = None) -> HPolytope:
    """The ball as a polytope in ``R^X``.

    One row ``-mu(A^eps) <= eps - mu_n(A)`` per nonempty proper subset ``A``,
    plus ``mu >= 0`` and ``sum mu = 1``. Exact duplicate rows are dropped.
    """
    space = center.space
    N = len(space)
    if N > MAX_BALL_POINTS:
        raise SpaceTooLarge(f"ball polytope needs 2^{N} rows; limit is {MAX_BALL_POINTS} points")
    if exact is None:
        exact = center.exact
    beta, eps = _center_frac(center, exact)
    mu_n = np.zeros(N, dtype=object if exact else float)
    if exact:
        mu_n[:] = Fraction(0)
    for y, b in zip(center.y, beta):
        mu_n[y] = b
    rows, rhs, labels = [], [], []
    seen = set()
    for mask in range(1, 2 ** N - 1):
        A = PointSet(tuple(i for i in range(N) if mask >> i & 1))
        infl = inflate(space, A, center.eps, closed=closed)
        row = [0] * N
        for i in infl:
            row[i] = -1
        r = eps - sum((mu_n[i] for i in A), Fraction(0) if exact else 0.0)
        key = (tuple(row), r)
        if key in seen:
            continue
        seen.add(key)
        rows.append(row)
        rhs.append(r)
        labels.append("A={" + ",".join(space.labels[i] for i in A) + "}")
    for i in range(N):
        row = [0] * N
        row[i] = -1
        rows.append(row)
        rhs.append(0)
        labels.append(f"nonneg({space.labels[i]})")
    rows.append([1] * N)
    rhs.append(1)
    labels.append("mass")
    return _poly(rows, rhs, (len(rows) - 1,), N, labels, exact)


def _poly(rows, rhs, eq_rows, dim, labels, exact) -> HPolytope:
    if exact:
        A = np.array([[_frac(v) for v in r] for r in rows], dtype=object).reshape(len(rows), dim)
        b = np.array([_frac(v) for v in rhs], dtype=object)
    else:
        A = np.array(rows, dtype=float).reshape(len(rows), dim)
        b = np.array([float(v) for v in rhs], dtype=float)
    return HPolytope(A, b, tuple(eq_rows), dim, tuple(labels))


def gamma_hrep(center: CenterSpec, mode: str = "prokhorov", exact: bool | None = None) -> HPolytope:
    """Couplings ``nu(y_k, x')`` with first marginal ``mu_n`` and cost at most ``eps``.

    Variables are laid out row-major over (center, point of X).
    """
    space = center.space
    N, n = len(space), center.n
    if N > MAX_GAMMA_POINTS:
        raise SpaceTooLarge(f"coupling polytope limited to {MAX_GAMMA_POINTS} points")
    if exact is None:
        exact = center.exact
    beta, eps = _center_frac(center, exact)
    if mode == "prokhorov":
        cost = space.exceeds(center.eps).astype(int)
    else:
        cost = space.dist
    d = n * N
    rows, rhs, labels = [], [], []
    lab = space.labels
    for k in range(n):
        for x in range(N):
            row = [0] * d
            row[k * N + x] = -1
            rows.append(row)
            rhs.append(0)
            labels.append(f"nonneg({lab[center.y[k]]},{lab[x]})")
    budget = [v for y in center.y for v in cost[y]]
    rows.append([_frac(v) for v in budget] if exact else budget)
    rhs.append(eps)
    labels.append("budget")
    eq = []
    for k in range(n):
        row = [0] * d
        row[k * N:(k + 1) * N] = [1] * N
        eq.append(len(rows))
        rows.append(row)
        rhs.append(beta[k])
        labels.append(f"marginal({lab[center.y[k]]})")
    eq.append(len(rows))
    rows.append([1] * d)
    rhs.append(1)
    labels.append("mass")
    return _poly(rows, rhs, eq, d, labels, exact)


# ---------------------------------------------------------------- vertices

def _independent_rows(E, exact: bool) -> list:
    keep = []
    for i in range(len(E)):
        trial = keep + [i]
        if _rank(E[trial], exact) == len(trial):
            keep.append(i)
    return keep


def _rank(M, exact: bool) -> int:
    if len(M) == 0:
        return 0
    if not exact:
        return int(np.linalg.matrix_rank(np.asarray(M, dtype=float), tol=1e-9))
    R = [[Fraction(v) for v in row] for row in M]
    rank, cols = 0, len(R[0])
    for c in range(cols):
        piv = next((r for r in range(rank, len(R)) if R[r][c] != 0), None)
        if piv is None:
            continue
        R[rank], R[piv] = R[piv], R[rank]
        for r in range(len(R)):
            if r != rank and R[r][c] != 0:
                fac = R[r][c] / R[rank][c]
                R[r] = [a - fac * b for a, b in zip(R[r], R[rank])]
        rank += 1
    return rank


def _exact_solve(M, rhs):
    d = len(M)
    aug = [list(M[i]) + [rhs[i]] for i in range(d)]
    for c in range(d):
        piv = next((r for r in range(c, d) if aug[r][c] != 0), None)
        if piv is None:
            return None
        aug[c], aug[piv] = aug[piv], aug[c]
        for r in range(d):
            if r != c and aug[r][c] != 0:
                fac = aug[r][c] / aug[c][c]
                aug[r] = [a - fac * b for a, b in zip(aug[r], aug[c])]
    return [aug[i][d] / aug[i][i] for i in range(d)]


def _feasible_point(poly: HPolytope, exact: bool):
    A, b = poly.A, poly.b
    ineq, eq = list(poly.ineq_rows), list(poly.eq_rows)
    res = solve_lp(np.zeros(poly.dimension), A[ineq] if ineq else None, b[ineq] if ineq else None,
                   A[eq] if eq else None, b[eq] if eq else None, free=True, exact=exact)
    return res


def _check_bounded(poly: HPolytope, exact: bool):
    A, b = poly.A, poly.b
    ineq, eq = list(poly.ineq_rows), list(poly.eq_rows)
    for i in range(poly.dimension):
        for sign in (1, -1):
            c = np.zeros(poly.dimension)
            c[i] = sign
            res = solve_lp(c, A[ineq] if ineq else None, b[ineq] if ineq else None,
                           A[eq] if eq else None, b[eq] if eq else None, free=True, exact=exact,
                           maximize=True)
            if res.status == "unbounded":
                raise Unbounded(f"coordinate {i} is unbounded")


def _irredundant(poly: HPolytope, exact: bool) -> list:
    """Inequality rows that cut the polytope, dropped one at a time."""
    A, b = poly.A, poly.b
    eq = list(poly.eq_rows)
    rows = list(poly.ineq_rows)
    for i in list(rows):
        others = [r for r in rows if r != i]
        res = solve_lp(A[i], A[others] if others else None, b[others] if others else None,
                       A[eq] if eq else None, b[eq] if eq else None, free=True, exact=exact, maximize=True)
        if res.status == "optimal":
            redundant = res.value <= b[i] if exact else res.value <= b[i] + 1e-10
            if redundant:
                rows = others
    return rows


def _dedupe(points, tol: float) -> list:
    kept = []
    for p in sorted(points, key=lambda v: tuple(v)):
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    return kept


def _min_gap(points) -> float:
    if len(points) < 2:
        return math.inf
    P = np.asarray(points, dtype=float)
    gaps = np.abs(P[:, None, :] - P[None, :, :]).max(axis=-1)
    np.fill_diagonal(gaps, np.inf)
    return float(gaps.min())


def enumerate_vertices(poly: HPolytope, exact: bool | None = None, max_bases: int = MAX_BASES) -> VertexSet:
    """All vertices of a bounded polytope by active-set enumeration.

    Float mode dedupes within ``1e-9`` and reruns in exact rational
    arithmetic if two distinct vertices come closer than ``1e-7``.
    """
    if exact is None:
        exact = poly.exact
    if exact and not poly.exact:
        poly = _to_exact(poly)
    feas = _feasible_point(poly, exact)
    if not feas.success:
        raise InfeasibleBall("polytope is empty")
    _check_bounded(poly, exact)
    rows = _irredundant(poly, exact)
    E_idx = _independent_rows(poly.A[list(poly.eq_rows)], exact) if poly.eq_rows else []
    eq = [poly.eq_rows[i] for i in E_idx]
    d = poly.dimension
    s = d - len(eq)
    n_bases = math.comb(len(rows), s) if s <= len(rows) else 0
    if n_bases > max_bases:
        raise TooManyBases(f"{n_bases} active sets exceed the budget of {max_bases}")
    if exact:
        verts = _exact_vertices(poly, eq, rows, s)
    else:
        verts = _float_vertices(poly, eq, rows, s)
        if _min_gap(verts) < ESCALATE_TOL:
            return enumerate_vertices(poly, exact=True, max_bases=max_bases)
    # keep only points whose active constraints pin them down
    out, prov = [], []
    for v in verts:
        act = poly.active(v, tol=0 if exact else VERTEX_TOL)
        if _rank(poly.A[list(act)], exact) == d:
            out.append(tuple(v) if exact else tuple(float(t) for t in v))
            prov.append(act)
    return VertexSet(out, prov, exact)


def _to_exact(poly: HPolytope) -> HPolytope:
    A = np.array([[Fraction(v) for v in row] for row in poly.A.tolist()], dtype=object).reshape(poly.A.shape)
    b = np.array([Fraction(v) for v in poly.b.tolist()], dtype=object)
    return HPolytope(A, b, poly.eq_rows, poly.dimension, poly.row_labels)


def _float_vertices(poly, eq, rows, s) -> list:
    E = np.asarray(poly.A[eq], dtype=float).reshape(len(eq), poly.dimension)
    f = np.asarray(poly.b[eq], dtype=float)
    A = np.asarray(poly.A[rows], dtype=float).reshape(len(rows), poly.dimension)
    b = np.asarray(poly.b[rows], dtype=float)
    # unit max-abs rows so the kernel's pivot threshold is scale free
    se = np.maximum(np.abs(E).max(axis=1, initial=0), 1e-300)
    sa = np.maximum(np.abs(A).max(axis=1, initial=0), 1e-300)
    E, f = np.ascontiguousarray(E / se[:, None]), np.ascontiguousarray(f / se)
    A, b = np.ascontiguousarray(A / sa[:, None]), np.ascontiguousarray(b / sa)
    V, _ = kernels.active_set_vertices(E, f, A, b, s, 1e-10, VERTEX_TOL)
    V[np.abs(V) < 1e-13] = 0.0
    return _dedupe(list(V), VERTEX_TOL)


def _exact_vertices(poly, eq, rows, s) -> list:
    A, b = poly.A, poly.b
    E = [list(A[i]) for i in eq]
    f = [b[i] for i in eq]
    found = {}
    for combo in combinations(rows, s):
        M = E + [list(A[i]) for i in combo]
        x = _exact_solve(M, f + [b[i] for i in combo])
        if x is None:
            continue
        xa = np.array(x, dtype=object)
        if all(v >= 0 for v in poly.slack(xa)[list(poly.ineq_rows)]):
            found.setdefault(tuple(x), None)
    return [np.array(v, dtype=object) for v in sorted(found)]


def is_extreme(mu, poly: HPolytope, tol: float = VERTEX_TOL) -> bool:
    """True iff ``mu`` lies in ``poly`` and its active rows have full rank."""
    x = mu.to_vector() if isinstance(mu, DiscreteMeasure) else np.asarray(mu)
    exact = poly.exact and all(isinstance(v, Fraction) for v in np.asarray(x, dtype=object))
    if not poly.contains(x, 0 if exact else tol):
        return False
    act = poly.active(x, 0 if exact else tol)
    return _rank(poly.A[list(act)], exact) == poly.dimension


# ------------------------------------------------------------ projections

def vertex_measure(space: FiniteMetricSpace, v) -> DiscreteMeasure:
    return DiscreteMeasure.from_vector(space, v)


def vertex_coupling(center: CenterSpec, v) -> Coupling:
    N = len(center.space)
    atoms = [((center.y[k // N], k % N), w) for k, w in enumerate(v) if w != 0]
    return Coupling(center.space, atoms)


def _second_marginal_vector(center: CenterSpec, v) -> np.ndarray:
    N = len(center.space)
    return np.asarray(v, dtype=float).reshape(center.n, N).sum(axis=0)


def hull_vertices(points) -> list:
    """The points (deduplicated) that are not convex combinations of the others."""
    P = np.asarray(points, dtype=float)
    P = np.array(_dedupe(list(P), VERTEX_TOL)) if len(P) else P
    keep = []
    for i in range(len(P)):
        others = np.delete(P, i, axis=0)
        if not len(others):
            keep.append(P[i])
            continue
        # is P[i] = lambda @ others with lambda in the simplex?
        A_eq = np.vstack([others.T, np.ones(len(others))])
        b_eq = np.concatenate([P[i], [1.0]])
        res = solve_lp(np.zeros(len(others)), None, None, A_eq, b_eq)
        if not res.success:
            keep.append(P[i])
    return keep


def ball_vertices(center: CenterSpec, mode: str = "prokhorov") -> np.ndarray:
    """Ball vertices in ``R^X``.

    Prokhorov balls come from their subset H-representation; Kantorovich
    balls are the hull of the projected coupling-polytope vertices.
    """
    if mode == "prokhorov":
        return enumerate_vertices(ball_hrep_prokhorov(center)).array()
    gv = enumerate_vertices(gamma_hrep(center, mode)).array()
    proj = [_second_marginal_vector(center, v) for v in gv]
    return np.array(hull_vertices(proj)).reshape(-1, len(center.space))


@dataclass
class SupportReport:
    bound: int
    gamma_vertices: int
    ball_vertices: int
    max_gamma_support: int
    max_ball_support: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_support_bound(center: CenterSpec, mode: str = "prokhorov") -> SupportReport:
    """Count atoms of every vertex of the coupling polytope and of the ball."""
    bound = center.n + 2
    gv = enumerate_vertices(gamma_hrep(center, mode)).array()
    bv = ball_vertices(center, mode)
    g_sup = [int(np.count_nonzero(np.abs(v) > VERTEX_TOL)) for v in gv]
    b_sup = [int(np.count_nonzero(np.abs(v) > VERTEX_TOL)) for v in bv]
    bad = [("gamma", tuple(v)) for v, k in zip(gv, g_sup) if k > bound]
    bad += [("ball", tuple(v)) for v, k in zip(bv, b_sup) if k > bound]
    return SupportReport(bound, len(gv), len(bv), max(g_sup, default=0), max(b_sup, default=0), bad)


@dataclass
class CoverReport:
    ball_vertices: int
    gamma_vertices: int
    candidates: int
    missing_from_gamma: list
    missing_from_candidates: list
    outside_ball: list

    @property
    def violations(self) -> int:
        return len(self.missing_from_gamma) + len(self.missing_from_candidates) + len(self.outside_ball)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _near(v, pool, tol) -> bool:
    if not len(pool):
        return False
    return bool((np.abs(pool - v).max(axis=1) <= tol).any())


def verify_projection_cover(center: CenterSpec, tol: float = VERTEX_TOL) -> CoverReport:
    """Prokhorov ball vertices against projected coupling vertices and corner candidates."""
    space = center.space
    ball = ball_hrep_prokhorov(center)
    bv = enumerate_vertices(ball).array()
    gv = enumerate_vertices(gamma_hrep(center)).array()
    proj = np.array([_second_marginal_vector(center, v) for v in gv]).reshape(-1, len(space))
    cands = project_candidates(slot_classes(center))
    cvec = np.array([m.to_vector().astype(float) for m in cands]).reshape(-1, len(space))
    miss_g = [tuple(v) for v in bv if not _near(v, proj, tol)]
    miss_c = [tuple(v) for v in bv if not _near(v, cvec, tol)]
    mu_n = center.measure()
    outside = [tuple(p) for p in proj if not ball.contains(p, tol)]
    outside += [tuple(v) for v in bv if strassen_feasible(mu_n, vertex_measure(space, v), center.eps, tol=tol) is None]
    return CoverReport(len(bv), len(gv), len(cands), miss_g, miss_c, outside)


def face_identity_violations(poly: HPolytope) -> list:
    """Rows ``j`` whose face has vertices differing from face-tight ball vertices."""
    verts = enumerate_vertices(poly)
    V = verts.array()
    bad = []
    for j in poly.ineq_rows:
        face = poly.face(j)
        if not _feasible_point(face, face.exact).success:
            continue
        fv = enumerate_vertices(face).array()
        tight = np.array([v for v in V if abs(float(poly.slack(v)[j])) <= VERTEX_TOL]).reshape(-1, poly.dimension)
        same = len(fv) == len(tight) and all(_near(v, tight, VERTEX_TOL) for v in fv)
        if not same:
            bad.append(j)
    return bad


def affine_image_violations(center: CenterSpec) -> list:
    """Ball vertices not hit by projecting coupling-polytope vertices."""
    gv = enumerate_vertices(gamma_hrep(center)).array()
    proj = np.array([_second_marginal_vector(center, v) for v in gv]).reshape(-1, len(center.space))
    bv = enumerate_vertices(ball_hrep_prokhorov(center)).array()
    return [tuple(v) for v in bv if not _near(v, proj, VERTEX_TOL)]


# ---------------------------------------------------------------- metrics

def _subset_masks(N: int) -> np.ndarray:
    return np.array([[m >> i & 1 for i in range(N)] for m in range(1, 2 ** N)], dtype=bool)


def prokhorov_by_subsets(mu1: DiscreteMeasure, mu2: DiscreteMeasure, iterations: int = 64) -> float:
    """Bisection on ``eps`` using the subset definition with closed inflation."""
    space = _check_same_space(mu1, mu2)
    N = len(space)
    if N > MAX_BALL_POINTS + 4:
        raise SpaceTooLarge("subset oracle needs 2^|X| subsets")
    masks = _subset_masks(N)
    m1 = masks @ mu1.to_vector().astype(float)
    v2 = mu2.to_vector().astype(float)

    def ok(eps):
        near = space.dist <= eps
        infl = (masks.astype(int) @ near.astype(int)) > 0
        return bool(np.all(m1 <= infl @ v2 + eps))

    lo, hi = 0.0, 1.0
    if ok(0.0):
        return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class InflationReport:
    same: bool
    closed_vertices: np.ndarray
    open_vertices: np.ndarray


def compare_inflation_conventions(center: CenterSpec) -> InflationReport:
    """Vertex sets of the ball under ``d(x, A) <= eps`` versus ``< eps``."""
    closed = enumerate_vertices(ball_hrep_prokhorov(center, closed=True)).array()
    opened = enumerate_vertices(ball_hrep_prokhorov(center, closed=False)).array()
    same = len(closed) == len(opened) and all(_near(v, opened, VERTEX_TOL) for v in closed)
    return InflationReport(same, closed, opened)


# ------------------------------------------------------------ grid checks

def _grid_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _grid_compositions(total - first, parts - 1):
            yield (first,) + rest


def couplings_on_grid(center: CenterSpec, denominator: int) -> set:
    """Couplings with first marginal ``mu_n``, at most ``n + 2`` atoms and weights in ``Z / denominator``."""
    space = center.space
    N, n = len(space), center.n
    units = [Fraction(b) * denominator for b in center.beta]
    if any(u.denominator != 1 for u in units):
        raise ValueError("center weights must lie on the grid")
    rows = [list(_grid_compositions(int(u), N)) for u in units]
    out = set()
    for choice in product(*rows):
        atoms = [((center.y[k], x), Fraction(c, denominator))
                 for k, comp in enumerate(choice) for x, c in enumerate(comp) if c]
        if len(atoms) <= n + 2:
            out.add(Coupling(space, atoms, exact=True))
    return out


def family_elements_on_grid(center: CenterSpec, denominator: int) -> set:
    """Every family element over X with gamma strictly inside its box on the grid."""
    space = center.space
    n = center.n
    grid = [Fraction(k, denominator) for k in range(1, denominator)]
    out = set()
    for index in all_indices(n, diagonal_pairs=True):
        for x in product(range(len(space)), repeat=n + index.extra):
            fam = PiFamily(index, x, center)
            for gamma in product(grid, repeat=len(fam.moves)):
                try:
                    out.add(pi_element(fam, gamma))
                except GammaOutOfBounds:
                    pass
    return out


# -------------------------------------------------------------- instances

def random_instance(rng: np.random.Generator, points=(3, 6), centers=(1, 3), exact: bool = False) -> CenterSpec:
    """Random planar point cloud, random center support, Dirichlet weights, ``eps ~ U(0, 1)``."""
    N = int(rng.integers(points[0], points[1] + 1))
    n = int(rng.integers(centers[0], min(centers[1], N) + 1))
    space = from_points(rng.random((N, 2)))
    y = tuple(sorted(int(v) for v in rng.choice(N, n, replace=False)))
    beta = rng.dirichlet(np.ones(n))
    eps = float(rng.uniform(0.0, 1.0))
    if exact:
        beta = [Fraction(float(b)).limit_denominator(1000) for b in beta]
        beta[-1] = Fraction(1) - sum(beta[:-1])
        if beta[-1] <= 0:
            return random_instance(rng, points, centers, exact)
        eps = Fraction(eps).limit_denominator(1000)
    return CenterSpec(space, y, tuple(beta), eps)


def random_measure(rng: np.random.Generator, space: FiniteMetricSpace, max_atoms: int | None = None) -> DiscreteMeasure:
    N = len(space)
    k = int(rng.integers(1, min(max_atoms or N, N) + 1))
    pts = rng.choice(N, k, replace=False)
    w = rng.dirichlet(np.ones(k))
    return DiscreteMeasure(space, list(zip(pts.tolist(), w.tolist())))
