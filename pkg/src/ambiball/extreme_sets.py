"""Explicit supersets of the extreme points of a metric ball about a measure
with ``n`` atoms.

Every coupling with first marginal ``mu_n`` and at most ``n + 2`` atoms is
``delta_{y,x}`` (each center ``y_k`` sent to a second coordinate ``x_k``) plus
at most two *moves*, each shifting mass ``gamma`` from ``(y_k, x_k)`` to
``(y_k, x_s)`` for an extra slot ``s``. A :class:`MultiIndex` names the move
pattern:

* ``zero``       -- no move, ``x`` has ``n`` entries;
* ``single(i)``  -- one move out of center ``i`` into slot ``n``;
* ``pair(i, j)`` -- moves out of ``i`` into slot ``n`` and out of ``j`` into
  slot ``n + 1``; for ``i == j`` both leave the same center.

Center positions are 0-based. Imposing the ball constraint (``nu{d > eps}
<= eps`` for Prokhorov, ``int d dnu <= eps`` for Kantorovich) cuts each
family's gamma box by one half-space, described by :class:`GammaRegion`.

In Prokhorov mode the constraint only sees the adjacency matrix
``A[i, j] = 1{d(y_i, x_j) > eps}``, so families are enumerated one
adjacency class at a time (:class:`FamilyClass`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .distances import excess_mass, ky_fan_check, transport_cost
from .errors import GammaOutOfBounds, MeasureError, PairIndexError
from .measures import Coupling, DiscreteMeasure, marginal_second
from .metric_space import FiniteMetricSpace, PointSet

MODES = ("prokhorov", "kantorovich")
REGION_TOL = 1e-12

EMPTY, FULL, CUT = "Empty", "Full", "HalfSpaceCut"


@dataclass(frozen=True, eq=False)
class CenterSpec:
    """``mu_n = sum_k beta_k delta_{y_k}`` with distinct ``y_k`` and radius ``eps``."""

    space: FiniteMetricSpace
    y: tuple
    beta: tuple
    eps: float | Fraction

    def __post_init__(self):
        y = tuple(int(v) for v in self.y)
        if len(set(y)) != len(y) or not y:
            raise MeasureError("center points must be distinct and nonempty")
        if len(self.beta) != len(y):
            raise MeasureError("one weight per center point")
        if any(b <= 0 for b in self.beta):
            raise MeasureError("center weights must be positive")
        if abs(sum(self.beta) - 1) > 1e-9:
            raise MeasureError("center weights must sum to 1")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "beta", tuple(self.beta))

    @classmethod
    def from_measure(cls, mu: DiscreteMeasure, eps) -> "CenterSpec":
        return cls(mu.space, mu.points, mu.weights, eps)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def exact(self) -> bool:
        return all(isinstance(b, (Fraction, int)) for b in self.beta) and isinstance(self.eps, (Fraction, int))

    def measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.space, zip(self.y, self.beta), self.exact)

    def cost_matrix(self, mode: str = "prokhorov") -> np.ndarray:
        """The budgeted cost on X x X: ``1{d > eps}`` or ``d``."""
        if mode == "prokhorov":
            ind = self.space.exceeds(self.eps)
            if self.exact:
                return np.vectorize(Fraction, otypes=[object])(ind.astype(int))
            return ind.astype(float)
        if mode == "kantorovich":
            if self.exact:
                return np.vectorize(Fraction, otypes=[object])(self.space.dist)
            return self.space.dist
        raise ValueError(f"unknown mode {mode!r}")

    def zero(self):
        return Fraction(0) if self.exact else 0.0


@dataclass(frozen=True, order=True)
class MultiIndex:
    kind: str
    i: int = -1
    j: int = -1

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def single(cls, i):
        return cls("single", i)

    @classmethod
    def pair(cls, i, j):
        if i > j:
            raise PairIndexError("pair index must satisfy i <= j")
        return cls("pair", i, j)

    @property
    def extra(self) -> int:
        return {"zero": 0, "single": 1, "pair": 2}[self.kind]

    def moves(self, n: int) -> tuple:
        """``(center, slot)`` for each move."""
        if self.kind == "zero":
            return ()
        if self.kind == "single":
            return ((self.i, n),)
        return ((self.i, n), (self.j, n + 1))

    @property
    def tag(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "single":
            return f"single({self.i})"
        return f"pair({self.i},{self.j})"

    @classmethod
    def parse(cls, tag: str) -> "MultiIndex":
        if tag == "zero":
            return cls.zero()
        name, _, rest = tag.partition("(")
        nums = [int(v) for v in rest.rstrip(")").split(",")]
        return cls.single(*nums) if name == "single" else cls.pair(*nums)


def all_indices(n: int, diagonal_pairs: bool = True) -> list:
    out = [MultiIndex.zero()] + [MultiIndex.single(i) for i in range(n)]
    for i in range(n):
        for j in range(i, n):
            if i < j or diagonal_pairs:
                out.append(MultiIndex.pair(i, j))
    return out


@dataclass(frozen=True)
class PiFamily:
    """One family ``Pi_index(x)``: a base coupling plus gamma-weighted moves."""

    index: MultiIndex
    x: tuple
    center: CenterSpec = field(compare=False, repr=False)

    def __post_init__(self):
        x = tuple(int(v) for v in self.x)
        if len(x) != self.center.n + self.index.extra:
            raise ValueError(f"{self.index.tag} needs {self.center.n + self.index.extra} points, got {len(x)}")
        n = self.center.n
        if self.index.kind != "zero" and not (0 <= self.index.i < n and 0 <= max(self.index.i, self.index.j) < n):
            raise IndexError("multi-index outside 0..n-1")
        object.__setattr__(self, "x", x)

    @property
    def moves(self) -> tuple:
        return self.index.moves(self.center.n)

    def labels(self) -> list:
        return [self.center.space.labels[p] for p in self.x]


@dataclass(frozen=True)
class AdjacencyMatrix:
    bits: tuple

    def __post_init__(self):
        bits = tuple(tuple(int(b) for b in row) for row in self.bits)
        if any(b not in (0, 1) for row in bits for b in row):
            raise ValueError("adjacency entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @property
    def shape(self):
        return (len(self.bits), len(self.bits[0]) if self.bits else 0)

    def array(self) -> np.ndarray:
        return np.array(self.bits, dtype=int)


@dataclass(frozen=True)
class GammaRegion:
    """Feasible gammas of one family after imposing the ball constraint.

    The constraint reads ``base + coeffs . gamma <= eps``; ``rhs`` is
    ``eps - base``. ``corners`` are the vertices of the closure of the
    feasible set (closed box or simplex cut by the half-space), sorted.
    """

    kind: str
    coeffs: tuple
    rhs: float | Fraction
    corners: tuple
    mode: str = "prokhorov"

    @property
    def empty(self) -> bool:
        return self.kind == EMPTY

    def contains(self, gamma, tol: float = REGION_TOL) -> bool:
        val = sum((a * g for a, g in zip(self.coeffs, gamma)), 0)
        return val <= self.rhs + tol


def _box_rows(center: CenterSpec, index: MultiIndex):
    """Closed gamma bounds ``G gamma <= h``: nonnegativity and per-center mass."""
    moves = index.moves(center.n)
    d = len(moves)
    zero, one = (Fraction(0), Fraction(1)) if center.exact else (0.0, 1.0)
    G, h = [], []
    for m in range(d):
        row = [zero] * d
        row[m] = -one
        G.append(row)
        h.append(zero)
    for k in sorted({c for c, _ in moves}):
        G.append([one if c == k else zero for c, _ in moves])
        h.append(center.beta[k])
    return G, h


def _polygon_vertices(G, h, exact: bool, tol: float) -> list:
    d = len(G[0]) if G else 0
    if d == 0:
        return [()]
    pts = []
    for rows in combinations(range(len(G)), d):
        if d == 1:
            (r,) = rows
            if G[r][0] == 0:
                continue
            sol = (h[r] / G[r][0],)
        else:
            r1, r2 = rows
            a, b = G[r1]
            c, e = G[r2]
            det = a * e - b * c
            if det == 0 or (not exact and abs(det) < 1e-15):
                continue
            sol = ((h[r1] * e - b * h[r2]) / det, (a * h[r2] - c * h[r1]) / det)
        if all(sum(g * s for g, s in zip(row, sol)) <= hv + tol for row, hv in zip(G, h)):
            pts.append(sol)
    if not exact:
        # snap round-off onto the box faces so corners compare bitwise
        cleaned = {}
        for p in pts:
            q = tuple(0.0 if abs(v) < 1e-13 else float(v) for v in p)
            cleaned.setdefault(tuple(round(v, 12) for v in q), q)
        pts = list(cleaned.values())
    else:
        pts = list(dict.fromkeys(pts))
    return sorted(pts)


def _region(center: CenterSpec, index: MultiIndex, x: Sequence[int], C, mode: str) -> GammaRegion:
    n = center.n
    exact = center.exact
    tol = 0 if exact else REGION_TOL
    zero = center.zero()
    y, beta = center.y, center.beta
    base = sum((beta[k] * C[y[k], x[k]] for k in range(n)), zero)
    moves = index.moves(n)
    coeffs = tuple(C[y[k], x[s]] - C[y[k], x[k]] for k, s in moves)
    rhs = center.eps - base
    G, h = _box_rows(center, index)
    box = _polygon_vertices(G, h, exact, tol)
    vals = [sum((a * g for a, g in zip(coeffs, v)), zero) for v in box]
    if max(vals) <= rhs + tol:
        return GammaRegion(FULL, coeffs, rhs, tuple(box), mode)
    if not moves or min(vals) >= rhs - tol:
        # the open box never reaches strictly below the minimum corner value
        return GammaRegion(EMPTY, coeffs, rhs, (), mode)
    corners = _polygon_vertices(G + [list(coeffs)], h + [rhs], exact, tol)
    return GammaRegion(CUT, coeffs, rhs, tuple(corners), mode)


def constraint_value(nu: Coupling, eps):
    """``nu{d > eps} = sum_k alpha_k 1{d(x_k, x'_k) > eps}``."""
    return excess_mass(nu, eps)


def gamma_region(family: PiFamily, mode: str = "prokhorov") -> GammaRegion:
    center = family.center
    return _region(center, family.index, family.x, center.cost_matrix(mode), mode)


def pi_element(family: PiFamily, gamma=(), closed: bool = False, tol: float = REGION_TOL) -> Coupling:
    """The coupling ``delta_{y,x} + sum_m gamma_m (delta_{y_k, x_s} - delta_{y_k, x_k})``.

    ``gamma`` must lie in the open box (or open simplex for ``pair(i, i)``);
    ``closed=True`` admits the closure, as needed at region corners.
    """
    center = family.center
    n = center.n
    moves = family.moves
    if np.ndim(gamma) == 0 and moves:
        gamma = (gamma,)
    gamma = tuple(gamma)
    if len(gamma) != len(moves):
        raise GammaOutOfBounds(f"{family.index.tag} takes {len(moves)} gamma values, got {len(gamma)}")
    if center.exact:
        tol = 0
    left = list(center.beta)
    for (k, _), g in zip(moves, gamma):
        bad = (g < -tol) if closed else (g <= 0)
        if bad:
            raise GammaOutOfBounds(f"gamma {g} below its lower bound")
        left[k] = left[k] - g
    for k, rest in enumerate(left):
        bad = (rest < -tol) if closed else (rest <= 0)
        if bad:
            raise GammaOutOfBounds(f"moves out of center {k} exceed its weight {center.beta[k]}")
    y, x = center.y, family.x
    atoms = [((y[k], x[k]), max(left[k], 0) if not center.exact else left[k]) for k in range(n)]
    atoms += [((y[k], x[s]), max(g, 0) if not center.exact else g) for (k, s), g in zip(moves, gamma)]
    return Coupling(center.space, atoms, center.exact)


def lambda_single(center: CenterSpec, x: Sequence[int], i: int) -> bool:
    """Moving mass out of center ``i`` changes which side of ``eps`` it sits on."""
    n = center.n
    if len(x) != n + 1:
        raise ValueError("lambda_single needs n + 1 points")
    E = center.space.exceeds(center.eps)
    yi = center.y[i]
    return bool(E[yi, x[n]] != E[yi, x[i]])


def lambda_pair(center: CenterSpec, x: Sequence[int], i: int, j: int) -> bool:
    if i >= j:
        raise PairIndexError("lambda_pair needs i < j; pairs with i == j never pass the rank test")
    n = center.n
    if len(x) != n + 2:
        raise ValueError("lambda_pair needs n + 2 points")
    E = center.space.exceeds(center.eps)
    yi, yj = center.y[i], center.y[j]
    return bool(E[yi, x[n]] != E[yi, x[i]] and E[yj, x[n + 1]] != E[yj, x[j]])


def passes_lambda(family: PiFamily) -> bool:
    idx = family.index
    if idx.kind == "zero":
        return True
    if idx.kind == "single":
        return lambda_single(family.center, family.x, idx.i)
    if idx.i == idx.j:
        return False
    return lambda_pair(family.center, family.x, idx.i, idx.j)


def adjacency(center: CenterSpec, x: Sequence[int]) -> AdjacencyMatrix:
    E = center.space.exceeds(center.eps)
    return AdjacencyMatrix(tuple(tuple(int(E[yi, p]) for p in x) for yi in center.y))


def _signature_groups(center: CenterSpec, candidate_points) -> list:
    """Candidate points grouped by adjacency column, groups ordered by least member."""
    E = center.space.exceeds(center.eps)
    groups: dict = {}
    for p in candidate_points:
        sig = tuple(int(E[yi, p]) for yi in center.y)
        groups.setdefault(sig, []).append(int(p))
    out = [(sig, tuple(sorted(pts))) for sig, pts in groups.items()]
    out.sort(key=lambda item: item[1][0])
    return out


def _candidates(center, candidate_points):
    if candidate_points is None:
        return PointSet.full(center.space)
    if not isinstance(candidate_points, PointSet):
        candidate_points = PointSet.of(center.space, candidate_points)
    return candidate_points


def adjacency_classes(center: CenterSpec, candidate_points, m: int) -> dict:
    """Partition ``candidate_points ** m`` by adjacency matrix.

    Keys follow the lexicographic order of each class's least tuple, and
    members within a class are listed lexicographically.
    """
    cand = _candidates(center, candidate_points)
    groups = _signature_groups(center, cand)
    out = {}
    for combo in product(groups, repeat=m):
        bits = tuple(tuple(sig[r] for sig, _ in combo) for r in range(center.n))
        out[AdjacencyMatrix(bits)] = list(product(*(pts for _, pts in combo)))
    return out


@dataclass(frozen=True)
class FamilyClass:
    """A product set of families ``Pi_index(x)`` sharing one gamma region.

    ``adjacency`` is the common adjacency matrix, or ``None`` for the
    coarser classes of :func:`slot_classes`.
    """

    index: MultiIndex
    adjacency: AdjacencyMatrix | None
    slot_groups: tuple
    region: GammaRegion
    center: CenterSpec = field(repr=False)

    @property
    def representative(self) -> PiFamily:
        return PiFamily(self.index, tuple(g[0] for g in self.slot_groups), self.center)

    @property
    def size(self) -> int:
        return int(np.prod([len(g) for g in self.slot_groups]))

    def members(self) -> Iterator[PiFamily]:
        for x in product(*self.slot_groups):
            yield PiFamily(self.index, x, self.center)

    def member_array(self) -> np.ndarray:
        grids = np.meshgrid(*[np.asarray(g) for g in self.slot_groups], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def slot_weights(self, gamma) -> list:
        """Mass carried by each slot of ``x`` at a given gamma."""
        n = self.center.n
        moves = self.index.moves(n)
        w = list(self.center.beta) + [None] * len(moves)
        for (k, s), g in zip(moves, gamma):
            w[k] = w[k] - g
            w[s] = g
        return w


def _filtered_indices(n: int, filtered: bool, pairs: bool) -> list:
    if not filtered:
        return all_indices(n, diagonal_pairs=True)
    return [ix for ix in all_indices(n, diagonal_pairs=False) if pairs or ix.kind != "pair"]


def family_classes(center: CenterSpec, candidate_points=None, *, feasible_only: bool = True,
                   filtered: bool = True, pairs: bool = False) -> Iterator[FamilyClass]:
    """Adjacency classes of Prokhorov families, in deterministic order.

    With ``filtered`` only families whose couplings can pass the rank test
    are kept: ``zero`` and ``single(i)`` with the indicator flip. A
    two-move coupling has ``n + 2`` atoms, and the rows
    ``(1{x = y_1}, ..., 1{x = y_n}, 1{d > eps}, 1)`` of its atoms span at
    most ``n + 1`` dimensions because the last entry is the sum of the first
    ``n``. So ``pair(i, j)`` never passes; ``pairs=True`` still emits the
    ``i < j`` pairs passing both indicator flips, for comparison.
    With ``feasible_only`` classes whose gamma region is empty are dropped.
    """
    cand = _candidates(center, candidate_points)
    groups = _signature_groups(center, cand)
    C = center.cost_matrix("prokhorov")
    n = center.n
    for index in _filtered_indices(n, filtered, pairs):
        m = n + index.extra
        for combo in product(groups, repeat=m):
            slots = tuple(pts for _, pts in combo)
            rep = tuple(g[0] for g in slots)
            family = PiFamily(index, rep, center)
            if filtered and not passes_lambda(family):
                continue
            region = _region(center, index, rep, C, "prokhorov")
            if feasible_only and region.empty:
                continue
            bits = tuple(tuple(sig[r] for sig, _ in combo) for r in range(n))
            yield FamilyClass(index, AdjacencyMatrix(bits), slots, region, center)


def _owners(index: MultiIndex, n: int) -> list:
    """Center whose adjacency row decides each slot's role in the constraint."""
    owners = list(range(n))
    owners += [k for k, _ in index.moves(n)]
    return owners


def slot_classes(center: CenterSpec, candidate_points=None, *, feasible_only: bool = True,
                 pairs: bool = False) -> Iterator[FamilyClass]:
    """Coarsest grouping of the filtered Prokhorov families by shared region.

    The region and the filter of ``Pi_index(x)`` depend only on one bit per
    slot, ``1{d(y_k, x_s) > eps}`` with ``k`` the center owning slot ``s``.
    Grouping points by that bit gives at most ``2 ** (n + 2)`` classes per
    index and covers exactly the families of :func:`family_classes`.
    """
    cand = _candidates(center, candidate_points)
    E = center.space.exceeds(center.eps)
    split = []
    for yk in center.y:
        groups = {}
        for p in cand:
            groups.setdefault(int(E[yk, p]), []).append(int(p))
        split.append(sorted(tuple(g) for g in groups.values()))
    C = center.cost_matrix("prokhorov")
    n = center.n
    for index in _filtered_indices(n, True, pairs):
        for slots in product(*(split[k] for k in _owners(index, n))):
            rep = tuple(g[0] for g in slots)
            if not passes_lambda(PiFamily(index, rep, center)):
                continue
            region = _region(center, index, rep, C, "prokhorov")
            if feasible_only and region.empty:
                continue
            yield FamilyClass(index, None, tuple(slots), region, center)


def theta_bar_families(center: CenterSpec, candidate_points=None, *, expand: bool = False,
                       feasible_only: bool = True, pairs: bool = False) -> Iterator[tuple]:
    """``(PiFamily, GammaRegion)`` pairs for the filtered Prokhorov superset.

    By default one representative per adjacency class is yielded; with
    ``expand=True`` every member is. ``pair(i, i)`` families never appear,
    and ``pair(i, j)`` only with ``pairs=True`` (see :func:`family_classes`).
    """
    for cls in family_classes(center, candidate_points, feasible_only=feasible_only, pairs=pairs):
        if expand:
            for fam in cls.members():
                yield fam, cls.region
        else:
            yield cls.representative, cls.region


def pi_bar_families(center: CenterSpec, candidate_points=None, mode: str = "prokhorov", *,
                    feasible_only: bool = True) -> Iterator[tuple]:
    """Every family over ``candidate_points``, unfiltered, with its region in ``mode``.

    This is the unrefined superset (pairs with ``i == j`` included); it is
    the only one available for the Kantorovich cost.
    """
    cand = _candidates(center, candidate_points)
    C = center.cost_matrix(mode)
    n = center.n
    for index in all_indices(n, diagonal_pairs=True):
        for x in product(cand.indices, repeat=n + index.extra):
            region = _region(center, index, x, C, mode)
            if feasible_only and region.empty:
                continue
            yield PiFamily(index, x, center), region


@dataclass(frozen=True)
class Candidate:
    family: PiFamily
    gamma: tuple
    coupling: Coupling
    measure: DiscreteMeasure


def _in_ball(nu: Coupling, center: CenterSpec, mode: str) -> bool:
    if mode == "prokhorov":
        return ky_fan_check(nu, center.eps)
    cost = transport_cost(nu)
    return float(cost) <= float(center.eps) + 1e-12


def candidate_records(families: Iterable) -> Iterator[Candidate]:
    """One record per (family, closed corner), in input order, not deduplicated."""
    for item in families:
        if isinstance(item, FamilyClass):
            pairs = ((fam, item.region) for fam in item.members())
        else:
            pairs = (item,)
        for fam, region in pairs:
            for gamma in region.corners:
                nu = pi_element(fam, gamma, closed=True)
                yield Candidate(fam, gamma, nu, marginal_second(nu))


def _class_projection(cls: FamilyClass, gamma) -> np.ndarray:
    members = cls.member_array()
    weights = cls.slot_weights(gamma)
    W = np.zeros((len(members), len(cls.center.space)))
    rows = np.arange(len(members))
    for s, w in enumerate(weights):
        np.add.at(W, (rows, members[:, s]), float(w))
    return W


def project_candidates(families: Iterable, *, check: bool = True, digits: int = 12) -> list:
    """Second marginals of every closed-corner coupling, deduplicated and sorted.

    Accepts ``(PiFamily, GammaRegion)`` pairs or :class:`FamilyClass`
    objects; the latter are projected in bulk. With ``check`` each
    generating coupling (one per class) is certified to lie in the ball.
    """
    seen: dict = {}
    for item in families:
        if isinstance(item, FamilyClass) and not item.center.exact:
            for gamma in item.region.corners:
                if check:
                    nu = pi_element(item.representative, gamma, closed=True)
                    if not _in_ball(nu, item.center, item.region.mode):
                        raise AssertionError(f"corner {gamma} of {item.index.tag} left the ball")
                W = _class_projection(item, gamma)
                keys = np.round(W, digits)
                _, first = np.unique(keys, axis=0, return_index=True)
                for r in sorted(first):
                    mu = DiscreteMeasure.from_vector(item.center.space, W[r])
                    seen.setdefault(mu.key(digits), mu)
            continue
        for cand in candidate_records([item]):
            if check and not _in_ball(cand.coupling, cand.family.center, _mode_of(item)):
                raise AssertionError(f"corner {cand.gamma} of {cand.family.index.tag} left the ball")
            seen.setdefault(cand.measure.key(digits), cand.measure)
    return [seen[k] for k in sorted(seen, key=lambda k: [(p, float(w)) for p, w in k])]


def _mode_of(item) -> str:
    if isinstance(item, FamilyClass):
        return item.region.mode
    return item[1].mode


def independence_vectors(center: CenterSpec, nu: Coupling) -> np.ndarray:
    """Rows ``(1{x = y_1}, ..., 1{x = y_n}, 1{d(x, x') > eps}, 1)`` per atom."""
    E = center.space.exceeds(center.eps)
    rows = []
    for (a, b), _ in nu.atoms:
        rows.append([int(a == yi) for yi in center.y] + [int(E[a, b]), 1])
    return np.array(rows, dtype=int)


def passes_rank_test(center: CenterSpec, nu: Coupling) -> bool:
    """True iff the per-atom vectors of ``nu`` are linearly independent."""
    V = independence_vectors(center, nu)
    return int(np.linalg.matrix_rank(V)) == len(V)
