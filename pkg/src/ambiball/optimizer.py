"""Worst-case expectations and convex objectives over a metric ball.

Two independent routes:

* ``maximize_linear_lp`` solves the transport LP over couplings with first
  marginal ``mu_n`` and budgeted cost, whose second marginals are exactly
  the ball. A simplex vertex has few atoms, so the argmax does too.
* ``maximize_linear_superset`` and ``maximize_convex`` scan the closed
  corners of the explicit families from :mod:`ambiball.extreme_sets`.

``eps == 0`` is treated as the singleton ball ``{mu_n}``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .distances import kantorovich, ky_fan_check, strassen_feasible, transport_cost
from .errors import EmptyCandidates, InfeasibleBall, LPError
from .extreme_sets import (
    CenterSpec,
    MODES,
    PiFamily,
    _candidates,
    slot_classes,
    pi_bar_families,
    pi_element,
    project_candidates,
)
from .lp import solve_lp
from .measures import Coupling, DiscreteMeasure, diagonal, marginal_first, marginal_second
from .metric_space import FiniteMetricSpace, PointSet

TIE_TOL = 1e-12


@dataclass(frozen=True)
class LinearObjective:
    """``F(mu) = sum_x values[x] mu(x)``."""

    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if not all(np.isfinite(float(v)) for v in vals):
            raise ValueError("objective values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_dict(cls, space: FiniteMetricSpace, data) -> "LinearObjective":
        """``{"values": {label: v}}``, ``{"values": [v, ...]}`` or a bare list/dict."""
        vals = data.get("values", data) if isinstance(data, dict) else data
        if isinstance(vals, dict):
            out = [0.0] * len(space)
            for lab, v in vals.items():
                out[space.index(lab)] = v
            vals = out
        if len(vals) != len(space):
            raise ValueError(f"objective has {len(vals)} values for {len(space)} points")
        return cls(tuple(vals))

    def __call__(self, mu: DiscreteMeasure):
        return mu.integrate(self.values)


@dataclass(frozen=True)
class RobustResult:
    value: float | Fraction
    argmax: DiscreteMeasure
    witness: Coupling
    mode: str
    method: str
    exact_for_objective: bool = True

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": self.argmax.to_dict(),
            "witness": self.witness.to_dict(),
            "mode": self.mode,
            "method": self.method,
            "exact_for_objective": self.exact_for_objective,
        }


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _objective(f, space) -> LinearObjective:
    if isinstance(f, LinearObjective):
        obj = f
    else:
        obj = LinearObjective(tuple(f))
    if len(obj.values) != len(space):
        raise ValueError("objective length differs from the space size")
    return obj


def _stay_put(center: CenterSpec, f, mode, method) -> RobustResult:
    mu = center.measure()
    return RobustResult(f(mu), mu, diagonal(mu), mode, method)


def _better(value, mu, best) -> bool:
    """Larger value wins; near-ties go to the lexicographically smaller atom list."""
    if best is None:
        return True
    bv, bmu = best
    if value > bv + TIE_TOL:
        return True
    if value < bv - TIE_TOL:
        return False
    return mu.atoms < bmu.atoms


def maximize_linear_lp(center: CenterSpec, f, mode: str = "prokhorov", exact: bool | None = None) -> RobustResult:
    """Maximize ``int f d(P2 nu)`` over couplings of ``mu_n`` with budgeted cost."""
    _check_mode(mode)
    if center.eps < 0:
        raise InfeasibleBall("eps must be nonnegative")
    f = _objective(f, center.space)
    if center.eps == 0:
        return _stay_put(center, f, mode, "gamma_lp")
    if exact is None:
        exact = center.exact
    space = center.space
    N, n = len(space), center.n
    if exact:
        C = np.vectorize(Fraction, otypes=[object])(
            center.space.exceeds(center.eps).astype(int) if mode == "prokhorov" else space.dist)
        vals = [Fraction(v) for v in f.values]
    else:
        C = center.cost_matrix(mode)
        vals = [float(v) for v in f.values]
    # variables nu(y_k, x') laid out row-major over (k, x')
    c = np.array(vals * n, dtype=object if exact else float)
    A_eq = np.zeros((n, n * N))
    for k in range(n):
        A_eq[k, k * N:(k + 1) * N] = 1
    budget = np.concatenate([C[y] for y in center.y])
    res = solve_lp(c, [budget], [center.eps], A_eq, list(center.beta), maximize=True, exact=exact)
    if not res.success:
        raise LPError(f"ball LP ended {res.status}")
    atoms = [((center.y[k // N], k % N), w) for k, w in enumerate(res.x) if w != 0]
    nu = Coupling(space, atoms, exact)
    mu = marginal_second(nu)
    value = res.value if exact else float(res.value)
    return RobustResult(value, mu, nu, mode, "gamma_lp")


def _with_centers(center, candidate_points) -> PointSet:
    cand = _candidates(center, candidate_points)
    if not len(cand):
        raise EmptyCandidates("no candidate points")
    # the diagonal coupling always lies in the ball, so the centers are kept
    return cand | PointSet.of(center.space, center.y)


def maximize_linear_superset(center: CenterSpec, f, mode: str = "prokhorov", candidate_points=None) -> RobustResult:
    """Best closed corner over the explicit family superset.

    In Prokhorov mode a whole class of families sharing one gamma region is
    handled at once: at a fixed gamma each slot of ``x`` carries a fixed
    nonnegative mass, so the best member puts each slot on the point of its
    group with the largest ``f``.
    Kantorovich mode scans the unfiltered families one by one.
    """
    _check_mode(mode)
    f = _objective(f, center.space)
    cand = _with_centers(center, candidate_points)
    if center.eps == 0:
        return _stay_put(center, f, mode, "superset_enum")
    vals = f.values
    best = None
    best_fam = None
    if mode == "prokhorov":
        for cls in slot_classes(center, cand):
            picks = tuple(max(g, key=lambda p: (vals[p], -p)) for g in cls.slot_groups)
            fam = PiFamily(cls.index, picks, center)
            for gamma in cls.region.corners:
                mu = marginal_second(pi_element(fam, gamma, closed=True))
                value = f(mu)
                if _better(value, mu, best):
                    best, best_fam = (value, mu), (fam, gamma)
    else:
        for fam, region in pi_bar_families(center, cand, mode="kantorovich"):
            for gamma in region.corners:
                mu = marginal_second(pi_element(fam, gamma, closed=True))
                value = f(mu)
                if _better(value, mu, best):
                    best, best_fam = (value, mu), (fam, gamma)
    value, mu = best
    nu = pi_element(best_fam[0], best_fam[1], closed=True)
    return RobustResult(value, mu, nu, mode, "superset_enum")


def _witness(center: CenterSpec, mu: DiscreteMeasure, mode: str) -> Coupling:
    mu_n = center.measure()
    if mode == "prokhorov":
        nu = strassen_feasible(mu_n, mu, center.eps)
        if nu is None:
            raise AssertionError("candidate measure left the ball")
        return nu
    _, nu = kantorovich(mu_n, mu, witness=True)
    return nu


def maximize_convex(center: CenterSpec, F: Callable, mode: str = "prokhorov", candidate_points=None,
                    convex: bool = True) -> RobustResult:
    """Maximize a caller-supplied ``F(mu)`` over projected corner measures.

    For convex ``F`` and ``candidate_points`` equal to X this is the exact
    maximum over the ball. Otherwise the result is a lower bound and
    ``exact_for_objective`` is False.
    """
    _check_mode(mode)
    cand = _with_centers(center, candidate_points)
    if center.eps == 0:
        mu = center.measure()
        return RobustResult(F(mu), mu, diagonal(mu), mode, "superset_enum", convex)
    if mode == "prokhorov":
        measures = project_candidates(slot_classes(center, cand))
    else:
        measures = project_candidates(pi_bar_families(center, cand, mode="kantorovich"))
    if not measures:
        raise EmptyCandidates("no candidate measure in the ball")
    best = None
    for mu in measures:
        value = F(mu)
        if _better(value, mu, best):
            best = (value, mu)
    value, mu = best
    full = len(cand) == len(center.space)
    return RobustResult(value, mu, _witness(center, mu, mode), mode, "superset_enum", convex and full)


def certify(result: RobustResult, center: CenterSpec, tol: float = 1e-9) -> bool:
    """Check that the witness couples ``mu_n`` to the argmax inside the budget."""
    nu = result.witness
    mu_n = center.measure()
    if not _marginals_match(nu, mu_n, result.argmax, tol):
        return False
    if result.mode == "prokhorov":
        return ky_fan_check(nu, center.eps, tol)
    return float(transport_cost(nu)) <= float(center.eps) + tol


def _marginals_match(nu, mu1, mu2, tol):
    return marginal_first(nu).isclose(mu1, tol) and marginal_second(nu).isclose(mu2, tol)


def empirical_center(space: FiniteMetricSpace, samples: Sequence, eps) -> CenterSpec:
    """Empirical measure of ``samples`` with repeated points merged."""
    if not len(samples):
        raise ValueError("need at least one sample")
    counts = Counter(space.index(s) for s in samples)
    total = len(samples)
    y = sorted(counts)
    beta = tuple(Fraction(counts[p], total) for p in y)
    if not isinstance(eps, (Fraction, int)):
        beta = tuple(float(b) for b in beta)
    return CenterSpec(space, tuple(y), beta, eps)
