from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ambiball.errors import EmptyCandidates
from ambiball.extreme_sets import CenterSpec
from ambiball.measures import DiscreteMeasure
from ambiball.metric_space import PointSet, validate_metric
from ambiball.optimizer import (
    LinearObjective,
    certify,
    empirical_center,
    maximize_convex,
    maximize_linear_lp,
    maximize_linear_superset,
)
from ambiball.oracle import random_instance


def seeds():
    return st.integers(0, 2**32 - 1)


def _golden_argmax(space):
    return DiscreteMeasure(space, [(0, 0.7), (1, 0.3)])


@pytest.mark.parametrize("mode", ["prokhorov", "kantorovich"])
def test_golden_lp(golden_center, mode):
    res = maximize_linear_lp(golden_center, [0, 1], mode)
    assert res.value == pytest.approx(0.3, abs=1e-12)
    assert res.argmax.isclose(_golden_argmax(golden_center.space), 1e-12)
    assert res.method == "gamma_lp" and res.mode == mode
    assert certify(res, golden_center)


@pytest.mark.parametrize("mode", ["prokhorov", "kantorovich"])
def test_golden_superset(golden_center, mode):
    res = maximize_linear_superset(golden_center, [0, 1], mode)
    assert res.value == pytest.approx(0.3, abs=1e-12)
    assert res.argmax.isclose(_golden_argmax(golden_center.space), 1e-12)
    assert certify(res, golden_center)


@pytest.mark.parametrize("solver", [maximize_linear_lp, maximize_linear_superset])
def test_golden_exact(golden_center_exact, solver):
    res = solver(golden_center_exact, [0, 1])
    assert res.value == Fraction(3, 10)
    assert dict(res.argmax.atoms) == {0: Fraction(7, 10), 1: Fraction(3, 10)}


def test_constant_objective(line4):
    center = CenterSpec(line4, (0, 3), (0.5, 0.5), 0.2)
    for solver in (maximize_linear_lp, maximize_linear_superset):
        assert solver(center, [2.5] * 4).value == pytest.approx(2.5)


def test_singleton_space():
    space = validate_metric([[0]], ["a"])
    center = CenterSpec(space, (0,), (1.0,), 0.5)
    res = maximize_linear_superset(center, [4.0])
    assert res.value == 4.0
    assert res.argmax == DiscreteMeasure.dirac(space, 0)


def test_staying_put_is_optimal(line4):
    center = CenterSpec(line4, (1,), (1.0,), 0.05)
    res = maximize_linear_superset(center, [-5.0, 1.0, -5.0, -5.0])
    assert res.argmax == center.measure()
    assert res.value == pytest.approx(1.0)


def test_zero_radius_returns_center(line4):
    center = CenterSpec(line4, (0, 2), (0.25, 0.75), 0.0)
    f = [0.0, 1.0, 2.0, 3.0]
    for solver in (maximize_linear_lp, maximize_linear_superset):
        res = solver(center, f)
        assert res.value == pytest.approx(1.5)
        assert res.argmax.isclose(center.measure())


def test_objective_from_dict(two_point):
    f = LinearObjective.from_dict(two_point, {"values": {"b": 2}})
    assert f.values == (0.0, 2)
    assert LinearObjective.from_dict(two_point, [1, 2]).values == (1, 2)
    with pytest.raises(ValueError):
        LinearObjective.from_dict(two_point, [1, 2, 3])
    with pytest.raises(ValueError):
        LinearObjective((1.0, float("nan")))


def test_empty_candidates(golden_center):
    with pytest.raises(EmptyCandidates):
        maximize_linear_superset(golden_center, [0, 1], candidate_points=PointSet(()))


def test_convex_square_norm(golden_center):
    res = maximize_convex(golden_center, lambda mu: sum(float(w) ** 2 for w in mu.weights))
    assert res.value == pytest.approx(1.0)
    assert res.argmax == DiscreteMeasure.dirac(golden_center.space, 0)
    assert res.exact_for_objective
    assert certify(res, golden_center)


def test_convex_linear_matches_superset(line4):
    center = CenterSpec(line4, (0, 2), (0.5, 0.5), 0.3)
    f = LinearObjective((0.3, -1.0, 0.2, 1.0))
    assert maximize_convex(center, f).value == pytest.approx(maximize_linear_superset(center, f).value, abs=1e-12)


def test_convex_max_of_two_linear(line4):
    center = CenterSpec(line4, (1, 2), (0.6, 0.4), 0.25)
    f = LinearObjective((1.0, 0.0, 0.0, 0.5))
    g = LinearObjective((0.0, 0.2, 0.0, 1.0))
    res = maximize_convex(center, lambda mu: max(f(mu), g(mu)))
    want = max(maximize_linear_lp(center, f).value, maximize_linear_lp(center, g).value)
    assert res.value == pytest.approx(want, abs=1e-9)


def test_convex_partial_candidates_flagged(line4):
    center = CenterSpec(line4, (0,), (1.0,), 0.3)
    res = maximize_convex(center, lambda mu: 0.0, candidate_points=PointSet.of(line4, [0, 1]))
    assert not res.exact_for_objective


def test_empirical_center(two_point):
    c = empirical_center(two_point, ["a", "b"], 0.1)
    assert c.y == (0, 1) and c.beta == (0.5, 0.5)
    c = empirical_center(two_point, ["a", "a", "b"], Fraction(1, 10))
    assert c.beta == (Fraction(2, 3), Fraction(1, 3))
    c = empirical_center(two_point, ["a"], 0.1)
    assert c.y == (0,) and c.beta == (1.0,)
    with pytest.raises(ValueError):
        empirical_center(two_point, [], 0.1)


def test_result_to_dict(golden_center):
    d = maximize_linear_lp(golden_center, [0, 1]).to_dict()
    assert set(d) == {"value", "argmax", "witness", "mode", "method", "exact_for_objective"}


@given(seeds())
def test_methods_agree(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng)
    f = rng.normal(size=len(center.space))
    lp = maximize_linear_lp(center, f)
    sup = maximize_linear_superset(center, f)
    assert lp.value == pytest.approx(sup.value, abs=1e-9)
    assert certify(lp, center) and certify(sup, center)
    assert len(lp.argmax) <= center.n + 2 and len(sup.argmax) <= center.n + 2


@given(seeds())
def test_kantorovich_methods_agree(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng, points=(3, 4), centers=(1, 2))
    f = rng.normal(size=len(center.space))
    lp = maximize_linear_lp(center, f, "kantorovich")
    sup = maximize_linear_superset(center, f, "kantorovich")
    assert lp.value == pytest.approx(sup.value, abs=1e-9)
    assert certify(lp, center) and certify(sup, center)


@given(seeds())
def test_value_monotone_in_radius(seed):
    rng = np.random.default_rng(seed)
    center = random_instance(rng)
    f = rng.normal(size=len(center.space))
    values = []
    for eps in (0.0, 0.1, 0.25, 0.5, 0.9):
        c = CenterSpec(center.space, center.y, center.beta, eps)
        values.append(maximize_linear_lp(c, f).value)
    assert values[0] == pytest.approx(center.measure().integrate(f))
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
