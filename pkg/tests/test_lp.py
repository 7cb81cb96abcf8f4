from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from ambiball import kernels
from ambiball.lp import solve_lp


def test_textbook_maximum():
    res = solve_lp([1, 1], [[1, 2], [3, 1]], [4, 6], maximize=True)
    assert res.success
    assert res.value == pytest.approx(2.8)
    assert res.x == pytest.approx([1.6, 1.2])


def test_exact_solution_is_rational():
    res = solve_lp([-1, -1], [[1, 2], [3, 1]], [4, 6], exact=True)
    assert res.x.tolist() == [Fraction(8, 5), Fraction(6, 5)]
    assert res.value == Fraction(-14, 5)


def test_infeasible_and_unbounded():
    assert solve_lp([1], [[1]], [-1]).status == "infeasible"
    assert solve_lp([-1], [[-1]], [0]).status == "unbounded"
    assert solve_lp([0, 0], A_eq=[[1, 1]], b_eq=[1], A_ub=[[1, 1]], b_ub=[0.5]).status == "infeasible"


def test_redundant_equalities():
    res = solve_lp([1, 2, 3], A_eq=[[1, 1, 1], [2, 2, 2]], b_eq=[1, 2])
    assert res.success
    assert res.value == pytest.approx(1)


def test_free_variables():
    res = solve_lp([1], [[-1]], [3], free=True)
    assert res.value == pytest.approx(-3)


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = solve_lp(c, A, [0, 0, 1])
    assert res.success
    assert res.value == pytest.approx(-0.05)


@pytest.mark.parametrize("seed", range(40))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m_ub, m_eq = rng.integers(2, 7), rng.integers(1, 6), rng.integers(0, 3)
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = rng.uniform(0, 2, size=m_ub)
    A_eq = rng.uniform(0, 1, size=(m_eq, n)) if m_eq else None
    b_eq = A_eq @ rng.uniform(0, 1, size=n) if m_eq else None
    c = rng.normal(size=n)
    # box keeps the reference problem bounded
    A_ub = np.vstack([A_ub, np.eye(n)])
    b_ub = np.concatenate([b_ub, np.full(n, 3.0)])
    ref = linprog(c, A_ub, b_ub, A_eq, b_eq, method="highs")
    res = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
    if ref.status == 2:
        assert res.status == "infeasible"
    else:
        assert res.success
        assert res.value == pytest.approx(ref.fun, abs=1e-8)
        assert np.all(A_ub @ res.x <= b_ub + 1e-8)


def test_stalled_float_solve_reruns_exactly(monkeypatch):
    real = kernels.pivot_loop

    def stall(T, basis, n_enter, tol, max_iter):
        if T.dtype == float:
            return kernels.ITERATION_LIMIT, max_iter
        return real(T, basis, n_enter, tol, max_iter)

    monkeypatch.setattr(kernels, "pivot_loop", stall)
    res = solve_lp([-1.0, -1.0], [[1, 2], [3, 1]], [4, 6])
    assert res.success
    assert isinstance(res.value, float) and res.value == pytest.approx(-2.8)
    assert res.x.dtype == float


def test_degenerate_hull_lp_terminates():
    # float Bland pivoting cycles on this instance's hull test
    from ambiball.oracle import ball_vertices, random_instance
    center = random_instance(np.random.default_rng(16874), points=(3, 5))
    assert len(ball_vertices(center, "kantorovich")) == 9
