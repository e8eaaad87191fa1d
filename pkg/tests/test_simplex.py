"""Solver checks for the bundled two-phase simplex."""

import numpy as np
import pytest
from scipy.optimize import linprog

from tokenlab import SolverError
from tokenlab.frontier import solve_lp


def assert_feasible(x, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol=1e-8):
    assert np.all(np.asarray(x) >= -tol)
    if A_ub is not None:
        assert np.all(np.asarray(A_ub) @ x <= np.asarray(b_ub) + tol)
    if A_eq is not None:
        np.testing.assert_allclose(np.asarray(A_eq) @ x, b_eq, atol=tol)


class TestKnownPrograms:
    def test_simple_bounded(self):
        # min -x - y  st  x + y <= 1
        result = solve_lp([-1.0, -1.0], A_ub=[[1.0, 1.0]], b_ub=[1.0])
        assert result.status == "optimal"
        assert result.objective == pytest.approx(-1.0, abs=1e-12)
        assert_feasible(result.x, A_ub=[[1.0, 1.0]], b_ub=[1.0])

    def test_equality_only(self):
        result = solve_lp([1.0], A_eq=[[1.0]], b_eq=[3.0])
        assert result.status == "optimal"
        assert result.x[0] == pytest.approx(3.0, abs=1e-12)
        assert result.objective == pytest.approx(3.0, abs=1e-12)

    def test_unbounded(self):
        # x >= 0 with a vacuous bound, objective pushes x up forever
        result = solve_lp([-1.0], A_ub=[[-1.0]], b_ub=[1.0])
        assert result.status == "unbounded"
        assert result.x is None
        assert result.objective is None

    def test_infeasible(self):
        result = solve_lp([1.0], A_ub=[[1.0]], b_ub=[-1.0])
        assert result.status == "infeasible"
        assert result.x is None

    def test_negative_rhs_row_flip(self):
        # -x <= -2 means x >= 2; the row flip routes through phase 1
        result = solve_lp([1.0], A_ub=[[-1.0]], b_ub=[-2.0])
        assert result.status == "optimal"
        assert result.x[0] == pytest.approx(2.0, abs=1e-9)

    def test_mixed_constraints(self):
        # min x + y  st  x + y = 2, x - y <= 0
        c = [1.0, 1.0]
        A_ub, b_ub = [[1.0, -1.0]], [0.0]
        A_eq, b_eq = [[1.0, 1.0]], [2.0]
        result = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq)
        assert result.status == "optimal"
        assert result.objective == pytest.approx(2.0, abs=1e-9)
        assert_feasible(result.x, A_ub, b_ub, A_eq, b_eq)

    def test_degenerate_cycling_guard(self):
        # Beale's construction makes naive pivoting cycle forever; Bland's
        # rule has to terminate at the -0.05 optimum.
        c = [-0.75, 150.0, -0.02, 6.0]
        A_ub = [
            [0.25, -60.0, -0.04, 9.0],
            [0.5, -90.0, -0.02, 3.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
        b_ub = [0.0, 0.0, 1.0]
        result = solve_lp(c, A_ub=A_ub, b_ub=b_ub)
        assert result.status == "optimal"
        assert result.objective == pytest.approx(-0.05, abs=1e-9)

    def test_no_constraints_rejected(self):
        with pytest.raises(SolverError):
            solve_lp([1.0, 2.0])


def test_deterministic_pivot_sequence():
    rng = np.random.default_rng(7)
    c = rng.normal(size=6)
    A_ub = rng.normal(size=(4, 6))
    b_ub = rng.uniform(1.0, 2.0, size=4)
    bound = np.vstack([A_ub, np.ones(6)])
    rhs = np.append(b_ub, 50.0)
    first = solve_lp(c, A_ub=bound, b_ub=rhs)
    second = solve_lp(c, A_ub=bound, b_ub=rhs)
    assert first.objective == second.objective
    np.testing.assert_array_equal(first.x, second.x)


@pytest.mark.parametrize("seed", range(30))
def test_matches_reference_solver(seed):
    # Random feasible bounded programs built around a known interior point.
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    m_ub = int(rng.integers(1, 5))
    x0 = rng.uniform(0.0, 3.0, size=n)
    c = rng.normal(size=n)
    A_ub = rng.normal(size=(m_ub, n))
    b_ub = A_ub @ x0 + rng.uniform(0.1, 2.0, size=m_ub)
    # cap total mass so every objective direction stays bounded
    A_ub = np.vstack([A_ub, np.ones(n)])
    b_ub = np.append(b_ub, x0.sum() + 10.0)
    A_eq = b_eq = None
    if rng.random() < 0.5:
        A_eq = rng.normal(size=(1, n))
        b_eq = A_eq @ x0

    result = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq)
    reference = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                        bounds=(0, None), method="highs")
    assert result.status == "optimal"
    assert reference.status == 0
    assert result.objective == pytest.approx(reference.fun, abs=1e-6)
    assert_feasible(result.x, A_ub, b_ub, A_eq, b_eq)
