import numpy as np
import pytest
import cvxpy as cp
from scipy.optimize import linprog

from hajlaszlab.activeset import OracleError, check_budget, linear_candidates, min_linear, min_psd_quadratic, \
    min_quadratic, psd_quadratic_candidates, quadratic_candidates, simplex_linear, vertex_linear
from hajlaszlab.norms import solve_problem


def test_min_linear_small():
    value, x = min_linear([1, 1], [[1, 1]], [1])
    assert value == pytest.approx(1), 'Wrong LP value'
    value, x = min_linear([1, 2], [[1, 1]], [1])
    assert value == pytest.approx(1), 'Wrong LP value'
    assert x == pytest.approx([1, 0]), 'Wrong LP vertex'


def test_min_linear_infeasible():
    with pytest.raises(OracleError):
        min_linear([1], [[-1]], [1])


def test_min_quadratic_small():
    value, x = min_quadratic([1, 1], [[1, 1]], [1])
    assert value == pytest.approx(0.5), 'Wrong QP value'
    assert x == pytest.approx([0.5, 0.5]), 'Wrong QP point'
    value, x = min_quadratic([1, 3], [[1, 1]], [1])
    assert value == pytest.approx(0.75), 'Wrong weighted QP value'
    assert x == pytest.approx([0.75, 0.25]), 'Wrong weighted QP point'
    value, x = min_quadratic([1, 1], [[1, 1]], [-1])
    assert value == 0, 'Inactive constraint not detected'


def test_budget():
    check_budget(5, budget=5)
    with pytest.raises(OracleError):
        check_budget(6, budget=5)
    assert linear_candidates(3, 2) == 10, 'Wrong number of vertices'
    assert quadratic_candidates(3, 2) == 7, 'Wrong number of active sets'
    with pytest.raises(OracleError):
        min_linear(np.ones(8), np.ones((8, 8)), np.ones(8), budget=100)


@pytest.mark.parametrize('seed', range(5))
def test_min_linear_matches_linprog(seed):
    rng = np.random.default_rng(seed)
    A = (rng.random((6, 5)) < 0.4).astype(float)
    A[np.arange(6), rng.integers(0, 5, 6)] = 1
    c = rng.uniform(0.1, 2, 6)
    w = rng.uniform(0.5, 2, 5)
    value, x = min_linear(w, A, c)
    ref = linprog(w, A_ub=-A, b_ub=-c, bounds=[(0, None)] * 5)
    assert value == pytest.approx(ref.fun, rel=1e-7), 'LP value differs from simplex'
    assert np.all(A @ x >= c - 1e-9), 'LP vertex infeasible'


@pytest.mark.parametrize('seed', range(5))
def test_min_quadratic_matches_cvxpy(seed):
    rng = np.random.default_rng(seed)
    m, n = 5, 4
    A = np.zeros((m, n))
    for r in range(m):
        A[r, rng.choice(n, 2, replace=False)] = 1
    c = rng.uniform(0.1, 2, m)
    h = rng.uniform(0.5, 2, n)
    value, x = min_quadratic(h, A, c)
    g = cp.Variable(n)
    problem = cp.Problem(cp.Minimize(cp.sum(cp.multiply(h, cp.square(g)))), [A @ g >= c])
    solve_problem(problem)
    assert value == pytest.approx(problem.value, rel=1e-5), 'QP value differs from convex solver'
    assert np.all(A @ x >= c - 1e-9), 'QP point infeasible'


def test_min_psd_quadratic_singular():
    value, x = min_psd_quadratic([[1, 1], [1, 1]], [[1, 0]], [1])
    assert value == pytest.approx(1), 'Wrong value with singular matrix'
    assert x == pytest.approx([1, 0]), 'Pinned variable not at zero'
    value, x = min_psd_quadratic(np.diag([1.0, 3.0]), [[1, 1]], [1])
    assert value == pytest.approx(min_quadratic([1, 3], [[1, 1]], [1])[0]), 'Diagonal case differs'
    assert psd_quadratic_candidates(2, 2) == 11, 'Wrong number of active sets'


@pytest.mark.parametrize('seed', range(3))
def test_min_psd_quadratic_matches_cvxpy(seed):
    rng = np.random.default_rng(seed)
    owner = np.array([0, 1, 2, 0, 1, 2])
    mass = rng.uniform(0.5, 2, 3)
    H = np.where(owner[:, None] == owner[None, :], mass[owner][:, None], 0.0)
    A = np.zeros((4, 6))
    A[[0, 0, 1, 1, 2, 2, 3, 3], [0, 1, 1, 2, 3, 5, 4, 5]] = 1
    c = rng.uniform(0.1, 2, 4)
    value, x = min_psd_quadratic(H, A, c)
    P = np.zeros((3, 6))
    P[owner, np.arange(6)] = 1
    g = cp.Variable(6, nonneg=True)
    problem = cp.Problem(cp.Minimize(cp.sum(cp.multiply(mass, cp.square(P @ g)))), [A @ g >= c])
    solve_problem(problem)
    assert value == pytest.approx(problem.value, rel=1e-5), 'QP value differs from convex solver'
    assert np.all(A @ x >= c - 1e-9) and np.all(x >= 0), 'QP point infeasible'


@pytest.mark.parametrize('seed', range(5))
def test_simplex_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    A = (rng.random((6, 5)) < 0.4).astype(float)
    A[np.arange(6), rng.integers(0, 5, 6)] = 1
    c = rng.uniform(0.1, 2, 6)
    w = rng.uniform(0.5, 2, 5)
    value, x = min_linear(w, A, c)
    simplex, y = simplex_linear(w, A, c)
    assert simplex == pytest.approx(value, rel=1e-7), 'Simplex value differs from enumeration'
    assert np.all(A @ y >= c - 1e-7), 'Simplex point infeasible'
    small, _ = vertex_linear(w, A, c)
    large, _ = vertex_linear(w, A, c, budget=10)
    assert small == pytest.approx(value) and large == pytest.approx(value), 'Vertex optimum depends on budget'


def test_simplex_infeasible():
    with pytest.raises(OracleError):
        simplex_linear([1], [[-1]], [1])
