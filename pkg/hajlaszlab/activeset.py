"""Exact enumeration oracles for small linear and quadratic programs.

The oracles enumerate candidate active sets, solve the equality
constrained system of each candidate in batches, keep the primal feasible
candidates and return the best objective. Every kept candidate is a feasible
point and the optimum is among the candidates, so the result is the exact
optimum up to rounding.

* :func:`min_linear` solves min w.x s.t. A x >= c, x >= 0 by vertex
  enumeration (n tight rows among the constraint rows and the zero pins).
* :func:`min_quadratic` solves min sum h x^2 s.t. A x >= c for positive h by
  enumerating linearly independent sets of tight rows. The stationary point
  of a tight set S is x = H^-1 A_S^T l with A_S x = c_S.
* :func:`min_psd_quadratic` solves min x.H x s.t. A x >= c, x >= 0 for a
  positive semidefinite H. Tight sets run over the constraint rows and the
  zero pins; an optimal point exists where the tight rows fix x, so the KKT
  solution of that set is exact.

Linear programs beyond the enumeration budget fall back to the HiGHS dual
simplex (:func:`vertex_linear`), which also returns an optimal vertex.

"""
import itertools
from math import comb

import numpy as np
from scipy.optimize import linprog

from .space import HajlaszLabError

ORACLE_BUDGET = 500000
"""int: Largest number of candidate active sets an oracle enumerates."""

ORACLE_TOL = 1e-9
"""float: Feasibility tolerance of oracle candidates."""

CHUNK = 20000


class OracleError(HajlaszLabError):
    pass


def check_budget(count, budget=None):
    """Raise OracleError when count exceeds the candidate budget."""
    budget = ORACLE_BUDGET if budget is None else budget
    if count > budget:
        raise OracleError('Oracle instance too large: {} candidates exceed budget {}.'.format(count, budget))


def _chunks(m, t, size=CHUNK):
    """Combinations of t out of m rows as (batch, t) index arrays."""
    combos = itertools.combinations(range(m), t)
    while True:
        block = list(itertools.islice(combos, size))
        if not block:
            return
        yield np.array(block, dtype=int).reshape(len(block), t)


def _feasible(X, A, c, lower, upper, tol):
    slack = tol * (1 + np.abs(c))
    ok = np.all(X @ A.T >= c - slack, axis=1)
    ok &= np.all(X >= lower - tol, axis=1)
    ok &= np.all(X <= upper + tol, axis=1)
    return ok


def linear_candidates(m, n):
    return comb(m + n, n)


def min_linear(w, A, c, budget=None, tol=ORACLE_TOL):
    """Minimum of w.x subject to A x >= c and x >= 0.

    Args:
        w (numpy.array): positive objective weights (n)
        A (numpy.array): m x n constraint matrix
        c (numpy.array): m right hand sides
        budget (int): candidate budget. Default ``ORACLE_BUDGET``.

    Returns:
        tuple: (value, x) of an optimal vertex

    Raises:
        OracleError: too many candidate vertices or no feasible vertex
    """
    w, A, c = np.asarray(w, dtype=float), np.asarray(A, dtype=float), np.asarray(c, dtype=float)
    m, n = A.shape
    if m == 0 or n == 0:
        return 0.0, np.zeros(n)
    check_budget(linear_candidates(m, n), budget)
    rows = np.vstack([A, np.eye(n)])
    rhs = np.concatenate([c, np.zeros(n)])
    best, arg = np.inf, None
    for sel in _chunks(m + n, n):
        M = rows[sel]
        regular = np.linalg.matrix_rank(M) == n
        if not regular.any():
            continue
        X = np.linalg.solve(M[regular], rhs[sel[regular]][..., None])[..., 0]
        ok = _feasible(X, A, c, 0.0, np.inf, tol)
        if ok.any():
            obj = X[ok] @ w
            j = int(np.argmin(obj))
            if obj[j] < best:
                best, arg = float(obj[j]), X[ok][j]
    if arg is None:
        raise OracleError('Linear program has no feasible vertex.')
    return best, np.maximum(arg, 0)


def simplex_linear(w, A, c, tol=ORACLE_TOL):
    """Minimum of w.x subject to A x >= c and x >= 0 by dual simplex.

    HiGHS pivots between vertices of the same polyhedron :func:`min_linear`
    enumerates and stops at an optimal one, so the result is a vertex optimum
    for instances too large to enumerate.

    Returns:
        tuple: (value, x) of an optimal vertex

    Raises:
        OracleError: HiGHS did not reach optimum
    """
    w, A, c = np.asarray(w, dtype=float), np.asarray(A, dtype=float), np.asarray(c, dtype=float)
    m, n = A.shape
    if m == 0 or n == 0:
        return 0.0, np.zeros(n)
    res = linprog(w, A_ub=-A, b_ub=-c, bounds=(0, None), method='highs-ds',
                  options={'primal_feasibility_tolerance': tol, 'dual_feasibility_tolerance': tol})
    if res.status != 0:
        raise OracleError('Linear program not solved: {}'.format(res.message))
    x = np.maximum(res.x, 0)
    return float(w @ x), x


def vertex_linear(w, A, c, budget=None):
    """Vertex optimum of w.x subject to A x >= c and x >= 0.

    Vertices are enumerated by :func:`min_linear` when their number fits the
    budget, larger instances go to :func:`simplex_linear`.
    """
    m, n = np.shape(A)
    budget = ORACLE_BUDGET if budget is None else budget
    if linear_candidates(m, n) <= budget:
        return min_linear(w, A, c, budget=budget)
    return simplex_linear(w, A, c)


def quadratic_candidates(m, n):
    return sum(comb(m, t) for t in range(min(m, n) + 1))


def min_quadratic(h, A, c, lower=None, upper=None, budget=None, tol=ORACLE_TOL):
    """Minimum of sum h x^2 subject to A x >= c and lower <= x <= upper.

    The bounds are only checked on candidates, they must not be active at
    the optimum of the problem without bounds (true for every problem built
    in this package).

    Args:
        h (numpy.array): positive diagonal weights (n)
        A (numpy.array): m x n constraint matrix
        c (numpy.array): m right hand sides
        lower (numpy.array): lower bounds. Default -inf.
        upper (numpy.array): upper bounds. Default inf.
        budget (int): candidate budget. Default ``ORACLE_BUDGET``.

    Returns:
        tuple: (value, x) of the best feasible stationary point

    Raises:
        OracleError: too many candidates or no feasible candidate
    """
    h, A, c = np.asarray(h, dtype=float), np.asarray(A, dtype=float), np.asarray(c, dtype=float)
    m, n = A.shape
    lower = np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float)
    check_budget(quadratic_candidates(m, n), budget)
    hinv = 1 / h
    best, arg = np.inf, None
    zero = np.zeros((1, n))
    if _feasible(zero, A, c, lower, upper, tol)[0]:
        best, arg = 0.0, zero[0]
    for t in range(1, min(m, n) + 1):
        for sel in _chunks(m, t):
            As = A[sel]
            At = np.swapaxes(As, 1, 2)
            M = (As * hinv) @ At
            lam = np.linalg.pinv(M, rcond=1e-10, hermitian=True) @ c[sel][..., None]
            X = (At @ lam)[..., 0] * hinv
            ok = _feasible(X, A, c, lower, upper, tol)
            if ok.any():
                obj = (X[ok] ** 2) @ h
                j = int(np.argmin(obj))
                if obj[j] < best:
                    best, arg = float(obj[j]), X[ok][j]
    if arg is None:
        raise OracleError('Quadratic program has no feasible candidate.')
    return best, arg


def psd_quadratic_candidates(m, n):
    return sum(comb(m + n, t) for t in range(n + 1))


def min_psd_quadratic(H, A, c, budget=None, tol=ORACLE_TOL):
    """Minimum of x.H x subject to A x >= c and x >= 0.

    Args:
        H (numpy.array): n x n positive semidefinite matrix
        A (numpy.array): m x n constraint matrix
        c (numpy.array): m right hand sides
        budget (int): candidate budget. Default ``ORACLE_BUDGET``.

    Returns:
        tuple: (value, x) of the best feasible candidate

    Raises:
        OracleError: too many candidates or no feasible candidate
    """
    H, A, c = np.asarray(H, dtype=float), np.asarray(A, dtype=float), np.asarray(c, dtype=float)
    m, n = A.shape
    if m == 0 or n == 0:
        return 0.0, np.zeros(n)
    check_budget(psd_quadratic_candidates(m, n), budget)
    rows = np.vstack([A, np.eye(n)])
    rhs = np.concatenate([c, np.zeros(n)])
    best, arg = np.inf, None
    zero = np.zeros((1, n))
    if _feasible(zero, A, c, 0.0, np.inf, tol)[0]:
        best, arg = 0.0, zero[0]
    for t in range(1, n + 1):
        for sel in _chunks(m + n, t, size=CHUNK // 10):
            B = rows[sel]
            K = np.zeros((len(sel), n + t, n + t))
            K[:, :n, :n] = 2 * H
            K[:, :n, n:] = -np.swapaxes(B, 1, 2)
            K[:, n:, :n] = B
            b = np.zeros((len(sel), n + t, 1))
            b[:, n:, 0] = rhs[sel]
            # x is unique at an optimal vertex even when the multipliers are not
            X = (np.linalg.pinv(K, rcond=1e-10) @ b)[:, :n, 0]
            ok = _feasible(X, A, c, 0.0, np.inf, tol)
            if ok.any():
                obj = np.einsum('bi,ij,bj->b', X[ok], H, X[ok])
                j = int(np.argmin(obj))
                if obj[j] < best:
                    best, arg = float(obj[j]), X[ok][j]
    if arg is None:
        raise OracleError('Quadratic program has no feasible candidate.')
    return best, np.maximum(arg, 0)
