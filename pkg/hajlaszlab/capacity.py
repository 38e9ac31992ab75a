"""Capacities of sets and their structural inequalities.

The capacity of a nonempty set E is

    C(E) = inf {(||u||_{L^p} + seminorm(u))^p : u = 1 on E, 0 <= u <= 1}

where the seminorm is given by :class:`~hajlaszlab.norms.NormParams`. On a
finite space every set is open, so u = 1 on E itself is the admissibility
condition.

"""
import csv
import warnings
from pathlib import Path

import numpy as np
import cvxpy as cp
from scipy import sparse
from scipy.optimize import minimize_scalar
from tqdm import tqdm

from .activeset import OracleError, check_budget, min_quadratic, quadratic_candidates, vertex_linear
from .median import DEFAULT_GAMMA
from .norms import (SolverCertificate, UpperBoundWarning, aggregate_rows, check_oracle_params, full_norm_certificate,
                    gradient_scales, lp_expression, lp_norm, min_norm_gradient, pair_bands, repair, seminorm_expression,
                    solve_problem, spread_rows, variable_rows, weakest)
from .smoothing import median_maximal, restricted_maximal
from .space import ParameterError, as_subset, as_values

CAPACITY_ORACLE_MAX_POINTS = 10
"""int: Largest space accepted by the capacity oracle."""


class CapacityProblem(object):
    """Capacity of a set for given seminorm parameters.

    Args:
        space (MetricMeasureSpace): space
        E: WeightedSubset or iterable of indices (nonempty)
        params (NormParams): seminorm parameters

    Raises:
        SpaceError: E is empty or out of range
    """
    def __init__(self, space, E, params):
        self.space = space
        self.E = as_subset(space, E)
        self.params = params

    def __repr__(self):
        return 'Capacity of {} points in {} point space, {}'.format(len(self.E), self.space.n, self.params)

    @property
    def whole(self):
        """True when E is the whole space"""
        return len(self.E) == self.space.n


def _difference(I, J, n):
    m = len(I)
    rows = np.repeat(np.arange(m), 2)
    cols = np.column_stack([I, J]).ravel()
    vals = np.tile([1.0, -1.0], m)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(m, n))


def _incidence(I, J, n):
    return abs(_difference(I, J, n))


def _witness(problem, u, raw):
    """Clip u to the box, pin E, repair raw gradient rows for the new u."""
    space, params = problem.space, problem.params
    u = np.clip(u, 0, 1)
    u[problem.E.indices] = 1
    bands = pair_bands(space, u, params.s)
    rows = variable_rows(bands, params.flavor, active_only=False)
    G, residual = repair(raw, rows, space.n)
    value = (lp_norm(space, u, params.p) + aggregate_rows(G, params, space.mass)) ** params.p
    return value, u, spread_rows(G, rows, gradient_scales(space, bands), space.n), residual


def capacity(problem, solver=None):
    """Capacity by joint convex minimization over u and gradients.

    Non-convex exponents (p < 1 or q < 1) use the witness of the convexified
    problem and the local search of :func:`min_norm_gradient`, the value is
    an upper bound.

    Args:
        problem (CapacityProblem): capacity problem
        solver (str): force cvxpy solver. Default first of ``SOLVERS``.

    Returns:
        tuple: (value, witness u, FractionalGradient, SolverCertificate)

    Example:
        >>> X = MetricMeasureSpace([[0, 1], [1, 0]])
        >>> round(capacity(CapacityProblem(X, [0], NormParams(1, 1, 1)))[0], 5)
        2.0
    """
    space, params = problem.space, problem.params
    n, mass = space.n, space.mass
    if problem.whole:
        u = np.ones(n)
        bands = pair_bands(space, u, params.s)
        return space.total_mass, u, spread_rows(np.zeros((0, n)), [], gradient_scales(space, bands), n), \
            SolverCertificate('certified', 'trivial')
    convex = params if params.certified else params.convexified
    bands = pair_bands(space, np.zeros(n), params.s)
    rows = variable_rows(bands, params.flavor, active_only=False)
    u = cp.Variable(n)
    G = cp.Variable((len(rows), n), nonneg=True)
    seminorm, constraints = seminorm_expression(G, convex, mass)
    constraints += [u[problem.E.indices] == 1, u >= 0, u <= 1]
    for r, row in enumerate(rows):
        for b in row:
            D = _difference(b.I, b.J, n)
            scale = space.dist[b.I, b.J] ** params.s
            rhs = cp.multiply(scale, _incidence(b.I, b.J, n) @ G[r])
            constraints += [D @ u <= rhs, -(D @ u) <= rhs]
    objective = lp_expression(u, mass, convex.p) + seminorm
    cvx = cp.Problem(cp.Minimize(objective), constraints)
    method = solve_problem(cvx, solver)
    value, witness, gradient, residual = _witness(problem, np.array(u.value), G.value)
    if params.certified:
        gap = value - float(cvx.value) ** params.p
        return value, witness, gradient, SolverCertificate('certified', method, residual, gap)
    warnings.warn('Exponents p={:g}, q={:g} are not convex, capacity is an upper bound.'.format(params.p, params.q),
                  UpperBoundWarning)
    gradient, seminorm_value, cert = min_norm_gradient(space, witness, params)
    value = (lp_norm(space, witness, params.p) + seminorm_value) ** params.p
    return value, witness, gradient, SolverCertificate('upper-bound', cert.method, residual, cert.gap)


def _quadratic_seminorm(params):
    if params.flavor in ('besov', 'tl'):
        return params.q == 2 or (params.flavor == 'tl' and params.q == np.inf)
    return True


class _JointProgram(object):
    """Joint (u, g) constraint rows of a capacity problem.

    Variables are the free values of u followed by the gradient entries of
    points incident to a constrained pair. Each pair gives the two rows
    D (g_r(x) + g_r(y)) >= +-(u(x) - u(y)) with D = d(x, y)^s and u = 1 on E
    moved to the right hand side. Pairs inside E are always satisfied and
    dropped.
    """
    def __init__(self, problem, flavor):
        space, params = problem.space, problem.params
        n = space.n
        self.mass = space.mass
        inE = problem.E.mask
        self.free = np.flatnonzero(~inE)
        ufree = -np.ones(n, dtype=int)
        ufree[self.free] = np.arange(len(self.free))
        bands = pair_bands(space, np.zeros(n), params.s)
        rows = variable_rows(bands, flavor, active_only=False)
        self.nrows = len(rows)
        pairs = []
        for r, row in enumerate(rows):
            for b in row:
                keep = ~(inE[b.I] & inE[b.J])
                for x, y in zip(b.I[keep], b.J[keep]):
                    pairs.append((r, x, y, space.dist[x, y] ** params.s))
        self.gvars = sorted(set((r, x) for r, x, _, _ in pairs) | set((r, y) for r, _, y, _ in pairs))
        gidx = {v: len(self.free) + j for j, v in enumerate(self.gvars)}
        self.nf = len(self.free)
        self.nz = self.nf + len(self.gvars)
        self.gmass = np.array([space.mass[x] for _, x in self.gvars])
        A, c = [], []
        f = inE.astype(float)
        for r, x, y, D in pairs:
            for sign in (1.0, -1.0):
                a = np.zeros(self.nz)
                a[gidx[(r, x)]] += D
                a[gidx[(r, y)]] += D
                if ufree[x] >= 0:
                    a[ufree[x]] -= sign
                if ufree[y] >= 0:
                    a[ufree[y]] += sign
                A.append(a)
                c.append(sign * (f[x] - f[y]))
        self.A = np.array(A).reshape(-1, self.nz)
        self.c = np.array(c)
        self.fixed_mass = float(space.mass[inE].sum())


class _SplitQuadratic(_JointProgram):
    """Joint (u, g) program of the p = 2 oracle for a fixed split theta."""
    def __init__(self, problem):
        params = problem.params
        # TL with q = inf has the single gradient seminorm
        super().__init__(problem, 'hajlasz' if params.q == np.inf else params.flavor)
        self.lower = np.zeros(self.nz)
        self.upper = np.concatenate([np.ones(self.nf), np.full(self.nz - self.nf, np.inf)])

    @property
    def candidates(self):
        return quadratic_candidates(len(self.c), self.nz)

    def solve(self, theta, budget=None):
        h = np.concatenate([self.mass[self.free] / theta, self.gmass / (1 - theta)])
        value, z = min_quadratic(h, self.A, self.c, self.lower, self.upper, budget=budget)
        return value + self.fixed_mass / theta, z

    def split_value(self, z):
        """(||u||_2 + ||g||)^2 of a candidate"""
        a = np.sqrt(self.fixed_mass + np.dot(self.mass[self.free], z[:self.nf] ** 2))
        b = np.sqrt(np.dot(self.gmass, z[self.nf:] ** 2))
        return float((a + b) ** 2)


def _linear_capacity(problem, budget=None):
    """Exact p = 1 capacity as a vertex optimum of the joint (u, g) program.

    The box u <= 1 enters as rows. Besov with q = inf adds an epigraph
    variable t >= ||g_k||_1 per band and minimizes t.

    Raises:
        OracleError: Besov with q = 2, whose objective is not linear
    """
    params = problem.params
    single = params.flavor == 'hajlasz' or (params.flavor == 'tl' and params.q == np.inf)
    if not single and params.q == 2:
        raise OracleError('Capacity oracle with p=1 needs q in {{1, inf}}, got {}.'.format(params))
    prog = _JointProgram(problem, 'hajlasz' if single else 'besov')
    box = np.hstack([-np.eye(prog.nf), np.zeros((prog.nf, prog.nz - prog.nf))])
    A = np.vstack([prog.A, box])
    c = np.concatenate([prog.c, -np.ones(prog.nf)])
    if single or params.q == 1:
        w = np.concatenate([prog.mass[prog.free], prog.gmass])
    else:
        rows = np.zeros((prog.nrows, prog.nz + 1))
        for j, (r, _) in enumerate(prog.gvars):
            rows[r, prog.nf + j] = -prog.gmass[j]
        rows[:, -1] = 1
        A = np.vstack([np.hstack([A, np.zeros((len(A), 1))]), rows])
        c = np.concatenate([c, np.zeros(prog.nrows)])
        w = np.concatenate([prog.mass[prog.free], np.zeros(len(prog.gvars)), [1.0]])
    value, _ = vertex_linear(w, A, c, budget=budget)
    return value + prog.fixed_mass


def capacity_oracle(problem, budget=None):
    """Exact capacity for small spaces.

    For p = 1 the joint problem over u and the gradient is a linear program.
    Its optimum is often fractional, so it is solved over the vertices of the
    joint polyhedron by :func:`~hajlaszlab.activeset.vertex_linear`. For
    p = 2 with a quadratic squared seminorm the identity
    (a + b)^2 = min_theta a^2/theta + b^2/(1 - theta) turns the problem into
    a convex one dimensional search over quadratic programs solved exactly by
    active set enumeration.

    Raises:
        OracleError: more than ``CAPACITY_ORACLE_MAX_POINTS`` points,
            unsupported exponents or too many candidates
    """
    space, params = problem.space, problem.params
    check_oracle_params(space, params, CAPACITY_ORACLE_MAX_POINTS)
    if problem.whole:
        return space.total_mass
    if params.p == 1:
        return _linear_capacity(problem, budget)
    if not _quadratic_seminorm(params):
        raise OracleError('Capacity oracle with p=2 needs a quadratic seminorm, got {}.'.format(params))
    split = _SplitQuadratic(problem)
    check_budget(split.candidates, budget)
    res = minimize_scalar(lambda theta: split.solve(theta, budget)[0], bounds=(1e-9, 1 - 1e-9),
                          method='bounded', options={'xatol': 1e-12})
    return split.split_value(split.solve(res.x, budget)[1])


def random_families(space, trials, seed=0):
    """Random families of 2 to 4 subsets of sizes 1 to n/2.

    Returns:
        list: list of lists of WeightedSubset
    """
    rng = np.random.default_rng(seed)
    top = max(1, space.n // 2)
    families = []
    for _ in range(trials):
        count = int(rng.integers(2, 5))
        family = [space.subset(rng.choice(space.n, size=int(rng.integers(1, top + 1)), replace=False))
                  for _ in range(count)]
        families.append(family)
    return families


class SubadditivityReport(object):
    """Ratios C(union)^r / sum C(E_i)^r of set families.

    Attributes:
        r (float): exponent min(1, q/p)
        constant (float): 2^(pr+1)
        rows (list): dicts with family, sizes, union, total, ratio, status
            and certificate
    """
    columns = ('family', 'sizes', 'union', 'total', 'ratio', 'status', 'certificate')

    def __init__(self, params, rows):
        self.params = params
        self.r = min(1.0, params.q / params.p)
        self.constant = 2 ** (params.p * self.r + 1)
        self.rows = rows

    def __repr__(self):
        return 'r-subadditivity r={:g}: max ratio {:.4g} vs constant {:.4g}, {} failures, {} flagged'.format(
            self.r, self.max_ratio, self.constant, len(self.failures), len(self.flagged))

    @property
    def max_ratio(self):
        return max((row['ratio'] for row in self.rows), default=0.0)

    @property
    def failures(self):
        return [row for row in self.rows if row['status'] == 'fail']

    @property
    def flagged(self):
        return [row for row in self.rows if row['status'] == 'flagged']

    @property
    def ok(self):
        return not self.failures

    def to_csv(self, filename):
        with Path(filename).open('w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([row['family'], ' '.join(str(s) for s in row['sizes']), repr(row['union']),
                                 repr(row['total']), repr(row['ratio']), row['status'], row['certificate']])


def _status(ratio, constant, flavor):
    tol = 1e-9 * constant
    if ratio <= constant + tol:
        return 'ok'
    if flavor != 'besov' and ratio <= 2 * constant + tol:
        return 'flagged'
    return 'fail'


def r_subadditivity_check(space, families, params, method='solver', progress=False):
    """Compare capacity of unions with sums of capacities.

    Besov rows above the constant 2^(pr+1) fail, TL and Hajlasz rows are
    flagged up to twice the constant and fail beyond.

    Args:
        space (MetricMeasureSpace): space
        families: iterable of families (lists of subsets or index lists)
        params (NormParams): seminorm parameters
        method (str): 'solver' or 'oracle'. Default 'solver'.
        progress (bool): show progress bar. Default False.

    Returns:
        SubadditivityReport: per family ratios and statuses
    """
    cap = capacity_function(space, params, method)
    report = SubadditivityReport(params, [])
    for ix, family in enumerate(tqdm(list(families), desc='Families', disable=not progress)):
        family = [as_subset(space, E) for E in family]
        union = family[0]
        for E in family[1:]:
            union = union.union(E)
        cu = cap(union)
        total = sum(cap(E) ** report.r for E in family)
        ratio = cu ** report.r / total
        report.rows.append({'family': ix, 'sizes': [len(E) for E in family], 'union': cu,
                            'total': float(total), 'ratio': float(ratio),
                            'status': _status(ratio, report.constant, params.flavor),
                            'certificate': cap.mode(union, *family)})
    return report


class CapacityCache(object):
    """Cached capacity of subsets, E -> C(E).

    Every set remembers the certificate mode of its value. Oracle values are
    certified.

    Args:
        space (MetricMeasureSpace): space
        params (NormParams): seminorm parameters
        method (str): 'solver' or 'oracle'. Default 'solver'.

    Raises:
        ParameterError: unknown method
    """
    def __init__(self, space, params, method='solver'):
        if method not in ('solver', 'oracle'):
            raise ParameterError('Unknown capacity method {}.'.format(method))
        self.space = space
        self.params = params
        self.method = method
        self.cache = {}

    def __repr__(self):
        return 'Capacities of {} sets by {}'.format(len(self.cache), self.method)

    def __call__(self, E):
        E = as_subset(self.space, E)
        if E not in self.cache:
            problem = CapacityProblem(self.space, E, self.params)
            if self.method == 'solver':
                value, _, _, cert = capacity(problem)
                self.cache[E] = (value, cert.mode)
            else:
                self.cache[E] = (capacity_oracle(problem), 'certified')
        return self.cache[E][0]

    def mode(self, *sets):
        """Weakest certificate mode of the given sets, computing them if needed."""
        for E in sets:
            self(E)
        return weakest(*(self.cache[as_subset(self.space, E)][1] for E in sets))

    @property
    def certificate(self):
        """Weakest certificate mode over all cached sets"""
        return weakest(*(mode for _, mode in self.cache.values()))


def capacity_function(space, params, method='solver'):
    """Cached capacity of subsets, E -> C(E), as :class:`CapacityCache`.

    Raises:
        ParameterError: unknown method
    """
    return CapacityCache(space, params, method)


class WeakTypeReport(object):
    """Weak type ratio of a maximal function.

    Attributes:
        ratio (float): R(u)
        levels (numpy.array): 0 = v_0 < v_1 < ... distinct values of the
            maximal function
        terms (numpy.array): v_(j+1)^p C({M u > v_j}) per level
        norm (float): full norm of u
        certificate (str): weakest certificate mode of the norm and the
            capacities
    """
    def __init__(self, levels, terms, norm, p, certificate='certified'):
        self.levels = levels
        self.terms = terms
        self.norm = norm
        self.certificate = certificate
        self.ratio = float(terms.max() / norm ** p) if len(terms) else 0.0

    def __repr__(self):
        return 'Weak type ratio {:.6g} over {} levels ({})'.format(self.ratio, len(self.terms), self.certificate)

    @property
    def witness(self):
        """Level v_j realizing the ratio"""
        return float(self.levels[int(np.argmax(self.terms))]) if len(self.terms) else None


def weak_type_ratio(space, u, params, gamma=DEFAULT_GAMMA, method='solver', radius=None):
    """Weak type ratio sup_lambda lambda^p C({M u > lambda}) / ||u||^p.

    M is the median maximal function M^gamma, or the restricted maximal
    function M_R of averages when ``radius`` R is given. The level set is
    constant for lambda in [v_j, v_(j+1)), so the sup is the max over
    consecutive distinct values of v_(j+1)^p C({M u > v_j}).

    Raises:
        ParameterError: u has zero norm
    """
    vals = as_values(space, u)
    norm, cert = full_norm_certificate(space, vals, params)
    if not norm > 0:
        raise ParameterError('Weak type ratio needs a function with positive norm.')
    if radius is None:
        M = np.asarray(median_maximal(space, vals, gamma))
    else:
        M = np.asarray(restricted_maximal(space, vals, radius))
    levels = np.unique(np.concatenate([[0.0], M[M > 0]]))
    cap = capacity_function(space, params, method)
    terms = np.array([levels[j + 1] ** params.p * cap(np.flatnonzero(M > levels[j]))
                      for j in range(len(levels) - 1)])
    return WeakTypeReport(levels, terms, norm, params.p, weakest(cert.mode, cap.certificate))
