"""Fractional s-gradients and Hajlasz type seminorms.

A family (g_k) of nonnegative functions is a fractional s-gradient of u when

    |u(x) - u(y)| <= d(x, y)^s (g_k(x) + g_k(y))

for every pair in the dyadic band 2^(-k-1) <= d(x, y) < 2^-k. Seminorms are
minimum norms of gradients:

* besov: l^q(L^p), (sum_k ||g_k||_p^q)^(1/q)
* tl: L^p(l^q), ||(sum_k g_k^q)^(1/q)||_p
* hajlasz: tl with q = inf, solved as one gradient over all pairs

Certified minimization (p, q >= 1) is a convex program solved with cvxpy.
Smaller exponents use a multi-start local search and are upper bounds only.

"""
import csv
import warnings

import numpy as np
import cvxpy as cp
from scipy import sparse
from scipy.optimize import minimize

from .activeset import OracleError, min_linear, min_psd_quadratic, min_quadratic
from .smoothing import ScaleRange
from .space import HajlaszLabError, ParameterError, as_values

FEASIBILITY_TOL = 1e-9
"""float: Absolute slack tolerance of gradient feasibility."""

SOLVERS = ('CLARABEL', 'ECOS', 'SCS')
"""tuple: Convex solvers tried in order among the installed ones."""

ORACLE_MAX_POINTS = 12
"""int: Largest space accepted by the exact oracles."""

FLAVORS = ('besov', 'tl', 'hajlasz')


class SolverError(HajlaszLabError):
    pass


class UpperBoundWarning(UserWarning):
    pass


class NormParams(object):
    """Parameters of a Hajlasz type seminorm.

    Args:
        s (float): smoothness in (0, 1]
        p (float): integrability exponent > 0
        q (float): summability exponent > 0 or inf. Default inf.
        flavor (str): 'besov', 'tl' or 'hajlasz'. Default 'besov'.

    Raises:
        ParameterError: invalid value or finite q with hajlasz flavor
    """
    def __init__(self, s, p, q=np.inf, flavor='besov'):
        flavor = str(flavor).lower()
        if flavor not in FLAVORS:
            raise ParameterError('Unknown flavor {}. Use one of {}.'.format(flavor, ', '.join(FLAVORS)))
        s, p, q = float(s), float(p), float(q)
        if not 0 < s <= 1:
            raise ParameterError('Smoothness s must be in (0, 1], got {}.'.format(s))
        if not (0 < p < np.inf):
            raise ParameterError('Exponent p must be positive and finite, got {}.'.format(p))
        if not q > 0:
            raise ParameterError('Exponent q must be positive, got {}.'.format(q))
        if flavor == 'hajlasz' and q != np.inf:
            raise ParameterError('Hajlasz flavor requires q = inf, got {}.'.format(q))
        self.s, self.p, self.q, self.flavor = s, p, q, flavor

    def __repr__(self):
        return 'NormParams(s={:g}, p={:g}, q={:g}, flavor={})'.format(self.s, self.p, self.q, self.flavor)

    def __eq__(self, other):
        return isinstance(other, NormParams) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        return (self.s, self.p, self.q, self.flavor)

    @property
    def certified(self):
        """True when the minimization is convex"""
        return self.p >= 1 and self.q >= 1

    @property
    def convexified(self):
        """Same parameters with p and q raised to at least 1"""
        return NormParams(self.s, max(self.p, 1), max(self.q, 1), self.flavor)

    def to_dict(self):
        return {'s': self.s, 'p': self.p, 'q': 'inf' if self.q == np.inf else self.q, 'flavor': self.flavor}

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        unknown = set(data) - {'s', 'p', 'q', 'flavor'}
        if unknown:
            raise ParameterError('Unknown norm parameters {}.'.format(', '.join(sorted(unknown))))
        try:
            return cls(data['s'], data['p'], data.get('q', np.inf), data.get('flavor', 'besov'))
        except KeyError as e:
            raise ParameterError('Missing norm parameter {}.'.format(e))


class FractionalGradient(object):
    """Nonnegative gradient rows g_k for k in a scale range.

    Args:
        scales (ScaleRange): scales of the rows
        g: K x n array-like, row ``scales.index(k)`` is g_k

    Raises:
        ParameterError: wrong shape or negative entries
    """
    def __init__(self, scales, g):
        g = np.array(g, dtype=float)
        if g.ndim != 2 or g.shape[0] != len(scales):
            raise ParameterError('Gradient needs {} rows, got shape {}.'.format(len(scales), g.shape))
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ParameterError('Gradient entries must be finite and nonnegative.')
        self.scales = scales
        self.g = g
        self.g.flags.writeable = False

    def __repr__(self):
        return 'Fractional gradient on {} points, scales {}..{}'.format(self.n, self.scales.k_min, self.scales.k_max)

    def __getitem__(self, k):
        if k not in self.scales:
            return np.zeros(self.n)
        return self.g[self.scales.index(k)]

    @property
    def n(self):
        return self.g.shape[1]

    @classmethod
    def zeros(cls, scales, n):
        return cls(scales, np.zeros((len(scales), n)))

    def to_csv(self, filename):
        """Write gradient as CSV with one column per scale."""
        with open(filename, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['index'] + ['k={}'.format(k) for k in self.scales])
            for x in range(self.n):
                writer.writerow([x] + [repr(float(v)) for v in self.g[:, x]])


class PairBand(object):
    """Pairs of one dyadic band with constraint data c = |du| / d^s.

    Attributes:
        k (int): scale index
        I, J (numpy.array): pair endpoints with I < J
        c (numpy.array): constraint values
    """
    def __init__(self, k, I, J, c):
        self.k = int(k)
        self.I = np.asarray(I, dtype=int)
        self.J = np.asarray(J, dtype=int)
        self.c = np.asarray(c, dtype=float)

    def __repr__(self):
        return 'Band k={} with {} pairs'.format(self.k, len(self))

    def __len__(self):
        return len(self.c)

    @property
    def pairs(self):
        """Iterator over (x, y, c) triples"""
        return zip(self.I.tolist(), self.J.tolist(), self.c.tolist())

    @property
    def active(self):
        """True when some constraint is nontrivial"""
        return bool(np.any(self.c > 0))

    def slack(self, g):
        """g(x) + g(y) - c per pair"""
        return g[self.I] + g[self.J] - self.c


class SolverCertificate(object):
    """Quality record of a minimum norm computation.

    Attributes:
        mode (str): 'certified' or 'upper-bound'
        method (str): solver name, 'multistart', 'canonical' or 'trivial'
        residual (float): largest constraint violation of the raw solution
        gap (float): reported value minus value of the raw solution
    """
    def __init__(self, mode, method, residual=0.0, gap=0.0):
        self.mode = mode
        self.method = method
        self.residual = float(residual)
        self.gap = float(gap)

    def __repr__(self):
        return '{} ({}), residual {:.3g}, gap {:.3g}'.format(self.mode, self.method, self.residual, self.gap)

    @property
    def certified(self):
        return self.mode == 'certified'

    def to_dict(self):
        return {'mode': self.mode, 'method': self.method, 'residual': self.residual, 'gap': self.gap}


def weakest(*modes):
    """'upper-bound' if any mode is not certified, else 'certified'"""
    return 'certified' if all(m == 'certified' for m in modes) else 'upper-bound'


def pair_bands(space, u, s):
    """Partition all pairs x < y by dyadic band of their distance.

    Args:
        space (MetricMeasureSpace): space
        u: function values
        s (float): smoothness

    Returns:
        list: PairBand per nonempty band, increasing k

    Example:
        >>> X = MetricMeasureSpace([[0, 1], [1, 0]])
        >>> [b.k for b in pair_bands(X, [0, 1], 1)]
        [-1]
    """
    vals = as_values(space, u)
    I, J = np.triu_indices(space.n, 1)
    d = space.dist[I, J]
    # binary exponent gives 2^(-k-1) <= d < 2^-k exactly
    ks = -np.frexp(d)[1]
    c = np.abs(vals[I] - vals[J]) / d ** s
    bands = []
    for k in np.unique(ks):
        sel = ks == k
        bands.append(PairBand(k, I[sel], J[sel], c[sel]))
    return bands


def gradient_scales(space, bands):
    scales = ScaleRange.from_space(space)
    if bands:
        scales = ScaleRange(min(scales.k_min, bands[0].k), max(scales.k_max, bands[-1].k))
    return scales


def is_feasible(gradient, bands, tol=FEASIBILITY_TOL):
    """True iff g_k(x) + g_k(y) >= c_xy - tol for every banded pair."""
    return all(np.all(b.slack(gradient[b.k]) >= -tol) for b in bands)


def canonical_gradient(space, u, s):
    """Half split gradient g_k(x) = max_y c_xy / 2 over band partners.

    Example:
        >>> X = MetricMeasureSpace([[0, 1], [1, 0]])
        >>> canonical_gradient(X, [0, 1], 0.5)[-1]
        array([0.5, 0.5])
    """
    bands = pair_bands(space, u, s)
    scales = gradient_scales(space, bands)
    g = np.zeros((len(scales), space.n))
    for b in bands:
        row = g[scales.index(b.k)]
        np.maximum.at(row, b.I, b.c / 2)
        np.maximum.at(row, b.J, b.c / 2)
    return FractionalGradient(scales, g)


def lp_norm(space, v, p):
    """L^p(mu) norm (quasi-norm for p < 1, max for p = inf)."""
    v = np.abs(as_values(space, v))
    if p == np.inf:
        return float(v.max())
    return float(np.dot(space.mass, v ** p) ** (1 / p))


def aggregate_rows(G, params, mass):
    p, q = params.p, params.q
    if G.shape[0] == 0:
        return 0.0
    if params.flavor == 'besov':
        rows = (G ** p @ mass) ** (1 / p)
        return float(rows.max() if q == np.inf else np.sum(rows ** q) ** (1 / q))
    h = G.max(axis=0) if q == np.inf else np.sum(G ** q, axis=0) ** (1 / q)
    return float(np.dot(mass, h ** p) ** (1 / p))


def aggregate_norm(gradient, params, space):
    """Besov, TL or Hajlasz norm of a fractional gradient.

    Example:
        >>> X = MetricMeasureSpace([[0, 1], [1, 0]])
        >>> g = canonical_gradient(X, [0, 1], 1)
        >>> round(aggregate_norm(g, NormParams(1, 2, 2), X), 5)
        0.70711
    """
    return aggregate_rows(gradient.g, params, space.mass)


def lattice_gradient(gradients):
    """Pointwise maximum of gradients on common scales.

    Raises:
        ParameterError: no gradient or mismatched scales
    """
    gradients = list(gradients)
    if not gradients:
        raise ParameterError('Lattice gradient needs at least one gradient.')
    scales = gradients[0].scales
    if any(gr.scales != scales or gr.n != gradients[0].n for gr in gradients):
        raise ParameterError('Gradients live on different scales or spaces.')
    return FractionalGradient(scales, np.maximum.reduce([gr.g for gr in gradients]))


def _incidence(I, J, n):
    m = len(I)
    rows = np.repeat(np.arange(m), 2)
    cols = np.column_stack([I, J]).ravel()
    return sparse.csr_matrix((np.ones(2 * m), (rows, cols)), shape=(m, n))


def variable_rows(bands, flavor, active_only=True):
    """Variable rows: list of (bands of the row). Hajlasz has one row."""
    active = [b for b in bands if b.active or not active_only]
    if flavor == 'hajlasz':
        return [active] if active else []
    return [[b] for b in active]


def _row_data(row, n):
    I = np.concatenate([b.I for b in row])
    J = np.concatenate([b.J for b in row])
    c = np.concatenate([b.c for b in row])
    keep = c > 0
    return _incidence(I[keep], J[keep], n), c[keep]


def repair(G, rows, n):
    """Clip G to nonnegative and raise endpoints to exact feasibility.

    Each deficient pair raises both endpoints by half its deficit, so after
    the repair every constraint holds.

    Returns:
        tuple: (repaired G, largest violation before the repair)
    """
    G = np.array(G, dtype=float)
    residual = max(0.0, float(-G.min())) if G.size else 0.0
    G = np.maximum(G, 0)
    for r, row in enumerate(rows):
        for b in row:
            deficit = -b.slack(G[r])
            if np.any(deficit > 0):
                residual = max(residual, float(deficit.max()))
                bump = np.zeros(n)
                half = np.maximum(deficit, 0) / 2
                np.maximum.at(bump, b.I, half)
                np.maximum.at(bump, b.J, half)
                G[r] += bump
    return G, residual


def spread_rows(G, rows, scales, n):
    """Gradient with variable rows copied to the scales of their bands."""
    g = np.zeros((len(scales), n))
    for r, row in enumerate(rows):
        for b in row:
            g[scales.index(b.k)] = G[r]
    return FractionalGradient(scales, g)


def _cp_norm(expr, p, axis=None):
    if p == np.inf:
        return cp.max(expr, axis=axis)
    if p == 1:
        return cp.sum(expr, axis=axis)
    return cp.pnorm(expr, p, axis=axis)


def lp_expression(g, mass, p):
    return _cp_norm(cp.multiply(mass ** (1 / p), g), p)


def solve_problem(problem, solver=None):
    """Solve cvxpy problem with the first installed solver that succeeds.

    Returns:
        str: name of the solver

    Raises:
        SolverError: no solver reached an optimal status
    """
    names = [solver] if solver is not None else [s for s in SOLVERS if s in cp.installed_solvers()]
    if not names:
        raise SolverError('None of the solvers {} is installed.'.format(', '.join(SOLVERS)))
    messages = []
    for name in names:
        try:
            problem.solve(solver=name)
        except cp.error.SolverError as e:
            messages.append('{}: {}'.format(name, e))
            continue
        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return name
        messages.append('{}: {}'.format(name, problem.status))
    raise SolverError('No solver reached optimum ({}).'.format('; '.join(messages)))


def seminorm_expression(G, params, mass):
    """cvxpy aggregate norm of variable rows G with auxiliary constraints.

    Returns:
        tuple: (expression, list of constraints)
    """
    if params.flavor == 'besov':
        t = cp.Variable(G.shape[0])
        return _cp_norm(t, params.q), [t[r] >= lp_expression(G[r], mass, params.p) for r in range(G.shape[0])]
    return lp_expression(_cp_norm(G, params.q, axis=0), mass, params.p), []


def _certified_rows(rows, params, mass, joint, solver):
    """Solve the convex program, return raw variable rows and solver name."""
    n = len(mass)
    p = params.p
    data = [_row_data(row, n) for row in rows]
    if params.flavor == 'besov' and not joint:
        G, names = np.zeros((len(rows), n)), set()
        for r, (A, c) in enumerate(data):
            g = cp.Variable(n, nonneg=True)
            problem = cp.Problem(cp.Minimize(lp_expression(g, mass, p)), [A @ g >= c])
            names.add(solve_problem(problem, solver))
            G[r] = g.value
        return G, '+'.join(sorted(names))
    G = cp.Variable((len(rows), n), nonneg=True)
    objective, constraints = seminorm_expression(G, params, mass)
    constraints += [A @ G[r] >= c for r, (A, c) in enumerate(data)]
    problem = cp.Problem(cp.Minimize(objective), constraints)
    name = solve_problem(problem, solver)
    return G.value, name


def _multistart_rows(rows, params, mass, start_rows, starts, seed):
    """Local search from several starting points, best repaired result."""
    n = len(mass)
    data = [_row_data(row, n) for row in rows]
    A = sparse.block_diag([a for a, _ in data], format='csr').toarray()
    c = np.concatenate([cc for _, cc in data])
    shape = (len(rows), n)
    rng = np.random.default_rng(seed)
    candidates = list(start_rows)
    candidates += [start_rows[0] * rng.uniform(0.5, 1.5, shape) for _ in range(starts)]
    best, best_raw = None, None
    for x0 in candidates:
        res = minimize(lambda x: aggregate_rows(np.abs(x).reshape(shape), params, mass), x0.ravel(), method='SLSQP',
                       bounds=[(0, None)] * x0.size,
                       constraints=[{'type': 'ineq', 'fun': lambda x: A @ x - c, 'jac': lambda x: A}],
                       options={'maxiter': 500})
        x = res.x if np.all(np.isfinite(res.x)) else x0.ravel()
        G, residual = repair(x.reshape(shape), rows, n)
        value = aggregate_rows(G, params, mass)
        if best is None or value < best[1]:
            best, best_raw = (G, value, residual), aggregate_rows(np.maximum(x, 0).reshape(shape), params, mass)
    return best, best_raw


def min_norm_gradient(space, u, params, joint=False, solver=None, starts=8, seed=0):
    """Feasible gradient of (nearly) minimal aggregate norm.

    Args:
        space (MetricMeasureSpace): space
        u: function values
        params (NormParams): seminorm parameters
        joint (bool): solve Besov bands in one program. Default False.
        solver (str): force cvxpy solver. Default first of ``SOLVERS``.
        starts (int): perturbed starts of the local search used for p < 1
            or q < 1. Default 8.
        seed (int): seed of the perturbations. Default 0.

    Returns:
        tuple: (FractionalGradient, seminorm value, SolverCertificate)

    Raises:
        SolverError: no convex solver reached optimum

    Example:
        >>> X = MetricMeasureSpace([[0, 1], [1, 0]])
        >>> g, v, cert = min_norm_gradient(X, [0, 1], NormParams(1, 1, 1))
        >>> round(v, 6), cert.mode
        (1.0, 'certified')
    """
    bands = pair_bands(space, u, params.s)
    scales = gradient_scales(space, bands)
    rows = variable_rows(bands, params.flavor)
    mass, n = space.mass, space.n
    if not rows:
        return FractionalGradient.zeros(scales, n), 0.0, SolverCertificate('certified', 'trivial')
    if params.certified:
        raw, method = _certified_rows(rows, params, mass, joint, solver)
        G, residual = repair(raw, rows, n)
        value = aggregate_rows(G, params, mass)
        gap = value - aggregate_rows(np.maximum(raw, 0), params, mass)
        return spread_rows(G, rows, scales, n), value, SolverCertificate('certified', method, residual, gap)
    warnings.warn('Exponents p={:g}, q={:g} are not convex, seminorm is an upper bound.'.format(params.p, params.q),
                  UpperBoundWarning)
    canonical = canonical_gradient(space, u, params.s)
    start = np.array([np.max([canonical[b.k] for b in row], axis=0) for row in rows])
    convex, _ = _certified_rows(rows, params.convexified, mass, joint, solver)
    (G, value, residual), raw_value = _multistart_rows(rows, params, mass, [start, repair(convex, rows, n)[0]],
                                                       starts, seed)
    gradient = spread_rows(G, rows, scales, n)
    canonical_value = aggregate_norm(canonical, params, space)
    if canonical_value < value:
        return canonical, canonical_value, SolverCertificate('upper-bound', 'canonical', 0.0, 0.0)
    return gradient, value, SolverCertificate('upper-bound', 'multistart', residual, value - raw_value)


def full_norm_certificate(space, u, params, **kwargs):
    """Full norm with the certificate of its seminorm part.

    Returns:
        tuple: (||u||_{L^p} + seminorm, SolverCertificate)
    """
    _, seminorm, cert = min_norm_gradient(space, u, params, **kwargs)
    return lp_norm(space, u, params.p) + seminorm, cert


def full_norm(space, u, params, **kwargs):
    """||u||_{L^p} + seminorm, keyword arguments go to min_norm_gradient.

    Example:
        >>> X = MetricMeasureSpace([[0, 1], [1, 0]])
        >>> round(full_norm(X, [0, 1], NormParams(1, 2, 2)), 5)
        1.70711
    """
    return full_norm_certificate(space, u, params, **kwargs)[0]


def _single_oracle(space, I, J, c, p, budget):
    keep = c > 0
    I, J, c = I[keep], J[keep], c[keep]
    if len(c) == 0:
        return 0.0
    pts = np.unique(np.concatenate([I, J]))
    local = np.searchsorted(pts, np.column_stack([I, J]))
    A = np.zeros((len(c), len(pts)))
    A[np.arange(len(c)), local[:, 0]] = 1
    A[np.arange(len(c)), local[:, 1]] = 1
    w = space.mass[pts]
    if p == 1:
        return min_linear(w, A, c, budget=budget)[0]
    # nonnegativity holds at every stationary point, pins are not needed
    return float(np.sqrt(min_quadratic(w, A, c, lower=np.zeros(len(pts)), budget=budget)[0]))


def _coupled_oracle(space, bands, budget):
    """TL with p = 2, q = 1: min of sum mu(x) (sum_k g_k(x))^2 over all bands."""
    owner, blocks, rhs = [], [], []
    for b in bands:
        keep = b.c > 0
        if not keep.any():
            continue
        I, J = b.I[keep], b.J[keep]
        pts = np.unique(np.concatenate([I, J]))
        local = np.searchsorted(pts, np.column_stack([I, J])) + len(owner)
        blocks.append(local)
        rhs.append(b.c[keep])
        owner.extend(pts.tolist())
    if not blocks:
        return 0.0
    owner = np.array(owner)
    local, c = np.vstack(blocks), np.concatenate(rhs)
    A = np.zeros((len(c), len(owner)))
    A[np.arange(len(c)), local[:, 0]] = 1
    A[np.arange(len(c)), local[:, 1]] = 1
    H = np.where(owner[:, None] == owner[None, :], space.mass[owner][:, None], 0.0)
    return float(np.sqrt(min_psd_quadratic(H, A, c, budget=budget)[0]))


def check_oracle_params(space, params, max_points=ORACLE_MAX_POINTS):
    """Raise OracleError unless the exact oracles handle the instance."""
    if space.n > max_points:
        raise OracleError('Oracle instance too large: {} points, limit {}.'.format(space.n, max_points))
    if params.p not in (1, 2) or params.q not in (1, 2, np.inf):
        raise OracleError('Oracle needs p in {{1, 2}} and q in {{1, 2, inf}}, got {}.'.format(params))
    if params.flavor == 'tl' and (params.p, params.q) == (1, 2):
        raise OracleError('Oracle does not handle TL with p=1, q=2.')


def oracle_min_norm(space, u, params, budget=None):
    """Exact seminorm by active set enumeration.

    Besov bands and TL bands with p = q decouple into single gradient
    problems; Hajlasz and TL with q = inf are one single gradient problem
    over all pairs. Single gradient problems are linear (p = 1) or
    quadratic (p = 2) programs solved by :mod:`hajlaszlab.activeset`.
    TL with p = 2, q = 1 couples the bands through sum_k g_k(x) and is one
    semidefinite quadratic program over all bands.

    Raises:
        OracleError: more than ``ORACLE_MAX_POINTS`` points, unsupported
            exponents or too many candidates
    """
    check_oracle_params(space, params)
    bands = pair_bands(space, u, params.s)
    p, q = params.p, params.q
    if params.flavor == 'hajlasz' or (params.flavor == 'tl' and q == np.inf):
        if not bands:
            return 0.0
        I = np.concatenate([b.I for b in bands])
        J = np.concatenate([b.J for b in bands])
        c = np.concatenate([b.c for b in bands])
        return _single_oracle(space, I, J, c, p, budget)
    if params.flavor == 'tl' and p != q:
        return _coupled_oracle(space, bands, budget)
    values = np.array([_single_oracle(space, b.I, b.J, b.c, p, budget) for b in bands])
    if len(values) == 0:
        return 0.0
    if params.flavor == 'tl':
        return float(np.sum(values ** p) ** (1 / p))
    return float(values.max() if q == np.inf else np.sum(values ** q) ** (1 / q))
