"""Experiments and the hajlasz-lab command line.

Experiments reproduce at desk scale the convergence of median convolutions,
its failure in the Hajlasz space, the boundedness of the discrete median
maximal operator, its weak type estimate for capacities and the
r-subadditivity of capacities. Every experiment returns an
:class:`ExperimentResult` with CSV rows and a verdict.

Independent instances run on a thread pool with ``HAJLASZ_LAB_THREADS``
workers; rows are collected in submission order, so the CSV output only
depends on the configuration.

"""
import argparse
import csv
import json
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from tqdm import tqdm

from .capacity import CapacityProblem, capacity, capacity_oracle, r_subadditivity_check, random_families, \
    weak_type_ratio
from .covering import BallCovering, build_covering, partition_of_unity, tent_partition
from .median import DEFAULT_GAMMA, ball_averages, check_gamma, gamma_median, integral_average
from .norms import NormParams, full_norm_certificate, lp_norm, min_norm_gradient, oracle_min_norm, weakest
from .smoothing import CoveringLadder, ScaleRange, comparability_constant, discrete_convolution, discrete_maximal, \
    discrete_median_convolution, discrete_median_maximal, hl_maximal, median_maximal, restricted_discrete_maximal, \
    restricted_maximal, restricted_median_maximal
from .space import FunctionOnSpace, HajlaszLabError, ParameterError, as_values, ball, estimate_doubling, from_spec, \
    generate, grid1d, load_space, nonempty_spheres_check, save_space, validate

THREADS_ENV = 'HAJLASZ_LAB_THREADS'

SCALE_GUARD = 8
"""int: Finest admissible scale in multiples of the grid spacing."""

EXPERIMENTS = ('convergence', 'counterexample', 'maximal_boundedness', 'weak_type', 'subadditivity')

GAMMA_SWEEP = (0.125, 0.25, 0.5)
"""tuple: Median parameters swept by convergence and counterexample runs."""

OPERATORS = {'maximal_boundedness': ('median', 'mean', 'restricted'),
             'weak_type': ('median', 'restricted')}

RESTRICTED_RADIUS = 0.25
"""float: Default radius R of restricted maximal operators."""


class ScaleGuardWarning(UserWarning):
    pass


def threads():
    """Worker count from ``HAJLASZ_LAB_THREADS`` (default all cores)."""
    value = os.environ.get(THREADS_ENV, None)
    if value is None:
        return os.cpu_count() or 1
    try:
        count = int(value)
    except ValueError:
        raise ParameterError('{} must be a positive integer, got {}.'.format(THREADS_ENV, value))
    if count < 1:
        raise ParameterError('{} must be a positive integer, got {}.'.format(THREADS_ENV, value))
    return count


def ordered_map(func, items, desc=None, progress=True):
    """Map func over items on the thread pool, results in input order."""
    items = list(items)
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        return list(tqdm(pool.map(func, items), total=len(items), desc=desc, disable=not progress))


# Function families

def _linear(x, a=1.0, b=0.0):
    return a * x + b


def _sin(x, freq=1.0):
    return np.sin(2 * np.pi * freq * x)


def _holder(x, beta=0.5, x0=0.0):
    return np.abs(x - x0) ** beta


def _spike(x, height=1.0, index=None):
    u = np.zeros(len(x))
    u[len(x) // 2 if index is None else index] = height
    return u


def _constant(x, value=1.0):
    return np.full(len(x), float(value))


def _random_piecewise(x, seed=0, pieces=4):
    rng = np.random.default_rng(seed)
    breaks = np.sort(rng.random(pieces - 1))
    levels = rng.uniform(-1, 1, pieces)
    return levels[np.searchsorted(breaks, x, side='right')]


functions = {'linear': _linear,
             'sin': _sin,
             'holder': _holder,
             'spike': _spike,
             'constant': _constant,
             'random_piecewise': _random_piecewise}


def make_function(space, spec):
    """Function values on space from dict spec like ``{'kind': 'sin'}``.

    Families are evaluated on the first coordinate of the points. A spec with
    ``file`` key reads a values file.

    Raises:
        ParameterError: unknown kind or invalid parameters
    """
    spec = dict(spec)
    if 'file' in spec:
        return as_values(space, FunctionOnSpace.load(spec['file']))
    kind = str(spec.pop('kind', 'linear')).replace('-', '_')
    if kind not in functions:
        raise ParameterError('Unknown function kind {}. Use one of {}.'.format(kind, ', '.join(functions)))
    try:
        return functions[kind](space.coordinates, **spec)
    except TypeError as e:
        raise ParameterError('Invalid parameters for {}: {}'.format(kind, e))


class ExperimentConfig(object):
    """Configuration of an experiment.

    Keyword Args:
        experiment (str): one of ``EXPERIMENTS``
        space (dict): space spec for :func:`from_spec`
        function (dict): function spec for :func:`make_function`
        params (dict): NormParams as dict
        gamma (float, list or 'sweep'): median parameter or sweep. Default
            ``GAMMA_SWEEP`` for convergence and counterexample, 1/2 otherwise.
        scales (list): scale indices i (radius 2^-i)
        sizes (list): space sizes of the size sweeps
        family (int): number of random functions per size
        trials (int): number of random set families
        seed (int): base seed. Default 0.
        mode (str): 'median' or 'mean' convolution. Default 'median'.
        operator (str): maximal operator of maximal_boundedness ('median',
            'mean' or 'restricted') and weak_type ('median' or 'restricted').
            Default 'median'.
        radius (float): radius R of restricted operators. Default
            ``RESTRICTED_RADIUS``.
        comparability (bool): record comparability constants in
            maximal_boundedness. Default False.
        method (str): capacity method 'solver' or 'oracle'. Default 'solver'.
        ratio_bound (float): convergence target E(last) / E(first). Default 0.5.
        out (str): CSV output path
        timing (bool): write wall times to CSV. Default False.
        progress (bool): show progress bars. Default True.

    Raises:
        ParameterError: unknown key, experiment, operator or invalid gamma
    """
    defaults = {'experiment': 'convergence',
                'space': None,
                'function': None,
                'params': None,
                'gamma': None,
                'scales': None,
                'sizes': None,
                'family': 20,
                'trials': 200,
                'seed': 0,
                'mode': 'median',
                'operator': None,
                'radius': None,
                'comparability': False,
                'method': 'solver',
                'ratio_bound': 0.5,
                'out': None,
                'timing': False,
                'progress': True}

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.defaults)
        if unknown:
            raise ParameterError('Unknown config keys {}.'.format(', '.join(sorted(unknown))))
        for key, value in self.defaults.items():
            setattr(self, key, kwargs.get(key, value))
        if self.experiment not in EXPERIMENTS:
            raise ParameterError('Unknown experiment {}. Use one of {}.'.format(self.experiment,
                                                                            ', '.join(EXPERIMENTS)))
        if self.mode not in ('median', 'mean'):
            raise ParameterError('Mode must be median or mean, got {}.'.format(self.mode))
        if self.operator is not None and self.operator not in OPERATORS.get(self.experiment, ()):
            raise ParameterError('Operator {} is not available in {}.'.format(self.operator, self.experiment))
        if self.gamma is not None and self.gamma != 'sweep':
            for gamma in self.gammas:
                check_gamma(gamma)
        if self.params is not None and not isinstance(self.params, NormParams):
            self.params = NormParams.from_dict(self.params)

    def __repr__(self):
        return 'ExperimentConfig({})'.format(json.dumps(self.to_dict(), sort_keys=True))

    @property
    def gammas(self):
        """Sweep of median parameters"""
        if self.gamma == 'sweep' or (self.gamma is None and self.experiment in ('convergence', 'counterexample')):
            return list(GAMMA_SWEEP)
        if self.gamma is None:
            return [DEFAULT_GAMMA]
        return list(self.gamma) if isinstance(self.gamma, (list, tuple)) else [self.gamma]

    def to_dict(self):
        data = {key: getattr(self, key) for key in self.defaults}
        if self.params is not None:
            data['params'] = self.params.to_dict()
        return data

    @classmethod
    def from_json(cls, filename, **overrides):
        """Read config from JSON file, keyword arguments override entries."""
        try:
            with Path(filename).open('r') as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise ParameterError('Cannot read config {}: {}'.format(filename, e))
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


class ExperimentResult(object):
    """Rows of an experiment with a verdict.

    Attributes:
        name (str): experiment name
        columns (tuple): CSV columns
        rows (list): list of dicts
        passed (bool): verdict of the experiment checks
        message (str): human readable summary of the verdict
    """
    def __init__(self, name, columns, rows, passed, message):
        self.name = name
        self.columns = tuple(columns)
        self.rows = rows
        self.passed = bool(passed)
        self.message = message

    def __repr__(self):
        return '{}: {} rows, {} ({})'.format(self.name, len(self.rows), 'passed' if self.passed else 'FAILED',
                                            self.message)

    def column(self, name):
        return [row[name] for row in self.rows]

    def to_csv(self, filename, timing=False):
        """Write rows as CSV, wall_time column only when timing is True."""
        columns = [c for c in self.columns if timing or c != 'wall_time']
        with Path(filename).open('w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in self.rows:
                writer.writerow([_cell(row[c]) for c in columns])


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return ' '.join(str(v) for v in value)
    return value


class ConvergenceRow(object):
    """One scale of a convergence experiment.

    Attributes:
        i (int): scale index, radius 2^-i
        gamma (float): median parameter, None in mean mode
        mode (str): 'median' or 'mean'
        l_p_part (float): L^p norm of the error
        seminorm_part (float): seminorm of the error
        error_norm (float): l_p_part + seminorm_part
        certificate (str): solver certificate mode
        wall_time (float): seconds
    """
    columns = ('i', 'gamma', 'mode', 'error_norm', 'l_p_part', 'seminorm_part', 'certificate', 'wall_time')

    def __init__(self, i, gamma, mode, l_p_part, seminorm_part, certificate, wall_time):
        self.i = i
        self.gamma = gamma
        self.mode = mode
        self.l_p_part = float(l_p_part)
        self.seminorm_part = float(seminorm_part)
        self.error_norm = self.l_p_part + self.seminorm_part
        self.certificate = certificate
        self.wall_time = wall_time

    def __repr__(self):
        return 'ConvergenceRow(i={}, error={:.6g})'.format(self.i, self.error_norm)

    def as_dict(self):
        return {c: getattr(self, c) for c in self.columns}


def _default_params(config, **kwargs):
    return config.params if config.params is not None else NormParams(**kwargs)


def guard_scales(space, scales):
    """Drop scales 2^-i finer than ``SCALE_GUARD`` times the spacing."""
    spacing = space.min_distance
    kept = [i for i in scales if 2.0 ** -i >= SCALE_GUARD * spacing]
    dropped = [i for i in scales if i not in kept]
    if dropped:
        warnings.warn('Scales {} are finer than {} x spacing {:g} and were dropped.'.format(dropped, SCALE_GUARD, spacing),
                      ScaleGuardWarning)
    return kept


def _decreasing(errors, ratio_bound, tol=1e-12):
    errors = np.asarray(errors)
    if len(errors) == 0 or errors[0] <= tol:
        return bool(np.all(errors <= tol))
    steps = np.all(np.diff(errors) < 0)
    return bool(steps and errors[-1] <= ratio_bound * errors[0])


def run_convergence(config, space=None, u=None):
    """Error norms ||u - u_{2^-i}|| of median (or mean) convolutions.

    Returns:
        ExperimentResult: ConvergenceRow per (gamma, i) and verdict that the
        error strictly decreases with E(last) <= ratio_bound E(first)
    """
    space = from_spec(config.space or {'kind': 'grid1d', 'n': 1024}) if space is None else space
    u = make_function(space, config.function or {'kind': 'sin'}) if u is None else u
    params = _default_params(config, s=0.5, p=2, q=2)
    scales = guard_scales(space, config.scales if config.scales is not None else [2, 3, 4, 5, 6])
    gammas = config.gammas if config.mode == 'median' else [None]
    ladder = CoveringLadder(space)

    def task(item):
        gamma, i = item
        start = time.perf_counter()
        pou = ladder.partition(i)
        if gamma is None:
            approx = discrete_convolution(space, u, pou)
        else:
            approx = discrete_median_convolution(space, u, pou, gamma)
        err = u - np.asarray(approx)
        _, seminorm, cert = min_norm_gradient(space, err, params)
        return ConvergenceRow(i, gamma, config.mode, lp_norm(space, err, params.p), seminorm, cert.mode,
                              time.perf_counter() - start)

    items = [(gamma, i) for gamma in gammas for i in scales]
    rows = ordered_map(task, items, desc='Convergence', progress=config.progress)
    passed, notes = True, []
    for gamma in gammas:
        errors = [r.error_norm for r in rows if r.gamma == gamma]
        ok = _decreasing(errors, config.ratio_bound)
        passed &= ok
        notes.append('gamma={}: {}'.format(gamma, 'decreasing' if ok else 'not decreasing'))
    if any(r.certificate != 'certified' for r in rows):
        notes.append('upper bound rows present')
    return ExperimentResult('convergence', ConvergenceRow.columns, [r.as_dict() for r in rows], passed,
                            ', '.join(notes))


def counterexample_covering(space, i):
    """Balls B(j 2^-i, 2^-i) with tents of core 2^-i-2 and width 2^-i-1.

    Raises:
        ParameterError: a dyadic point j 2^-i is not a grid point
    """
    x = space.coordinates
    targets = np.arange(2 ** i + 1) / 2 ** i
    centers = np.array([int(np.argmin(np.abs(x - t))) for t in targets])
    if np.max(np.abs(x[centers] - targets)) > 1e-12:
        raise ParameterError('Grid does not contain the points j 2^-{}.'.format(i))
    covering = BallCovering(space, 2.0 ** -i, centers)
    return tent_partition(space, covering, core=2.0 ** (-i - 2), width=2.0 ** (-i - 1))


def counterexample_bound(p):
    """Lower bound 0.9 * 1/2 * (1/2)^(1/p) of the Hajlasz seminorm"""
    return 0.9 * 0.5 * 0.5 ** (1 / p)


def run_counterexample(config, space=None):
    """Hajlasz seminorm of u - u^gamma_{2^-i} for u(x) = x stays bounded below.

    In mean mode the discrete convolution u_{2^-i} replaces the median
    convolution. It is constant on the same core balls, so the same bound
    applies.

    Raises:
        ParameterError: params are not Hajlasz with s = 1 or grid spacing is
            larger than 2^-i-4
    """
    params = _default_params(config, s=1, p=2, flavor='hajlasz')
    if params.flavor != 'hajlasz' or params.s != 1:
        raise ParameterError('Counterexample needs hajlasz params with s = 1, got {}.'.format(params))
    scales = config.scales if config.scales is not None else [2, 3, 4]
    if space is None:
        space = from_spec(config.space) if config.space else grid1d(2 ** (max(scales) + 4) + 1)
    if space.min_distance > 2.0 ** (-max(scales) - 4) * (1 + 1e-12):
        raise ParameterError('Grid spacing {:g} exceeds 2^-{}.'.format(space.min_distance, max(scales) + 4))
    u = space.coordinates
    bound = counterexample_bound(params.p)
    gammas = config.gammas if config.mode == 'median' else [None]

    def task(item):
        gamma, i = item
        start = time.perf_counter()
        pou = counterexample_covering(space, i)
        if gamma is None:
            approx = discrete_convolution(space, u, pou)
        else:
            approx = discrete_median_convolution(space, u, pou, gamma)
        _, seminorm, cert = min_norm_gradient(space, u - np.asarray(approx), params)
        return {'i': i, 'gamma': gamma, 'mode': config.mode, 'seminorm': seminorm, 'bound': bound,
                'passed': seminorm >= bound, 'certificate': cert.mode, 'wall_time': time.perf_counter() - start}

    items = [(gamma, i) for gamma in gammas for i in scales]
    rows = ordered_map(task, items, desc='Counterexample', progress=config.progress)
    passed = all(r['passed'] for r in rows)
    notes = ['seminorm >= {:.4f} {}'.format(bound, 'at every scale' if passed else 'violated')]
    notes += _certificate_notes(rows)
    return ExperimentResult('counterexample',
                            ('i', 'gamma', 'mode', 'seminorm', 'bound', 'passed', 'certificate', 'wall_time'),
                            rows, passed, ', '.join(notes))


def counterexample_contrast(config, space=None):
    """Convergence of median (or mean) convolutions of u(x) = x in a Besov norm."""
    scales = config.scales if config.scales is not None else [2, 3, 4]
    if space is None:
        space = from_spec(config.space) if config.space else grid1d(2 ** (max(scales) + 4) + 1)
    contrast = ExperimentConfig(experiment='convergence', params={'s': 0.5, 'p': 2, 'q': 2, 'flavor': 'besov'},
                                gamma=config.gammas, scales=scales, seed=config.seed, mode=config.mode,
                                ratio_bound=1.0, progress=config.progress)
    return run_convergence(contrast, space=space, u=space.coordinates)


def _certificate_notes(rows):
    if any(r['certificate'] != 'certified' for r in rows):
        return ['upper bound rows present']
    return []


def _spread_verdict(rows, sizes, limit):
    per_n = [max(r['ratio'] for r in rows if r['n'] == n) for n in sizes]
    spread = max(per_n) / min(per_n)
    notes = ['max ratio per n {}, spread {:.4g}'.format(['{:.4g}'.format(v) for v in per_n], spread)]
    return spread < limit, ', '.join(notes + _certificate_notes(rows))


def run_maximal_boundedness(config):
    """Ratios ||M u|| / ||u|| over random piecewise functions.

    The operator M is the discrete median maximal function M^{gamma,*}
    ('median'), the discrete maximal function M^* ('mean') or its restricted
    form M_R^* ('restricted'). With ``comparability`` the median rows also
    record :func:`~hajlaszlab.smoothing.comparability_constant`.

    Returns:
        ExperimentResult: row per (n, member), verdict max/min over n of the
        per-n maximal ratio < 2
    """
    params = _default_params(config, s=0.5, p=2, q=2)
    sizes = config.sizes if config.sizes is not None else [64, 128, 256]
    gamma = config.gammas[0]
    operator = config.operator or 'median'
    radius = config.radius or RESTRICTED_RADIUS
    ladders = {n: CoveringLadder(grid1d(n)) for n in sizes}

    def task(item):
        n, j = item
        start = time.perf_counter()
        ladder = ladders[n]
        space = ladder.space
        u = _random_piecewise(space.coordinates, seed=config.seed + j)
        if operator == 'median':
            M = discrete_median_maximal(space, u, gamma, ladder=ladder)
        elif operator == 'mean':
            M = discrete_maximal(space, u, ladder=ladder)
        else:
            M = restricted_discrete_maximal(space, u, radius, ladder=ladder)
        top, top_cert = full_norm_certificate(space, np.asarray(M), params)
        bottom, bottom_cert = full_norm_certificate(space, u, params)
        C = None
        if config.comparability and operator == 'median':
            C = comparability_constant(space, u, gamma, ladder=ladder)
        return {'n': n, 'member': j, 'operator': operator, 'ratio': top / bottom, 'comparability': C,
                'certificate': weakest(top_cert.mode, bottom_cert.mode), 'wall_time': time.perf_counter() - start}

    items = [(n, j) for n in sizes for j in range(config.family)]
    rows = ordered_map(task, items, desc='Maximal operator', progress=config.progress)
    passed, message = _spread_verdict(rows, sizes, 2)
    return ExperimentResult('maximal_boundedness',
                            ('n', 'member', 'operator', 'ratio', 'comparability', 'certificate', 'wall_time'),
                            rows, passed, message)


def run_weak_type(config):
    """Weak type ratios over random piecewise functions on small grids.

    The operator is the median maximal function M^gamma ('median') or the
    restricted maximal function M_R of averages ('restricted').

    Returns:
        ExperimentResult: row per (n, member), verdict max/min over n of the
        per-n maximal ratio < 4
    """
    params = _default_params(config, s=0.5, p=2, q=2)
    sizes = config.sizes if config.sizes is not None else [6, 8, 10, 12]
    gamma = config.gammas[0]
    operator = config.operator or 'median'
    radius = (config.radius or RESTRICTED_RADIUS) if operator == 'restricted' else None

    def task(item):
        n, j = item
        start = time.perf_counter()
        space = grid1d(n)
        u = _random_piecewise(space.coordinates, seed=config.seed + j)
        report = weak_type_ratio(space, u, params, gamma, method=config.method, radius=radius)
        return {'n': n, 'member': j, 'operator': operator, 'ratio': report.ratio,
                'certificate': report.certificate, 'wall_time': time.perf_counter() - start}

    items = [(n, j) for n in sizes for j in range(config.family)]
    rows = ordered_map(task, items, desc='Weak type', progress=config.progress)
    passed, message = _spread_verdict(rows, sizes, 4)
    return ExperimentResult('weak_type', ('n', 'member', 'operator', 'ratio', 'certificate', 'wall_time'), rows,
                            passed, message)


def run_subadditivity(config, space=None):
    """r-subadditivity ratios on random set families."""
    params = _default_params(config, s=0.5, p=1, q=1)
    if space is None:
        space = from_spec(config.space or {'kind': 'random_points', 'n': 8, 'seed': config.seed})
    families = random_families(space, config.trials, seed=config.seed)
    report = r_subadditivity_check(space, families, params, method=config.method, progress=config.progress)
    rows = [dict(row) for row in report.rows]
    return ExperimentResult('subadditivity', report.columns, rows, report.ok,
                            ', '.join([repr(report)] + _certificate_notes(rows)))


runners = {'convergence': run_convergence,
           'counterexample': run_counterexample,
           'maximal_boundedness': run_maximal_boundedness,
           'weak_type': run_weak_type,
           'subadditivity': run_subadditivity}


def run_experiment(config):
    """Run experiment named in config, write CSV when ``config.out`` is set."""
    result = runners[config.experiment](config)
    if config.out:
        result.to_csv(config.out, timing=config.timing)
    return result


# Command line

class _Parser(argparse.ArgumentParser):
    """Parser exiting with status 1 on usage errors."""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, '{}: error: {}\n'.format(self.prog, message))


def _indices(txt):
    return [int(v) for v in txt.replace(',', ' ').split()]


def _add_params(parser, flavor='besov'):
    parser.add_argument('--s', type=float, default=0.5, help='smoothness in (0, 1]')
    parser.add_argument('--p', type=float, default=2, help='integrability exponent')
    parser.add_argument('--q', type=float, default=2, help='summability exponent (inf allowed)')
    parser.add_argument('--flavor', type=str, default=flavor, help='besov, tl or hajlasz')


def _params(args):
    q = np.inf if args.flavor == 'hajlasz' else args.q
    return NormParams(args.s, args.p, q, args.flavor)


def _write_values(values, out):
    values = FunctionOnSpace(values)
    if out:
        values.save(out)
    else:
        for v in values.values:
            print(repr(float(v)))


def cmd_gen_space(args):
    spec = {'kind': args.kind}
    if args.kind in ('grid1d', 'grid2d', 'random_points'):
        spec['n'] = args.n
    if args.kind == 'random_points':
        spec.update(dim=args.dim, seed=args.seed)
    if args.kind == 'clusters':
        spec.update(sizes=tuple(args.sizes), spread=args.spread, gap=args.gap, seed=args.seed)
    if args.kind == 'snowflake':
        spec.update(base={'kind': 'grid1d', 'n': args.n}, alpha=args.alpha)
    space = generate(spec.pop('kind'), **spec)
    if args.alpha != 1 and args.kind != 'snowflake':
        space = space.snowflake(args.alpha)
    print(space)
    if args.check:
        print(validate(space))
        print(estimate_doubling(space, seed=args.seed))
        print(nonempty_spheres_check(space))
    if args.out:
        save_space(space, args.out)
    return 0


def cmd_median(args):
    space = load_space(args.space)
    u = as_values(space, FunctionOnSpace.load(args.values))
    if args.center is not None:
        A = ball(space, args.center, args.radius)
    else:
        A = space.subset(_indices(args.subset)) if args.subset else space.everything
    print('median: {!r}'.format(gamma_median(space, u, A, args.gamma)))
    print('average: {!r}'.format(integral_average(space, u, A)))
    return 0


def cmd_covering(args):
    space = load_space(args.space)
    pou = partition_of_unity(space, build_covering(space, args.radius))
    print(pou.covering)
    print('centers: {}'.format(' '.join(str(c) for c in pou.covering.centers)))
    print(pou.check())
    if args.out:
        with Path(args.out).open('w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['index'] + ['phi_{}'.format(c) for c in pou.covering.centers])
            for x, row in enumerate(pou.phi):
                writer.writerow([x] + [repr(float(v)) for v in row])
    return 0


operators = ('convolution', 'median-convolution', 'median-maximal', 'restricted-median-maximal',
             'discrete-median-maximal', 'hl-maximal', 'restricted-maximal', 'discrete-maximal',
             'restricted-discrete-maximal', 'ball-averages')


def cmd_smooth(args):
    space = load_space(args.space)
    u = as_values(space, FunctionOnSpace.load(args.values))
    op = args.operator
    scales = None
    if args.k_min is not None or args.k_max is not None:
        full = ScaleRange.from_space(space)
        scales = ScaleRange(full.k_min if args.k_min is None else args.k_min,
                            full.k_max if args.k_max is None else args.k_max)
    if op in ('convolution', 'median-convolution'):
        pou = partition_of_unity(space, build_covering(space, 2.0 ** -args.scale))
        out = discrete_convolution(space, u, pou) if op == 'convolution' else \
            discrete_median_convolution(space, u, pou, args.gamma)
    elif op == 'median-maximal':
        out = median_maximal(space, u, args.gamma)
    elif op == 'restricted-median-maximal':
        out = restricted_median_maximal(space, u, args.radius, args.gamma)
    elif op == 'discrete-median-maximal':
        out = discrete_median_maximal(space, u, args.gamma, scales)
    elif op == 'hl-maximal':
        out = hl_maximal(space, u)
    elif op == 'restricted-maximal':
        out = restricted_maximal(space, u, args.radius)
    elif op == 'discrete-maximal':
        out = discrete_maximal(space, u, scales)
    elif op == 'restricted-discrete-maximal':
        out = restricted_discrete_maximal(space, u, args.radius, scales)
    else:
        out = [ball_averages(space, u, x).max() for x in range(space.n)]
    _write_values(out, args.out)
    return 0


def cmd_norm(args):
    space = load_space(args.space)
    u = as_values(space, FunctionOnSpace.load(args.values))
    params = _params(args)
    gradient, seminorm, cert = min_norm_gradient(space, u, params, joint=args.joint)
    print('seminorm: {!r}'.format(seminorm))
    print('full norm: {!r}'.format(lp_norm(space, u, params.p) + seminorm))
    print('certificate: {}'.format(cert))
    if args.oracle:
        print('oracle: {!r}'.format(oracle_min_norm(space, u, params)))
    if args.gradient_out:
        gradient.to_csv(args.gradient_out)
    return 0


def cmd_capacity(args):
    space = load_space(args.space)
    problem = CapacityProblem(space, _indices(args.set), _params(args))
    value, witness, _, cert = capacity(problem)
    print('capacity: {!r}'.format(value))
    print('certificate: {}'.format(cert))
    print('witness: {}'.format(' '.join(repr(float(v)) for v in witness)))
    if args.oracle:
        print('oracle: {!r}'.format(capacity_oracle(problem)))
    return 0


def cmd_subadd(args):
    space = load_space(args.space)
    config = ExperimentConfig(experiment='subadditivity', params=_params(args).to_dict(), trials=args.trials,
                              seed=args.seed, method='oracle' if args.oracle else 'solver', out=args.out,
                              progress=not args.quiet)
    result = run_subadditivity(config, space=space)
    if config.out:
        result.to_csv(config.out)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_cell(row[c]) for c in result.columns])
    print(result.message, file=sys.stderr)
    return 0 if result.passed else 2


def _gammas(txt):
    if txt == 'sweep':
        return txt
    values = [float(v) for v in txt.replace(',', ' ').split()]
    return values[0] if len(values) == 1 else values


def cmd_experiment(args):
    overrides = {'experiment': args.name, 'out': args.out, 'seed': args.seed, 'gamma': args.gamma,
                 'mode': args.mode, 'operator': args.operator, 'radius': args.radius}
    if args.quiet:
        overrides['progress'] = False
    if args.timing:
        overrides['timing'] = True
    if args.comparability:
        overrides['comparability'] = True
    if args.config:
        config = ExperimentConfig.from_json(args.config, **overrides)
    else:
        config = ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    result = run_experiment(config)
    print(result)
    if args.contrast and config.experiment == 'counterexample':
        print(counterexample_contrast(config))
    return 0 if result.passed else 2


def build_parser():
    parser = _Parser(prog='hajlasz-lab', description='Median convolutions and Hajlasz type spaces on finite metric measure spaces')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)
    sub.required = True

    p = sub.add_parser('gen-space', help='generate space file')
    p.add_argument('kind', type=str, help='grid1d, grid2d, random_points, clusters or snowflake')
    p.add_argument('--n', type=int, default=64, help='number of points (per side for grid2d)')
    p.add_argument('--dim', type=int, default=2, help='dimension of random points')
    p.add_argument('--sizes', type=int, nargs='+', default=[5, 5], help='cluster sizes')
    p.add_argument('--spread', type=float, default=0.01, help='cluster width')
    p.add_argument('--gap', type=float, default=1.0, help='cluster gap')
    p.add_argument('--alpha', type=float, default=1.0, help='snowflake exponent')
    p.add_argument('--seed', type=int, default=0, help='seed')
    p.add_argument('--check', action='store_true', help='print validation, doubling and spheres diagnostics')
    p.add_argument('-o', '--out', type=str, default=None, help='JSON space file')
    p.set_defaults(func=cmd_gen_space)

    p = sub.add_parser('median', help='gamma-median and average over a subset or ball')
    p.add_argument('space', type=str, help='JSON space file')
    p.add_argument('values', type=str, help='values file')
    p.add_argument('--subset', type=str, default=None, help='indices, default whole space')
    p.add_argument('--center', type=int, default=None, help='ball center')
    p.add_argument('--radius', type=float, default=1.0, help='ball radius')
    p.add_argument('--gamma', type=float, default=DEFAULT_GAMMA, help='median parameter')
    p.set_defaults(func=cmd_median)

    p = sub.add_parser('covering', help='greedy covering and partition of unity')
    p.add_argument('space', type=str, help='JSON space file')
    p.add_argument('--radius', type=float, required=True, help='covering radius')
    p.add_argument('-o', '--out', type=str, default=None, help='CSV of partition weights')
    p.set_defaults(func=cmd_covering)

    p = sub.add_parser('smooth', help='convolutions and maximal operators')
    p.add_argument('space', type=str, help='JSON space file')
    p.add_argument('values', type=str, help='values file')
    p.add_argument('--operator', type=str, choices=operators, default='median-convolution', help='operator')
    p.add_argument('--gamma', type=float, default=DEFAULT_GAMMA, help='median parameter')
    p.add_argument('--scale', type=int, default=2, help='scale index k of convolutions (radius 2^-k)')
    p.add_argument('--k-min', type=int, default=None, help='coarsest scale of discrete maximal operators')
    p.add_argument('--k-max', type=int, default=None, help='finest scale of discrete maximal operators')
    p.add_argument('--radius', type=float, default=1.0, help='restriction radius R')
    p.add_argument('-o', '--out', type=str, default=None, help='CSV output')
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser('norm', help='seminorm and full norm of a function')
    p.add_argument('space', type=str, help='JSON space file')
    p.add_argument('values', type=str, help='values file')
    _add_params(p)
    p.add_argument('--joint', action='store_true', help='solve Besov bands jointly')
    p.add_argument('--oracle', action='store_true', help='also run exact oracle')
    p.add_argument('--gradient-out', type=str, default=None, help='CSV of optimal gradient')
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser('capacity', help='capacity of a set')
    p.add_argument('space', type=str, help='JSON space file')
    p.add_argument('--set', type=str, required=True, help='indices of the set')
    _add_params(p)
    p.add_argument('--oracle', action='store_true', help='also run exact oracle')
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser('subadd', help='r-subadditivity table of random families')
    p.add_argument('space', type=str, help='JSON space file')
    _add_params(p)
    p.add_argument('--trials', type=int, default=200, help='number of families')
    p.add_argument('--seed', type=int, default=0, help='seed')
    p.add_argument('--oracle', action='store_true', help='use exact capacities')
    p.add_argument('--quiet', action='store_true', help='no progress bars')
    p.add_argument('-o', '--out', type=str, default=None, help='CSV output')
    p.set_defaults(func=cmd_subadd)

    p = sub.add_parser('experiment', help='run experiment')
    p.add_argument('name', type=str, nargs='?', default=None, help='one of {}'.format(', '.join(EXPERIMENTS)))
    p.add_argument('--config', type=str, default=None, help='JSON config file')
    p.add_argument('--seed', type=int, default=None, help='base seed')
    p.add_argument('--timing', action='store_true', help='write wall times')
    p.add_argument('--gamma', type=_gammas, default=None, help='median parameter, comma separated list or sweep')
    p.add_argument('--mode', type=str, choices=('median', 'mean'), default=None, help='median or mean convolution')
    p.add_argument('--operator', type=str, default=None, help='maximal operator: median, mean or restricted')
    p.add_argument('--radius', type=float, default=None, help='radius R of restricted operators')
    p.add_argument('--comparability', action='store_true', help='record comparability constants')
    p.add_argument('--contrast', action='store_true', help='add Besov contrast run to counterexample')
    p.add_argument('--quiet', action='store_true', help='no progress bars')
    p.add_argument('-o', '--out', type=str, default=None, help='CSV output')
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except HajlaszLabError as e:
        print('Error: {}'.format(e), file=sys.stderr)
        code = 1
    sys.exit(code)


if __name__ == '__main__':
    main()
