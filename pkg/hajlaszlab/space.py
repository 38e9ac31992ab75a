"""Finite metric measure spaces.

This module contains the container for finite metric measure spaces, weighted
subsets used as arguments of medians and averages, ball queries, validation
of the metric axioms, estimation of the doubling constant, generators of test
spaces and the JSON space format.

Example:

    >>> from hajlaszlab import generate, ball
    >>> X = generate('grid1d', n=5)
    >>> ball(X, 2, 0.3).indices
    array([1, 2, 3])

"""
import csv
import json
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

TRIANGLE_EXHAUSTIVE_MAX = 512
"""int: Largest space checked exhaustively for the triangle inequality."""

DOUBLING_FULL_SWEEP_MAX = 100000
"""int: Largest number of (center, radius) pairs evaluated without sampling."""


class HajlaszLabError(Exception):
    pass


class SpaceError(HajlaszLabError):
    pass


class ParameterError(HajlaszLabError):
    pass


def _readonly(arr):
    arr.flags.writeable = False
    return arr


class MetricMeasureSpace(object):
    """Finite metric measure space.

    Distances and masses are stored as read-only arrays, so a space can be
    shared between threads.

    Args:
        dist: n x n array-like of pairwise distances.
        mass: n array-like of point masses. Default unit masses.

    Keyword Args:
        labels (list): Optional per-point identifiers.
        points (numpy.array): Optional coordinates the metric was derived from.
        metric (str): 'explicit', 'euclidean' or 'snowflake'. Default
            'explicit'.
        alpha (float): Snowflake exponent. Default 1.

    Attributes:
        labels (list): Per-point identifiers or None.
        points (numpy.array): Coordinates (n x dim) or None.
        metric (str): How the distances were obtained.
        alpha (float): Snowflake exponent applied to the euclidean metric.

    Raises:
        SpaceError: Distance matrix is not square or mass has wrong length.

    Note:
        The metric axioms are not enforced at construction. Use
        :func:`validate` to check them.

    """
    def __init__(self, dist, mass=None, **kwargs):
        dist = np.array(dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] < 1:
            raise SpaceError('Distance matrix must be square and nonempty, got shape {}.'.format(dist.shape))
        n = dist.shape[0]
        if mass is None:
            mass = np.ones(n)
        mass = np.array(mass, dtype=float).ravel()
        if len(mass) != n:
            raise SpaceError('Expected {} masses, got {}.'.format(n, len(mass)))
        self._dist = _readonly(dist)
        self._mass = _readonly(mass)
        labels = kwargs.get('labels', None)
        if labels is not None:
            labels = list(labels)
            if len(labels) != n:
                raise SpaceError('Expected {} labels, got {}.'.format(n, len(labels)))
        self.labels = labels
        points = kwargs.get('points', None)
        if points is not None:
            points = np.array(points, dtype=float)
            if points.ndim == 1:
                points = points[:, None]
            points = _readonly(points)
        self.points = points
        self.metric = kwargs.get('metric', 'explicit')
        self.alpha = float(kwargs.get('alpha', 1.0))
        self._order = None

    def __repr__(self):
        return '\n'.join(['Metric measure space',
                          '  points: {}'.format(self.n),
                          '  metric: {}{}'.format(self.metric, '' if self.alpha == 1 else ' (alpha={:g})'.format(self.alpha)),
                          '  diameter: {:g}'.format(self.diameter),
                          '  total mass: {:g}'.format(self.total_mass)])

    def __len__(self):
        return self.n

    @classmethod
    def from_points(cls, points, mass=None, alpha=1.0, labels=None):
        """Create euclidean (optionally snowflaked) space from coordinates.

        Args:
            points: n x dim array-like, 1-D input is treated as n x 1.
            mass: n array-like of masses. Default unit masses.
            alpha (float): Snowflake exponent in (0, 1]. Default 1.
            labels (list): Optional per-point identifiers.

        Returns:
            MetricMeasureSpace: space with euclidean distances raised to alpha.
        """
        if not 0 < alpha <= 1:
            raise SpaceError('Snowflake exponent must be in (0, 1], got {}.'.format(alpha))
        points = np.array(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.shape[1] == 1:
            # exact differences on the line
            dist = np.abs(np.subtract.outer(points[:, 0], points[:, 0]))
        else:
            dist = cdist(points, points)
        metric = 'euclidean'
        if alpha != 1:
            dist = dist ** alpha
            metric = 'snowflake'
        return cls(dist, mass, points=points, metric=metric, alpha=alpha, labels=labels)

    @property
    def n(self):
        """Number of points"""
        return self._dist.shape[0]

    @property
    def dist(self):
        """Read-only distance matrix"""
        return self._dist

    @property
    def mass(self):
        """Read-only vector of point masses"""
        return self._mass

    @property
    def total_mass(self):
        """Measure of the whole space"""
        return float(self._mass.sum())

    @property
    def diameter(self):
        return float(self._dist.max())

    @property
    def min_distance(self):
        """Smallest positive distance (inf for a single point)"""
        pos = self._dist[self._dist > 0]
        return float(pos.min()) if len(pos) > 0 else np.inf

    @property
    def order(self):
        """Per-center permutations sorting points by distance"""
        if self._order is None:
            self._order = _readonly(np.argsort(self._dist, axis=1, kind='stable'))
        return self._order

    @property
    def coordinates(self):
        """First coordinate of points, or index/(n-1) when no points are stored"""
        if self.points is not None:
            return np.array(self.points[:, 0])
        if self.n == 1:
            return np.zeros(1)
        return np.arange(self.n) / (self.n - 1)

    def shells(self, center):
        """Distinct closed balls centered at a point.

        Args:
            center (int): index of center

        Returns:
            tuple: (order, ends, levels) where the j-th distinct ball is
            ``order[:ends[j]]`` and ``levels[j]`` is its radius (the j-th
            distinct distance from center, levels[0] = 0).
        """
        order = self.order[center]
        d = self._dist[center, order]
        ends = np.append(np.flatnonzero(np.diff(d) > 0) + 1, self.n)
        return order, ends, d[ends - 1]

    def ball_radii(self, center):
        """Open radii realizing every distinct ball at center.

        Radius ``levels[j] + gap/2`` selects exactly the points with distance
        at most ``levels[j]``.
        """
        _, _, levels = self.shells(center)
        gaps = np.diff(levels)
        last = levels[-1] + max(levels[-1], 1.0)
        return np.append(levels[:-1] + gaps / 2, last)

    def snowflake(self, alpha):
        """Return new space with distances replaced by d**alpha."""
        if not 0 < alpha <= 1:
            raise SpaceError('Snowflake exponent must be in (0, 1], got {}.'.format(alpha))
        if self.points is not None and self.metric in ('euclidean', 'snowflake'):
            return MetricMeasureSpace.from_points(self.points, self._mass, alpha=self.alpha * alpha, labels=self.labels)
        return MetricMeasureSpace(self._dist ** alpha, self._mass, labels=self.labels,
                                  points=self.points, metric='explicit')

    def subset(self, indices):
        """Weighted subset of this space"""
        return WeightedSubset(self, indices)

    @property
    def everything(self):
        """Weighted subset containing all points"""
        return WeightedSubset(self, np.arange(self.n))

    def to_dict(self):
        """Return JSON serializable dict of the space."""
        data = {'n': self.n, 'metric': self.metric, 'alpha': self.alpha,
                'mass': self._mass.tolist()}
        if self.points is not None:
            data['points'] = self.points.tolist()
        if self.metric == 'explicit' or self.points is None:
            data['metric'] = 'explicit'
            data['dist'] = self._dist.tolist()
        if self.labels is not None:
            data['labels'] = self.labels
        return data

    @classmethod
    def from_dict(cls, data):
        """Create space from dict in JSON space format.

        Raises:
            SpaceError: Missing or inconsistent fields.
        """
        metric = data.get('metric', 'explicit')
        mass = data.get('mass', None)
        labels = data.get('labels', None)
        if metric == 'explicit':
            if 'dist' not in data:
                raise SpaceError('Explicit metric requires dist matrix.')
            space = cls(data['dist'], mass, labels=labels, points=data.get('points', None))
        elif metric in ('euclidean', 'snowflake'):
            if 'points' not in data:
                raise SpaceError('Metric {} requires points.'.format(metric))
            alpha = float(data.get('alpha', 1.0)) if metric == 'snowflake' else 1.0
            space = cls.from_points(data['points'], mass, alpha=alpha, labels=labels)
        else:
            raise SpaceError('Unknown metric {}.'.format(metric))
        if 'n' in data and data['n'] != space.n:
            raise SpaceError('Declared n={} does not match {} points.'.format(data['n'], space.n))
        return space


class WeightedSubset(object):
    """Nonempty set of points of a space with its total mass.

    Args:
        space (MetricMeasureSpace): space the indices refer to
        indices: iterable of point indices (duplicates are merged)

    Raises:
        SpaceError: Subset is empty or an index is out of range.

    """
    def __init__(self, space, indices):
        idx = np.unique(np.asarray(indices, dtype=int).ravel())
        if len(idx) == 0:
            raise SpaceError('Subset must be nonempty.')
        if idx[0] < 0 or idx[-1] >= space.n:
            raise SpaceError('Subset indices out of range 0..{}.'.format(space.n - 1))
        self.space = space
        self.indices = _readonly(idx)
        self.total_mass = float(space.mass[idx].sum())

    def __repr__(self):
        return 'Subset of {} points with mass {:g}'.format(len(self), self.total_mass)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices.tolist())

    def __contains__(self, x):
        i = np.searchsorted(self.indices, x)
        return i < len(self.indices) and self.indices[i] == x

    def __eq__(self, other):
        return isinstance(other, WeightedSubset) and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash(self.indices.tobytes())

    @property
    def mask(self):
        """Boolean membership vector over the whole space"""
        m = np.zeros(self.space.n, dtype=bool)
        m[self.indices] = True
        return m

    def issubset(self, other):
        return bool(np.all(np.isin(self.indices, other.indices)))

    def union(self, other):
        return WeightedSubset(self.space, np.union1d(self.indices, other.indices))


class FunctionOnSpace(object):
    """Finite real function on the points of a space.

    Args:
        values: n array-like of finite reals

    Raises:
        SpaceError: Values are not finite.

    """
    def __init__(self, values):
        values = np.array(values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise SpaceError('Function values must be finite.')
        self.values = _readonly(values)

    def __repr__(self):
        return 'Function on {} points'.format(len(self.values))

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None):
        return np.asarray(self.values, dtype=dtype)

    @classmethod
    def load(cls, filename):
        """Read values from text file with one value per line or a CSV column
        named ``value``."""
        filename = Path(filename)
        with filename.open('r') as f:
            lines = [ln.strip() for ln in f if ln.strip() != '']
        if lines and not _is_number(lines[0].split(',')[0]):
            header = lines[0].split(',')
            if 'value' not in header:
                raise SpaceError('Values file {} has no value column.'.format(filename))
            col = header.index('value')
            lines = [ln.split(',')[col] for ln in lines[1:]]
        return cls([float(ln) for ln in lines])

    def save(self, filename):
        """Write values as CSV with index and value columns."""
        with Path(filename).open('w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['index', 'value'])
            for i, v in enumerate(self.values):
                writer.writerow([i, repr(float(v))])


def _is_number(txt):
    try:
        float(txt)
        return True
    except ValueError:
        return False


def as_values(space, u):
    """Return values of u as float array checked against space.

    Args:
        space (MetricMeasureSpace): space u lives on
        u: FunctionOnSpace or array-like of n finite values

    Raises:
        SpaceError: Wrong length or non-finite values.
    """
    values = np.asarray(u, dtype=float).ravel()
    if len(values) != space.n:
        raise SpaceError('Function has {} values but space has {} points.'.format(len(values), space.n))
    if not np.all(np.isfinite(values)):
        raise SpaceError('Function values must be finite.')
    return values


def as_subset(space, A):
    """Coerce subset argument (WeightedSubset or index iterable)."""
    if isinstance(A, WeightedSubset):
        return A
    return WeightedSubset(space, A)


class ValidationReport(object):
    """Ordered list of named checks with witnesses of failures.

    Attributes:
        checks (list): list of (name, passed, witness) tuples. Witness is None
            for passed checks.
    """
    def __init__(self, checks=None):
        self.checks = list(checks) if checks is not None else []

    def __repr__(self):
        lines = []
        for name, passed, witness in self.checks:
            if passed:
                lines.append('{:<12} ok'.format(name))
            else:
                lines.append('{:<12} FAILED at {}'.format(name, witness))
        return '\n'.join(lines)

    def __iter__(self):
        return iter(self.checks)

    def __getitem__(self, name):
        for check in self.checks:
            if check[0] == name:
                return check
        raise KeyError(name)

    def add(self, name, passed, witness=None):
        self.checks.append((name, bool(passed), None if passed else witness))

    @property
    def ok(self):
        return all(passed for _, passed, _ in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c[1]]


def _first(mask):
    hit = np.argwhere(mask)
    return tuple(int(v) for v in hit[0]) if len(hit) > 0 else None


def validate(space, seed=0):
    """Check metric and measure axioms of space.

    The triangle inequality is checked exhaustively for spaces up to
    ``TRIANGLE_EXHAUSTIVE_MAX`` points and on 10 n^2 random triples otherwise.
    A relative slack of 1e-12 of the diameter absorbs rounding of coordinates.

    Args:
        space (MetricMeasureSpace): space to check
        seed (int): seed of the triple sampler. Default 0.

    Returns:
        ValidationReport: one check per axiom with first violating witness
    """
    d, m, n = space.dist, space.mass, space.n
    report = ValidationReport()
    finite = np.isfinite(d)
    report.add('finite', finite.all(), _first(~finite))
    diag = np.diag(d)
    report.add('diagonal', np.all(diag == 0), _first(diag != 0))
    report.add('symmetry', np.array_equal(d, d.T), _first(d != d.T))
    off = ~np.eye(n, dtype=bool)
    report.add('positivity', np.all(d[off] > 0), _first(off & ~(d > 0)))
    witness = None
    if finite.all():
        slack = 1e-12 * float(np.abs(d).max())
        if n <= TRIANGLE_EXHAUSTIVE_MAX:
            for j in range(n):
                bad = d > d[:, j][:, None] + d[j][None, :] + slack
                if bad.any():
                    i, k = _first(bad)
                    witness = (i, j, k)
                    break
        else:
            rng = np.random.default_rng(seed)
            remaining = 10 * n * n
            while remaining > 0 and witness is None:
                size = min(remaining, 1000000)
                i, j, k = rng.integers(0, n, size=(3, size))
                bad = d[i, k] > d[i, j] + d[j, k] + slack
                if bad.any():
                    t = int(np.flatnonzero(bad)[0])
                    witness = (int(i[t]), int(j[t]), int(k[t]))
                remaining -= size
    report.add('triangle', finite.all() and witness is None, witness)
    report.add('mass', np.all(m > 0) and np.all(np.isfinite(m)), _first(~((m > 0) & np.isfinite(m))))
    report.add('total mass', np.isfinite(m.sum()), None)
    return report


def ball(space, center, r):
    """Open ball B(center, r) = {y : d(center, y) < r}.

    Args:
        space (MetricMeasureSpace): space
        center (int): index of center
        r (float): radius

    Returns:
        WeightedSubset: points at distance strictly less than r

    Raises:
        SpaceError: r is not positive
    """
    if not r > 0:
        raise SpaceError('Ball radius must be positive, got {}.'.format(r))
    return WeightedSubset(space, np.flatnonzero(space.dist[center] < r))


class DoublingReport(object):
    """Empirical doubling constant.

    Attributes:
        c_d (float): maximum observed ratio mu(B(x,2r)) / mu(B(x,r))
        Q (float): doubling dimension log2(c_d)
        samples (numpy.array): m x 3 array of (center, radius, ratio) witnesses
        full (bool): True when every (center, radius) pair was evaluated
    """
    def __init__(self, samples, full):
        self.samples = _readonly(np.asarray(samples, dtype=float).reshape(-1, 3))
        self.full = full
        self.c_d = float(self.samples[:, 2].max()) if len(self.samples) > 0 else 1.0
        self.Q = float(np.log2(self.c_d))

    def __repr__(self):
        mode = 'full sweep' if self.full else 'sampled'
        return 'Doubling constant {:g} (Q={:g}) from {} {} pairs'.format(self.c_d, self.Q, len(self.samples), mode)

    @property
    def witness(self):
        """(center, radius, ratio) realizing c_d or None"""
        if len(self.samples) == 0:
            return None
        c, r, q = self.samples[np.argmax(self.samples[:, 2])]
        return int(c), float(r), float(q)

    def to_csv(self, filename):
        """Write witnesses as CSV."""
        with Path(filename).open('w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(['center', 'radius', 'ratio'])
            for c, r, q in self.samples:
                writer.writerow([int(c), repr(float(r)), repr(float(q))])


def _doubling_ratios(space, center, radii):
    order = space.order[center]
    d = space.dist[center, order]
    cm = np.cumsum(space.mass[order])
    inner = cm[np.searchsorted(d, radii, side='left') - 1]
    outer = cm[np.searchsorted(d, 2 * radii, side='left') - 1]
    return outer / inner


def estimate_doubling(space, sample_budget=1000, seed=0, full=None):
    """Estimate the doubling constant of a space.

    Radii range over the distinct positive distances from each center. All
    pairs are evaluated when there are at most ``DOUBLING_FULL_SWEEP_MAX`` of
    them (or when ``full`` is True), otherwise ``sample_budget`` pairs are
    drawn uniformly.

    Args:
        space (MetricMeasureSpace): space
        sample_budget (int): number of sampled pairs. Default 1000.
        seed (int): seed of the sampler. Default 0.
        full (bool): force (True) or forbid (False) the full sweep. Default
            None decides by size.

    Returns:
        DoublingReport: estimated c_d and witnesses

    Raises:
        ParameterError: sample_budget < 1
    """
    if sample_budget < 1:
        raise ParameterError('Sample budget must be at least 1, got {}.'.format(sample_budget))
    radii = [np.unique(row[row > 0]) for row in space.dist]
    total = sum(len(r) for r in radii)
    if full is None:
        full = total <= DOUBLING_FULL_SWEEP_MAX
    samples = []
    if full:
        for x, rx in enumerate(radii):
            if len(rx) > 0:
                ratios = _doubling_ratios(space, x, rx)
                samples.append(np.column_stack([np.full(len(rx), x), rx, ratios]))
    elif total > 0:
        rng = np.random.default_rng(seed)
        counts = np.array([len(r) for r in radii])
        flat = np.sort(rng.integers(0, total, size=sample_budget))
        starts = np.cumsum(counts) - counts
        centers = np.searchsorted(starts, flat, side='right') - 1
        for x in np.unique(centers):
            rx = radii[x][flat[centers == x] - starts[x]]
            samples.append(np.column_stack([np.full(len(rx), x), rx, _doubling_ratios(space, x, rx)]))
    samples = np.vstack(samples) if samples else np.empty((0, 3))
    return DoublingReport(samples, full)


def grid1d(n):
    """Uniform grid {j/(n-1)} on [0, 1] with mass 1/n per point."""
    if n < 2:
        raise SpaceError('grid1d needs n >= 2, got {}.'.format(n))
    return MetricMeasureSpace.from_points(np.arange(n) / (n - 1), np.full(n, 1 / n))


def grid2d(n):
    """Uniform n x n grid on [0, 1]^2 with mass 1/n^2 per point."""
    if n < 2:
        raise SpaceError('grid2d needs n >= 2, got {}.'.format(n))
    t = np.arange(n) / (n - 1)
    xx, yy = np.meshgrid(t, t)
    return MetricMeasureSpace.from_points(np.column_stack([xx.ravel(), yy.ravel()]), np.full(n * n, 1 / n**2))


def random_points(n, dim=2, seed=0, mass='uniform'):
    """Uniform random points in the unit cube.

    Args:
        n (int): number of points
        dim (int): dimension. Default 2.
        seed (int): seed. Default 0.
        mass (str): 'uniform' (1/n each) or 'random' (uniform in
            [0.5, 1.5] / n). Default 'uniform'.
    """
    if n < 2 or dim < 1:
        raise SpaceError('random_points needs n >= 2 and dim >= 1, got n={} dim={}.'.format(n, dim))
    rng = np.random.default_rng(seed)
    pts = rng.random((n, dim))
    if mass == 'uniform':
        m = np.full(n, 1 / n)
    elif mass == 'random':
        m = rng.uniform(0.5, 1.5, n) / n
    else:
        raise SpaceError('Unknown mass mode {}.'.format(mass))
    space = MetricMeasureSpace.from_points(pts, m)
    if not space.dist[~np.eye(n, dtype=bool)].min() > 0:
        raise SpaceError('Random points coincide, change seed.')
    return space


def clusters(sizes=(5, 5), spread=0.01, gap=1.0, seed=0):
    """Clusters of random points on a line separated by gap.

    Args:
        sizes (tuple): number of points per cluster
        spread (float): width of each cluster
        gap (float): distance between consecutive cluster origins
        seed (int): seed
    """
    rng = np.random.default_rng(seed)
    pts = np.concatenate([ix * gap + np.sort(rng.random(size)) * spread for ix, size in enumerate(sizes)])
    n = len(pts)
    if n < 2:
        raise SpaceError('clusters needs at least two points.')
    return MetricMeasureSpace.from_points(pts, np.full(n, 1 / n))


def snowflake(base, alpha):
    """Snowflake d -> d**alpha of an existing space or generator spec."""
    if not isinstance(base, MetricMeasureSpace):
        base = from_spec(base)
    return base.snowflake(alpha)


generators = {'grid1d': grid1d,
              'grid2d': grid2d,
              'random_points': random_points,
              'clusters': clusters,
              'snowflake': snowflake}


def generate(kind, **kwargs):
    """Generate space by name.

    Args:
        kind (str): one of 'grid1d', 'grid2d', 'snowflake', 'random_points'
            or 'clusters'
        **kwargs: parameters of generator (e.g. n, dim, seed, base, alpha)

    Returns:
        MetricMeasureSpace: generated space

    Raises:
        SpaceError: unknown kind or invalid parameters

    Example:
        >>> generate('snowflake', base={'kind': 'grid1d', 'n': 3}, alpha=0.5).dist[0, 1]
        0.7071067811865476
    """
    if kind not in generators:
        raise SpaceError('Unknown space kind {}. Use one of {}.'.format(kind, ', '.join(generators)))
    try:
        return generators[kind](**kwargs)
    except TypeError as e:
        raise SpaceError('Invalid parameters for {}: {}'.format(kind, e))


def from_spec(spec):
    """Generate space from dict spec like ``{'kind': 'grid1d', 'n': 64}``.

    A spec with ``file`` key loads JSON space file instead.
    """
    spec = dict(spec)
    if 'file' in spec:
        return load_space(spec['file'])
    if 'kind' not in spec:
        raise SpaceError('Space spec must contain kind or file.')
    return generate(spec.pop('kind'), **spec)


def save_space(space, filename):
    """Write space in JSON space format."""
    with Path(filename).open('w') as f:
        json.dump(space.to_dict(), f)


def load_space(filename):
    """Read and validate space from JSON space file.

    Raises:
        SpaceError: file content is not a valid metric measure space
    """
    filename = Path(filename)
    try:
        with filename.open('r') as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise SpaceError('Cannot read space file {}: {}'.format(filename, e))
    space = MetricMeasureSpace.from_dict(data)
    report = validate(space)
    if not report.ok:
        raise SpaceError('Invalid space in {}:\n{}'.format(filename, report))
    return space


class SpheresReport(object):
    """Result of the nonempty spheres diagnostic.

    Attributes:
        radii (numpy.array): tested radii
        satisfied (numpy.array): n x len(radii) boolean table
        tolerance (float): relative annulus width
    """
    def __init__(self, radii, satisfied, tolerance):
        self.radii = radii
        self.satisfied = satisfied
        self.tolerance = tolerance

    def __repr__(self):
        return 'Nonempty spheres: min fraction {:.4f} over {} radii (tolerance {:g})'.format(self.summary, len(self.radii), self.tolerance)

    @property
    def fractions(self):
        """Fraction of satisfied centers per radius"""
        return self.satisfied.mean(axis=0)

    @property
    def summary(self):
        """Minimum over radii of the satisfied fraction"""
        return float(self.fractions.min()) if len(self.radii) > 0 else 1.0

    @property
    def failures(self):
        """List of (center, radius) pairs with empty annulus"""
        x, j = np.nonzero(~self.satisfied)
        return [(int(a), float(self.radii[b])) for a, b in zip(x, j)]


def nonempty_spheres_check(space, tolerance=0.05, r_min=None, r_max=None, n_radii=32, resolution=None):
    """Check the nonempty spheres property on a geometric grid of radii.

    For every center x and radius r the annulus
    {y : |d(x,y) - r| <= tolerance r} must contain a point. Radii are only
    resolved up to the spacing of the space, so a point with
    |d(x,y) - r| < resolution also counts.

    Args:
        space (MetricMeasureSpace): space
        tolerance (float): relative width in (0, 1). Default 0.05.
        r_min (float): smallest radius. Default half the smallest positive
            distance, where every sphere of a finite space is empty.
        r_max (float): largest radius. Default diameter.
        n_radii (int): number of radii. Default 32.
        resolution (float): absolute floor of the annulus half width. Default
            half of the smallest positive distance.

    Returns:
        SpheresReport: per (center, radius) table and summary
    """
    if not 0 < tolerance < 1:
        raise ParameterError('Tolerance must be in (0, 1), got {}.'.format(tolerance))
    if space.n < 2:
        return SpheresReport(np.empty(0), np.ones((space.n, 0), dtype=bool), tolerance)
    r_min = space.min_distance / 2 if r_min is None else r_min
    r_max = space.diameter if r_max is None else r_max
    resolution = space.min_distance / 2 if resolution is None else resolution
    if not 0 < r_min <= r_max:
        raise ParameterError('Need 0 < r_min <= r_max, got {} and {}.'.format(r_min, r_max))
    radii = np.geomspace(r_min, r_max, n_radii) if r_max > r_min else np.array([r_min])
    satisfied = np.zeros((space.n, len(radii)), dtype=bool)
    for x in range(space.n):
        row = space.dist[x]
        d = np.sort(row[row > 0])
        lo = np.searchsorted(d, radii * (1 - tolerance), side='left')
        hi = np.searchsorted(d, radii * (1 + tolerance), side='right')
        near_lo = np.searchsorted(d, radii - resolution, side='right')
        near_hi = np.searchsorted(d, radii + resolution, side='left')
        satisfied[x] = (hi > lo) | (near_hi > near_lo)
    return SpheresReport(radii, satisfied, tolerance)
