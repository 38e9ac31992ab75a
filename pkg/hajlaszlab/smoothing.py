"""Discrete convolutions, discrete median convolutions and maximal operators.

Scales are dyadic, scale index k stands for radius 2^-k. The sup over r > 0
in the ball maximal operators is a max over the distinct balls centered at
each point, so all operators are exact on finite spaces.

"""
import math
import threading

import numpy as np

from .covering import build_covering, partition_of_unity
from .median import DEFAULT_GAMMA, _gamma_median, ball_averages, ball_medians, check_gamma
from .space import FunctionOnSpace, ParameterError, SpaceError, as_values


def dyadic_band(d):
    """Integer k with 2^(-k-1) <= d < 2^-k, exact for floats."""
    return -math.frexp(d)[1]


class ScaleRange(object):
    """Range of dyadic scale indices k_min..k_max (radius 2^-k).

    Args:
        k_min (int): coarsest scale index
        k_max (int): finest scale index

    Raises:
        ParameterError: k_min > k_max
    """
    def __init__(self, k_min, k_max):
        if k_min > k_max:
            raise ParameterError('Empty scale range {}..{}.'.format(k_min, k_max))
        self.k_min = int(k_min)
        self.k_max = int(k_max)

    def __repr__(self):
        return 'ScaleRange({}, {})'.format(self.k_min, self.k_max)

    def __len__(self):
        return self.k_max - self.k_min + 1

    def __iter__(self):
        return iter(range(self.k_min, self.k_max + 1))

    def __contains__(self, k):
        return self.k_min <= k <= self.k_max

    def __eq__(self, other):
        return isinstance(other, ScaleRange) and (self.k_min, self.k_max) == (other.k_min, other.k_max)

    def __hash__(self):
        return hash((self.k_min, self.k_max))

    def index(self, k):
        """Row of scale k in per-scale arrays"""
        return k - self.k_min

    @property
    def scales(self):
        """Radii 2^-k in increasing k order"""
        return np.array([2.0 ** -k for k in self])

    @classmethod
    def from_space(cls, space):
        """Extreme admissible scales of a space.

        k_max is the largest k with 2^-k >= min_distance / 2 and k_min the
        smallest k with 2^-k <= 2 diameter. A single point space gets the
        range 0..0.
        """
        if space.n < 2:
            return cls(0, 0)
        m, e = math.frexp(space.min_distance / 2)
        k_max = 1 - e if m == 0.5 else -e
        k_min = 1 - math.frexp(2 * space.diameter)[1]
        return cls(k_min, k_max)


class CoveringLadder(object):
    """Lazily built coverings and partitions of unity per dyadic scale.

    Partitions are cached, so repeated maximal function evaluations on one
    space build every covering once. Safe to share between threads.

    Args:
        space (MetricMeasureSpace): space
    """
    def __init__(self, space):
        self.space = space
        self._cache = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return 'Covering ladder with {} cached scales'.format(len(self._cache))

    def __len__(self):
        return len(self._cache)

    def partition(self, k):
        """PartitionOfUnity at radius 2^-k"""
        with self._lock:
            pou = self._cache.get(k, None)
        if pou is None:
            pou = partition_of_unity(self.space, build_covering(self.space, 2.0 ** -k))
            with self._lock:
                pou = self._cache.setdefault(k, pou)
        return pou


def _ladder(space, ladder):
    if ladder is None:
        return CoveringLadder(space)
    if ladder.space is not space:
        raise SpaceError('Covering ladder was built for another space.')
    return ladder


def ball_statistics(space, u, pou, gamma=None):
    """Averages (gamma None) or gamma-medians of u over the covering balls."""
    vals = as_values(space, u)
    balls = pou.covering.balls
    if gamma is None:
        member = pou.covering.membership.astype(float)
        return member @ (vals * space.mass) / (member @ space.mass)
    gamma = check_gamma(gamma)
    return np.array([_gamma_median(vals[B.indices], space.mass[B.indices], gamma * B.total_mass) for B in balls])


def discrete_convolution(space, u, pou):
    """Discrete convolution u_r = sum_i u_{B_i} phi_i.

    Args:
        space (MetricMeasureSpace): space
        u: function values
        pou (PartitionOfUnity): partition at scale r

    Returns:
        FunctionOnSpace: smoothed function

    Example:
        >>> X = MetricMeasureSpace.from_points(np.arange(5.0))
        >>> pou = partition_of_unity(X, build_covering(X, 2.5))
        >>> round(discrete_convolution(X, np.arange(5.0), pou).values[4], 6)
        2.25
    """
    return FunctionOnSpace(pou.phi @ ball_statistics(space, u, pou))


def discrete_median_convolution(space, u, pou, gamma=DEFAULT_GAMMA):
    """Discrete gamma-median convolution u_r^gamma = sum_i m_u^gamma(B_i) phi_i.

    Args:
        space (MetricMeasureSpace): space
        u: function values
        pou (PartitionOfUnity): partition at scale r
        gamma (float): median parameter. Default 1/2.

    Returns:
        FunctionOnSpace: smoothed function
    """
    return FunctionOnSpace(pou.phi @ ball_statistics(space, u, pou, gamma))


def median_maximal(space, u, gamma=DEFAULT_GAMMA):
    """Median maximal function M^gamma u(x) = sup_r m^gamma_|u|(B(x, r))."""
    absu = np.abs(as_values(space, u))
    gamma = check_gamma(gamma)
    return FunctionOnSpace([ball_medians(space, absu, x, gamma).max() for x in range(space.n)])


def restricted_median_maximal(space, u, R, gamma=DEFAULT_GAMMA):
    """Median maximal function over balls of radius smaller than R.

    Raises:
        SpaceError: R is not positive
    """
    if not R > 0:
        raise SpaceError('Restriction radius must be positive, got {}.'.format(R))
    absu = np.abs(as_values(space, u))
    gamma = check_gamma(gamma)
    out = np.empty(space.n)
    for x in range(space.n):
        med, levels = ball_medians(space, absu, x, gamma, levels=True)
        out[x] = med[levels < R].max()
    return FunctionOnSpace(out)


def hl_maximal(space, u):
    """Hardy-Littlewood maximal function sup_r |u|_B(x,r)."""
    absu = np.abs(as_values(space, u))
    return FunctionOnSpace([ball_averages(space, absu, x).max() for x in range(space.n)])


def restricted_maximal(space, u, R):
    """Restricted maximal function M_R u(x) = sup_{0<r<R} |u|_B(x,r).

    Args:
        space (MetricMeasureSpace): space
        u: function values
        R (float): restriction radius

    Returns:
        FunctionOnSpace: maximal function

    Raises:
        SpaceError: R is not positive
    """
    if not R > 0:
        raise SpaceError('Restriction radius must be positive, got {}.'.format(R))
    absu = np.abs(as_values(space, u))
    out = np.empty(space.n)
    for x in range(space.n):
        avg, levels = ball_averages(space, absu, x, levels=True)
        # a ball B(x, r) with r < R holds exactly the points closer than some level < R
        out[x] = avg[levels < R].max()
    return FunctionOnSpace(out)


def _scale_max(space, u, gamma, scales, ladder, select=None):
    absu = np.abs(as_values(space, u))
    scales = ScaleRange.from_space(space) if scales is None else scales
    ladder = _ladder(space, ladder)
    ks = [k for k in scales if select is None or select(k)]
    if not ks:
        raise ParameterError('No scale of {} passes the restriction.'.format(scales))
    out = np.zeros(space.n)
    for k in ks:
        pou = ladder.partition(k)
        out = np.maximum(out, pou.phi @ ball_statistics(space, absu, pou, gamma))
    return FunctionOnSpace(out)


def discrete_median_maximal(space, u, gamma=DEFAULT_GAMMA, scales=None, ladder=None):
    """Discrete median maximal function M^{gamma,*} u = sup_k |u|^gamma_{2^-k}.

    The median convolution is taken of |u|, pointwise max over the scales.

    Args:
        space (MetricMeasureSpace): space
        u: function values
        gamma (float): median parameter. Default 1/2.
        scales (ScaleRange): scales. Default ``ScaleRange.from_space``.
        ladder (CoveringLadder): cache of partitions. Default new ladder.

    Returns:
        FunctionOnSpace: maximal function
    """
    return _scale_max(space, u, check_gamma(gamma), scales, ladder)


def discrete_maximal(space, u, scales=None, ladder=None):
    """Discrete maximal function M^* u = sup_k |u|_{2^-k}."""
    return _scale_max(space, u, None, scales, ladder)


def restricted_discrete_maximal(space, u, R, scales=None, ladder=None):
    """Discrete maximal function over scales 2^-k < R.

    Raises:
        SpaceError: R is not positive
        ParameterError: no scale below R
    """
    if not R > 0:
        raise SpaceError('Restriction radius must be positive, got {}.'.format(R))
    return _scale_max(space, u, None, scales, ladder, select=lambda k: 2.0 ** -k < R)


def comparability_constant(space, u, gamma=DEFAULT_GAMMA, scales=None, c_max=64, ladder=None):
    """Smallest C = 2^(j/4) <= c_max with
    M^gamma u <= C M^{gamma/C,*} u <= C^2 M^{gamma/C^2} u pointwise.

    Returns:
        float: smallest working C on the grid, None when none works
    """
    gamma = check_gamma(gamma)
    ladder = _ladder(space, ladder)
    left = np.asarray(median_maximal(space, u, gamma))
    j = 0
    while 2 ** (j / 4) <= c_max:
        C = 2 ** (j / 4)
        middle = C * np.asarray(discrete_median_maximal(space, u, gamma / C, scales, ladder))
        right = C ** 2 * np.asarray(median_maximal(space, u, gamma / C ** 2))
        tol = 1e-12 * max(1.0, float(right.max()))
        if np.all(left <= middle + tol) and np.all(middle <= right + tol):
            return C
        j += 1
    return None
