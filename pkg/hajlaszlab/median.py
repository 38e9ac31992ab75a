"""Gamma-medians and integral averages over weighted subsets.

The gamma-median of u over a set A of positive measure is

    m_u^gamma(A) = inf{a : mu({x in A : u(x) > a}) < gamma mu(A)}

On a finite set the exceedance mass is a right-continuous step function of
a, so the infimum is attained at a value of u on A. It is returned exactly,
never interpolated.

"""
import numpy as np

from .space import ParameterError, as_subset, as_values

DEFAULT_GAMMA = 0.5
"""float: Default median parameter."""


def check_gamma(gamma):
    """Return gamma as float, raise ParameterError unless 0 < gamma <= 1/2."""
    gamma = float(gamma)
    if not 0 < gamma <= 0.5:
        raise ParameterError('Median parameter gamma must be in (0, 1/2], got {}.'.format(gamma))
    return gamma


def _gamma_median(vals, w, threshold):
    # ties merged so the result does not depend on sort stability
    levels, inv = np.unique(vals, return_inverse=True)
    wl = np.bincount(inv.ravel(), weights=w, minlength=len(levels))
    above = np.append(np.cumsum(wl[::-1])[::-1][1:], 0.0)
    return float(levels[np.argmax(above < threshold)])


def gamma_median(space, u, A, gamma=DEFAULT_GAMMA):
    """Gamma-median of u over subset A.

    Args:
        space (MetricMeasureSpace): space
        u: function values (array-like or FunctionOnSpace)
        A: WeightedSubset or iterable of indices
        gamma (float): median parameter in (0, 1/2]. Default 1/2.

    Returns:
        float: least value a of u on A with mu({u > a} & A) < gamma mu(A)

    Raises:
        SpaceError: A is empty
        ParameterError: gamma out of range

    Example:
        >>> X = MetricMeasureSpace(np.abs(np.subtract.outer(range(4), range(4))))
        >>> gamma_median(X, [1, 2, 3, 4], range(4), 0.5)
        3.0
    """
    gamma = check_gamma(gamma)
    A = as_subset(space, A)
    vals = as_values(space, u)[A.indices]
    return _gamma_median(vals, space.mass[A.indices], gamma * A.total_mass)


def integral_average(space, u, A):
    """Mass weighted mean of u over subset A."""
    A = as_subset(space, A)
    vals = as_values(space, u)[A.indices]
    return float(np.dot(vals, space.mass[A.indices]) / A.total_mass)


def ball_medians(space, u, center, gamma=DEFAULT_GAMMA, levels=False):
    """Gamma-medians of u over all distinct balls centered at a point.

    Args:
        space (MetricMeasureSpace): space
        u: function values
        center (int): index of center
        gamma (float): median parameter. Default 1/2.
        levels (bool): return also the radii of the balls. Default False.

    Returns:
        numpy.array: medians ordered by increasing ball radius (and radii when
        levels is True)
    """
    gamma = check_gamma(gamma)
    vals = as_values(space, u)
    order, ends, radii = space.shells(center)
    v, w = vals[order], space.mass[order]
    cm = np.cumsum(w)
    med = np.array([_gamma_median(v[:e], w[:e], gamma * cm[e - 1]) for e in ends])
    if levels:
        return med, radii
    return med


def ball_averages(space, u, center, levels=False):
    """Integral averages of u over all distinct balls centered at a point.

    Same ordering and arguments as :func:`ball_medians`.
    """
    vals = as_values(space, u)
    order, ends, radii = space.shells(center)
    w = space.mass[order]
    avg = np.cumsum(vals[order] * w)[ends - 1] / np.cumsum(w)[ends - 1]
    if levels:
        return avg, radii
    return avg
