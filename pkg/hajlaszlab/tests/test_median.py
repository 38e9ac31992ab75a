import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hajlaszlab.median import ball_averages, ball_medians, gamma_median, integral_average
from hajlaszlab.space import MetricMeasureSpace, ParameterError, SpaceError


def discrete(mass):
    n = len(mass)
    return MetricMeasureSpace(np.ones((n, n)) - np.eye(n), mass)


@pytest.fixture
def line():
    return MetricMeasureSpace.from_points(np.arange(5.0))


@st.composite
def weighted_values(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    # integer values and masses keep all mass sums exact
    vals = draw(st.lists(st.integers(-50, 50), min_size=n, max_size=n))
    mass = draw(st.lists(st.integers(1, 10), min_size=n, max_size=n))
    gamma = draw(st.sampled_from([0.5, 0.25, 0.125, 0.1, 0.01]))
    return discrete(mass), np.array(vals, dtype=float), gamma


def test_median_examples():
    X = discrete([1, 1, 1, 1])
    assert gamma_median(X, [1, 2, 3, 4], range(4), 0.5) == 3.0, 'Wrong median'
    assert gamma_median(X, [1, 2, 3, 4], range(4), 0.25) == 4.0, 'Wrong 1/4-median'
    assert gamma_median(X, [1, 1, 1, 5], range(4), 0.5) == 1.0, 'Ties not merged'
    assert gamma_median(X, [4, 3, 2, 1], [0, 1], 0.5) == 4.0, 'Wrong median on subset'


def test_weighted_median():
    X = discrete([3, 1, 1, 1])
    assert gamma_median(X, [0, 1, 2, 3], range(4)) == 1.0, 'Wrong weighted median'
    assert integral_average(X, [0, 1, 2, 3], range(4)) == 1.0, 'Wrong weighted average'


def test_median_errors():
    X = discrete([1, 1])
    for gamma in (0, 0.6, -1):
        with pytest.raises(ParameterError):
            gamma_median(X, [0, 1], [0, 1], gamma)
    with pytest.raises(SpaceError):
        gamma_median(X, [0, 1], [])
    with pytest.raises(SpaceError):
        gamma_median(X, [0, 1, 2], [0])


def test_ball_medians(line):
    med, levels = ball_medians(line, np.arange(5.0), 0, 0.5, levels=True)
    assert med.tolist() == [0, 1, 1, 2, 2], 'Wrong ball medians'
    assert levels.tolist() == [0, 1, 2, 3, 4], 'Wrong ball levels'


def test_ball_averages(line):
    assert ball_averages(line, np.arange(5.0), 0).tolist() == [0, 0.5, 1, 1.5, 2], 'Wrong ball averages'


@given(weighted_values())
@settings(max_examples=200, deadline=None)
def test_median_definition(data):
    X, u, gamma = data
    m = gamma_median(X, u, range(X.n), gamma)
    threshold = gamma * X.total_mass
    assert m in u, 'Median is not a value of u'
    assert X.mass[u > m].sum() < threshold, 'Too much mass above median'
    smaller = u[u < m]
    if len(smaller):
        assert X.mass[u > smaller.max()].sum() >= threshold, 'Median is not the least admissible value'


@given(weighted_values())
@settings(max_examples=100, deadline=None)
def test_median_monotone(data):
    X, u, gamma = data
    med = gamma_median(X, u, range(X.n), gamma)
    assert gamma_median(X, u + np.abs(u), range(X.n), gamma) >= med, 'Median not monotone in u'
    assert gamma_median(X, 2 * u, range(X.n), gamma) == 2 * med, 'Median not homogeneous'
    assert gamma_median(X, u, range(X.n), gamma / 2) >= med, 'Median not decreasing in gamma'
    assert u.min() <= med <= u.max(), 'Median out of range'


@st.composite
def median_pairs(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    ints = st.lists(st.integers(-20, 20), min_size=n, max_size=n)
    u, v = np.array(draw(ints), dtype=float), np.array(draw(ints), dtype=float)
    mass = draw(st.lists(st.integers(1, 8), min_size=n, max_size=n))
    inner = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    inner[draw(st.integers(0, n - 1))] = True
    gamma = draw(st.sampled_from([0.5, 0.25, 0.125]))
    return discrete(mass), u, v, np.flatnonzero(inner), gamma


@given(median_pairs(), st.integers(-30, 30), st.integers(1, 5))
@settings(max_examples=200, deadline=None)
def test_median_calculus(data, c, lam):
    X, u, v, A, gamma = data
    B = range(X.n)
    m = gamma_median(X, u, B, gamma)
    assert gamma_median(X, u, B, gamma / 4) >= m, 'Median not decreasing in gamma'
    assert gamma_median(X, np.maximum(u, v), B, gamma) >= m, 'Median not monotone in u'
    assert gamma_median(X, u + c, B, gamma) == m + c, 'Median does not commute with translation'
    assert gamma_median(X, lam * u, B, gamma) == lam * m, 'Median not positively homogeneous'
    assert abs(m) <= gamma_median(X, np.abs(u), B, gamma), 'Median above median of |u|'
    split = gamma_median(X, u, B, gamma / 2) + gamma_median(X, v, B, gamma / 2)
    assert gamma_median(X, u + v, B, gamma) <= split, 'Median of sum above split medians'


@given(median_pairs())
@settings(max_examples=200, deadline=None)
def test_median_subset(data):
    X, u, v, A, gamma = data
    ratio = X.total_mass / X.mass[A].sum()
    C = 2.0 ** np.ceil(np.log2(ratio))
    assert gamma_median(X, u, A, gamma) <= gamma_median(X, u, range(X.n), gamma / C), \
        'Median on subset above median on superset with smaller gamma'


@given(median_pairs(), st.sampled_from([0.5, 1, 2]))
@settings(max_examples=200, deadline=None)
def test_median_chebyshev(data, p):
    X, u, v, A, gamma = data
    m = gamma_median(X, np.abs(u), A, gamma)
    bound = (integral_average(X, np.abs(u) ** p, A) / gamma) ** (1 / p)
    assert m <= bound * (1 + 1e-12), 'Median above Chebyshev bound'
