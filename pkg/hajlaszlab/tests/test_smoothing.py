import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hajlaszlab.smoothing import (CoveringLadder, ScaleRange, comparability_constant, discrete_convolution,
                                  discrete_maximal, discrete_median_convolution, discrete_median_maximal, dyadic_band,
                                  hl_maximal, median_maximal, restricted_discrete_maximal, restricted_maximal,
                                  restricted_median_maximal)
from hajlaszlab.space import MetricMeasureSpace, ParameterError, SpaceError, grid1d, random_points


@pytest.fixture
def grid():
    return grid1d(5)


@pytest.fixture
def wave():
    X = grid1d(33)
    return X, np.sin(7 * X.coordinates) + X.coordinates


def test_dyadic_band():
    assert dyadic_band(1.0) == -1, 'Wrong band of 1'
    assert dyadic_band(0.75) == 0, 'Wrong band of 3/4'
    assert dyadic_band(0.5) == 0, 'Wrong band of 1/2'
    assert dyadic_band(0.25) == 1, 'Wrong band of 1/4'


def test_scale_range(grid):
    scales = ScaleRange.from_space(grid)
    assert (scales.k_min, scales.k_max) == (-1, 3), 'Wrong scale range'
    assert len(scales) == 5, 'Wrong number of scales'
    assert list(scales) == [-1, 0, 1, 2, 3], 'Wrong scales'
    assert scales.index(0) == 1, 'Wrong scale index'
    assert 4 not in scales, 'Scale out of range accepted'
    assert ScaleRange.from_space(MetricMeasureSpace([[0]])) == ScaleRange(0, 0), 'Wrong single point range'
    with pytest.raises(ParameterError):
        ScaleRange(2, 1)


def test_ladder_cache(grid):
    ladder = CoveringLadder(grid)
    pou = ladder.partition(1)
    assert ladder.partition(1) is pou, 'Partition not cached'
    assert len(ladder) == 1, 'Wrong cache size'
    assert len(ladder.partition(-1).covering) == 1, 'Coarsest scale has several balls'
    with pytest.raises(SpaceError):
        discrete_median_maximal(grid1d(6), np.zeros(6), ladder=ladder)


def test_finest_scale_is_identity():
    X = random_points(12, seed=5)
    u = np.random.default_rng(0).normal(size=12)
    ladder = CoveringLadder(X)
    pou = ladder.partition(ScaleRange.from_space(X).k_max)
    assert np.array_equal(pou.phi, np.eye(12)), 'Finest partition is not trivial'
    assert np.array_equal(np.asarray(discrete_median_convolution(X, u, pou)), u), 'Median convolution changed u'
    assert np.allclose(np.asarray(discrete_convolution(X, u, pou)), u), 'Convolution changed u'


def test_constant_reproduced(wave):
    X, _ = wave
    ladder = CoveringLadder(X)
    c = np.full(X.n, 2.5)
    for k in ScaleRange.from_space(X):
        pou = ladder.partition(k)
        assert np.allclose(np.asarray(discrete_median_convolution(X, c, pou, 0.25)), 2.5), 'Constant not reproduced'
        assert np.allclose(np.asarray(discrete_convolution(X, c, pou)), 2.5), 'Constant not reproduced'


def test_maximal_dominates(wave):
    X, u = wave
    absu = np.abs(u)
    for M in (median_maximal(X, u), hl_maximal(X, u), discrete_median_maximal(X, u), discrete_maximal(X, u)):
        assert np.all(np.asarray(M) >= absu - 1e-12), 'Maximal function below |u|'
    assert np.asarray(median_maximal(X, u)).max() == absu.max(), 'Median maximal exceeds max |u|'


def test_restricted_maximal(wave):
    X, u = wave
    absu = np.abs(u)
    small = X.min_distance / 2
    assert np.allclose(np.asarray(restricted_maximal(X, u, small)), absu), 'Singleton balls only'
    assert np.array_equal(np.asarray(restricted_median_maximal(X, u, small)), absu), 'Singleton balls only'
    assert np.allclose(np.asarray(restricted_maximal(X, u, 10)), np.asarray(hl_maximal(X, u))), 'Unrestricted mismatch'
    assert np.array_equal(np.asarray(restricted_median_maximal(X, u, 10)), np.asarray(median_maximal(X, u)))
    with pytest.raises(SpaceError):
        restricted_maximal(X, u, 0)


def test_restricted_discrete_maximal(grid):
    u = np.array([1.0, -2.0, 0.5, 0.0, 3.0])
    assert np.allclose(np.asarray(restricted_discrete_maximal(grid, u, 0.2)), np.abs(u)), 'Finest scale only'
    with pytest.raises(ParameterError):
        restricted_discrete_maximal(grid, u, 0.125)
    with pytest.raises(SpaceError):
        restricted_discrete_maximal(grid, u, -1)


def test_comparability(wave):
    X, u = wave
    assert comparability_constant(X, np.full(X.n, 3.0)) == 1.0, 'Constant needs C > 1'
    C = comparability_constant(grid1d(64), np.sin(9 * grid1d(64).coordinates))
    assert C is not None and 1 <= C <= 64, 'No comparability constant'


@given(st.integers(0, 1000), st.sampled_from([0.5, 0.25, 0.1]), st.integers(0, 6))
@settings(max_examples=30, deadline=None)
def test_median_convolution_range(seed, gamma, k):
    X = random_points(15, seed=seed)
    u = np.random.default_rng(seed).normal(size=15)
    pou = CoveringLadder(X).partition(k)
    v = np.asarray(discrete_median_convolution(X, u, pou, gamma))
    assert np.all(v >= u.min() - 1e-12) and np.all(v <= u.max() + 1e-12), 'Median convolution out of range'
