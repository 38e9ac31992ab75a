import numpy as np
import pytest

from hajlaszlab.activeset import OracleError
from hajlaszlab.norms import (FractionalGradient, NormParams, UpperBoundWarning, aggregate_norm, canonical_gradient,
                              full_norm, is_feasible, lattice_gradient, lp_norm, min_norm_gradient,
                              oracle_min_norm, pair_bands, repair, variable_rows)
from hajlaszlab.smoothing import ScaleRange
from hajlaszlab.space import MetricMeasureSpace, ParameterError, random_points

CERTIFIED = [NormParams(0.5, 1, 1), NormParams(0.5, 2, 2), NormParams(0.5, 2, np.inf), NormParams(0.7, 1, np.inf),
             NormParams(0.5, 2, 2, 'tl'), NormParams(0.5, 1, 1, 'tl'), NormParams(0.5, 2, np.inf, 'tl'),
             NormParams(1, 1, flavor='hajlasz'), NormParams(0.5, 2, flavor='hajlasz')]


@pytest.fixture
def pair():
    return MetricMeasureSpace([[0, 1], [1, 0]])


@pytest.fixture
def small():
    X = random_points(5, dim=2, seed=11, mass='random')
    u = np.random.default_rng(11).normal(size=5)
    return X, u


def test_params_validation():
    for args in [(0, 2), (1.5, 2), (0.5, np.inf), (0.5, 2, 0), (0.5, 2, 2, 'sobolev'), (0.5, 2, 2, 'hajlasz')]:
        with pytest.raises(ParameterError):
            NormParams(*args)
    assert NormParams(0.5, 1, 1).certified, 'Convex exponents not certified'
    assert not NormParams(0.5, 0.5, 2).certified, 'p < 1 certified'
    assert NormParams(0.5, 0.5, 0.25).convexified == NormParams(0.5, 1, 1), 'Wrong convexified parameters'


def test_params_dict():
    params = NormParams(0.5, 2, flavor='tl')
    assert params.to_dict()['q'] == 'inf', 'Infinite q not serialized'
    assert NormParams.from_dict(params.to_dict()) == params, 'Parameters changed in dict'
    with pytest.raises(ParameterError):
        NormParams.from_dict({'s': 0.5, 'p': 2, 'r': 1})
    with pytest.raises(ParameterError):
        NormParams.from_dict({'p': 2})


def test_pair_bands(small):
    X, u = small
    bands = pair_bands(X, u, 0.5)
    assert sum(len(b) for b in bands) == 10, 'Bands do not partition the pairs'
    for b in bands:
        d = X.dist[b.I, b.J]
        assert np.all((2.0 ** (-b.k - 1) <= d) & (d < 2.0 ** -b.k)), 'Pair in wrong band'
        assert np.allclose(b.c, np.abs(u[b.I] - u[b.J]) / d ** 0.5), 'Wrong constraint values'


def test_canonical_gradient(small):
    X, u = small
    g = canonical_gradient(X, u, 0.5)
    assert is_feasible(g, pair_bands(X, u, 0.5)), 'Canonical gradient infeasible'
    assert not is_feasible(FractionalGradient.zeros(g.scales, X.n), pair_bands(X, u, 0.5)), 'Zero gradient feasible'


def test_gradient_rows():
    g = FractionalGradient(ScaleRange(0, 1), [[1, 2], [0, 1]])
    assert g[1].tolist() == [0, 1], 'Wrong row'
    assert g[5].tolist() == [0, 0], 'Row outside range is not zero'
    with pytest.raises(ParameterError):
        FractionalGradient(ScaleRange(0, 1), [[1, -2], [0, 1]])
    with pytest.raises(ParameterError):
        FractionalGradient(ScaleRange(0, 2), [[1, 2], [0, 1]])
    h = lattice_gradient([g, FractionalGradient(ScaleRange(0, 1), [[0, 3], [2, 0]])])
    assert h.g.tolist() == [[1, 3], [2, 1]], 'Wrong lattice maximum'


def test_two_point_norms(pair):
    g, value, cert = min_norm_gradient(pair, [0, 1], NormParams(1, 1, 1))
    assert value == pytest.approx(1), 'Wrong seminorm'
    assert cert.certified, 'Convex problem not certified'
    for params in (NormParams(1, 2, 2), NormParams(1, 2, flavor='hajlasz')):
        assert min_norm_gradient(pair, [0, 1], params)[1] == pytest.approx(np.sqrt(0.5)), 'Wrong seminorm'
    assert aggregate_norm(canonical_gradient(pair, [0, 1], 1), NormParams(1, 2, 2), pair) == pytest.approx(np.sqrt(0.5))
    assert full_norm(pair, [0, 1], NormParams(1, 2, 2)) == pytest.approx(1 + np.sqrt(0.5)), 'Wrong full norm'


def test_three_point_path():
    X = MetricMeasureSpace.from_points([0.0, 1.0, 2.0])
    params = NormParams(1, 1, 1)
    assert oracle_min_norm(X, [0, 1, 2], params) == pytest.approx(2), 'Wrong exact seminorm'
    assert min_norm_gradient(X, [0, 1, 2], params)[1] == pytest.approx(2, rel=1e-6), 'Wrong seminorm'


def test_constant_function(small):
    X, _ = small
    g, value, cert = min_norm_gradient(X, np.full(5, 3.0), NormParams(0.5, 2, 2))
    assert value == 0, 'Constant has positive seminorm'
    assert cert.method == 'trivial', 'Solver used for constant'
    assert full_norm(X, np.full(5, 3.0), NormParams(0.5, 2, 2)) == pytest.approx(lp_norm(X, np.full(5, 3.0), 2))


@pytest.mark.parametrize('params', CERTIFIED, ids=repr)
def test_solver_matches_oracle(small, params):
    X, u = small
    gradient, value, cert = min_norm_gradient(X, u, params)
    exact = oracle_min_norm(X, u, params)
    assert cert.certified, 'Convex problem not certified'
    assert is_feasible(gradient, pair_bands(X, u, params.s)), 'Solver gradient infeasible'
    assert aggregate_norm(gradient, params, X) == pytest.approx(value), 'Value is not the gradient norm'
    assert exact <= value + 1e-7, 'Solver below exact minimum'
    assert value == pytest.approx(exact, rel=1e-4, abs=1e-7), 'Solver far from exact minimum'
    canonical = aggregate_norm(canonical_gradient(X, u, params.s), params, X)
    assert value <= canonical * (1 + 1e-6) + 1e-9, 'Worse than canonical'


def test_coupled_tl_oracle():
    X = random_points(4, dim=1, seed=3, mass='random')
    u = np.array([0.0, 1.0, -0.5, 2.0])
    params = NormParams(0.5, 2, 1, 'tl')
    exact = oracle_min_norm(X, u, params)
    gradient, value, cert = min_norm_gradient(X, u, params)
    assert exact <= value + 1e-7, 'Solver below exact minimum'
    assert value == pytest.approx(exact, rel=1e-4, abs=1e-7), 'Solver far from exact minimum'
    besov = oracle_min_norm(X, u, NormParams(0.5, 2, 1))
    assert exact <= besov * (1 + 1e-9), 'TL(2, 1) above Besov(2, 1)'


def test_joint_besov(small):
    X, u = small
    params = NormParams(0.5, 2, 2)
    assert min_norm_gradient(X, u, params, joint=True)[1] == pytest.approx(min_norm_gradient(X, u, params)[1],
                                                                          rel=1e-4)


def test_upper_bound_mode(small):
    X, u = small
    params = NormParams(0.5, 0.5, 2)
    with pytest.warns(UpperBoundWarning):
        gradient, value, cert = min_norm_gradient(X, u, params, starts=2)
    assert cert.mode == 'upper-bound', 'Non convex problem certified'
    assert is_feasible(gradient, pair_bands(X, u, 0.5)), 'Upper bound gradient infeasible'
    assert value <= aggregate_norm(canonical_gradient(X, u, 0.5), params, X) + 1e-12, 'Worse than canonical'


def test_repair():
    X = MetricMeasureSpace.from_points([0.0, 1.0, 2.0])
    bands = pair_bands(X, [0, 1, 3], 1)
    rows = variable_rows(bands, 'hajlasz')
    G, residual = repair(np.array([[-0.5, 0.2, 0.0]]), rows, 3)
    assert np.all(G >= 0), 'Negative entries after repair'
    assert residual > 0.5, 'Residual not measured before repair'
    assert all(np.all(b.slack(G[0]) >= -1e-12) for b in bands), 'Repaired gradient infeasible'


def test_oracle_limits(small):
    X, u = small
    with pytest.raises(OracleError):
        oracle_min_norm(random_points(13, seed=1), np.arange(13.0), NormParams(0.5, 2, 2))
    for params in (NormParams(0.5, 3, 2), NormParams(0.5, 1, 2, 'tl'), NormParams(0.5, 2, 3)):
        with pytest.raises(OracleError):
            oracle_min_norm(X, u, params)


LATTICE_PARAMS = [NormParams(0.5, 2, 2), NormParams(0.5, 1, 1, 'tl'), NormParams(1, 2, flavor='hajlasz')]


@pytest.mark.parametrize('params', LATTICE_PARAMS, ids=repr)
def test_lattice_of_gradients(small, params):
    X, _ = small
    us = np.random.default_rng(3).normal(size=(3, 5))
    gradients = [min_norm_gradient(X, u, params)[0] for u in us] + [canonical_gradient(X, u, params.s) for u in us]
    h = lattice_gradient(gradients)
    for w in (us.max(axis=0), us.min(axis=0)):
        assert is_feasible(h, pair_bands(X, w, params.s)), 'Lattice gradient infeasible for max or min'
    total = sum(aggregate_norm(g, params, X) for g in gradients)
    assert aggregate_norm(h, params, X) <= total + 1e-9, 'Lattice gradient norm above sum of norms'


@pytest.mark.parametrize('flavor', ['besov', 'tl'])
def test_seminorm_decreasing_in_q(small, flavor):
    X, u = small
    values = [min_norm_gradient(X, u, NormParams(0.5, 2, q, flavor))[1] for q in (1, 2, np.inf)]
    assert values[1] <= values[0] * (1 + 1e-5) and values[2] <= values[1] * (1 + 1e-5), \
        'Seminorm increases with q'
    hajlasz = min_norm_gradient(X, u, NormParams(0.5, 2, flavor='hajlasz'))[1]
    if flavor == 'tl':
        assert values[2] == pytest.approx(hajlasz, rel=1e-5), 'TL with q = inf differs from Hajlasz'
