import numpy as np
import pytest

from hajlaszlab.space import (MetricMeasureSpace, WeightedSubset, FunctionOnSpace, SpaceError, ParameterError, ball,
                              clusters, estimate_doubling, from_spec, generate, grid1d, load_space,
                              nonempty_spheres_check, random_points, save_space, validate)


@pytest.fixture
def grid():
    return grid1d(5)


def test_grid1d(grid):
    assert grid.n == 5, 'Wrong number of points'
    assert grid.diameter == 1.0, 'Wrong diameter'
    assert grid.min_distance == 0.25, 'Wrong spacing'
    assert grid.total_mass == pytest.approx(1.0), 'Wrong total mass'
    assert validate(grid).ok, 'Grid is not a metric measure space'


def test_ball_is_open(grid):
    assert ball(grid, 2, 0.3).indices.tolist() == [1, 2, 3], 'Wrong ball'
    assert ball(grid, 2, 0.25).indices.tolist() == [2], 'Ball is not open'
    with pytest.raises(SpaceError):
        ball(grid, 2, 0)


def test_shells(grid):
    order, ends, levels = grid.shells(0)
    assert order.tolist() == [0, 1, 2, 3, 4], 'Wrong order'
    assert ends.tolist() == [1, 2, 3, 4, 5], 'Wrong shell ends'
    assert levels.tolist() == [0, 0.25, 0.5, 0.75, 1.0], 'Wrong levels'


def test_validate_triangle():
    X = MetricMeasureSpace([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    report = validate(X)
    assert not report.ok, 'Triangle violation not detected'
    name, passed, witness = report['triangle']
    assert not passed, 'Triangle check passed'
    assert witness == (0, 1, 2), 'Wrong witness'


def test_validate_symmetry_and_positivity():
    report = validate(MetricMeasureSpace([[0, 1], [2, 0]]))
    assert not report['symmetry'][1], 'Asymmetry not detected'
    report = validate(MetricMeasureSpace([[0, 0], [0, 0]]))
    assert not report['positivity'][1], 'Zero distance not detected'
    report = validate(MetricMeasureSpace([[0, 1], [1, 0]], [1, 0]))
    assert [c[0] for c in report.failures] == ['mass'], 'Wrong failures'


def test_invalid_construction():
    with pytest.raises(SpaceError):
        MetricMeasureSpace([[0, 1, 2], [1, 0, 1]])
    with pytest.raises(SpaceError):
        MetricMeasureSpace([[0, 1], [1, 0]], [1, 1, 1])


def test_subset(grid):
    A = WeightedSubset(grid, [3, 1, 1])
    assert A.indices.tolist() == [1, 3], 'Duplicates not merged'
    assert A.total_mass == pytest.approx(0.4), 'Wrong subset mass'
    assert 3 in A and 2 not in A, 'Wrong membership'
    assert A.issubset(grid.everything), 'Subset not in space'
    assert A.union(grid.subset([0])) == grid.subset([0, 1, 3]), 'Wrong union'
    with pytest.raises(SpaceError):
        WeightedSubset(grid, [])
    with pytest.raises(SpaceError):
        WeightedSubset(grid, [5])


def test_function_file(grid, tmp_path):
    u = FunctionOnSpace([0.1, -2, 3, 0, 1e-17])
    u.save(tmp_path / 'u.csv')
    v = FunctionOnSpace.load(tmp_path / 'u.csv')
    assert np.array_equal(u.values, v.values), 'Values changed in file'
    (tmp_path / 'plain.txt').write_text('1\n2\n\n3\n')
    assert FunctionOnSpace.load(tmp_path / 'plain.txt').values.tolist() == [1, 2, 3], 'Wrong plain values'
    with pytest.raises(SpaceError):
        FunctionOnSpace([1, np.nan])


def test_space_file(tmp_path):
    X = random_points(6, dim=2, seed=3, mass='random')
    save_space(X, tmp_path / 'x.json')
    Y = load_space(tmp_path / 'x.json')
    assert np.allclose(X.dist, Y.dist, rtol=0, atol=1e-15), 'Distances changed in file'
    assert np.array_equal(X.mass, Y.mass), 'Masses changed in file'


def test_load_invalid_space(tmp_path):
    (tmp_path / 'bad.json').write_text('{"metric": "explicit", "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}')
    with pytest.raises(SpaceError):
        load_space(tmp_path / 'bad.json')
    (tmp_path / 'nodist.json').write_text('{"metric": "explicit"}')
    with pytest.raises(SpaceError):
        load_space(tmp_path / 'nodist.json')


def test_snowflake():
    X = generate('snowflake', base={'kind': 'grid1d', 'n': 3}, alpha=0.5)
    assert X.dist[0, 1] == pytest.approx(np.sqrt(0.5)), 'Wrong snowflake distance'
    assert validate(X).ok, 'Snowflake is not a metric'
    with pytest.raises(SpaceError):
        grid1d(3).snowflake(1.5)


def test_generators():
    assert clusters((3, 4)).n == 7, 'Wrong cluster size'
    assert np.array_equal(random_points(8, seed=1).dist, random_points(8, seed=1).dist), 'Generator not seeded'
    assert from_spec({'kind': 'grid2d', 'n': 3}).n == 9, 'Wrong grid2d size'
    with pytest.raises(SpaceError):
        generate('torus', n=3)
    with pytest.raises(SpaceError):
        generate('grid1d', m=3)
    with pytest.raises(SpaceError):
        from_spec({'n': 3})


def test_doubling_two_points():
    report = estimate_doubling(MetricMeasureSpace([[0, 1], [1, 0]]))
    assert report.full, 'Small space was sampled'
    assert report.c_d == 2.0, 'Wrong doubling constant'
    assert report.Q == 1.0, 'Wrong doubling dimension'
    assert report.witness[2] == 2.0, 'Wrong witness'


def test_doubling_sampled():
    X = random_points(20, seed=2)
    full = estimate_doubling(X, full=True)
    sampled = estimate_doubling(X, sample_budget=50, full=False)
    assert len(sampled.samples) == 50, 'Wrong number of samples'
    assert 1 <= sampled.c_d <= full.c_d, 'Sampled constant exceeds full sweep'
    with pytest.raises(ParameterError):
        estimate_doubling(X, sample_budget=0)


def test_nonempty_spheres(grid):
    report = nonempty_spheres_check(grid, r_min=0.5, r_max=0.5)
    assert report.summary == 1.0, 'Grid sphere of radius 1/2 is empty'
    report = nonempty_spheres_check(clusters((3, 3), spread=0.01, gap=1.0))
    assert report.summary < 1.0, 'Cluster gap not detected'
    assert len(report.failures) > 0, 'No failure witnesses'
    with pytest.raises(ParameterError):
        nonempty_spheres_check(grid, tolerance=1)


def test_doubling_one_point():
    X = MetricMeasureSpace([[0]])
    for full in (True, False):
        report = estimate_doubling(X, full=full)
        assert report.c_d == 1.0, 'One point space is not doubling with constant 1'
        assert report.witness is None, 'Witness on one point space'


def test_spheres_default_radii():
    X = MetricMeasureSpace([[0, 1], [1, 0]])
    report = nonempty_spheres_check(X, n_radii=4)
    assert report.radii[[0, -1]] == pytest.approx([0.5, 1.0]), 'Wrong default radii'
    assert not report.satisfied[:, 0].any(), 'Sphere below the smallest distance is not empty'
    assert report.satisfied[:, -1].all(), 'Sphere at the diameter is empty'
    assert report.summary < 1.0, 'Empty spheres not reported'
