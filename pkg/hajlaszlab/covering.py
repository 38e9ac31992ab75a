"""Ball coverings and partitions of unity.

A covering at scale r is a greedy r-net: points are visited in index order
and a point becomes a center when it is at distance at least r from every
existing center. Partitions of unity are normalized tent functions
subordinate to the covering.

"""
import numpy as np

from .space import SpaceError, ValidationReport, ball

PARTITION_TOL = 1e-12
"""float: Tolerance of partition of unity checks."""


class BallCovering(object):
    """Covering of a space by balls of common radius.

    Args:
        space (MetricMeasureSpace): covered space
        r (float): radius of balls
        centers: iterable of center indices

    Attributes:
        r (float): radius
        centers (numpy.array): center indices
        balls (list): WeightedSubset B_i = B(center_i, r) per center
        doubled (list): WeightedSubset 2B_i = B(center_i, 2r) per center
        overlap_K (int): max over points of number of doubled balls
            containing the point
    """
    def __init__(self, space, r, centers):
        if not r > 0:
            raise SpaceError('Covering radius must be positive, got {}.'.format(r))
        centers = np.array(centers, dtype=int).ravel()
        if len(centers) == 0:
            raise SpaceError('Covering needs at least one center.')
        self.space = space
        self.r = float(r)
        self.centers = centers
        self.centers.flags.writeable = False
        self.balls = [ball(space, c, self.r) for c in centers]
        self.doubled = [ball(space, c, 2 * self.r) for c in centers]
        self.overlap_K = int(self.doubled_membership.sum(axis=0).max())

    def __repr__(self):
        return 'Covering of {} points by {} balls of radius {:g} (overlap {})'.format(self.space.n, len(self), self.r, self.overlap_K)

    def __len__(self):
        return len(self.centers)

    def __getitem__(self, i):
        return self.balls[i]

    @property
    def membership(self):
        """Boolean matrix (ball x point) of x in B_i"""
        return self.space.dist[self.centers] < self.r

    @property
    def doubled_membership(self):
        """Boolean matrix (ball x point) of x in 2B_i"""
        return self.space.dist[self.centers] < 2 * self.r

    def check(self, c_d=None):
        """Check coverage, separation and recorded overlap.

        Args:
            c_d (float): doubling constant. When given, overlap_K is also
                checked against :func:`overlap_bound`.

        Returns:
            ValidationReport: witnesses are uncovered point, pair of close
            centers and the recomputed overlap
        """
        report = ValidationReport()
        covered = self.membership.any(axis=0)
        report.add('coverage', covered.all(), int(np.argmin(covered)))
        d = self.space.dist[np.ix_(self.centers, self.centers)]
        close = (d < self.r) & ~np.eye(len(self), dtype=bool)
        pair = np.argwhere(close)
        report.add('separation', len(pair) == 0, tuple(int(self.centers[v]) for v in pair[0]) if len(pair) else None)
        K = int(self.doubled_membership.sum(axis=0).max())
        report.add('overlap', K == self.overlap_K, K)
        if c_d is not None:
            report.add('overlap bound', K <= overlap_bound(c_d), K)
        return report


def overlap_bound(c_d):
    """Packing bound c_d^4 of the overlap of an r-separated covering.

    The balls B(center, r/2) are disjoint and lie in B(x, 5r/2) for every
    center of a doubled ball containing x, and B(x, 5r/2) lies in
    B(center, 8r).
    """
    return float(c_d) ** 4


def build_covering(space, r):
    """Greedy r-net covering in ascending index order.

    Args:
        space (MetricMeasureSpace): space
        r (float): radius

    Returns:
        BallCovering: covering by balls B(center, r)

    Raises:
        SpaceError: r is not positive

    Example:
        >>> X = MetricMeasureSpace.from_points(np.arange(5.0))
        >>> build_covering(X, 2.5).centers
        array([0, 3])
    """
    if not r > 0:
        raise SpaceError('Covering radius must be positive, got {}.'.format(r))
    dmin = np.full(space.n, np.inf)
    centers = []
    for x in range(space.n):
        if dmin[x] >= r:
            centers.append(x)
            dmin = np.minimum(dmin, space.dist[x])
    return BallCovering(space, r, centers)


class PartitionOfUnity(object):
    """Partition of unity subordinate to a covering.

    Attributes:
        covering (BallCovering): covering
        phi (numpy.array): point x ball matrix of weights
        lipschitz_bound (float): (overlap_K + 1) / width
        core (float): radius of the balls the tents are built on
        width (float): tent width
    """
    def __init__(self, covering, phi, **kwargs):
        self.covering = covering
        self.phi = phi
        self.phi.flags.writeable = False
        self.core = kwargs.get('core', covering.r)
        self.width = kwargs.get('width', covering.r)
        self.lipschitz_bound = (covering.overlap_K + 1) / self.width

    def __repr__(self):
        return 'Partition of unity on {} balls of radius {:g}'.format(len(self.covering), self.covering.r)

    @property
    def space(self):
        return self.covering.space

    def check(self, tol=PARTITION_TOL):
        """Check row sums, support, lower bound and Lipschitz bound.

        Returns:
            ValidationReport: witnesses are point, (point, ball) or
            (x, y, ball)
        """
        cov, phi, dist = self.covering, self.phi, self.space.dist
        report = ValidationReport()
        rows = np.abs(phi.sum(axis=1) - 1)
        report.add('row sums', np.all(rows <= tol), int(np.argmax(rows)))
        outside = (dist[:, cov.centers] >= 2 * cov.r) & (phi != 0)
        hit = np.argwhere(outside)
        report.add('support', len(hit) == 0, tuple(int(v) for v in hit[0]) if len(hit) else None)
        low = cov.membership.T & (phi < 1 / cov.overlap_K - tol)
        hit = np.argwhere(low)
        report.add('lower bound', len(hit) == 0, tuple(int(v) for v in hit[0]) if len(hit) else None)
        witness = None
        for i in range(len(cov)):
            col = phi[:, i]
            bad = np.abs(np.subtract.outer(col, col)) > self.lipschitz_bound * dist + tol
            if bad.any():
                x, y = np.argwhere(bad)[0]
                witness = (int(x), int(y), i)
                break
        report.add('lipschitz', witness is None, witness)
        return report


def tent_partition(space, covering, core=None, width=None):
    """Normalized tents psi_i = max{0, 1 - d(x, B(center_i, core)) / width}.

    The distance to a ball is the minimum over its members.

    Args:
        space (MetricMeasureSpace): space
        covering (BallCovering): covering providing centers
        core (float): radius of core balls. Default covering radius.
        width (float): tent width. Default covering radius.

    Returns:
        PartitionOfUnity: normalized tents

    Raises:
        SpaceError: some point is outside every tent
    """
    core = covering.r if core is None else float(core)
    width = covering.r if width is None else float(width)
    if not (core > 0 and width > 0):
        raise SpaceError('Tent core and width must be positive, got {} and {}.'.format(core, width))
    psi = np.empty((len(covering), space.n))
    for i, c in enumerate(covering.centers):
        members = ball(space, c, core).indices
        psi[i] = np.maximum(0, 1 - space.dist[:, members].min(axis=1) / width)
    total = psi.sum(axis=0)
    if not np.all(total > 0):
        raise SpaceError('Tent partition undefined at point {}.'.format(int(np.argmin(total))))
    return PartitionOfUnity(covering, np.ascontiguousarray((psi / total).T), core=core, width=width)


def partition_of_unity(space, covering):
    """Tent partition of unity with core balls B_i and width r.

    Every point lies in some B_j where psi_j = 1, so the normalization is
    well defined. Weights vanish outside 2B_i and are at least 1/overlap_K on
    B_i.

    Example:
        >>> X = MetricMeasureSpace.from_points(np.arange(5.0))
        >>> partition_of_unity(X, build_covering(X, 2.5)).phi[4]
        array([0.16666667, 0.83333333])
    """
    return tent_partition(space, covering)

