import numpy as np
import pytest

from teamlmi import Partition, TeamProblem


def random_partition(rng, max_total=6, max_players=3):
    N = int(rng.integers(1, max_players + 1))
    m_sizes = _split(rng, int(rng.integers(N, max_total + 1)), N)
    p_sizes = _split(rng, int(rng.integers(N, max_total + 1)), N)
    return Partition(m_sizes, p_sizes)


def _split(rng, total, parts):
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) if parts > 1 else []
    edges = [0, *cuts, total]
    return tuple(int(b - a) for a, b in zip(edges[:-1], edges[1:]))


def random_team(rng, q=None, partition=None, signaling=1.0):
    """Random valid team problem: PSD cost with PD Quu, dense D and E."""
    partition = partition or random_partition(rng)
    q = int(rng.integers(1, 7)) if q is None else q
    m, p = partition.m, partition.p
    F = rng.normal(size=(q + m + 2, q + m))
    cost = F.T @ F / (q + m)
    cost[q:, q:] += 0.1 * np.eye(m)
    return TeamProblem(
        Qww=cost[:q, :q],
        Qwu=cost[:q, q:],
        Quu=cost[q:, q:],
        D=signaling * rng.normal(size=(p, m)),
        E=rng.normal(size=(p, q)),
        partition=partition,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def trivial_team():
    """Qwu = 0, D = 0, E = 0, Qww = diag(2, 1), Quu = I; value 2 at K = 0."""
    return TeamProblem(
        Qww=np.diag([2.0, 1.0]),
        Qwu=np.zeros((2, 2)),
        Quu=np.eye(2),
        D=np.zeros((2, 2)),
        E=np.zeros((2, 2)),
        partition=Partition.scalar(2),
    )


@pytest.fixture
def decision_only_team():
    """Nature does not enter the cost (Qww = 0, Qwu = 0); the zero gain costs nothing."""
    return TeamProblem(
        Qww=np.zeros((1, 1)),
        Qwu=np.zeros((1, 2)),
        Quu=np.eye(2),
        D=np.zeros((2, 2)),
        E=np.ones((2, 1)),
        partition=Partition.scalar(2),
    )
