"""Worked problems with known answers."""

from __future__ import annotations

import numpy as np

from .lift import DynamicProblem
from .model import GammaFormProblem, Partition, TeamProblem

__all__ = ["witsenhausen", "witsenhausen_team", "multistage", "multistage_dynamic"]


def witsenhausen(k2: float) -> GammaFormProblem:
    """Deterministic Witsenhausen problem in (y1, y2, u1, u2) coordinates.

    Players see ``y1 = x0`` and ``y2 = x0 + u1 + w`` without measurement noise,
    so nature is fully described by the measurements (``q = 0``). The ratio is

        (k2 u1^2 + (y1 + u1 - u2)^2) / (y1^2 + (y1 + u1 - y2)^2)

    and ``Q - gamma R`` reproduces the familiar 4x4 gamma-parameterized form.
    """
    k2 = float(k2)
    if not k2 > 0:
        raise ValueError(f"k2 must be positive, got {k2}")
    Q = np.array([
        [1.0, 0.0, 1.0, -1.0],
        [0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 1.0 + k2, -1.0],
        [-1.0, 0.0, -1.0, 1.0],
    ])
    R = np.array([
        [2.0, -1.0, 1.0, 0.0],
        [-1.0, 1.0, -1.0, 0.0],
        [1.0, -1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    return GammaFormProblem(Q=Q, R=R, q=0, partition=Partition.scalar(2))


def witsenhausen_team(k2: float) -> TeamProblem:
    """Witsenhausen problem with additive noise on both measurements.

    Nature is ``x0`` plus a noise on each measurement: ``y1 = x0 + v1`` and
    ``y2 = x0 + u1 + v2``. This is a different game from :func:`witsenhausen`
    (the first player no longer sees ``x0`` exactly), with the same signaling
    matrix and the same ceiling ``gamma_bar = k2``.
    """
    k2 = float(k2)
    return TeamProblem(
        Qww=[[1.0]],
        Qwu=[[1.0, -1.0]],
        Quu=[[1.0 + k2, -1.0], [-1.0, 1.0]],
        D=[[0.0, 0.0], [1.0, 0.0]],
        E=[[1.0], [1.0]],
        partition=Partition.scalar(2),
    )


def multistage(m: int) -> TeamProblem:
    """Multi-stage problem ``x_{k+1} = u_k``, ``y_k = x_k + v_k``, k = 0..m-1.

    The cost is ``(x_m - x0)^2 + sum_{k<=m-2} u_k^2`` against the energy
    ``x0^2 + sum_k v_k^2``. Nature is ``x0``; the noises are the ``v`` of the
    static problem.
    """
    m = int(m)
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    Qwu = np.zeros((1, m))
    Qwu[0, -1] = -1.0
    D = np.eye(m, k=-1)
    E = np.zeros((m, 1))
    E[0, 0] = 1.0
    return TeamProblem(
        Qww=[[1.0]],
        Qwu=Qwu,
        Quu=np.eye(m),
        D=D,
        E=E,
        partition=Partition.scalar(m),
    )


def multistage_dynamic(m: int, include_initial_state: bool = True) -> DynamicProblem:
    """Scalar integrator chain ``x(k+1) = u(k) + w(k)`` with ``y(k) = x(k) + v(k)``.

    Shares the signaling pattern of :func:`multistage`, so its lift has a
    unit sub-diagonal ``D`` and ``gamma_bar = 1``. Only the decisions are
    penalized; the terminal-versus-initial error term of the static problem
    is not a stage cost.
    """
    m = int(m)
    return DynamicProblem(
        A=[[0.0]],
        B=[[1.0]],
        Cmeas=([[1.0]],),
        stage_cost=np.diag([0.0, 1.0]),
        horizon=m,
        m_sizes=(1,),
        include_initial_state=include_initial_state,
    )
