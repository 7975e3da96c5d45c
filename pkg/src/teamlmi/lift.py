"""Lift finite-horizon dynamic LQ problems to static team form.

Dynamics, for stages k = 1..M::

    x(k+1) = A x(k) + B u(k) + w(k)
    y_i(k) = C_i x(k) + v_i(k)
    u_i(k) = K_{i,k} y_i(k)

Each (player, stage) pair becomes one member of the static team. Stage costs
``[x(k); u(k)]^T S [x(k); u(k)]`` are summed over k = 1..M.

Nature in the lifted problem is ``(x(1), w(1), ..., w(M-1))`` when
``include_initial_state`` is set, and ``(w(1), ..., w(M-1))`` with
``x(1) = 0`` otherwise. ``w(M)`` only drives ``x(M+1)``, which is never
costed or measured, so it is left out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import InvalidProblemError, Partition, TeamProblem, _frozen, _symmetrized, is_pd, is_psd

__all__ = ["DynamicProblem", "lift_dynamic", "simulate_dynamic"]


@dataclass(frozen=True, eq=False)
class DynamicProblem:
    A: np.ndarray
    B: np.ndarray
    Cmeas: tuple[np.ndarray, ...]
    stage_cost: np.ndarray
    horizon: int
    m_sizes: tuple[int, ...]
    include_initial_state: bool = True

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "B", _frozen(self.B))
        object.__setattr__(self, "Cmeas", tuple(_frozen(c) for c in self.Cmeas))
        object.__setattr__(self, "stage_cost", _frozen(_symmetrized(self.stage_cost)))
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "m_sizes", tuple(int(s) for s in self.m_sizes))
        object.__setattr__(self, "include_initial_state", bool(self.include_initial_state))

    @property
    def nx(self) -> int:
        return self.A.shape[0]

    @property
    def mu(self) -> int:
        return self.B.shape[1]

    @property
    def p_sizes(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.Cmeas)

    @property
    def C(self) -> np.ndarray:
        return np.vstack(self.Cmeas)

    def validate(self) -> list[str]:
        out = []
        nx, mu = self.nx, self.mu
        if self.horizon < 1:
            out.append(f"horizon must be >= 1, got {self.horizon}")
        if self.A.shape != (nx, nx):
            out.append(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != nx:
            out.append(f"B has {self.B.shape[0]} rows, expected {nx}")
        if len(self.Cmeas) != len(self.m_sizes):
            out.append(f"{len(self.Cmeas)} measurement matrices for {len(self.m_sizes)} players")
        if sum(self.m_sizes) != mu:
            out.append(f"player decision sizes sum to {sum(self.m_sizes)}, B has {mu} columns")
        for i, c in enumerate(self.Cmeas):
            if c.shape[1] != nx:
                out.append(f"C_{i} has {c.shape[1]} columns, expected {nx}")
            if c.shape[0] < 1:
                out.append(f"C_{i} has no rows")
        S = self.stage_cost
        if S.shape != (nx + mu, nx + mu):
            out.append(f"stage_cost has shape {S.shape}, expected {(nx + mu, nx + mu)}")
        if out:
            return out
        if not is_psd(S):
            out.append("stage cost not PSD")
        if not is_pd(S[nx:, nx:]):
            out.append("stage cost Quu block not positive definite")
        return out


def _state_maps(dyn: DynamicProblem):
    """Matrices ``X_k, U_k`` with ``x(k) = X_k nature + U_k u``, k = 1..M."""
    M, nx, mu = dyn.horizon, dyn.nx, dyn.mu
    n_w = nx * (M - 1) + (nx if dyn.include_initial_state else 0)
    off = nx if dyn.include_initial_state else 0
    X = np.zeros((nx, n_w))
    if dyn.include_initial_state:
        X[:, :nx] = np.eye(nx)
    U = np.zeros((nx, mu * M))
    Xs, Us = [X], [U]
    for k in range(1, M):
        # x(k+1) = A x(k) + B u(k) + w(k), stage k is 1-based
        X = dyn.A @ X
        U = dyn.A @ U
        U[:, (k - 1) * mu:k * mu] += dyn.B
        X[:, off + (k - 1) * nx:off + k * nx] += np.eye(nx)
        Xs.append(X)
        Us.append(U)
    return Xs, Us, n_w


def lift_dynamic(dyn: DynamicProblem) -> TeamProblem:
    """Stack a finite-horizon problem into a static :class:`TeamProblem`.

    Decisions are ordered stage-major: ``u = (u_1(1), ..., u_N(1), u_1(2), ...)``
    and likewise for measurements, so ``D`` is strictly block lower
    triangular in stage order.
    """
    bad = dyn.validate()
    if bad:
        raise InvalidProblemError("; ".join(bad))
    M, nx, mu = dyn.horizon, dyn.nx, dyn.mu
    Cs = dyn.C
    Xs, Us, n_w = _state_maps(dyn)
    D = np.vstack([Cs @ U for U in Us])
    E = np.vstack([Cs @ X for X in Xs])
    H = np.zeros((n_w + mu * M,) * 2)
    for k in range(M):
        sel = np.zeros((mu, mu * M))
        sel[:, k * mu:(k + 1) * mu] = np.eye(mu)
        T = np.vstack([np.hstack([Xs[k], Us[k]]), np.hstack([np.zeros((mu, n_w)), sel])])
        H += T.T @ dyn.stage_cost @ T
    H = 0.5 * (H + H.T)
    partition = Partition(dyn.m_sizes * M, dyn.p_sizes * M)
    return TeamProblem(
        Qww=H[:n_w, :n_w],
        Qwu=H[:n_w, n_w:],
        Quu=H[n_w:, n_w:],
        D=D,
        E=E,
        partition=partition,
    )


def simulate_dynamic(dyn: DynamicProblem, gains: Sequence[Sequence[np.ndarray]], x1, w, v):
    """Run the closed loop in the time domain.

    ``gains[k][i]`` is player i's gain at stage k (0-based), ``w[k]`` is
    ``w(k+1)`` for k = 0..M-2 and ``v[k][i]`` the noise of player i. Returns
    ``(cost, energy)``, the summed stage cost and disturbance energy. ``x1`` is
    ignored (taken as zero) unless ``include_initial_state`` is set.
    """
    M, nx = dyn.horizon, dyn.nx
    x = np.array(x1, dtype=float) if dyn.include_initial_state else np.zeros(nx)
    energy = float(x @ x) if dyn.include_initial_state else 0.0
    cost = 0.0
    for k in range(M):
        u = np.concatenate([
            np.asarray(gains[k][i]) @ (c @ x + np.asarray(v[k][i]))
            for i, c in enumerate(dyn.Cmeas)
        ])
        energy += sum(float(np.dot(vi, vi)) for vi in v[k])
        z = np.concatenate([x, u])
        cost += float(z @ dyn.stage_cost @ z)
        if k < M - 1:
            x = dyn.A @ x + dyn.B @ u + w[k]
            energy += float(w[k] @ w[k])
    return cost, energy
