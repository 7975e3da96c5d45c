"""Exact worst-case evaluation of a fixed linear strategy.

For ``u = K C x`` the game ratio is the Rayleigh quotient of the pencil

    GJ = [I; KC]^T Q [I; KC],   GF = [I; KC]^T R [I; KC],

so its supremum is a generalized eigenvalue once the null space of ``GF``
is dealt with. None of this touches the LMI machinery, which is what makes
it usable as a certificate for solver output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    BlockGain,
    GammaFormProblem,
    IllPosedLoopError,
    TeamProblem,
    as_gamma_form,
)

__all__ = [
    "ClosedLoopPencil",
    "Witness",
    "closed_loop_pencil",
    "achieved_gamma",
    "worst_case_direction",
    "worst_case_witness",
    "sample_ratio",
    "sample_ratio_x",
    "well_posed",
    "solve_loop",
]

NULL_RTOL = 1e-12
WELL_POSED_RTOL = 1e-10


@dataclass(frozen=True)
class ClosedLoopPencil:
    GJ: np.ndarray
    GF: np.ndarray


@dataclass(frozen=True)
class Witness:
    """Adversarial disturbance; ``x = (w, y)`` is the pencil maximizer it came from."""

    w: np.ndarray
    v: np.ndarray
    ratio: float
    w_degenerate: bool
    x: np.ndarray


def closed_loop_pencil(prob, K: BlockGain) -> ClosedLoopPencil:
    prob = as_gamma_form(prob)
    K.check_partition(prob.partition)
    T = np.vstack([np.eye(prob.n), K.matrix @ prob.C])
    GJ = T.T @ prob.Q @ T
    GF = T.T @ prob.R @ T
    return ClosedLoopPencil(0.5 * (GJ + GJ.T), 0.5 * (GF + GF.T))


def _pencil_sup(GJ: np.ndarray, GF: np.ndarray):
    """``sup x^T GJ x / x^T GF x`` over ``x^T GF x > 0`` and a maximizer.

    The null space of GF is eliminated by maximizing the numerator over it
    in closed form; a positive direction (or a cross term that the null
    block cannot absorb) makes the supremum infinite.
    """
    n = GJ.shape[0]
    if n == 0:
        return 0.0, np.zeros(0)
    lam, V = np.linalg.eigh(GF)
    scale = max(float(np.abs(lam).max()), float(np.abs(GJ).max()), 1e-300)
    keep = lam > NULL_RTOL * max(float(lam.max()), 0.0) if lam.max() > 0 else np.zeros(n, bool)
    Vr, Vn = V[:, keep], V[:, ~keep]
    Jt = V.T @ GJ @ V
    Jrr = Jt[np.ix_(keep, keep)]
    Jrn = Jt[np.ix_(keep, ~keep)]
    Jnn = Jt[np.ix_(~keep, ~keep)]
    tol = NULL_RTOL * scale * 1e2

    if not keep.any():
        if Jnn.size and np.linalg.eigvalsh(Jnn)[-1] > tol:
            return np.inf, Vn @ np.linalg.eigh(Jnn)[1][:, -1]
        return 0.0, np.zeros(n)

    # x = Vr a + Vn b; numerator a'Jrr a + 2 a'Jrn b + b'Jnn b
    shift = np.zeros((Jnn.shape[0], Jrr.shape[0]))
    if Jnn.size:
        mu, P = np.linalg.eigh(Jnn)
        if mu[-1] > tol:
            return np.inf, Vn @ P[:, -1]
        cross = P.T @ Jrn.T
        flat = mu >= -tol
        if flat.any():
            leak = np.abs(cross[flat]).max()
            if leak > tol:
                # numerator grows linearly along a GF-null direction
                i = np.argmax(np.abs(cross[flat]).max(axis=1))
                return np.inf, Vn @ P[:, np.flatnonzero(flat)[i]]
        neg = ~flat
        # best b for fixed a: b = -Jnn^+ Jnr a on the negative part
        shift = P[:, neg] @ ((P[:, neg].T @ Jrn.T) / (-mu[neg])[:, None])
        Jeff = Jrr + Jrn @ shift
    else:
        Jeff = Jrr
    Jeff = 0.5 * (Jeff + Jeff.T)
    d = lam[keep]
    s = 1.0 / np.sqrt(d)
    vals, vecs = np.linalg.eigh(s[:, None] * Jeff * s[None, :])
    a = s * vecs[:, -1]
    b = shift @ a
    x = Vr @ a + (Vn @ b if Vn.size else 0.0)
    return float(vals[-1]), x


def achieved_gamma(prob, K: BlockGain) -> float:
    """Worst-case ratio of the strategy ``u = K y``; ``inf`` if unbounded."""
    pen = closed_loop_pencil(prob, K)
    return _pencil_sup(pen.GJ, pen.GF)[0]


def worst_case_direction(prob, K: BlockGain):
    """Maximizing ``x = (w, y)`` of the closed-loop pencil, and the ratio there."""
    pen = closed_loop_pencil(prob, K)
    val, x = _pencil_sup(pen.GJ, pen.GF)
    if np.isfinite(val) and x.size and np.linalg.norm(x) > 0:
        x = x / np.linalg.norm(x)
    return x, val


def sample_ratio_x(prob, K: BlockGain, x) -> float:
    """``J / F`` at ``x = (w, y)`` and ``u = K y``."""
    prob = as_gamma_form(prob)
    x = np.asarray(x, dtype=float)
    z = np.concatenate([x, K.matrix @ (prob.C @ x)])
    num, den = z @ prob.Q @ z, z @ prob.R @ z
    if den <= 0:
        return np.inf if num > 0 else 0.0
    return float(num / den)


def well_posed(prob: TeamProblem, K: BlockGain) -> bool:
    """Whether ``I - D K`` is safely invertible."""
    if isinstance(prob, GammaFormProblem):
        return True
    M = np.eye(prob.p) - prob.D @ K.matrix
    sv = np.linalg.svd(M, compute_uv=False)
    return bool(sv[-1] > WELL_POSED_RTOL * sv[0])


def solve_loop(prob: TeamProblem, K: BlockGain, w, v):
    """Measurements and decisions of the closed loop ``y = D K y + E w + v``."""
    K.check_partition(prob.partition)
    if not well_posed(prob, K):
        raise IllPosedLoopError("I - D K is singular: the measurement loop is ill-posed")
    Km = K.matrix
    y = np.linalg.solve(np.eye(prob.p) - prob.D @ Km, prob.E @ np.asarray(w, float) + np.asarray(v, float))
    return y, Km @ y


def sample_ratio(prob: TeamProblem, K: BlockGain, w, v) -> float:
    """Ratio ``L(w, u) / (|w|^2 + |v|^2)`` for one disturbance pair."""
    w = np.asarray(w, dtype=float).reshape(prob.q)
    v = np.asarray(v, dtype=float).reshape(prob.p)
    energy = float(w @ w + v @ v)
    if energy == 0.0:
        raise ValueError("(w, v) must not both be zero")
    _, u = solve_loop(prob, K, w, v)
    z = np.concatenate([w, u])
    return float(z @ prob.cost_matrix @ z) / energy


def worst_case_witness(prob: TeamProblem, K: BlockGain) -> Witness:
    """Adversarial ``(w, v)`` attaining :func:`achieved_gamma`.

    The pencil maximizer ``x = (w, y)`` is mapped back through
    ``v = y - D K y - E w``. ``w_degenerate`` flags a maximizer whose nature
    part is negligible, where the supremum over ``w != 0`` may be smaller.
    A :class:`GammaFormProblem` has no ``D`` or ``E``; its witness keeps
    ``v = y`` and callers should use ``x``.
    """
    gf = as_gamma_form(prob)
    x, val = worst_case_direction(gf, K)
    q = gf.q
    if not np.isfinite(val):
        raise IllPosedLoopError("worst-case ratio is unbounded for this gain")
    if x.size == 0 or not np.any(x):
        return Witness(np.zeros(q), np.zeros(gf.p), 0.0, False, np.zeros(gf.n))
    w, y = x[:q], x[q:]
    if isinstance(prob, TeamProblem):
        v = y - prob.D @ (K.matrix @ y) - prob.E @ w
    else:
        v = y
    degenerate = bool(q > 0 and np.linalg.norm(w) < 1e-8 * np.linalg.norm(x))
    return Witness(w=w, v=v, ratio=val, w_degenerate=degenerate, x=x)
