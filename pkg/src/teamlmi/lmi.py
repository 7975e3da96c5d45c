"""Gamma-parameterized forms and the Schur-complement LMI in the gain.

For a fixed gamma, a linear strategy ``u = K C x`` achieves ratio gamma iff

    [I; KC]^T (Q - gamma R) [I; KC]  <=  0.

With ``Quu(gamma)`` positive definite this is equivalent to

    [[Qxx + Qxu K C + C^T K^T Qux,  C^T K^T],
     [K C,                          -Quu^{-1}]]  <=  0,

which is affine in the entries of K.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import BlockGain, GammaFormProblem, is_pd

__all__ = [
    "GammaMatrix",
    "AffineLMI",
    "assemble_gamma_matrix",
    "schur_lmi",
    "balanced_schur_lmi",
    "affine_basis",
    "feasibility_margin",
    "balanced_margin",
    "feasibility_tolerance",
    "closed_loop_form",
]

log = logging.getLogger(__name__)

FEAS_RTOL = 1e-8
COND_WARN = 1e12


@dataclass(frozen=True)
class GammaMatrix:
    Qxx_g: np.ndarray
    Qxu_g: np.ndarray
    Quu_g: np.ndarray
    gamma: float
    quu_pd: bool

    @property
    def full(self) -> np.ndarray:
        return np.block([[self.Qxx_g, self.Qxu_g], [self.Qxu_g.T, self.Quu_g]])


@dataclass(frozen=True)
class AffineLMI:
    """``LMI(k) = M0 + sum_j k_j M_j``, k in player-major, row-major order."""

    M0: np.ndarray
    basis: tuple[np.ndarray, ...]

    def evaluate(self, entries) -> np.ndarray:
        entries = np.asarray(entries, dtype=float).ravel()
        if not self.basis:
            return self.M0.copy()
        return self.M0 + np.tensordot(entries, np.asarray(self.basis), axes=1)


def assemble_gamma_matrix(prob: GammaFormProblem, gamma: float) -> GammaMatrix:
    """Partition ``Q - gamma R`` into state and decision blocks."""
    n = prob.n
    G = prob.Q - gamma * prob.R
    G = 0.5 * (G + G.T)
    Quu_g = G[n:, n:]
    return GammaMatrix(
        Qxx_g=G[:n, :n],
        Qxu_g=G[:n, n:],
        Quu_g=Quu_g,
        gamma=float(gamma),
        quu_pd=is_pd(Quu_g),
    )


def _neg_inverse(Quu_g: np.ndarray, gamma: float) -> np.ndarray:
    if not is_pd(Quu_g):
        raise ValueError(
            f"Quu(gamma) is not positive definite at gamma={gamma:.6g}; "
            "gamma is at or above gamma_bar"
        )
    lam, V = np.linalg.eigh(Quu_g)
    cond = lam[-1] / lam[0]
    if cond > COND_WARN:
        log.warning("Quu(gamma) condition number %.3g at gamma=%.6g", cond, gamma)
    inv = (V / lam) @ V.T
    return -0.5 * (inv + inv.T)


def schur_lmi(prob: GammaFormProblem, K: BlockGain, gamma: float) -> np.ndarray:
    """The ``(n+m) x (n+m)`` LMI matrix for gain ``K`` at ``gamma``."""
    gm = assemble_gamma_matrix(prob, gamma)
    KC = K.matrix @ prob.C
    top = gm.Qxx_g + gm.Qxu_g @ KC + KC.T @ gm.Qxu_g.T
    M = np.block([[top, KC.T], [KC, _neg_inverse(gm.Quu_g, gamma)]])
    return 0.5 * (M + M.T)


def _sqrt_pd(Quu_g: np.ndarray, gamma: float) -> np.ndarray:
    if not is_pd(Quu_g):
        raise ValueError(
            f"Quu(gamma) is not positive definite at gamma={gamma:.6g}; "
            "gamma is at or above gamma_bar"
        )
    lam, V = np.linalg.eigh(Quu_g)
    root = (V * np.sqrt(lam)) @ V.T
    return 0.5 * (root + root.T)


def balanced_schur_lmi(prob: GammaFormProblem, K: BlockGain, gamma: float) -> np.ndarray:
    """:func:`schur_lmi` under the congruence ``diag(I, Quu(gamma)^{1/2})``.

    Same inertia, so the same sign of the top eigenvalue, but the decision
    block is ``-I`` instead of ``-Quu(gamma)^{-1}``, which stays bounded as
    gamma approaches gamma_bar.
    """
    gm = assemble_gamma_matrix(prob, gamma)
    S = _sqrt_pd(gm.Quu_g, gamma)
    KC = K.matrix @ prob.C
    top = gm.Qxx_g + gm.Qxu_g @ KC + KC.T @ gm.Qxu_g.T
    off = S @ KC
    M = np.block([[top, off.T], [off, -np.eye(prob.m)]])
    return 0.5 * (M + M.T)


def affine_basis(prob: GammaFormProblem, gamma: float, *, balanced: bool = False) -> AffineLMI:
    """Split :func:`schur_lmi` into a constant term and one matrix per gain entry.

    With ``balanced=True`` the split is of :func:`balanced_schur_lmi` instead.
    """
    gm = assemble_gamma_matrix(prob, gamma)
    n, m = prob.n, prob.m
    M0 = np.zeros((n + m, n + m))
    M0[:n, :n] = gm.Qxx_g
    if balanced:
        S = _sqrt_pd(gm.Quu_g, gamma)
        M0[n:, n:] = -np.eye(m)
    else:
        S = np.eye(m)
        M0[n:, n:] = _neg_inverse(gm.Quu_g, gamma)
    basis = []
    # K C keeps only the y columns, offset q within x
    q = prob.q
    for ms, ps in zip(prob.partition.m_slices(), prob.partition.p_slices()):
        for r in range(ms.start, ms.stop):
            for c in range(ps.start, ps.stop):
                Mj = np.zeros((n + m, n + m))
                col = q + c
                # Qxu E_rc C + C^T E_cr Qux, plus the off-diagonal (S) K C entry
                Mj[:n, col] += gm.Qxu_g[:, r]
                Mj[col, :n] += gm.Qxu_g[:, r]
                Mj[n:, col] += S[:, r]
                Mj[col, n:] += S[:, r]
                basis.append(Mj)
    return AffineLMI(M0=M0, basis=tuple(basis))


def feasibility_tolerance(M0: np.ndarray) -> float:
    return FEAS_RTOL * max(1.0, float(np.linalg.norm(M0, 2)))


def feasibility_margin(prob: GammaFormProblem, K: BlockGain, gamma: float) -> float:
    """Largest eigenvalue of the LMI matrix; feasible iff at most the tolerance."""
    return float(np.linalg.eigvalsh(schur_lmi(prob, K, gamma))[-1])


def balanced_margin(prob: GammaFormProblem, K: BlockGain, gamma: float) -> float:
    """Largest eigenvalue of :func:`balanced_schur_lmi`; same sign as the margin."""
    return float(np.linalg.eigvalsh(balanced_schur_lmi(prob, K, gamma))[-1])


def closed_loop_form(prob: GammaFormProblem, K: BlockGain, gamma: float) -> np.ndarray:
    """``[I; KC]^T (Q - gamma R) [I; KC]``, the quadratic form the LMI encodes."""
    T = np.vstack([np.eye(prob.n), K.matrix @ prob.C])
    G = T.T @ (prob.Q - gamma * prob.R) @ T
    return 0.5 * (G + G.T)
