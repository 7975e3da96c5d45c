"""Problem data for static minimax team decision problems.

A team problem is the game

    inf_K  sup_{w, v}  L(w, u) / (|w|^2 + |v|^2),
    y = D u + E w + v,   u = K y,   K = diag(K_1, ..., K_N),

with ``L(w, u) = [w; u]^T [[Qww, Qwu], [Qwu^T, Quu]] [w; u]``. Substituting
``v = y - D u - E w`` turns it into a ratio of two quadratic forms on
``(x, u)`` with ``x = (w, y)``; that representation is :class:`GammaFormProblem`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

__all__ = [
    "Partition",
    "TeamProblem",
    "GammaFormProblem",
    "BlockGain",
    "SolveReport",
    "InvalidProblemError",
    "IllPosedLoopError",
    "AssumptionViolation",
    "validate_problem",
    "gamma_bar",
    "to_gamma_form",
    "as_gamma_form",
    "is_pd",
    "is_psd",
]

SYM_RTOL = 1e-10
PD_RTOL = 1e-12
PSD_RTOL = 1e-10


class InvalidProblemError(ValueError):
    """Problem data violates a standing assumption."""


class IllPosedLoopError(ArithmeticError):
    """The measurement loop ``y = D K y + E w + v`` has no unique solution."""


class AssumptionViolation(RuntimeError):
    """No gain is feasible even just below the ceiling gamma_bar.

    ``gamma_probe`` is the infeasible probe, ``upper`` an achievable ratio
    (from the zero gain; may be ``inf``) and ``trace`` the probes made.
    """

    def __init__(self, message, *, gamma_bar=np.inf, gamma_probe=np.nan, upper=np.inf, trace=()):
        super().__init__(message)
        self.gamma_bar = gamma_bar
        self.gamma_probe = gamma_probe
        self.upper = upper
        self.trace = tuple(trace)


def _frozen(a, ndim=2) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        if arr.size == 0 and ndim == 2:
            arr = arr.reshape(0, 0)
        else:
            raise InvalidProblemError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _scale(a: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(a, 2))) if a.size else 1.0


def _asymmetry(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a - a.T, 2))


def _symmetrized(a) -> np.ndarray:
    """Symmetrize ``a`` if its asymmetry is round-off sized; else return it untouched."""
    arr = np.array(a, dtype=float)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1] and arr.size:
        if _asymmetry(arr) <= SYM_RTOL * _scale(arr):
            arr = 0.5 * (arr + arr.T)
    return arr


def _min_eig(a: np.ndarray) -> float:
    if a.size == 0:
        return np.inf
    return float(np.linalg.eigvalsh(0.5 * (a + a.T))[0])


def is_pd(a: np.ndarray) -> bool:
    """Positive definite, with threshold ``1e-12 * max(1, |a|)``."""
    return _min_eig(a) > PD_RTOL * _scale(a)


def is_psd(a: np.ndarray) -> bool:
    """Positive semidefinite, with threshold ``-1e-10 * max(1, |a|)``."""
    return _min_eig(a) > -PSD_RTOL * _scale(a)


@dataclass(frozen=True)
class Partition:
    """Decision sizes ``m_i`` and measurement sizes ``p_i`` of the N players."""

    m_sizes: tuple[int, ...]
    p_sizes: tuple[int, ...]

    def __post_init__(self):
        m_sizes = tuple(int(s) for s in self.m_sizes)
        p_sizes = tuple(int(s) for s in self.p_sizes)
        if len(m_sizes) != len(p_sizes) or len(m_sizes) < 1:
            raise InvalidProblemError(
                f"partition needs N >= 1 players with matching m/p lists, "
                f"got {len(m_sizes)} and {len(p_sizes)}"
            )
        if any(s < 1 for s in m_sizes + p_sizes):
            raise InvalidProblemError("partition sizes must be positive integers")
        object.__setattr__(self, "m_sizes", m_sizes)
        object.__setattr__(self, "p_sizes", p_sizes)

    @classmethod
    def scalar(cls, n_players: int) -> "Partition":
        return cls((1,) * n_players, (1,) * n_players)

    @property
    def N(self) -> int:
        return len(self.m_sizes)

    @property
    def m(self) -> int:
        return sum(self.m_sizes)

    @property
    def p(self) -> int:
        return sum(self.p_sizes)

    @property
    def n_entries(self) -> int:
        """Number of free scalar entries in a block-diagonal gain."""
        return sum(mi * pi for mi, pi in zip(self.m_sizes, self.p_sizes))

    def m_slices(self) -> list[slice]:
        return _slices(self.m_sizes)

    def p_slices(self) -> list[slice]:
        return _slices(self.p_sizes)


def _slices(sizes: Sequence[int]) -> list[slice]:
    out, start = [], 0
    for s in sizes:
        out.append(slice(start, start + s))
        start += s
    return out


@dataclass(frozen=True, eq=False)
class TeamProblem:
    """Static game data: cost blocks, signaling matrix D, disturbance matrix E.

    Nearly symmetric inputs (asymmetry below ``1e-10`` relative) are
    symmetrized on construction; anything worse is kept as given so that
    :func:`validate_problem` can report it.
    """

    Qww: np.ndarray
    Qwu: np.ndarray
    Quu: np.ndarray
    D: np.ndarray
    E: np.ndarray
    partition: Partition

    def __post_init__(self):
        p, m = self.partition.p, self.partition.m
        Qwu = np.array(self.Qwu, dtype=float)
        E = np.array(self.E, dtype=float)
        # zero-size nature (q = 0) arrives as [] from JSON
        if Qwu.size == 0:
            Qwu = Qwu.reshape(0, m)
        if E.size == 0:
            E = E.reshape(p, 0)
        object.__setattr__(self, "Qww", _frozen(_symmetrized(self.Qww)))
        object.__setattr__(self, "Qwu", _frozen(Qwu))
        object.__setattr__(self, "Quu", _frozen(_symmetrized(self.Quu)))
        object.__setattr__(self, "D", _frozen(self.D))
        object.__setattr__(self, "E", _frozen(E))

    @property
    def q(self) -> int:
        return self.E.shape[1]

    @property
    def p(self) -> int:
        return self.partition.p

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def cost_matrix(self) -> np.ndarray:
        """The full cost ``[[Qww, Qwu], [Qwu^T, Quu]]`` on ``(w, u)``."""
        return np.block([[self.Qww, self.Qwu], [self.Qwu.T, self.Quu]])

    def __eq__(self, other):
        if not isinstance(other, TeamProblem):
            return NotImplemented
        return self.partition == other.partition and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("Qww", "Qwu", "Quu", "D", "E")
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GammaFormProblem:
    """Quadratic forms ``Q`` (numerator) and ``R`` (denominator) on ``(w, y, u)``.

    The game value is ``inf_K sup_x J / F`` where ``J = z^T Q z``,
    ``F = z^T R z`` and ``z = (x, K C x)``. ``C = [0 I]`` picks ``y`` out of
    ``x = (w, y)``. ``q`` may be zero, in which case ``x = y``.
    """

    Q: np.ndarray
    R: np.ndarray
    q: int
    partition: Partition

    def __post_init__(self):
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "Q", _frozen(_symmetrized(self.Q)))
        object.__setattr__(self, "R", _frozen(_symmetrized(self.R)))
        size = self.n + self.m
        for name in ("Q", "R"):
            shape = getattr(self, name).shape
            if shape != (size, size):
                raise InvalidProblemError(
                    f"{name} must be {size}x{size} for q={self.q}, p={self.p}, "
                    f"m={self.m}; got {shape}"
                )

    @property
    def p(self) -> int:
        return self.partition.p

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def n(self) -> int:
        return self.q + self.p

    @property
    def C(self) -> np.ndarray:
        return np.hstack([np.zeros((self.p, self.q)), np.eye(self.p)])

    def __eq__(self, other):
        if not isinstance(other, GammaFormProblem):
            return NotImplemented
        return (
            self.partition == other.partition
            and self.q == other.q
            and np.array_equal(self.Q, other.Q)
            and np.array_equal(self.R, other.R)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BlockGain:
    """Block-diagonal strategy ``K = diag(K_1, ..., K_N)``, block i is ``m_i x p_i``.

    Entries are enumerated player-major, then row-major within a block; this
    is the coordinate order used by the affine LMI basis and the solver.
    """

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(_frozen(b) for b in self.blocks))

    @classmethod
    def zeros(cls, partition: Partition) -> "BlockGain":
        return cls(tuple(np.zeros((mi, pi)) for mi, pi in zip(partition.m_sizes, partition.p_sizes)))

    @classmethod
    def from_entries(cls, entries, partition: Partition) -> "BlockGain":
        entries = np.asarray(entries, dtype=float).ravel()
        if entries.size != partition.n_entries:
            raise InvalidProblemError(
                f"expected {partition.n_entries} gain entries, got {entries.size}"
            )
        blocks, start = [], 0
        for mi, pi in zip(partition.m_sizes, partition.p_sizes):
            blocks.append(entries[start:start + mi * pi].reshape(mi, pi))
            start += mi * pi
        return cls(tuple(blocks))

    @classmethod
    def from_matrix(cls, K, partition: Partition) -> "BlockGain":
        """Extract the diagonal blocks of a full ``m x p`` matrix."""
        K = np.asarray(K, dtype=float)
        return cls(tuple(K[ms, ps] for ms, ps in zip(partition.m_slices(), partition.p_slices())))

    @property
    def partition(self) -> Partition:
        return Partition(tuple(b.shape[0] for b in self.blocks), tuple(b.shape[1] for b in self.blocks))

    @property
    def matrix(self) -> np.ndarray:
        return sla.block_diag(*self.blocks)

    def entries(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def check_partition(self, partition: Partition) -> None:
        if self.partition != partition:
            raise InvalidProblemError(
                f"gain blocks {[b.shape for b in self.blocks]} do not match partition "
                f"m={list(partition.m_sizes)}, p={list(partition.p_sizes)}"
            )

    def __eq__(self, other):
        if not isinstance(other, BlockGain):
            return NotImplemented
        return len(self.blocks) == len(other.blocks) and all(
            a.shape == b.shape and np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)
        )

    __hash__ = None


@dataclass(frozen=True)
class SolveReport:
    """Outcome of the gamma bisection.

    ``gamma_star`` is the best achievable ratio found: the smaller of the
    smallest feasible probe (``gamma_upper``) and the exact worst-case ratio
    of the returned gain (``oracle_gamma``).
    """

    gamma_star: float
    gain: BlockGain
    lmi_margin: float
    oracle_gamma: float
    bisection_trace: tuple[tuple[float, bool], ...]
    gamma_bar: float
    gamma_upper: float
    gamma_lower: float
    gain_norm: float
    converged: bool
    iterations: int
    feas_tol: float
    gamma_tol: float
    seed: int
    witness_w_degenerate: bool = False


def _violations_symmetric(name: str, a: np.ndarray) -> list[str]:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return [f"{name} not square (shape {a.shape})"]
    asym = _asymmetry(a)
    if asym > SYM_RTOL * _scale(a):
        return [f"{name} not symmetric (asymmetry {asym:.3g})"]
    return []


def validate_problem(prob) -> list[str]:
    """List violated standing assumptions; empty when the problem is valid.

    Accepts a :class:`TeamProblem` or a :class:`GammaFormProblem`. For the
    latter, the decision block of ``Q`` plays the role of ``Quu`` and ``R``
    must be positive semidefinite.
    """
    if isinstance(prob, GammaFormProblem):
        return _validate_gamma_form(prob)
    out: list[str] = []
    q, p, m = prob.q, prob.p, prob.m
    if prob.Qww.shape != (q, q):
        out.append(f"Qww has shape {prob.Qww.shape}, expected {(q, q)}")
    if prob.Qwu.shape != (q, m):
        out.append(f"Qwu has shape {prob.Qwu.shape}, expected {(q, m)}")
    if prob.Quu.shape != (m, m):
        out.append(f"Quu has shape {prob.Quu.shape}, expected {(m, m)}")
    if prob.D.shape != (p, m):
        out.append(f"D has shape {prob.D.shape}, expected {(p, m)}")
    if prob.E.shape[0] != p:
        out.append(f"E has {prob.E.shape[0]} rows, expected {p}")
    if out:
        return out
    for name in ("Qww", "Quu"):
        out += _violations_symmetric(name, getattr(prob, name))
    if out:
        return out
    if not is_pd(prob.Quu):
        out.append(f"Quu not positive definite (min eigenvalue {_min_eig(prob.Quu):.3g})")
    full = prob.cost_matrix
    if not is_psd(full):
        out.append(f"full cost matrix not PSD (min eigenvalue {_min_eig(full):.3g})")
    return out


def _validate_gamma_form(prob: GammaFormProblem) -> list[str]:
    out = _violations_symmetric("Q", prob.Q) + _violations_symmetric("R", prob.R)
    if out:
        return out
    n = prob.n
    Quu = prob.Q[n:, n:]
    if not is_pd(Quu):
        out.append(f"Quu not positive definite (min eigenvalue {_min_eig(Quu):.3g})")
    if not is_psd(prob.R):
        out.append(f"R not PSD (min eigenvalue {_min_eig(prob.R):.3g})")
    return out


def _require_valid(prob) -> None:
    bad = validate_problem(prob)
    if bad:
        raise InvalidProblemError("; ".join(bad))


def _ceiling(Quu: np.ndarray, S: np.ndarray) -> float:
    """``inf u^T Quu u / u^T S u`` over ``S u != 0`` for PSD ``S``."""
    if not is_pd(Quu):
        raise InvalidProblemError(f"Quu not positive definite (min eigenvalue {_min_eig(Quu):.3g})")
    if not np.any(S):
        return np.inf
    L = np.linalg.cholesky(Quu)
    Linv = sla.solve_triangular(L, np.eye(L.shape[0]), lower=True)
    lam = float(np.linalg.eigvalsh(Linv @ S @ Linv.T)[-1])
    if lam <= 0.0:
        return np.inf
    return 1.0 / lam


def gamma_bar(prob) -> float:
    """Ceiling ``inf_{Du != 0} u^T Quu u / u^T D^T D u``; ``inf`` when ``D = 0``.

    For a :class:`GammaFormProblem` the decision blocks of ``Q`` and ``R`` take
    the places of ``Quu`` and ``D^T D``; below the ceiling ``Quu - gamma Ruu``
    stays positive definite.
    """
    if isinstance(prob, GammaFormProblem):
        n = prob.n
        return _ceiling(prob.Q[n:, n:], prob.R[n:, n:])
    D = prob.D
    return _ceiling(prob.Quu, D.T @ D)


def to_gamma_form(prob: TeamProblem) -> GammaFormProblem:
    """Rewrite a team problem as numerator/denominator forms on ``(w, y, u)``.

    ``R`` is the Gram matrix of ``[w; y - D u - E w]``, so
    ``z^T R z = |y - D u - E w|^2 + |w|^2``.
    """
    _require_valid(prob)
    q, p, m = prob.q, prob.p, prob.m
    s = q + p + m
    Q = np.zeros((s, s))
    w, u = slice(0, q), slice(q + p, s)
    Q[w, w] = prob.Qww
    Q[w, u] = prob.Qwu
    Q[u, w] = prob.Qwu.T
    Q[u, u] = prob.Quu
    resid = np.hstack([-prob.E, np.eye(p), -prob.D])
    R = resid.T @ resid
    R[w, w] += np.eye(q)
    return GammaFormProblem(Q=Q, R=R, q=q, partition=prob.partition)


def as_gamma_form(prob) -> GammaFormProblem:
    if isinstance(prob, GammaFormProblem):
        return prob
    return to_gamma_form(prob)
