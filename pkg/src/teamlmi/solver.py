"""Structured gain synthesis by eigenvalue minimization and gamma bisection.

At a fixed gamma the LMI is affine in the gain entries ``k``, so

    f(k) = lambda_max(M0 + sum_j k_j M_j)

is convex, and gamma is achievable by a block-diagonal gain iff
``min_k f(k) <= 0``. The minimization is done on the epigraph

    minimize t   subject to   t I - M0 - sum_j k_j M_j  >= 0

with a log-barrier path-following method. The solve runs on the balanced
copy of the LMI (congruence by ``diag(I, Quu(gamma)^{1/2})``), which has the
same sign structure but stays well scaled as gamma approaches gamma_bar.
Feasible sets grow with gamma (``R`` is PSD), so bisection on gamma locates
the game value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .lmi import (
    AffineLMI,
    affine_basis,
    assemble_gamma_matrix,
    balanced_margin,
    feasibility_margin,
    feasibility_tolerance,
)
from .model import (
    AssumptionViolation,
    BlockGain,
    GammaFormProblem,
    InvalidProblemError,
    SolveReport,
    as_gamma_form,
    gamma_bar,
    validate_problem,
)
from .oracle import achieved_gamma, worst_case_direction

__all__ = ["SolverConfig", "FeasibilityResult", "feasibility_solve", "bisect_gamma", "min_max_eig"]

log = logging.getLogger(__name__)

CEILING_BACKOFF = 1e-6
CENTERING_TOL = 1e-9
CENTERING_STEPS = 60


@dataclass(frozen=True)
class SolverConfig:
    gamma_tol: float = 1e-4
    feas_tol: float | None = None  # None: 1e-8 * max(1, |M0|) of the balanced LMI
    max_outer: int = 60
    max_inner: int = 5000
    inner_tol: float = 1e-9
    gamma_lo: float | None = None
    gamma_hi: float | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("gamma_tol", "inner_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.feas_tol is not None and not self.feas_tol > 0:
            raise ValueError("feas_tol must be positive")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be positive")
        if self.gamma_lo is not None and self.gamma_hi is not None and not self.gamma_lo < self.gamma_hi:
            raise ValueError("gamma_lo must be below gamma_hi")


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of one fixed-gamma solve.

    ``margin`` is the top eigenvalue of the plain Schur LMI at ``gain``;
    ``balanced`` the same for the balanced LMI, which decides ``feasible``
    against ``tol``. Unpacks as ``(feasible, gain, margin)``.
    """

    feasible: bool
    gain: BlockGain
    margin: float
    balanced: float
    converged: bool
    iterations: int
    lower_bound: float = -np.inf
    tol: float = 0.0

    def __iter__(self):
        return iter((self.feasible, self.gain, self.margin))


@dataclass
class _Barrier:
    """Newton state for ``tau * t - log det(t I - M(k))``."""

    lmi: AffineLMI
    basis: np.ndarray = field(init=False)

    def __post_init__(self):
        s = self.lmi.M0.shape[0]
        # A_j = dS/dz_j: -M_j for gain entries, I for t
        mats = [-Mj for Mj in self.lmi.basis] + [np.eye(s)]
        self.basis = np.asarray(mats)

    def slack(self, z):
        k, t = z[:-1], z[-1]
        S = t * np.eye(self.lmi.M0.shape[0]) - self.lmi.evaluate(k)
        return 0.5 * (S + S.T)

    def value(self, z, tau):
        try:
            L = np.linalg.cholesky(self.slack(z))
        except np.linalg.LinAlgError:
            return np.inf
        return tau * z[-1] - 2.0 * np.log(np.diag(L)).sum()

    def newton(self, z, tau):
        L = np.linalg.cholesky(self.slack(z))
        # W_j = L^{-1} A_j L^{-T}
        Linv = sla.solve_triangular(L, np.eye(L.shape[0]), lower=True, check_finite=False)
        W = Linv @ self.basis @ Linv.T
        g = -np.trace(W, axis1=1, axis2=2)
        g[-1] += tau
        W = W.reshape(W.shape[0], -1)
        H = W @ W.T
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, g, rcond=None)[0]
        return step, float(-g @ step)


def min_max_eig(lmi: AffineLMI, k0=None, *, tol: float = 1e-9, max_iter: int = 5000,
                stop_above: float | None = None):
    """Minimize ``lambda_max(M0 + sum k_j M_j)`` over ``k``.

    Returns ``(k, value, lower_bound, converged, iterations)``. With
    ``stop_above`` set, the run ends early once the duality bound shows the
    minimum exceeds it.
    """
    d = len(lmi.basis)
    s = lmi.M0.shape[0]
    k = np.zeros(d) if k0 is None else np.asarray(k0, dtype=float).copy()
    scale = max(1.0, float(np.linalg.norm(lmi.M0, 2)))
    lam0 = float(np.linalg.eigvalsh(lmi.evaluate(k))[-1])
    if d == 0:
        return k, lam0, lam0, True, 0
    z = np.concatenate([k, [lam0 + 0.1 * scale]])
    bar = _Barrier(lmi)
    tau = s / scale
    mu = 8.0
    its = 0
    converged = False
    lower = -np.inf
    stalled = False
    while its < max_iter and not stalled:
        centered = False
        for _ in range(CENTERING_STEPS):
            if its >= max_iter:
                break
            step, dec = bar.newton(z, tau)
            its += 1
            if dec / 2.0 <= CENTERING_TOL:
                centered = True
                break
            f0 = bar.value(z, tau)
            alpha = 1.0
            while alpha > 1e-12:
                if bar.value(z + alpha * step, tau) <= f0 - 0.25 * alpha * dec:
                    break
                alpha *= 0.5
            else:
                # no descent left at working precision
                stalled = True
                break
            z = z + alpha * step
        gap = s / tau
        if centered:
            lower = max(lower, z[-1] - gap)
        else:
            stalled = True
        if gap <= tol * scale:
            converged = True
            break
        if stop_above is not None and lower > stop_above:
            break
        tau *= mu
    k = z[:-1]
    value = float(np.linalg.eigvalsh(lmi.evaluate(k))[-1])
    return k, value, lower, converged, its


def feasibility_solve(prob, gamma: float, cfg: SolverConfig = SolverConfig(), k0=None) -> FeasibilityResult:
    """Decide whether some block-diagonal gain achieves ``gamma``.

    The returned margin is recomputed from :func:`~teamlmi.lmi.schur_lmi` at
    the returned gain; the optimizer's own estimate is not used for the
    decision.
    """
    prob = as_gamma_form(prob)
    if not assemble_gamma_matrix(prob, gamma).quu_pd:
        raise ValueError(
            f"gamma={gamma:.6g} is not below gamma_bar={gamma_bar(prob):.6g}; Quu(gamma) is not positive definite"
        )
    lmi = affine_basis(prob, gamma, balanced=True)
    tol = cfg.feas_tol if cfg.feas_tol is not None else feasibility_tolerance(lmi.M0)
    k, _, lower, converged, its = min_max_eig(
        lmi, k0, tol=cfg.inner_tol, max_iter=cfg.max_inner, stop_above=tol
    )
    gain = BlockGain.from_entries(k, prob.partition)
    balanced = balanced_margin(prob, gain, gamma)
    feasible = balanced <= tol
    if feasible or lower > tol:
        # a feasible point or an infeasibility bound settles the question
        converged = True
    if not converged:
        log.warning("eigenvalue minimization stopped after %d steps at gamma=%.6g", its, gamma)
    margin = feasibility_margin(prob, gain, gamma)
    return FeasibilityResult(feasible, gain, margin, balanced, converged, its, lower, tol)


def _upper_bracket(prob: GammaFormProblem, gbar: float, g0: float, cfg: SolverConfig):
    if cfg.gamma_hi is not None:
        return float(cfg.gamma_hi), None
    ceiling = gbar * (1.0 - CEILING_BACKOFF) if np.isfinite(gbar) else np.inf
    if g0 <= ceiling:
        return g0, BlockGain.zeros(prob.partition)
    if not np.isfinite(ceiling):
        raise InvalidProblemError(
            "no finite upper bracket: gamma_bar is infinite and the zero gain has unbounded ratio; "
            "supply gamma_hi"
        )
    return ceiling, None


def bisect_gamma(prob, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Locate the game value by bisection over gamma.

    Raises
    ------
    AssumptionViolation
        If no gain is feasible at the upper bracket, i.e. the value appears
        to be at or above ``gamma_bar``.
    """
    prob = as_gamma_form(prob)
    bad = validate_problem(prob)
    if bad:
        raise InvalidProblemError("; ".join(bad))
    gbar = gamma_bar(prob)
    lo = 0.0 if cfg.gamma_lo is None else float(cfg.gamma_lo)
    g0 = achieved_gamma(prob, BlockGain.zeros(prob.partition))
    hi, hi_gain = _upper_bracket(prob, gbar, g0, cfg)
    if hi < lo:
        lo = hi
    trace: list[tuple[float, bool]] = []
    iterations = 0
    all_converged = True

    def probe(gamma, k0):
        nonlocal iterations, all_converged
        res = feasibility_solve(prob, gamma, cfg, k0)
        iterations += res.iterations
        all_converged &= res.converged
        trace.append((float(gamma), bool(res.feasible)))
        return res

    if hi_gain is not None and hi == 0.0:
        # zero gain already achieves ratio 0
        best = FeasibilityResult(
            True, hi_gain, feasibility_margin(prob, hi_gain, 0.0), balanced_margin(prob, hi_gain, 0.0), True, 0
        )
        trace.append((0.0, True))
    else:
        best = probe(hi, None if hi_gain is None else hi_gain.entries())
        if not best.feasible and hi_gain is not None:
            # the zero gain certifies hi through the oracle; keep it
            best = FeasibilityResult(
                True, hi_gain, best.margin, best.balanced, best.converged, best.iterations, best.lower_bound, best.tol
            )
            trace[-1] = (hi, True)
        if not best.feasible:
            raise AssumptionViolation(
                f"no gain is feasible at gamma={hi:.6g} (gamma_bar={gbar:.6g}): the game value "
                "appears to be at or above gamma_bar, where linear optimality is not guaranteed",
                gamma_bar=gbar,
                gamma_probe=hi,
                upper=g0,
                trace=trace,
            )
    for _ in range(cfg.max_outer):
        if hi - lo <= cfg.gamma_tol:
            break
        mid = 0.5 * (lo + hi)
        res = probe(mid, best.gain.entries())
        if res.feasible:
            hi, best = mid, res
        else:
            lo = mid

    oracle = achieved_gamma(prob, best.gain)
    x, _ = worst_case_direction(prob, best.gain)
    degenerate = bool(x.size and prob.q and np.linalg.norm(x[:prob.q]) < 1e-8 * np.linalg.norm(x))
    gamma_star = min(hi, oracle)
    return SolveReport(
        gamma_star=float(gamma_star),
        gain=best.gain,
        lmi_margin=float(best.margin),
        oracle_gamma=float(oracle),
        bisection_trace=tuple(trace),
        gamma_bar=float(gbar),
        gamma_upper=float(hi),
        gamma_lower=float(lo),
        gain_norm=best.gain.norm(),
        converged=bool(all_converged),
        iterations=int(iterations),
        feas_tol=float(best.tol) if best.tol else float(cfg.feas_tol or 0.0),
        gamma_tol=float(cfg.gamma_tol),
        seed=int(cfg.seed),
        witness_w_degenerate=degenerate,
    )
