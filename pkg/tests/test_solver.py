import numpy as np
import pytest
from scipy.optimize import minimize

from teamlmi import (
    AssumptionViolation,
    BlockGain,
    InvalidProblemError,
    Partition,
    SolverConfig,
    TeamProblem,
    achieved_gamma,
    affine_basis,
    bisect_gamma,
    feasibility_solve,
    gamma_bar,
    multistage,
    to_gamma_form,
    witsenhausen,
    witsenhausen_team,
)
from teamlmi.solver import min_max_eig

from conftest import random_team


def brute_force_value(prob, starts, rng):
    """Best oracle ratio over block gains by multi-start Nelder-Mead."""
    part = prob.partition
    best = np.inf
    for _ in range(starts):
        res = minimize(
            lambda k: min(achieved_gamma(prob, BlockGain.from_entries(k, part)), 1e6),
            rng.normal(size=part.n_entries),
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000},
        )
        best = min(best, res.fun)
    return best


class TestFeasibility:
    def test_witsenhausen_bracket(self):
        prob = witsenhausen(0.1)
        res = feasibility_solve(prob, 0.095)
        assert res.feasible and res.converged
        assert res.margin <= 0
        assert achieved_gamma(prob, res.gain) <= 0.095 + 1e-9
        res = feasibility_solve(prob, 0.05)
        assert not res.feasible and res.converged
        assert res.lower_bound > 0

    def test_unpacks_as_triple(self):
        feasible, gain, margin = feasibility_solve(witsenhausen(1.0), 0.5)
        assert feasible and isinstance(gain, BlockGain) and margin <= 0

    def test_rejects_gamma_at_ceiling(self):
        with pytest.raises(ValueError, match="gamma_bar"):
            feasibility_solve(witsenhausen(0.1), 0.1)

    def test_decision_only_problem(self, decision_only_team):
        # the zero gain has ratio 0, so any positive gamma is feasible
        res = feasibility_solve(decision_only_team, 1e-3)
        assert res.feasible
        report = bisect_gamma(decision_only_team)
        assert report.gamma_star == pytest.approx(0.0, abs=1e-12)
        assert report.gain_norm == 0.0


def test_eigenvalue_minimum_matches_conic_solver(rng):
    cp = pytest.importorskip("cvxpy")
    for _ in range(5):
        prob = to_gamma_form(random_team(rng))
        gb = gamma_bar(prob)
        gamma = 0.5 * gb if np.isfinite(gb) else 1.0
        lmi = affine_basis(prob, gamma, balanced=True)
        _, value, lower, converged, _ = min_max_eig(lmi)
        k = cp.Variable(len(lmi.basis))
        expr = lmi.M0 + sum(k[j] * Mj for j, Mj in enumerate(lmi.basis))
        ref = cp.Problem(cp.Minimize(cp.lambda_max(0.5 * (expr + expr.T)))).solve(solver="CLARABEL")
        assert converged
        assert value == pytest.approx(ref, abs=1e-6 * max(1.0, abs(ref)))
        assert lower <= value + 1e-12


class TestBisection:
    def test_witsenhausen_values(self):
        for k2, expected in ((0.1, 0.0900980), (1.0, (3 - np.sqrt(5)) / 2)):
            report = bisect_gamma(witsenhausen(k2))
            assert report.gamma_star == pytest.approx(expected, abs=2e-4)
            assert report.oracle_gamma <= report.gamma_upper + 1e-9
            assert report.gamma_lower <= report.gamma_star <= report.gamma_upper

    def test_trace_brackets_shrink(self):
        report = bisect_gamma(witsenhausen(1.0))
        lo, hi = 0.0, None
        for gamma, feasible in report.bisection_trace:
            if hi is not None:
                assert lo <= gamma <= hi
            if feasible:
                hi = gamma
            else:
                lo = gamma
        assert hi - lo <= report.gamma_tol

    def test_deterministic(self):
        a = bisect_gamma(witsenhausen(0.1), SolverConfig(seed=7))
        b = bisect_gamma(witsenhausen(0.1), SolverConfig(seed=7))
        assert a.bisection_trace == b.bisection_trace
        assert a.gamma_star == b.gamma_star
        np.testing.assert_array_equal(a.gain.entries(), b.gain.entries())

    def test_cost_scaling(self):
        base = witsenhausen_team(1.0)
        ref = bisect_gamma(base).gamma_star
        alpha = 4.0
        scaled = TeamProblem(base.Qww * alpha, base.Qwu * alpha, base.Quu * alpha, base.D, base.E, base.partition)
        assert bisect_gamma(scaled, SolverConfig(gamma_tol=4e-4)).gamma_star == pytest.approx(alpha * ref, abs=1e-3)

    def test_trivial_problem(self, trivial_team):
        report = bisect_gamma(trivial_team)
        assert report.gamma_star == pytest.approx(2.0, abs=1e-6)
        assert report.gain_norm <= 1e-4

    def test_matches_brute_force(self, rng):
        checked = 0
        while checked < 3:
            prob = random_team(rng, q=2, partition=Partition.scalar(2), signaling=0.3)
            try:
                report = bisect_gamma(prob, SolverConfig(gamma_tol=1e-5))
            except AssumptionViolation:
                # value at or above the ceiling; not comparable
                continue
            checked += 1
            brute = brute_force_value(prob, 6, rng)
            assert report.oracle_gamma <= brute + 1e-4
            assert report.gamma_star >= brute - 1e-3

    def test_value_above_ceiling_is_reported(self):
        with pytest.raises(AssumptionViolation) as info:
            bisect_gamma(witsenhausen_team(0.1))
        assert info.value.gamma_bar == pytest.approx(0.1)

    @pytest.mark.parametrize("m", [2, 3])
    def test_multistage_value_sits_at_ceiling(self, m):
        # every gain has ratio >= 1 = gamma_bar, so nothing is feasible below it
        with pytest.raises(AssumptionViolation):
            bisect_gamma(multistage(m))

    def test_explicit_bracket(self):
        report = bisect_gamma(witsenhausen(1.0), SolverConfig(gamma_lo=0.3, gamma_hi=0.5))
        assert report.gamma_star == pytest.approx((3 - np.sqrt(5)) / 2, abs=2e-4)
        assert report.bisection_trace[0][0] == 0.5

    def test_invalid_problem(self):
        bad = TeamProblem([[1.0]], [[2.0]], [[1.0]], [[0.0]], [[0.0]], Partition.scalar(1))
        with pytest.raises(InvalidProblemError):
            bisect_gamma(bad)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gamma_tol=0)
    with pytest.raises(ValueError):
        SolverConfig(gamma_lo=1.0, gamma_hi=0.5)
