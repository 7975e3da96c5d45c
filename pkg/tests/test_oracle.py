import numpy as np
import pytest

from teamlmi import (
    BlockGain,
    GammaFormProblem,
    IllPosedLoopError,
    Partition,
    TeamProblem,
    achieved_gamma,
    closed_loop_pencil,
    multistage,
    sample_ratio,
    sample_ratio_x,
    well_posed,
    witsenhausen,
    worst_case_witness,
)
from teamlmi.oracle import _pencil_sup, solve_loop

from conftest import random_team


def random_gain(rng, prob, scale=1.0):
    return BlockGain.from_entries(scale * rng.normal(size=prob.partition.n_entries), prob.partition)


class TestPencil:
    def test_plain_generalized_eigenvalue(self):
        val, x = _pencil_sup(np.diag([3.0, 1.0]), np.diag([1.0, 2.0]))
        assert val == pytest.approx(3.0)
        assert abs(x[0]) > 0 and x[1] == pytest.approx(0.0, abs=1e-12)

    def test_null_direction_with_gain_is_unbounded(self):
        assert _pencil_sup(np.diag([1.0, 1.0]), np.diag([1.0, 0.0]))[0] == np.inf

    def test_cross_term_into_flat_null_is_unbounded(self):
        assert _pencil_sup(np.array([[1.0, 1.0], [1.0, 0.0]]), np.diag([1.0, 0.0]))[0] == np.inf

    def test_negative_null_block_is_eliminated(self):
        # (a^2 + 2ab - b^2) / a^2 peaks at b = a with value 2
        val, x = _pencil_sup(np.array([[1.0, 1.0], [1.0, -1.0]]), np.diag([1.0, 0.0]))
        assert val == pytest.approx(2.0, rel=1e-12)
        assert x[1] == pytest.approx(x[0], rel=1e-12)

    def test_zero_padding_does_not_change_value(self, rng):
        A = rng.normal(size=(3, 3))
        B = rng.normal(size=(4, 3))
        GJ, GF = A + A.T, B.T @ B
        val = _pencil_sup(GJ, GF)[0]
        pad = np.zeros((5, 5))
        GJp, GFp = pad.copy(), pad.copy()
        GJp[:3, :3], GFp[:3, :3] = GJ, GF
        assert _pencil_sup(GJp, GFp)[0] == pytest.approx(val, rel=1e-10)


class TestAchievedGamma:
    def test_trivial_problem(self, trivial_team):
        assert achieved_gamma(trivial_team, BlockGain.zeros(trivial_team.partition)) == pytest.approx(2.0, rel=1e-12)

    def test_bounds_sampled_ratios(self, rng):
        for _ in range(10):
            prob = random_team(rng)
            K = random_gain(rng, prob, 0.3)
            if not well_posed(prob, K):
                continue
            value = achieved_gamma(prob, K)
            for _ in range(500):
                r = sample_ratio(prob, K, rng.normal(size=prob.q), rng.normal(size=prob.p))
                assert r <= value * (1 + 1e-9) + 1e-12

    def test_witsenhausen_reference_gains(self):
        prob = witsenhausen(0.1)
        reference = BlockGain.from_entries([-0.9001, -0.0896], prob.partition)
        corrected = BlockGain.from_entries([-0.9001, 0.0896], prob.partition)
        assert achieved_gamma(prob, reference) == pytest.approx(0.093973, abs=1e-5)
        assert achieved_gamma(prob, corrected) == pytest.approx(0.0901, abs=1e-4)

    def test_unbounded_when_denominator_misses_measurements(self):
        # R blind to the measurements: any nonzero y is free for nature
        gf = witsenhausen(1.0)
        R = np.array(gf.R)
        R[0, :] = R[:, 0] = 0.0
        R[1, :] = R[:, 1] = 0.0
        degenerate = GammaFormProblem(gf.Q, R, 0, gf.partition)
        K = BlockGain.from_entries([1.0, 1.0], gf.partition)
        assert achieved_gamma(degenerate, K) == np.inf


class TestWitness:
    def test_reproduces_value(self, rng):
        for _ in range(20):
            prob = random_team(rng)
            K = random_gain(rng, prob, 0.3)
            if not well_posed(prob, K):
                continue
            wit = worst_case_witness(prob, K)
            value = achieved_gamma(prob, K)
            assert wit.ratio == pytest.approx(value, rel=1e-12)
            assert sample_ratio(prob, K, wit.w, wit.v) == pytest.approx(value, rel=1e-8)

    def test_gamma_form_witness_uses_x(self):
        prob = witsenhausen(1.0)
        K = BlockGain.from_entries([-0.38, 0.38], prob.partition)
        wit = worst_case_witness(prob, K)
        assert sample_ratio_x(prob, K, wit.x) == pytest.approx(achieved_gamma(prob, K), rel=1e-8)

    def test_multistage_simulation(self, rng):
        prob = multistage(3)
        K = random_gain(rng, prob)
        wit = worst_case_witness(prob, K)
        # replay through the plant: x0 = w, x_{k+1} = u_k, y_k = x_k + v_k
        x = wit.w[0]
        us = []
        for k in range(3):
            u = K.matrix[k, k] * (x + wit.v[k])
            us.append(u)
            x = u
        cost = (us[-1] - wit.w[0]) ** 2 + sum(u**2 for u in us[:-1])
        energy = wit.w @ wit.w + wit.v @ wit.v
        assert cost / energy == pytest.approx(achieved_gamma(prob, K), rel=1e-8)


class TestWellPosed:
    @pytest.fixture
    def loop_team(self):
        return TeamProblem(
            np.eye(1), np.zeros((1, 2)), np.eye(2), [[0.0, 1.0], [1.0, 0.0]], np.ones((2, 1)), Partition.scalar(2)
        )

    def test_singular_loop(self, loop_team):
        K = BlockGain.from_entries([1.0, 1.0], loop_team.partition)
        assert not well_posed(loop_team, K)
        with pytest.raises(IllPosedLoopError):
            solve_loop(loop_team, K, [1.0], [0.0, 0.0])
        with pytest.raises(IllPosedLoopError):
            sample_ratio(loop_team, K, [1.0], [0.0, 0.0])

    def test_regular_loop(self, loop_team):
        K = BlockGain.from_entries([0.5, 0.5], loop_team.partition)
        assert well_posed(loop_team, K)
        y, u = solve_loop(loop_team, K, [1.0], [0.0, 0.0])
        np.testing.assert_allclose(y, loop_team.D @ u + loop_team.E @ [1.0])

    def test_zero_disturbance_rejected(self, trivial_team):
        with pytest.raises(ValueError):
            sample_ratio(trivial_team, BlockGain.zeros(trivial_team.partition), [0, 0], [0, 0])


def test_pencil_is_symmetric(rng):
    prob = random_team(rng)
    pen = closed_loop_pencil(prob, random_gain(rng, prob))
    np.testing.assert_array_equal(pen.GJ, pen.GJ.T)
    np.testing.assert_array_equal(pen.GF, pen.GF.T)
