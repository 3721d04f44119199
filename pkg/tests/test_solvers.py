"""
Unit tests for the equilibrium and meta-strategy solvers
"""

import os
import sys
import unittest

import numpy as np

# Add parent directory to path to import modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.exceptions import GameShapeError, InvalidStrategyError
from src.game_core import MixedProfile, regret
from src.game_factory import make_mrcp_closed_game
from src.solvers import (
    RdConfig,
    fixed_rd,
    mrcp,
    nash_2p,
    nash_np,
    prd,
    project_truncated,
    qre_logit,
    rd_step,
    replicator_derivative,
    rrd,
)
from tests.test_helpers import (
    biased_pennies,
    dominant_2x2,
    dominant_3player,
    grid_mrcp_2x2,
    matching_pennies,
    random_game,
)


class TestReplicatorDynamics(unittest.TestCase):
    """Test cases for rd_step, RRD, fixed-step RD and PRD"""

    def test_rd_step_by_hand(self):
        """Test one step against a hand-computed update"""
        stepped = rd_step(dominant_2x2(), MixedProfile.uniform((2, 2)), 0.1)
        for player in range(2):
            np.testing.assert_allclose(stepped[player], [0.525, 0.475], atol=1e-12)

    def test_rd_step_rest_point(self):
        """Test that a Nash equilibrium with full support does not move"""
        game = matching_pennies()
        uniform = MixedProfile.uniform((2, 2))
        self.assertTrue(rd_step(game, uniform, 0.5).allclose(uniform, atol=1e-15))
        for derivative in replicator_derivative(game, uniform):
            np.testing.assert_allclose(derivative, 0.0, atol=1e-15)

    def test_rd_step_stays_on_simplex(self):
        """Test that large steps are projected back onto the simplex"""
        game = random_game(3, 3, seed=4)
        profile = MixedProfile.uniform((3, 3, 3))
        for _ in range(20):
            profile = rd_step(game, profile, 5.0)
            for probs in profile:
                self.assertTrue(np.all(probs >= 0))
                self.assertAlmostEqual(float(probs.sum()), 1.0, places=9)

    def test_rrd_threshold_at_uniform(self):
        """Test that a large threshold returns uniform without stepping"""
        game = random_game(2, 4, seed=1)
        result = rrd(game, RdConfig(regret_threshold=100.0))
        self.assertEqual(result.steps_used, 0)
        self.assertTrue(result.hit_threshold)
        self.assertEqual(result.profile, MixedProfile.uniform((4, 4)))

    def test_rrd_dominant_strategy(self):
        """Test that RRD reaches a tiny threshold in a dominance-solvable game"""
        result = rrd(dominant_2x2(), RdConfig(regret_threshold=1e-6, step_size=0.01))
        self.assertTrue(result.hit_threshold)
        self.assertLessEqual(result.regret_total, 1e-6)
        self.assertGreater(result.profile[0][0], 0.999)

    def test_rrd_fallback_returns_trajectory_minimum(self):
        """Test the step-cap fallback on a game where RD cycles"""
        game = biased_pennies()
        cfg = RdConfig(regret_threshold=0.0, step_size=1e-3, max_steps=1000)
        result = rrd(game, cfg)
        self.assertFalse(result.hit_threshold)
        self.assertEqual(result.steps_used, 1000)

        profile = MixedProfile.uniform((2, 2))
        trajectory = [regret(game, profile).total]
        for _ in range(1000):
            profile = rd_step(game, profile, 1e-3)
            trajectory.append(regret(game, profile).total)
        self.assertLessEqual(result.regret_total, trajectory[0])
        self.assertAlmostEqual(result.regret_total, min(trajectory), places=9)

    def test_fixed_rd_zero_steps(self):
        """Test that zero steps return uniform"""
        result = fixed_rd(dominant_2x2(), 0, RdConfig())
        self.assertEqual(result.profile, MixedProfile.uniform((2, 2)))
        with self.assertRaises(InvalidStrategyError):
            fixed_rd(dominant_2x2(), -1, RdConfig())

    def test_untargeted_dynamics_report_no_hit(self):
        """Test that PRD and fixed-step RD have no threshold to hit"""
        cfg = RdConfig(step_size=0.1, max_steps=50)
        self.assertIsNone(prd(dominant_2x2(), cfg).hit_threshold)
        self.assertIsNone(fixed_rd(dominant_2x2(), 20, cfg).hit_threshold)
        self.assertIsNone(fixed_rd(dominant_2x2(), 0, cfg).hit_threshold)

    def test_prd_floor_on_dominated_strategy(self):
        """Test that the dominated strategy ends exactly at the floor"""
        result = prd(dominant_2x2(), RdConfig(step_size=0.1, max_steps=2000, prd_lower_bound=1e-10))
        for player in range(2):
            self.assertAlmostEqual(result.profile[player][1], 1e-10, delta=1e-14)
            self.assertAlmostEqual(result.profile[player][0], 1 - 1e-10, delta=1e-14)

    def test_prd_floor_limits(self):
        """Test the largest feasible floor and an infeasible one"""
        result = prd(dominant_2x2(), RdConfig(step_size=0.1, max_steps=10, prd_lower_bound=0.5))
        self.assertTrue(result.profile.allclose(MixedProfile.uniform((2, 2)), atol=1e-15))
        with self.assertRaises(InvalidStrategyError):
            prd(dominant_2x2(), RdConfig(prd_lower_bound=0.6))

    def test_project_truncated(self):
        """Test projection onto the truncated simplex"""
        x = project_truncated(np.array([2.0, -1.0, 0.5]), 0.1)
        self.assertTrue(np.all(x >= 0.1 - 1e-15))
        self.assertAlmostEqual(float(x.sum()), 1.0, places=12)

    def test_rd_config_validation(self):
        """Test rejection of invalid replicator parameters"""
        with self.assertRaises(InvalidStrategyError):
            RdConfig(step_size=0.0)
        with self.assertRaises(InvalidStrategyError):
            RdConfig(max_steps=0)
        with self.assertRaises(InvalidStrategyError):
            RdConfig(regret_threshold=-1.0)
        with self.assertRaises(InvalidStrategyError):
            RdConfig(prd_lower_bound=1.0)


class TestNash(unittest.TestCase):
    """Test cases for the two-player and n-player Nash solvers"""

    def test_pure_equilibrium(self):
        """Test the pure NE of the closed-MRCP game"""
        profile = nash_2p(make_mrcp_closed_game())
        self.assertEqual(profile.pure_profile(), (2, 2))

    def test_matching_pennies(self):
        """Test the uniform NE of matching pennies"""
        profile = nash_2p(matching_pennies())
        self.assertTrue(profile.allclose(MixedProfile.uniform((2, 2)), atol=1e-9))

    def test_biased_pennies(self):
        """Test a non-uniform mixed NE"""
        profile = nash_2p(biased_pennies())
        self.assertTrue(profile.allclose(MixedProfile([[0.4, 0.6], [0.4, 0.6]]), atol=1e-9))

    def test_random_general_sum(self):
        """Test that support enumeration finds an exact NE in random games"""
        for seed in range(20):
            size = 2 + seed % 4
            game = random_game(2, size, seed=seed)
            self.assertLessEqual(regret(game, nash_2p(game)).total, 1e-8, msg=f"seed {seed}")

    def test_random_zero_sum(self):
        """Test the linear program path on random zero-sum games"""
        for seed in range(10):
            game = random_game(2, 6, seed=100 + seed, zero_sum=True)
            self.assertLessEqual(regret(game, nash_2p(game)).total, 1e-8, msg=f"seed {seed}")

    def test_nash_2p_rejects_three_players(self):
        """Test the player-count check"""
        with self.assertRaises(GameShapeError):
            nash_2p(dominant_3player())

    def test_nash_np_dominant(self):
        """Test that a dominant pure profile is found"""
        profile = nash_np(dominant_3player())
        self.assertEqual(profile.pure_profile(), (1, 1, 1))

    def test_nash_np_beats_random_profiles(self):
        """Test that the n-player solver beats random sampling"""
        rng = np.random.default_rng(0)
        for seed in range(3):
            game = random_game(3, 2, seed=200 + seed)
            found = regret(game, nash_np(game, restarts=4, seed=seed)).total
            sampled = min(
                regret(game, MixedProfile([rng.dirichlet(np.ones(2)) for _ in range(3)])).total for _ in range(500)
            )
            self.assertLessEqual(found, sampled + 1e-9, msg=f"seed {seed}")

    def test_nash_np_delegates_two_players(self):
        """Test that two-player games use the exact solver"""
        game = random_game(2, 3, seed=8)
        self.assertEqual(nash_np(game), nash_2p(game))


class TestQuantalResponse(unittest.TestCase):
    """Test cases for logit QRE"""

    def test_zero_tau_is_uniform(self):
        """Test that tau = 0 gives uniform play immediately"""
        result = qre_logit(random_game(2, 3, seed=1), 0.0)
        self.assertEqual(result.profile, MixedProfile.uniform((3, 3)))
        self.assertEqual(result.steps_used, 0)
        self.assertTrue(result.hit_threshold)

    def test_large_tau_approaches_dominant(self):
        """Test that high rationality concentrates on the dominant strategy"""
        result = qre_logit(dominant_2x2(), 20.0)
        self.assertTrue(result.hit_threshold)
        self.assertLess(result.residual, 1e-8)
        self.assertGreater(result.profile[0][0], 0.99)

    def test_residual_decreases(self):
        """Test that the damped fixed point residual is monotone"""
        for seed in range(20):
            game = random_game(2, 3, seed=300 + seed)
            residuals = [qre_logit(game, 0.5, iters=t).residual for t in range(1, 9)]
            for before, after in zip(residuals, residuals[1:]):
                self.assertLessEqual(after, before + 1e-15, msg=f"seed {seed}")

    def test_invalid_parameters(self):
        """Test rejection of bad tau and damping"""
        with self.assertRaises(InvalidStrategyError):
            qre_logit(dominant_2x2(), -1.0)
        with self.assertRaises(InvalidStrategyError):
            qre_logit(dominant_2x2(), 1.0, damping=0.0)


class TestMinimumRegretProfile(unittest.TestCase):
    """Test cases for the minimum-regret constrained profile"""

    def test_closed_game_profile(self):
        """Test the restricted minimum of the closed-MRCP game"""
        game = make_mrcp_closed_game()
        sets = [[0, 1], [0, 1]]
        result = mrcp(game, sets, restarts=2, steps=300)
        self.assertAlmostEqual(result.regret_total, 20 / 11, delta=1e-5)
        self.assertLessEqual(result.regret_total, grid_mrcp_2x2(game, sets) + 1e-5)
        for player in range(2):
            np.testing.assert_allclose(result.profile[player], [10 / 11, 1 / 11], atol=1e-3)

    def test_full_sets_reach_equilibrium(self):
        """Test that unrestricted MRCP is a Nash equilibrium"""
        game = random_game(2, 3, seed=12)
        result = mrcp(game, [[0, 1, 2], [0, 1, 2]], restarts=2, steps=100)
        self.assertLessEqual(result.regret_total, 1e-8)

    def test_not_worse_than_restricted_equilibrium(self):
        """Test that MRCP regret is at most the lifted restricted NE regret"""
        for seed in range(5):
            game = random_game(2, 4, seed=400 + seed)
            sets = [[0, 1], [1, 3]]
            restricted = nash_2p(game.restrict(sets))
            lifted = []
            for player, probs in enumerate(restricted):
                vector = np.zeros(4)
                vector[sets[player]] = probs
                lifted.append(vector)
            baseline = regret(game, MixedProfile(lifted)).total
            result = mrcp(game, sets, restarts=2, steps=100, seed=seed)
            self.assertLessEqual(result.regret_total, baseline + 1e-9, msg=f"seed {seed}")


if __name__ == "__main__":
    unittest.main()
