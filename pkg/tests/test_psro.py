"""
Unit tests for the empirical game, meta-strategy solvers, PSRO and backward profile search
"""

import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

# Add parent directory to path to import modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.bps import bps, bps_rrd_target, savings_report
from src.empirical import EmpiricalGame, PayoffEstimator, StrategySets
from src.exceptions import InvalidStrategyError, MissingProfileError, PsroRunError, SolverError
from src.game_core import Game, MixedProfile, regret
from src.game_factory import make_long_path_game, make_mrcp_closed_game
from src.meta_strategy import (
    DO_NASH,
    EXP_DECAY,
    FP_UNIFORM,
    LAST_STRATEGY,
    LINEAR_DECAY,
    MRCP_ORACLE,
    NASH_UNIFORM_MIX,
    RRD,
    LambdaSchedule,
    MssSpec,
    lambda_at,
    solve_mss,
    solve_mss_detailed,
    solve_target,
)
from src.psro import EPS_CLOSED, MAX_ITERATIONS, SAMPLE, SWITCH_TO_DO, PsroConfig, epsilon_closed, psro_run
from src.solvers import RdConfig, nash_2p, rrd
from tests.test_helpers import biased_pennies, dominant_3x3, random_game


def filled(game, sets, estimator=None):
    emp = EmpiricalGame(game, StrategySets(sets))
    emp.fill_missing(estimator or PayoffEstimator())
    return emp


class TestEmpiricalGame(unittest.TestCase):
    """Test cases for strategy sets and the partial payoff tensor"""

    def setUp(self):
        """Set up a scratch directory"""
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up the scratch directory"""
        shutil.rmtree(self.test_dir)

    def test_strategy_sets(self):
        """Test insertion, duplicates and the latest strategy"""
        sets = StrategySets([[0], [1]])
        self.assertTrue(sets.add(0, 2, 1))
        self.assertFalse(sets.add(0, 2, 2))
        self.assertEqual(sets.counts, (2, 1))
        self.assertEqual(sets.latest(0), 2)
        self.assertEqual(list(sets.box()), [(0, 1), (2, 1)])
        with self.assertRaises(InvalidStrategyError):
            StrategySets([[0, 0]])

    def test_latest_uses_stamps(self):
        """Test that the newest stamp wins over insertion position"""
        sets = StrategySets([[0, 2, 1]], added_at=[[0, 2, 1]])
        self.assertEqual(sets.latest(0), 2)

    def test_fill_and_subgame(self):
        """Test filling the box and building the restricted game"""
        game = random_game(2, 4, seed=1)
        emp = EmpiricalGame(game, StrategySets([[0, 2], [1, 3]]))
        self.assertFalse(emp.is_complete())
        self.assertEqual(emp.fill_missing(PayoffEstimator()), 4)
        self.assertEqual(emp.fill_missing(PayoffEstimator()), 0)
        self.assertEqual(emp.subgame(), game.restrict([[0, 2], [1, 3]]))

    def test_missing_profile(self):
        """Test that reading an unevaluated profile raises"""
        emp = EmpiricalGame(random_game(2, 3, seed=2), StrategySets([[0], [0]]))
        with self.assertRaises(MissingProfileError):
            emp.subgame()

    def test_lift(self):
        """Test embedding of a restricted profile"""
        emp = EmpiricalGame(random_game(2, 4, seed=3), StrategySets([[3, 1], [0]]))
        lifted = emp.lift(MixedProfile([[0.25, 0.75], [1.0]]))
        np.testing.assert_array_equal(lifted[0], [0.0, 0.75, 0.0, 0.25])
        np.testing.assert_array_equal(lifted[1], [1.0, 0.0, 0.0, 0.0])

    def test_noise_independent_of_order(self):
        """Test that each profile has its own noise stream"""
        game = random_game(2, 3, seed=4)
        estimator = PayoffEstimator(noise_std=0.1, samples_per_profile=4, seed=9)
        first = EmpiricalGame(game, StrategySets([[0, 1, 2], [0, 1, 2]]))
        second = EmpiricalGame(game, StrategySets([[2, 1, 0], [2, 1, 0]]))
        first.fill_missing(estimator)
        second.fill_missing(estimator)
        for profile in game.profiles():
            np.testing.assert_array_equal(first.payoff(profile), second.payoff(profile))
        self.assertFalse(np.array_equal(first.payoff((0, 0)), game.payoff((0, 0))))

    def test_tensor_file(self):
        """Test saving and merging the partial tensor"""
        game = random_game(3, 2, seed=5)
        emp = filled(game, [[0, 1], [0], [1]], PayoffEstimator(noise_std=0.5, seed=1))
        path = emp.save_tensor(os.path.join(self.test_dir, "run", "tensor.txt"))
        other = EmpiricalGame(game, StrategySets([[0, 1], [0], [1]]))
        self.assertEqual(other.load_tensor(path), 2)
        for profile in emp.sets.box():
            np.testing.assert_array_equal(other.payoff(profile), emp.payoff(profile))

    def test_savings_report(self):
        """Test the savings fraction of a partly evaluated box"""
        game = random_game(3, 10, seed=6)
        emp = EmpiricalGame(game, StrategySets.full(game.strategy_counts))
        for number, profile in enumerate(emp.sets.box()):
            if number == 880:
                break
            emp.ensure(profile, PayoffEstimator())
        report = savings_report(emp)
        self.assertEqual((report.evaluated, report.total_box), (880, 1000))
        self.assertAlmostEqual(report.savings_fraction, 0.12, places=12)


class TestMetaStrategy(unittest.TestCase):
    """Test cases for lambda schedules and meta-strategy solvers"""

    def test_lambda_schedules(self):
        """Test constant, linear and exponential schedules"""
        self.assertEqual(lambda_at(LambdaSchedule(start=0.35), 7), 0.35)
        linear = LambdaSchedule(LINEAR_DECAY, 0.6, 0.0, 10)
        self.assertAlmostEqual(lambda_at(linear, 5), 0.3)
        self.assertEqual(lambda_at(linear, 20), 0.0)
        exponential = LambdaSchedule(EXP_DECAY, 0.6, 0.1, 10)
        self.assertAlmostEqual(lambda_at(exponential, 0), 0.6)
        self.assertLess(lambda_at(exponential, 30), 0.11)
        with self.assertRaises(InvalidStrategyError):
            LambdaSchedule(LINEAR_DECAY, 0.1, 0.6, 10)

    def test_unknown_kind(self):
        """Test that an unknown solver kind is rejected"""
        with self.assertRaises(InvalidStrategyError):
            MssSpec("ALPHA_RANK")

    def test_fictitious_play_uniform(self):
        """Test the uniform target"""
        emp = EmpiricalGame(random_game(2, 4, seed=1), StrategySets([[0, 1, 2], [3]]))
        self.assertEqual(solve_mss(MssSpec(FP_UNIFORM), emp, 1), MixedProfile.uniform((3, 1)))

    def test_last_strategy(self):
        """Test the pure target on the newest strategies"""
        emp = EmpiricalGame(random_game(2, 4, seed=1), StrategySets([[0, 3], [1, 2]], added_at=[[0, 1], [1, 0]]))
        self.assertEqual(solve_mss(MssSpec(LAST_STRATEGY), emp, 1).pure_profile(), (1, 0))

    def test_double_oracle_restricted(self):
        """Test the restricted NE of the closed-MRCP game"""
        emp = filled(make_mrcp_closed_game(), [[0, 1], [0, 1]])
        self.assertEqual(solve_mss(MssSpec(DO_NASH), emp, 1).pure_profile(), (1, 1))

    def test_nash_uniform_mix_extremes(self):
        """Test the mixing probability at 0 and 1"""
        emp = filled(make_mrcp_closed_game(), [[0, 1], [0, 1]])
        for iteration in range(1, 6):
            never = solve_mss(MssSpec(NASH_UNIFORM_MIX, mix_probability=0.0), emp, iteration)
            always = solve_mss(MssSpec(NASH_UNIFORM_MIX, mix_probability=1.0), emp, iteration)
            self.assertEqual(never, MixedProfile.uniform((2, 2)))
            self.assertEqual(always.pure_profile(), (1, 1))

    def test_rrd_diagnostics(self):
        """Test that RRD reports the threshold in force"""
        emp = filled(random_game(2, 3, seed=7), [[0, 1, 2], [0, 1, 2]])
        spec = MssSpec(RRD, schedule=LambdaSchedule(LINEAR_DECAY, 0.4, 0.0, 4), rd=RdConfig(step_size=0.01))
        outcome = solve_mss_detailed(spec, emp, 2)
        self.assertAlmostEqual(outcome.lambda_used, 0.2)
        if outcome.hit_threshold:
            self.assertLessEqual(regret(emp.subgame(), outcome.profile).total, 0.2)

    def test_rrd_miss_falls_back_to_nash(self):
        """Test that a step-capped RRD miss is replaced by the Nash target"""
        game = biased_pennies()
        rd = RdConfig(step_size=1e-3, max_steps=1000)
        outcome = solve_target(MssSpec(RRD, rd=rd), game, 1)
        self.assertFalse(outcome.hit_threshold)
        self.assertEqual(outcome.solver_steps, 1000)
        self.assertLessEqual(regret(game, outcome.profile).total, 1e-8)

        kept = solve_target(MssSpec(RRD, rd=rd, nash_on_miss=False), game, 1)
        expected = rrd(game, RdConfig(0.0, 1e-3, 1000))
        self.assertFalse(kept.hit_threshold)
        self.assertTrue(kept.profile.allclose(expected.profile, atol=1e-15))
        self.assertGreater(regret(game, kept.profile).total, 1e-8)

    def test_with_threshold(self):
        """Test the constant-threshold copy used by sweeps"""
        spec = MssSpec(RRD, label="rrd").with_threshold(0.05)
        self.assertEqual(lambda_at(spec.schedule, 9), 0.05)
        self.assertEqual(spec.label, "rrd")

    def test_mrcp_target(self):
        """Test the MRCP target on the closed game"""
        emp = filled(make_mrcp_closed_game(), [[0, 1], [0, 1]])
        profile = solve_mss(MssSpec(MRCP_ORACLE, mrcp_restarts=2), emp, 1)
        self.assertAlmostEqual(regret(make_mrcp_closed_game(), emp.lift(profile)).total, 20 / 11, delta=1e-5)

    def test_payoff_solver_needs_complete_box(self):
        """Test that an incomplete box is reported"""
        emp = EmpiricalGame(random_game(2, 3, seed=1), StrategySets([[0, 1], [0]]))
        with self.assertRaises(MissingProfileError):
            solve_mss(MssSpec(DO_NASH), emp, 1)


class TestPsro(unittest.TestCase):
    """Test cases for the PSRO loop"""

    def test_full_sets_close_immediately(self):
        """Test that DO over the whole game stops at iteration 1"""
        game = random_game(2, 4, seed=21)
        trace = psro_run(game, StrategySets.full((4, 4)), PsroConfig(5, MssSpec(DO_NASH), epsilon_stop=1e-6))
        self.assertEqual(trace.terminated_by, EPS_CLOSED)
        self.assertEqual(len(trace.records), 1)
        self.assertLessEqual(trace.final_record.target_regret_full, 1e-6)
        self.assertEqual(trace.final_record.new_strategies, (None, None))

    def test_dominant_strategy(self):
        """Test that the dominant strategy is added first"""
        trace = psro_run(dominant_3x3(), StrategySets([[0], [0]]), PsroConfig(10, MssSpec(DO_NASH)))
        self.assertEqual(trace.records[0].new_strategies, (1, 1))
        self.assertEqual(trace.terminated_by, EPS_CLOSED)
        self.assertLessEqual(len(trace.records), 2)

    def test_long_path_double_oracle(self):
        """Test that DO walks the whole best-response chain"""
        n = 20
        game = make_long_path_game(n)
        trace = psro_run(game, StrategySets([[0], [0]]), PsroConfig(30, MssSpec(DO_NASH)))
        self.assertEqual(trace.terminated_by, EPS_CLOSED)
        self.assertEqual(len(trace.records), n - 1)
        for record in trace.records:
            self.assertEqual(record.new_strategies, (record.iteration, record.iteration))
        self.assertEqual(trace.final_record.target_full.pure_profile(), (n - 1, n - 1))

    def test_long_path_rrd_shortcut(self):
        """Test that a loose threshold jumps straight to the last strategy"""
        n = 20
        game = make_long_path_game(n)
        spec = MssSpec(RRD, schedule=LambdaSchedule(start=0.15))
        trace = psro_run(game, StrategySets([[0], [0]]), PsroConfig(10, spec, epsilon_stop=0.15))
        self.assertEqual(trace.records[0].new_strategies, (1, 1))
        self.assertEqual(trace.records[1].new_strategies, (n - 1, n - 1))
        self.assertEqual(trace.terminated_by, EPS_CLOSED)
        self.assertLessEqual(len(trace.records), 3)
        self.assertLessEqual(trace.final_record.target_regret_full, 0.15 + 1e-9)

    def test_double_oracle_zero_sum(self):
        """Test DO convergence on random zero-sum games"""
        for seed in range(5):
            game = random_game(2, 8, seed=500 + seed, zero_sum=True)
            trace = psro_run(game, StrategySets([[0], [0]]), PsroConfig(20, MssSpec(DO_NASH), epsilon_stop=1e-6))
            self.assertEqual(trace.terminated_by, EPS_CLOSED, msg=f"seed {seed}")
            self.assertLessEqual(trace.final_record.target_regret_full, 1e-6)

    def test_rrd_targets_within_threshold_zero_sum(self):
        """Test that every RRD target stays within lambda on X and runs close on zero-sum games"""
        threshold = 0.05
        spec = MssSpec(RRD, schedule=LambdaSchedule(start=threshold), rd=RdConfig(step_size=0.01, max_steps=2000))
        for seed in range(50):
            game = random_game(2, 20, seed=800 + seed, zero_sum=True)
            trace = psro_run(game, StrategySets([[0], [0]]), PsroConfig(40, spec, epsilon_stop=threshold))
            self.assertEqual(trace.terminated_by, EPS_CLOSED, msg=f"seed {seed}")
            self.assertLessEqual(len(trace.records), 39)
            self.assertLessEqual(trace.final_record.target_regret_full, threshold + 1e-9)
            for record in trace.records:
                x_sets = [trace.final_sets[p][: record.strategy_counts[p]] for p in range(2)]
                x_regret = regret(game.restrict(x_sets), record.target).total
                self.assertLessEqual(x_regret, threshold + 1e-9, msg=f"seed {seed} iteration {record.iteration}")
                if record.hit_threshold:
                    self.assertLessEqual(x_regret, threshold + 1e-12)

    def test_monotone_records(self):
        """Test that sets and evaluations only grow"""
        game = random_game(3, 3, seed=31)
        trace = psro_run(game, StrategySets([[0], [0], [0]]), PsroConfig(4, MssSpec(FP_UNIFORM)))
        for before, after in zip(trace.records, trace.records[1:]):
            self.assertTrue(all(a >= b for a, b in zip(after.strategy_counts, before.strategy_counts)))
            self.assertGreaterEqual(after.profiles_evaluated_cum, before.profiles_evaluated_cum)
        for record in trace.records:
            self.assertEqual(record.profiles_evaluated_cum, int(np.prod(record.strategy_counts)))

    def test_deterministic(self):
        """Test that identical runs give identical traces"""
        game = random_game(3, 3, seed=32)
        cfg = PsroConfig(3, MssSpec(NASH_UNIFORM_MIX, seed=4), estimator=PayoffEstimator(0.05, 2, seed=3), seed=8)
        first = psro_run(game, StrategySets([[0], [0], [0]]), cfg)
        second = psro_run(game, StrategySets([[0], [0], [0]]), cfg)
        self.assertEqual(len(first.records), len(second.records))
        for a, b in zip(first.records, second.records):
            self.assertEqual(a.target, b.target)
            self.assertEqual(a.target_regret_full, b.target_regret_full)

    def test_ne_regret_tracking(self):
        """Test that DO records its own target as the empirical NE"""
        game = random_game(2, 5, seed=33)
        trace = psro_run(game, StrategySets([[0], [0]]), PsroConfig(6, MssSpec(DO_NASH), track_ne_regret=True))
        for record in trace.records:
            self.assertEqual(record.ne_regret_full, record.target_regret_full)
        untracked = psro_run(game, StrategySets([[0], [0]]), PsroConfig(2, MssSpec(FP_UNIFORM)))
        self.assertIsNone(untracked.records[0].ne_regret_full)

    def test_closed_game_epsilon_closure(self):
        """Test closure of the closed-MRCP game at a loose epsilon"""
        game = make_mrcp_closed_game()
        emp = filled(game, [[0, 1], [0, 1]])
        self.assertTrue(epsilon_closed(game, emp, MixedProfile.pure((2, 2), (0, 0)), 2.0))
        self.assertFalse(epsilon_closed(game, emp, MixedProfile.pure((2, 2), (0, 0)), 1.0))

    def test_force_outside_escapes(self):
        """Test that forcing new strategies reaches the equilibrium of the closed game"""
        game = make_mrcp_closed_game()
        cfg = PsroConfig(5, MssSpec(MRCP_ORACLE, mrcp_restarts=2), epsilon_stop=1e-6, force_outside=True)
        trace = psro_run(game, StrategySets([[0], [0]]), cfg)
        self.assertEqual(trace.terminated_by, EPS_CLOSED)
        self.assertLessEqual(len(trace.records), 3)
        self.assertLessEqual(trace.final_record.target_regret_full, 1e-6)

    def test_mrcp_stall_independent_of_seed(self):
        """Test that MRCP stalls on the closed game for every seed and forcing escapes it"""
        game = make_mrcp_closed_game()
        for seed in range(4):
            spec = MssSpec(MRCP_ORACLE, mrcp_restarts=16, seed=seed)
            stalled = psro_run(game, StrategySets([[0], [0]]), PsroConfig(10, spec, epsilon_stop=1e-6))
            self.assertEqual(stalled.terminated_by, MAX_ITERATIONS, msg=f"seed {seed}")
            self.assertEqual(len(stalled.records), 10)
            self.assertTrue(all(record.strategy_counts == (2, 2) for record in stalled.records))
            self.assertEqual(stalled.final_sets.per_player, [[0, 1], [0, 1]])

            forced = PsroConfig(10, spec, epsilon_stop=1e-6, force_outside=True)
            escaped = psro_run(game, StrategySets([[0], [0]]), forced)
            self.assertEqual(escaped.terminated_by, EPS_CLOSED, msg=f"seed {seed}")
            self.assertLessEqual(len(escaped.records), 3)
            self.assertLessEqual(escaped.final_record.target_regret_full, 1e-6)

    def test_closure_fallback(self):
        """Test switching to DO when the uniform target is closed but not an equilibrium"""
        game = random_game(2, 3, seed=34)
        full = StrategySets.full((3, 3))
        stuck = psro_run(game, full, PsroConfig(3, MssSpec(FP_UNIFORM), epsilon_stop=1e-6))
        self.assertEqual(stuck.terminated_by, MAX_ITERATIONS)
        cfg = PsroConfig(3, MssSpec(FP_UNIFORM), epsilon_stop=1e-6, closure_fallback=SWITCH_TO_DO)
        rescued = psro_run(game, full, cfg)
        self.assertEqual(rescued.terminated_by, EPS_CLOSED)
        self.assertLessEqual(rescued.final_record.target_regret_full, 1e-6)

    def test_switch_to_do(self):
        """Test that the solver becomes DO from the given iteration"""
        game = random_game(2, 5, seed=35)
        start = StrategySets([[0], [0]])
        switched = psro_run(game, start, PsroConfig(6, MssSpec(FP_UNIFORM), switch_to_do_at=1))
        plain = psro_run(game, start, PsroConfig(6, MssSpec(DO_NASH)))
        self.assertEqual([r.target for r in switched.records], [r.target for r in plain.records])

    def test_sampled_oracle(self):
        """Test the sampling oracle on a game with a dominant strategy"""
        trace = psro_run(dominant_3x3(), StrategySets([[0], [0]]), PsroConfig(5, MssSpec(DO_NASH), oracle_mode=SAMPLE))
        self.assertEqual(trace.records[0].new_strategies, (1, 1))
        self.assertEqual(trace.terminated_by, EPS_CLOSED)

    def test_failure_keeps_partial_trace(self):
        """Test that solver failures are wrapped with the trace so far"""
        with patch("src.psro.solve_mss_detailed", side_effect=SolverError("boom")):
            with self.assertRaises(PsroRunError) as ctx:
                psro_run(dominant_3x3(), StrategySets([[0], [0]]), PsroConfig(3, MssSpec(DO_NASH)))
        self.assertIn("boom", str(ctx.exception))
        self.assertEqual(ctx.exception.trace.records, [])

    def test_config_validation(self):
        """Test rejection of invalid run parameters"""
        with self.assertRaises(InvalidStrategyError):
            PsroConfig(0, MssSpec(DO_NASH))
        with self.assertRaises(InvalidStrategyError):
            PsroConfig(3, MssSpec(DO_NASH), oracle_mode="guess")


class TestBackwardProfileSearch(unittest.TestCase):
    """Test cases for backward profile search"""

    def test_strict_pure_equilibrium(self):
        """Test that a strict NE on the newest strategies needs only its deviations"""
        game = make_long_path_game(4)
        sets = StrategySets([[0, 1, 2, 3], [0, 1, 2, 3]], added_at=[[0, 1, 2, 3], [0, 1, 2, 3]])
        emp = EmpiricalGame(game, sets)
        result = bps(emp, PayoffEstimator())
        self.assertTrue(result.confirmed)
        self.assertEqual(result.evaluations_this_call, 7)
        self.assertEqual(result.profile.pure_profile(), (3, 3))
        self.assertEqual(savings_report(emp), (7, 16, 1 - 7 / 16))

    def test_single_strategies(self):
        """Test the trivial empirical game"""
        emp = EmpiricalGame(random_game(2, 3, seed=1), StrategySets([[2], [1]]))
        result = bps(emp, PayoffEstimator())
        self.assertTrue(result.confirmed)
        self.assertEqual(result.evaluations_this_call, 1)
        self.assertTrue(result.subgame.complete)

    def test_confirmed_means_equilibrium(self):
        """Test confirmation and savings on empirical games grown by double oracle"""
        tol = 1e-6
        saved = 0
        for seed in range(30):
            game = random_game(3, 10, seed=700 + seed)
            grown = psro_run(game, StrategySets([[0, 1]] * 3), PsroConfig(5, MssSpec(DO_NASH), epsilon_stop=tol))
            emp = EmpiricalGame(game, grown.final_sets)
            result = bps(emp, PayoffEstimator(), tol, seed=seed)
            self.assertTrue(result.confirmed, msg=f"seed {seed}")
            box = game.restrict(emp.sets.per_player)
            self.assertLessEqual(regret(box, result.profile).total, tol + 1e-9, msg=f"seed {seed}")
            report = savings_report(emp)
            if report.evaluated < report.total_box:
                saved += 1
        self.assertGreaterEqual(saved, 20)

    def test_resolve_allowed_after_each_expansion(self):
        """Test that every growth of Z permits one more doubled-restart re-solve"""
        row = np.array([[0, 0, -5, -5], [0, 0, 0.6, 0], [0, 0, 1, -1], [0, 0, -1, 2]], dtype=float)
        col = np.array([[0, 0, 0, 0], [-5, -5, 0, 0], [-5, -5, -1, 1], [-5, -5, 1, -2]], dtype=float)
        game = Game.from_matrices(row, col)
        stamps = [[0, 1, 2, 3], [0, 1, 2, 3]]
        emp = EmpiricalGame(game, StrategySets(stamps, added_at=stamps))
        calls = []

        def weak_first_solve(z_game, restarts, seed):
            calls.append((z_game.strategy_counts, restarts))
            if restarts == 8:
                return MixedProfile.uniform(z_game.strategy_counts)
            return nash_2p(z_game)

        with patch("src.bps.nash_np", side_effect=weak_first_solve):
            result = bps(emp, PayoffEstimator(), restarts=8)
        expected = [((1, 1), 8), ((1, 2), 8), ((1, 2), 16), ((2, 2), 8), ((2, 2), 16), ((3, 2), 8), ((3, 2), 16)]
        self.assertEqual(calls, expected)
        self.assertTrue(result.confirmed)

    def test_rrd_on_support(self):
        """Test the RRD target on the confirmed support"""
        game = make_long_path_game(6)
        stamps = [list(range(6)), list(range(6))]
        emp = EmpiricalGame(game, StrategySets(stamps, added_at=stamps))
        target = bps_rrd_target(emp, PayoffEstimator(), RdConfig(regret_threshold=0.0))
        self.assertEqual(target.pure_profile(), (5, 5))
        self.assertLess(emp.evaluated_count, 36)

    def test_psro_with_search(self):
        """Test that PSRO with the search follows the DO path"""
        n = 8
        game = make_long_path_game(n)
        trace = psro_run(game, StrategySets([[0], [0]]), PsroConfig(10, MssSpec(DO_NASH), use_bps=True))
        self.assertEqual(trace.terminated_by, EPS_CLOSED)
        self.assertEqual(len(trace.records), n - 1)
        for record in trace.records:
            self.assertIsNotNone(record.savings)
            self.assertLessEqual(record.savings.evaluated, record.savings.total_box)


if __name__ == "__main__":
    unittest.main()
