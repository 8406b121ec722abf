"""Tests for evaluation and bootstrap intervals"""

import numpy as np
import pytest

from src.agents import RandomPolicy, ScriptedReachPolicy
from src.envs import make_env
from src.errors import InvalidArgumentError
from src.models.config import EnvConfig
from src.orchestrator import Evaluator, bootstrap_ci, evaluate_policy, run_episode


@pytest.fixture
def env():
    return make_env(EnvConfig(horizon=50))


@pytest.fixture
def oracle(env):
    return ScriptedReachPolicy(env.goal_position, env.agent_position, env.config.step_size)


class TestBootstrap:
    def test_constant_sample_is_degenerate(self):
        assert bootstrap_ci(np.ones(20)) == (1.0, 1.0)

    def test_single_value(self):
        assert bootstrap_ci(np.array([0.3])) == (0.3, 0.3)

    def test_empty_rejected(self):
        with pytest.raises(InvalidArgumentError):
            bootstrap_ci(np.array([]))

    def test_interval_brackets_mean(self):
        values = np.random.default_rng(0).normal(size=200)
        low, high = bootstrap_ci(values, resamples=2000)
        assert low < values.mean() < high
        assert high - low < 0.5

    def test_seeded(self):
        values = np.random.default_rng(1).uniform(size=30)
        assert bootstrap_ci(values, seed=4, resamples=500) == bootstrap_ci(values, seed=4, resamples=500)


class TestEvaluator:
    def test_oracle_always_succeeds(self, env, oracle):
        result = Evaluator(env, resamples=500).evaluate(oracle, 5, seed=0)
        assert result.success_rate == 1.0
        assert result.success_ci == (1.0, 1.0)
        assert result.return_ci[0] <= result.return_mean <= result.return_ci[1]
        assert len(result.outcomes) == 5

    def test_zero_episodes_rejected(self, env, oracle):
        with pytest.raises(InvalidArgumentError):
            Evaluator(env).evaluate(oracle, 0)

    def test_same_seed_same_result(self, env):
        first = evaluate_policy(env, RandomPolicy(3, seed=1), 3, seed=7, resamples=200)
        second = evaluate_policy(env, RandomPolicy(3, seed=1), 3, seed=7, resamples=200)
        assert first.to_dict() == second.to_dict()

    def test_to_dict(self, env, oracle):
        data = evaluate_policy(env, oracle, 2, resamples=200).to_dict(include_outcomes=True)
        assert data["success_ci"] == [1.0, 1.0]
        assert len(data["outcomes"]) == 2
        assert "outcomes" not in evaluate_policy(env, oracle, 1, resamples=200).to_dict()


def test_run_episode_counts_steps():
    env = make_env(EnvConfig(horizon=5, success_radius=0.01))
    outcome = run_episode(env, RandomPolicy(3, seed=0), seed=3)
    assert outcome.length == 5
    assert not outcome.success
