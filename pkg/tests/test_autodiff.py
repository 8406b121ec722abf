"""Gradient checks for the autodiff engine and its layers"""

import numpy as np
import pytest

from src.agents.networks import Actor, TwinCritic
from src.autodiff import (
    MLP,
    Adam,
    LayerNorm,
    Linear,
    Tensor,
    adam_step,
    AdamState,
    attention,
    concat,
    gather,
    gradient_check,
    layer_norm,
    masked_softmax,
    minimum,
    no_grad,
    softmax,
    stack,
    where,
)
from src.errors import InvalidArgumentError

TOLERANCE = 1e-6


def leaf(rng, *shape, low=-1.0, high=1.0):
    return Tensor(rng.uniform(low, high, size=shape), requires_grad=True)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


class TestElementwise:
    """Scalar ops and reductions"""

    def test_arithmetic_with_broadcasting(self, rng):
        a, b = leaf(rng, 4, 3), leaf(rng, 3, low=0.5, high=2.0)
        assert gradient_check(lambda: ((a * b - a / b + 2.0) ** 2).sum(), [a, b]) < TOLERANCE

    def test_unary_functions(self, rng):
        x = leaf(rng, 5, 4)
        positive = leaf(rng, 5, 4, low=0.2, high=3.0)

        def fn():
            return (x.exp() + positive.log() + x.tanh() + x.elu() + x.softplus()).sum()
        assert gradient_check(fn, [x, positive]) < TOLERANCE

    def test_clamp_passes_gradient_inside_bounds_only(self):
        x = Tensor(np.array([-2.0, 0.3, 2.0]), requires_grad=True)
        x.clamp(-1.0, 1.0).sum().backward()
        np.testing.assert_array_equal(x.grad, [0.0, 1.0, 0.0])

    def test_reductions(self, rng):
        x = leaf(rng, 3, 4, 5)
        assert gradient_check(lambda: (x.mean(axis=1) * x.sum(axis=(1, 2)).reshape(3, 1)).sum(), [x]) < TOLERANCE
        assert gradient_check(lambda: x.max(axis=-1).sum(), [x]) < TOLERANCE

    def test_shape_ops(self, rng):
        x = leaf(rng, 2, 3, 4)
        weights = rng.normal(size=(4, 3, 2))

        def fn():
            return (x.transpose(2, 1, 0) * weights).sum() + (x.swapaxes(0, 1)[1:, :, ::2] ** 2).sum()
        assert gradient_check(fn, [x]) < TOLERANCE

    def test_reused_node_accumulates(self):
        x = Tensor(np.array(3.0), requires_grad=True)
        y = x * x
        (y + y).backward()
        assert np.isclose(x.grad, 12.0)


class TestOps:
    def test_matmul_batched(self, rng):
        a, b = leaf(rng, 2, 3, 4), leaf(rng, 4, 5)
        assert gradient_check(lambda: ((a @ b) ** 2).sum(), [a, b]) < TOLERANCE

    def test_concat_stack_gather(self, rng):
        a, b = leaf(rng, 3, 2), leaf(rng, 3, 4)
        idx = np.array([2, 0, 2])

        def fn():
            joined = concat([a, b], axis=-1)
            return (stack([joined, joined * 2.0], axis=0) ** 2).sum() + gather(joined, idx, axis=0).sum()
        assert gradient_check(fn, [a, b]) < TOLERANCE

    def test_minimum_and_where(self, rng):
        a, b = leaf(rng, 6), leaf(rng, 6)
        cond = np.array([True, False, True, True, False, False])
        assert gradient_check(lambda: (minimum(a, b) * where(cond, a, b)).sum(), [a, b]) < TOLERANCE

    def test_softmax(self, rng):
        x = leaf(rng, 3, 5)
        weights = rng.normal(size=(3, 5))
        assert gradient_check(lambda: (softmax(x, axis=-1) * weights).sum(), [x]) < TOLERANCE

    def test_masked_softmax(self, rng):
        x = leaf(rng, 3, 5)
        visible = np.array([[1, 1, 0, 1, 0], [0, 0, 0, 0, 1], [1, 1, 1, 1, 1]], dtype=bool)
        weights = rng.normal(size=(3, 5))
        out = masked_softmax(x, visible)
        np.testing.assert_allclose(out.data.sum(axis=-1), 1.0)
        assert np.all(out.data[~visible] == 0.0)
        assert gradient_check(lambda: (masked_softmax(x, visible) * weights).sum(), [x]) < TOLERANCE

    def test_masked_softmax_fully_hidden_row_is_zero(self, rng):
        x = leaf(rng, 2, 3)
        visible = np.array([[False, False, False], [True, True, False]])
        out = masked_softmax(x, visible)
        np.testing.assert_array_equal(out.data[0], 0.0)
        out.sum().backward()
        np.testing.assert_array_equal(x.grad[0], 0.0)

    def test_layer_norm(self, rng):
        x, gamma, beta = leaf(rng, 4, 6), leaf(rng, 6), leaf(rng, 6)
        weights = rng.normal(size=(4, 6))
        assert gradient_check(lambda: (layer_norm(x, gamma, beta) * weights).sum(), [x, gamma, beta]) < TOLERANCE

    def test_layer_norm_rejects_wrong_affine(self, rng):
        with pytest.raises(InvalidArgumentError):
            layer_norm(leaf(rng, 2, 4), leaf(rng, 3), leaf(rng, 3))

    def test_attention_with_mask(self, rng):
        q, k, v = leaf(rng, 2, 4, 3), leaf(rng, 2, 4, 3), leaf(rng, 2, 4, 5)
        visible = np.tril(np.ones((4, 4), dtype=bool))
        weights = rng.normal(size=(2, 4, 5))
        assert gradient_check(lambda: (attention(q, k, v, visible) * weights).sum(), [q, k, v]) < TOLERANCE

    def test_attention_rejects_bad_mask(self, rng):
        q = leaf(rng, 4, 3)
        with pytest.raises(InvalidArgumentError):
            attention(q, q, q, np.ones((3, 3), dtype=bool))


class TestLayers:
    def test_linear_and_layer_norm_modules(self, rng):
        layer = Linear(4, 3, rng)
        norm = LayerNorm(3)
        x = leaf(rng, 5, 4)
        params = [x] + layer.parameters() + norm.parameters()
        assert gradient_check(lambda: (norm(layer(x)) ** 2).sum(), params) < TOLERANCE

    def test_mlp(self, rng):
        net = MLP((4, 8, 8, 2), rng)
        x = leaf(rng, 3, 4)
        assert gradient_check(lambda: (net(x) ** 2).sum(), [x] + net.parameters()) < TOLERANCE

    def test_actor_log_prob(self, rng):
        actor = Actor(6, 2, 8, 2, rng)
        embedding = leaf(rng, 3, 6)
        noise = rng.standard_normal((3, 2))

        def fn():
            action, log_prob = actor(embedding, noise=noise)
            return log_prob.sum() + (action ** 2).sum()
        assert gradient_check(fn, [embedding] + actor.parameters()) < TOLERANCE

    @staticmethod
    def pin_head(actor, bias):
        head = actor.net.layers[-1]
        head.weight.data[...] = 0.0
        head.bias.data[...] = bias

    def test_actor_density_integrates_to_one(self, rng):
        actor = Actor(4, 1, 8, 2, rng)
        mean, std = 0.3, np.exp(-0.5)
        self.pin_head(actor, [mean, -0.5])
        u = np.linspace(mean - 12 * std, mean + 12 * std, 40001)
        with no_grad():
            action, log_prob = actor(Tensor(np.zeros((len(u), 4))), noise=(u - mean) / std)
        a = action.data[:, 0]
        np.testing.assert_allclose(a, np.tanh(u), atol=1e-12)
        density = np.exp(log_prob.data)
        total = np.sum(0.5 * (density[1:] + density[:-1]) * np.diff(a))
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_actor_log_std_is_clamped(self, rng):
        actor = Actor(4, 2, 8, 2, rng, log_std_bounds=(-3.0, 1.0))
        self.pin_head(actor, [0.0, 0.0, 100.0, -100.0])
        _, log_std = actor.distribution(Tensor(np.zeros((2, 4))))
        np.testing.assert_array_equal(log_std.data, [[1.0, -3.0], [1.0, -3.0]])

    def test_twin_critic_min(self, rng):
        critic = TwinCritic(6, 2, 8, 2, rng)
        embedding, action = leaf(rng, 4, 6), leaf(rng, 4, 2)
        assert gradient_check(lambda: critic.min_q(embedding, action).sum(), [embedding, action]) < TOLERANCE

    def test_mlp_needs_two_sizes(self, rng):
        with pytest.raises(InvalidArgumentError):
            MLP((4,), rng)


class TestGraphControl:
    def test_no_grad_builds_no_graph(self, rng):
        x = leaf(rng, 3)
        with no_grad():
            y = (x * 2.0).sum()
        assert not y.requires_grad

    def test_detach_stops_gradient(self, rng):
        x = leaf(rng, 3)
        ((x.detach() * x).sum()).backward()
        np.testing.assert_allclose(x.grad, x.data)

    def test_state_dict_round_trip(self, rng):
        source, target = MLP((3, 4, 1), rng), MLP((3, 4, 1), rng)
        target.load_state_dict(source.state_dict())
        for a, b in zip(source.parameters(), target.parameters()):
            np.testing.assert_array_equal(a.data, b.data)

    def test_state_dict_strict_mismatch(self, rng):
        with pytest.raises(InvalidArgumentError):
            MLP((3, 4, 1), rng).load_state_dict({"layers.0.weight": np.zeros((3, 4))})

    def test_soft_update_moves_toward_source(self, rng):
        live, target = TwinCritic(4, 1, 8, 2, rng), TwinCritic(4, 1, 8, 2, rng)
        before = target.q1.net.layers[0].weight.data.copy()
        target.soft_update(live, 0.25)
        expected = 0.75 * before + 0.25 * live.q1.net.layers[0].weight.data
        np.testing.assert_allclose(target.q1.net.layers[0].weight.data, expected)


class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        params, state = adam_step([np.array([1.0, -1.0])], [np.array([0.5, -2.0])], AdamState(), lr=0.1)
        np.testing.assert_allclose(params[0], [0.9, -0.9], atol=1e-6)
        assert state.step == 1

    def test_missing_gradient_is_zero(self):
        params, _ = adam_step([np.array([1.0])], [None], AdamState(), lr=0.1)
        np.testing.assert_array_equal(params[0], [1.0])

    def test_minimizes_quadratic(self, rng):
        x = leaf(rng, 3)
        optimizer = Adam([x], lr=0.05)
        for _ in range(500):
            optimizer.zero_grad()
            ((x - 0.5) ** 2).sum().backward()
            optimizer.step()
        np.testing.assert_allclose(x.data, 0.5, atol=1e-3)

    def test_state_dict_resumes_identically(self, rng):
        a = leaf(rng, 4)
        b = Tensor(a.data.copy(), requires_grad=True)
        first, second = Adam([a], lr=0.01), Adam([b], lr=0.01)
        for optimizer, x in ((first, a), (second, b)):
            optimizer.zero_grad()
            (x ** 2).sum().backward()
            optimizer.step()
        second.load_state_dict(first.state_dict())
        for optimizer, x in ((first, a), (second, b)):
            optimizer.zero_grad()
            (x ** 3).sum().backward()
            optimizer.step()
        np.testing.assert_array_equal(a.data, b.data)

    def test_rejects_non_positive_lr(self, rng):
        with pytest.raises(InvalidArgumentError):
            Adam([leaf(rng, 2)], lr=0.0)
