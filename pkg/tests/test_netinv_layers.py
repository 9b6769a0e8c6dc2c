"""Layer forward oracles, exact gradients, optimizer steps."""

import numpy as np
import pytest

from shwave.netinv.layers import Conv1D, Dense, ReLU, Reshape
from shwave.netinv.model import (
    Model,
    backward,
    build_from_descriptor,
    build_model,
    features_from_coefficients,
    model_forward,
    mse_loss,
)
from shwave.netinv.optim import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, AdamState, adam_step, sgd_step


def tiny_model(seed=0):
    """Small mixed stack exercising every layer kind."""
    rng = np.random.default_rng(seed)
    layers = [
        Dense(6, 8, rng),
        ReLU(),
        Reshape((4, 2)),
        Conv1D(4, 3, 3, rng),
        ReLU(),
        Reshape((6,)),
        Dense(6, 5, rng),
    ]
    return Model(layers, 6, 5)


class TestDense:
    def test_forward_oracle(self):
        layer = Dense(2, 2)
        layer.params["W"] = np.array([[1.0, 2.0], [3.0, 4.0]])
        layer.params["b"] = np.array([10.0, 20.0])
        out = layer.forward(np.array([[1.0, 1.0], [0.0, 2.0]]))
        np.testing.assert_array_equal(out, [[14.0, 26.0], [16.0, 28.0]])

    def test_rejects_wrong_width(self):
        with pytest.raises(ValueError):
            Dense(3, 2).forward(np.zeros((1, 4)))

    def test_xavier_bounds_and_zero_bias(self):
        rng = np.random.default_rng(0)
        layer = Dense(50, 30, rng)
        limit = np.sqrt(6.0 / 80.0)
        assert np.all(np.abs(layer.params["W"]) <= limit)
        assert layer.params["W"].std() > 0.25 * limit
        np.testing.assert_array_equal(layer.params["b"], np.zeros(30))


class TestReLU:
    def test_forward_and_backward_masks(self):
        layer = ReLU()
        x = np.array([[-1.0, 0.0, 2.0]])
        np.testing.assert_array_equal(layer.forward(x), [[0.0, 0.0, 2.0]])
        np.testing.assert_array_equal(layer.backward(np.ones((1, 3))), [[0.0, 0.0, 1.0]])


class TestReshape:
    def test_round_trip(self):
        layer = Reshape((3, 4))
        x = np.arange(24.0).reshape(2, 12)
        out = layer.forward(x)
        assert out.shape == (2, 3, 4)
        np.testing.assert_array_equal(layer.backward(out), x)


class TestConv1D:
    def test_matches_correlate(self):
        rng = np.random.default_rng(2)
        layer = Conv1D(3, 4, 5, rng)
        x = rng.normal(size=(2, 3, 11))
        out = layer.forward(x)
        for b in range(2):
            for o in range(4):
                want = layer.params["b"][o]
                for i in range(3):
                    want = want + np.correlate(x[b, i], layer.params["W"][o, i], mode="same")
                np.testing.assert_allclose(out[b, o], want, atol=1e-13)

    def test_even_kernel_rejected(self):
        with pytest.raises(ValueError):
            Conv1D(1, 1, 4)

    def test_rejects_wrong_channels(self):
        with pytest.raises(ValueError):
            Conv1D(2, 1, 3).forward(np.zeros((1, 3, 8)))

    def test_input_gradient_by_finite_differences(self):
        rng = np.random.default_rng(3)
        layer = Conv1D(2, 3, 3, rng)
        x = rng.normal(size=(2, 2, 7))
        weights = rng.normal(size=(2, 3, 7))  # fixed projection of the output

        def scalar(xv):
            return float(np.sum(layer.forward(xv) * weights))

        scalar(x)
        grad = layer.backward(weights)
        eps = 1e-6
        for idx in np.ndindex(x.shape):
            xp = x.copy()
            xp[idx] += eps
            xm = x.copy()
            xm[idx] -= eps
            fd = (scalar(xp) - scalar(xm)) / (2 * eps)
            assert fd == pytest.approx(grad[idx], rel=1e-6, abs=1e-9)


class TestModelGradients:
    def test_all_parameter_gradients_by_finite_differences(self):
        # exact reverse-mode gradients versus central differences, every
        # parameter entry of a stack with all layer kinds, with weight decay
        model = tiny_model()
        rng = np.random.default_rng(4)
        x = rng.normal(size=(3, 6))
        y = rng.normal(size=(3, 5))
        lam = 1e-3

        _, grads = backward(model, x, y, lam)
        params = model.parameters()
        eps = 1e-6
        for p, g in zip(params, grads):
            for idx in np.ndindex(p.shape):
                orig = p[idx]
                p[idx] = orig + eps
                lp = _loss(model, x, y, lam)
                p[idx] = orig - eps
                lm = _loss(model, x, y, lam)
                p[idx] = orig
                fd = (lp - lm) / (2 * eps)
                assert fd == pytest.approx(g[idx], rel=2e-5, abs=1e-8)

    def test_input_gradient_through_whole_stack(self):
        model = tiny_model(seed=1)
        rng = np.random.default_rng(5)
        x = rng.normal(size=(2, 6))
        y = rng.normal(size=(2, 5))
        pred = model.forward(x)
        grad_in = model.backward_pass(2.0 * (pred - y) / pred.size)
        eps = 1e-6
        for idx in np.ndindex(x.shape):
            xp = x.copy()
            xp[idx] += eps
            xm = x.copy()
            xm[idx] -= eps
            fd = (mse_loss(model.forward(xp), y) - mse_loss(model.forward(xm), y)) / (2 * eps)
            assert fd == pytest.approx(grad_in[idx], rel=2e-5, abs=1e-9)


def _loss(model, x, y, lam):
    value = mse_loss(model.forward(x), y)
    for p in model.parameters():
        value += lam * float(np.sum(p * p))
    return value


class TestModelContainer:
    def test_default_model_parameter_count(self):
        assert build_model(seed=0).parameter_count() == 106432

    def test_seeded_initialization_is_deterministic(self):
        p1 = build_model(seed=7).parameters()
        p2 = build_model(seed=7).parameters()
        p3 = build_model(seed=8).parameters()
        for a, b in zip(p1, p2):
            np.testing.assert_array_equal(a, b)
        assert any(not np.array_equal(a, c) for a, c in zip(p1, p3))

    def test_descriptor_round_trip(self):
        model = tiny_model()
        rebuilt = build_from_descriptor(model.describe())
        assert rebuilt.describe() == model.describe()
        rebuilt.set_parameters(model.parameters())
        x = np.random.default_rng(6).normal(size=(2, 6))
        np.testing.assert_array_equal(rebuilt.forward(x), model.forward(x))

    def test_set_parameters_copies(self):
        model = tiny_model()
        values = [p.copy() for p in model.parameters()]
        model.set_parameters(values)
        values[0][0, 0] = 99.0
        assert model.parameters()[0][0, 0] != 99.0

    def test_set_parameters_validates(self):
        model = tiny_model()
        values = model.parameters()
        with pytest.raises(ValueError):
            model.set_parameters(values[:-1])
        bad = [v.copy() for v in values]
        bad[0] = np.zeros((1, 1))
        with pytest.raises(ValueError):
            model.set_parameters(bad)

    def test_incompatible_stack_rejected_at_build(self):
        with pytest.raises(ValueError):
            Model([Dense(6, 8), Reshape((3, 3))], 6, 9)

    def test_model_forward_single_vector(self):
        model = tiny_model()
        x = np.random.default_rng(8).normal(size=6)
        np.testing.assert_array_equal(model_forward(model, x), model.forward(x[None, :])[0])


class TestLossAndFeatures:
    def test_mse_worked_example(self):
        assert mse_loss(np.array([[1.0, 2.0]]), np.array([[0.0, 4.0]])) == 2.5

    def test_mse_shape_mismatch(self):
        with pytest.raises(ValueError):
            mse_loss(np.zeros((1, 2)), np.zeros((2, 1)))

    def test_weight_decay_contribution(self):
        model = tiny_model()
        rng = np.random.default_rng(9)
        x = rng.normal(size=(4, 6))
        y = rng.normal(size=(4, 5))
        loss0, grads0 = backward(model, x, y, 0.0)
        lam = 0.01
        loss1, grads1 = backward(model, x, y, lam)
        norm2 = sum(float(np.sum(p * p)) for p in model.parameters())
        assert loss1 - loss0 == pytest.approx(lam * norm2, rel=1e-12)
        for p, g0, g1 in zip(model.parameters(), grads0, grads1):
            np.testing.assert_allclose(g1 - g0, 2.0 * lam * p, atol=1e-12)

    def test_features_concatenate_re_im(self):
        c = np.array([1.0 + 2.0j, -3.0 + 0.5j])
        np.testing.assert_array_equal(features_from_coefficients(c), [1.0, -3.0, 2.0, 0.5])

    def test_features_batch_shape(self):
        c = np.zeros((7, 4), dtype=complex)
        assert features_from_coefficients(c).shape == (7, 8)


class TestOptimizers:
    def test_sgd_step(self):
        p = [np.array([1.0, 2.0])]
        sgd_step(p, [np.array([0.5, -1.0])], 0.1)
        np.testing.assert_allclose(p[0], [0.95, 2.1])

    def test_adam_matches_scalar_reference(self):
        # independent elementwise reference recurrence
        rng = np.random.default_rng(10)
        p = [rng.normal(size=(2, 3)), rng.normal(size=4)]
        ref = [a.copy() for a in p]
        state = AdamState.for_parameters(p)
        m = [np.zeros_like(a) for a in p]
        v = [np.zeros_like(a) for a in p]
        lr = 0.01
        for t in range(1, 6):
            grads = [rng.normal(size=a.shape) for a in p]
            adam_step(p, grads, state, lr)
            for k in range(len(ref)):
                m[k] = ADAM_BETA1 * m[k] + (1 - ADAM_BETA1) * grads[k]
                v[k] = ADAM_BETA2 * v[k] + (1 - ADAM_BETA2) * grads[k] ** 2
                mhat = m[k] / (1 - ADAM_BETA1**t)
                vhat = v[k] / (1 - ADAM_BETA2**t)
                ref[k] = ref[k] - lr * mhat / (np.sqrt(vhat) + ADAM_EPS)
            for got, want in zip(p, ref):
                np.testing.assert_allclose(got, want, atol=1e-14)
        assert state.t == 5

    def test_adam_first_step_is_signed_learning_rate(self):
        # bias correction makes the first update lr * g/|g| regardless of g
        for g in (2.0, -0.03):
            p = [np.array([1.0])]
            state = AdamState.for_parameters(p)
            adam_step(p, [np.array([g])], state, 0.1)
            assert p[0][0] == pytest.approx(1.0 - 0.1 * np.sign(g), abs=1e-7)

    def test_adam_list_mismatch(self):
        p = [np.zeros(2)]
        state = AdamState.for_parameters(p)
        with pytest.raises(ValueError):
            adam_step(p, [np.zeros(2), np.zeros(1)], state, 0.1)
