"""Subnetwork construction, initialization, blending, and checkpointing."""

import numpy as np
import pytest

from splayer.errors import ConfigurationError
from splayer.network import (MLP, BlendDescriptor, CompositeModel, InnerNet,
                             composite_forward, load_model, mlp_forward, safe_exp,
                             save_model, xavier_init)


class TestXavierInit:
    def test_deterministic_under_seed(self):
        a = xavier_init([1, 50, 50, 1], 7)
        b = xavier_init([1, 50, 50, 1], 7)
        for wa, wb in zip(a.parameters(), b.parameters()):
            assert np.array_equal(wa, wb)

    def test_uniform_bound(self):
        net = xavier_init([50, 50], 3)
        bound = np.sqrt(6.0 / 100.0)
        w = net.weights[0]
        assert np.all(np.abs(w) <= bound)
        assert np.abs(w).max() > 0.9 * bound  # actually fills the interval

    def test_sample_variance_matches_xavier_moment(self):
        # variance of U(-a, a) is a^2/3 = 2/(fan_in+fan_out) = 0.02 for 50x50
        samples = []
        for seed in range(40):
            samples.append(xavier_init([50, 50], seed).weights[0].ravel())
        w = np.concatenate(samples)
        assert w.size == 100_000
        assert np.var(w) == pytest.approx(0.02, rel=0.1)

    def test_biases_zero(self):
        net = xavier_init([2, 9, 4, 1], 0)
        assert all(not b.any() for b in net.biases)

    def test_degenerate_sizes_rejected(self):
        with pytest.raises(ConfigurationError):
            xavier_init([5], 0)
        with pytest.raises(ConfigurationError):
            xavier_init([3, 0, 1], 0)


class TestSafeExp:
    def test_identity_at_zero(self):
        assert safe_exp(0.0) == 1.0

    def test_clamps_large_negative(self):
        assert safe_exp(-1e6) == np.exp(-20.0)

    def test_saturation_boundary(self):
        assert safe_exp(-20.0) == safe_exp(-20.0001)
        assert safe_exp(25.0) == safe_exp(20.0)

    def test_vectorized(self):
        z = np.array([-1e9, 0.0, 3.0])
        out = safe_exp(z)
        assert out[0] == np.exp(-20.0) and out[1] == 1.0 and out[2] == np.exp(3.0)


class TestComposite:
    def test_zero_inner_equals_outer(self):
        rng = np.random.default_rng(0)
        outer = xavier_init([1, 8, 1], rng)
        inner = xavier_init([1, 6, 1], rng)
        for arr in inner.parameters():
            arr[:] = 0.0
        model = CompositeModel(1, [outer], [InnerNet(inner, BlendDescriptor(0, 0.0, 0.1), 0)])
        x = rng.uniform(0, 1, size=(20, 1))
        assert np.array_equal(composite_forward(model, x)[:, 0],
                              mlp_forward(outer, x)[:, 0])

    def test_saturated_inner_contribution_is_tiny(self):
        rng = np.random.default_rng(1)
        outer = xavier_init([1, 8, 1], rng)
        inner = xavier_init([1, 8, 1], rng)
        model = CompositeModel(1, [outer], [InnerNet(inner, BlendDescriptor(0, 1.0, 1e-5), 0)])
        x = np.array([[0.5]])
        contribution = composite_forward(model, x)[0, 0] - mlp_forward(outer, x)[0, 0]
        assert abs(contribution) <= abs(mlp_forward(inner, x)[0, 0]) * 2.07e-9

    def test_additive_in_outer_perturbation(self):
        rng = np.random.default_rng(2)
        outer = xavier_init([1, 8, 1], rng)
        inner = xavier_init([1, 6, 1], rng)
        model = CompositeModel(1, [outer], [InnerNet(inner, BlendDescriptor(0, 0.0, 0.3), 0)])
        x = rng.uniform(0, 1, size=(50, 1))
        before = composite_forward(model, x)
        outer.biases[-1][0] += 0.37  # shifts the outer output uniformly
        after = composite_forward(model, x)
        assert np.allclose(after - before, 0.37, rtol=0, atol=1e-12)

    def test_component_validation(self):
        outer = xavier_init([1, 4, 1], 0)
        inner = xavier_init([1, 4, 1], 1)
        with pytest.raises(ConfigurationError):
            CompositeModel(1, [outer], [InnerNet(inner, BlendDescriptor(0, 0.0, 0.1), 3)])
        with pytest.raises(ConfigurationError):
            CompositeModel(1, [outer], [InnerNet(inner, BlendDescriptor(1, 0.0, 0.1), 0)])
        with pytest.raises(ConfigurationError):
            BlendDescriptor(0, 0.5, 0.1)
        with pytest.raises(ConfigurationError):
            BlendDescriptor(0, 0.0, -1.0)

    def test_mlp_shape_validation(self):
        with pytest.raises(ConfigurationError):
            MLP((1, 2), [np.zeros((3, 1))], [np.zeros(3)])
        with pytest.raises(ConfigurationError):
            MLP((1, 2, 1), [np.zeros((2, 1))], [np.zeros(2)])


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        model = CompositeModel(
            2,
            [xavier_init([2, 7, 1], rng), xavier_init([2, 5, 1], rng)],
            [InnerNet(xavier_init([2, 6, 1], rng), BlendDescriptor(1, 1.0, 1e-7), 1)],
        )
        path = tmp_path / "model.ckpt"
        save_model(model, path)
        back = load_model(path)
        assert back.input_dim == 2 and back.n_components == 2
        assert back.inner[0].blend == model.inner[0].blend
        assert back.inner[0].component == 1
        for a, b in zip(model.parameters(), back.parameters()):
            assert np.array_equal(a, b)

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.ckpt"
        path.write_bytes(b"not a checkpoint at all")
        with pytest.raises(ConfigurationError):
            load_model(path)
