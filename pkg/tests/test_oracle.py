"""The oracle implementations' own sanity checks and reduction identities."""

import numpy as np
import pytest

from vicon.errors import ConfigError
from vicon.model import NetworkParams
from vicon.objective import sample_gradients, sample_objective
from vicon.oracle import (constant_cancellation_check, fd_gradients,
                          make_featureless_params, naive_objective,
                          random_instance, subspace_reduction_check,
                          verify_suite)
from vicon.topology import build_topology


class TestNaiveObjective:
    def test_single_neuron_collapses_to_plain_error(self, rng):
        """M=1: every sum collapses, leaving twice the squared error."""
        topo = build_topology(grid_shape=1, retina_shape=5, num_retinae=1,
                              rf_shape=5, inhibition_shape=1, leakage_shape=1)
        params = NetworkParams(weights=rng.normal(0, 1, 5),
                               biases=rng.normal(0, 1, 1),
                               references=rng.normal(0, 1, 5))
        x = rng.uniform(-1, 1, 5)
        expected = 2.0 * ((x - params.references) ** 2).sum()
        assert naive_objective(params, topo, x) == pytest.approx(expected, rel=1e-14)
        assert sample_objective(params, topo, x) == pytest.approx(expected, rel=1e-14)

    def test_identity_leak_global_neighbourhood_is_softmax_error(self, rng):
        """L=I, N=whole grid: twice the softmax-weighted squared error."""
        topo = build_topology(grid_shape=7, retina_shape=7, num_retinae=1,
                              rf_shape=7, inhibition_shape=7, leakage_shape=1,
                              wrap=True)
        params = NetworkParams(weights=rng.normal(0, 0.5, topo.num_rf_entries),
                               biases=rng.normal(0, 0.5, 7),
                               references=rng.normal(0, 0.5, topo.num_rf_entries))
        x = rng.uniform(-1, 1, 7)
        from vicon.model import raw_responses

        q = raw_responses(params, topo, x)
        softmax = q / q.sum()
        # fields cover the whole ring, entries sorted by pixel index
        e = np.array([
            ((x - params.references[topo.rf_slice(y)]) ** 2).sum()
            for y in range(7)
        ])
        expected = 2.0 * (softmax @ e)
        assert naive_objective(params, topo, x) == pytest.approx(expected, rel=1e-12)

    def test_equivalence_on_fifty_random_instances(self, rng):
        worst = 0.0
        for _ in range(50):
            params, topo, x = random_instance(
                rng, grid=int(rng.integers(4, 13)),
                inhibition=int(rng.choice([3, 5])), leakage=3,
                num_retinae=int(rng.integers(1, 3)), wrap=bool(rng.integers(2)))
            a = sample_objective(params, topo, x)
            b = naive_objective(params, topo, x)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
        assert worst < 1e-12


class TestFiniteDifferences:
    def test_quadratic_convergence(self, rng):
        """Halving the step shrinks the FD-vs-analytic error about fourfold."""
        params, topo, x = random_instance(rng, grid=6, inhibition=3, leakage=3)
        analytic = sample_gradients(params, topo, x)

        def err(step):
            fd = fd_gradients(params, topo, x, step=step)
            return np.abs(fd.d_weights - analytic.d_weights).max()

        e1, e2 = err(2e-3), err(1e-3)
        assert e1 / e2 == pytest.approx(4.0, rel=0.5)

    def test_translation_symmetric_net_has_uniform_gradients(self):
        """Toroidal net, identical neurons, featureless input: every neuron
        sees the same gradient."""
        topo = build_topology(grid_shape=8, retina_shape=8, num_retinae=1,
                              rf_shape=3, inhibition_shape=3, leakage_shape=3,
                              wrap=True)
        n = topo.num_rf_entries
        params = NetworkParams(weights=np.tile([0.2, -0.1, 0.4], 8),
                               biases=np.full(8, 0.1),
                               references=np.tile([0.05, 0.0, -0.05], 8))
        x = np.full(8, 0.3)
        g = sample_gradients(params, topo, x)
        np.testing.assert_allclose(g.d_biases, np.full(8, g.d_biases[0]), atol=1e-14)
        np.testing.assert_allclose(g.d_references.reshape(8, 3),
                                   np.tile(g.d_references[:3], (8, 1)), atol=1e-14)

    def test_zero_parameters_symmetric_input_biases_identical(self):
        topo = build_topology(grid_shape=8, retina_shape=8, num_retinae=1,
                              rf_shape=3, inhibition_shape=3, leakage_shape=3,
                              wrap=True)
        params = NetworkParams(weights=np.zeros(topo.num_rf_entries),
                               biases=np.zeros(8),
                               references=np.zeros(topo.num_rf_entries))
        fd = fd_gradients(params, topo, np.full(8, 0.5), step=1e-5)
        np.testing.assert_allclose(fd.d_biases, fd.d_biases[0], atol=1e-9)


class TestCancellation:
    def test_zero_shift_trivially_passes(self, rng):
        params, topo, x = random_instance(rng, grid=9)
        assert constant_cancellation_check(params, topo, x, 0.0)

    def test_large_shift(self, rng):
        params, topo, x = random_instance(rng, grid=9, inhibition=5)
        assert constant_cancellation_check(params, topo, x, 1e6)

    def test_hundred_random_shifts(self, rng):
        params, topo, x = random_instance(rng, grid=7, inhibition=3)
        for c in rng.uniform(-1e4, 1e4, 100):
            assert constant_cancellation_check(params, topo, x, float(c))


class TestSubspaceReduction:
    def test_one_subspace_full_field_is_d_times_scalar(self, rng):
        """Full receptive fields: the network objective is the input
        dimension times the scalar quantiser objective."""
        topo = build_topology(grid_shape=9, retina_shape=9, num_retinae=1,
                              rf_shape=9, inhibition_shape=9, leakage_shape=3,
                              wrap=True)
        params = make_featureless_params(topo, rng)
        report = subspace_reduction_check(params, topo, rng.uniform(-1, 1, (25, 1)))
        assert report.max_abs_diff < 1e-10
        np.testing.assert_array_equal(report.outside, 0.0)
        np.testing.assert_allclose(report.full, 9 * report.reduced, atol=1e-10)

    def test_two_subspaces_with_outside_term(self, rng):
        topo = build_topology(grid_shape=11, retina_shape=11, num_retinae=2,
                              rf_shape=5, inhibition_shape=5, leakage_shape=3,
                              leakage_sigma=0.8, wrap=True)
        params = make_featureless_params(topo, rng)
        samples = rng.uniform(-1, 1, (25, 2))
        report = subspace_reduction_check(params, topo, samples)
        assert report.max_abs_diff < 1e-10
        # same identity in (d - w) * moment + w * half-reduced form
        d, w = 22, 10
        moment = (samples**2).sum(axis=1)
        np.testing.assert_allclose(
            report.full, (d - w) * moment + w * (report.reduced / 2.0), atol=1e-10)

    def test_field_covering_retina_has_no_outside_term(self, rng):
        topo = build_topology(grid_shape=7, retina_shape=7, num_retinae=2,
                              rf_shape=7, inhibition_shape=5, leakage_shape=3,
                              wrap=True)
        params = make_featureless_params(topo, rng)
        report = subspace_reduction_check(params, topo, rng.uniform(-1, 1, (10, 2)))
        np.testing.assert_array_equal(report.outside, 0.0)
        assert report.max_abs_diff < 1e-10

    def test_non_featureless_references_rejected(self, rng):
        params, topo, _ = random_instance(rng, grid=9, rf=3, wrap=True)
        with pytest.raises(ConfigError):
            subspace_reduction_check(params, topo, np.zeros((2, 1)))

    def test_truncated_topology_rejected(self, rng):
        topo = build_topology(grid_shape=9, retina_shape=9, num_retinae=1,
                              rf_shape=3, inhibition_shape=3, leakage_shape=3)
        params = make_featureless_params(topo, rng)
        with pytest.raises(ConfigError):
            subspace_reduction_check(params, topo, np.zeros((2, 1)))


class TestVerifySuite:
    def test_fresh_checkout_passes(self):
        results = verify_suite()
        assert all(r.passed for r in results), [r for r in results if not r.passed]

    def test_perturbed_gradient_detected_and_named(self):
        """Negative control: a corrupted component must fail loudly."""
        results = verify_suite(gradient_perturbation=1e-3)
        gradient_check = results[0]
        assert not gradient_check.passed
        assert "d_weights[3]" in gradient_check.detail
