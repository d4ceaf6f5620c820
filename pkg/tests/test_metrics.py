"""Tests for mode statistics, normality statistics and evaluation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from src.metrics import (
    BAD,
    MetricsReport,
    StatisticsError,
    assign_modes,
    evaluate,
    inverse_normality,
    generate,
    ks_statistic,
    modes_covered,
    normal_cdf,
    normal_quantile,
    qq_data,
    quality,
    reverse_kl,
    shapiro_wilk,
    shapiro_wilk_weights,
)
from src.metrics.modes import ModeAssignment
from src.neuralcore import Activation, AffineLayer, Mlp
from src.schemas import TrainConfig
from src.synthdata import Rng, grid_mixture, ring_mixture, sample_mixture
from src.training import trainer_new


def _assignment(counts, bad=0):
    counts = np.asarray(counts, dtype=np.int64)
    labels = np.concatenate([np.repeat(np.arange(len(counts)), counts), np.full(bad, BAD)])
    return ModeAssignment(labels.astype(np.int64), counts, bad)


class TestModes:
    def test_sample_at_center(self):
        ring = ring_mixture()
        a = assign_modes(ring.centers[[3]], ring)
        assert a.labels.tolist() == [3]
        assert a.bad_count == 0

    def test_far_sample_is_bad(self):
        ring = ring_mixture()
        a = assign_modes(ring.centers[[0]] + np.array([[4 * ring.std, 0.0]]), ring)
        assert a.labels.tolist() == [BAD]
        assert a.counts.sum() == 0

    def test_counts_and_bad_sum_to_total(self, rng):
        grid = grid_mixture()
        a = assign_modes(sample_mixture(grid, 1000, rng) * 1.0005, grid)
        assert a.counts.sum() + a.bad_count == a.total == 1000

    def test_true_draws_are_mostly_valid(self):
        # P(r > 3 std) = exp(-4.5) ~ 0.0111 for a 2-D isotropic Gaussian; at n = 1e6
        # the binomial std of the Bad fraction is ~1e-4, so 0.012 is ~9 std away.
        ring = ring_mixture()
        a = assign_modes(sample_mixture(ring, 1_000_000, Rng(0)), ring)
        assert a.bad_count / a.total < 0.012
        assert a.bad_count / a.total == pytest.approx(math.exp(-4.5), abs=5e-4)
        assert quality(a) >= 0.985

    def test_quality(self):
        assert quality(_assignment([5, 5])) == 1.0
        assert quality(_assignment([5, 5], bad=10)) == 0.5

    def test_modes_covered_threshold(self):
        a = _assignment([3, 1, 0, 2])
        assert modes_covered(a) == 3
        assert modes_covered(a, min_count=2) == 2

    def test_reverse_kl_hand_cases(self):
        assert reverse_kl(_assignment([10] * 8), 8) == pytest.approx(0.0, abs=1e-12)
        assert reverse_kl(_assignment([80, 0, 0, 0, 0, 0, 0, 0]), 8) == pytest.approx(math.log(8), abs=1e-12)
        assert reverse_kl(_assignment([10] * 8, bad=80), 8) == pytest.approx(
            -0.5 * math.log(2), abs=1e-12
        )

    def test_reverse_kl_mode_count(self):
        with pytest.raises(StatisticsError):
            reverse_kl(_assignment([1]), 0)

    def test_assign_modes_rejects_bad_shapes(self):
        with pytest.raises(StatisticsError):
            assign_modes(np.zeros((0, 2)), ring_mixture())


class TestNormalFunctions:
    def test_symmetry_points(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_quantile(0.5) == 0.0

    def test_table_value(self):
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)

    @given(st.floats(-30, 30))
    def test_cdf_symmetry(self, x):
        assert normal_cdf(-x) == pytest.approx(1.0 - normal_cdf(x), abs=1e-15)

    def test_inverse_consistency(self):
        p = np.concatenate([np.geomspace(1e-10, 0.5, 500), 1.0 - np.geomspace(1e-10, 0.5, 500)])
        np.testing.assert_allclose(normal_cdf(normal_quantile(p)), p, rtol=1e-8, atol=1e-18)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, float("nan")])
    def test_quantile_domain(self, p):
        with pytest.raises(StatisticsError):
            normal_quantile(p)


class TestShapiroWilk:
    def test_three_points(self):
        assert shapiro_wilk([-1.0, 0.0, 1.0]) == 1.0

    def test_weights_are_antisymmetric_and_normalised(self):
        for n in (3, 4, 5, 11, 500):
            a = shapiro_wilk_weights(n)
            np.testing.assert_allclose(a, -a[::-1])
            assert np.sum(a**2) == pytest.approx(1.0, abs=1e-6)

    def test_normal_draws(self):
        assert shapiro_wilk(np.random.default_rng(0).normal(size=500)) >= 0.98

    def test_uniform_draws(self):
        assert shapiro_wilk(np.random.default_rng(0).uniform(size=500)) < 0.96

    def test_agrees_with_scipy(self):
        x = np.random.default_rng(5).normal(size=200)
        assert shapiro_wilk(x) == pytest.approx(float(stats.shapiro(x).statistic), abs=1e-4)

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(list(np.random.default_rng(1).normal(size=40))))
    def test_ordering_invariance(self, values):
        base = shapiro_wilk(np.random.default_rng(1).normal(size=40))
        assert shapiro_wilk(values) == pytest.approx(base, abs=1e-14)

    @pytest.mark.parametrize("samples", [[1.0, 2.0], list(range(5001))])
    def test_size_limits(self, samples):
        with pytest.raises(StatisticsError):
            shapiro_wilk(samples)

    def test_zero_variance(self):
        with pytest.raises(StatisticsError):
            shapiro_wilk([2.0, 2.0, 2.0, 2.0])


class TestKolmogorovSmirnov:
    def test_single_zero(self):
        assert ks_statistic([0.0]) == 0.5

    def test_plotting_positions(self):
        n = 40
        samples = normal_quantile((np.arange(1, n + 1) - 0.5) / n)
        assert ks_statistic(samples) == pytest.approx(0.5 / n, abs=1e-12)

    def test_large_normal_sample(self):
        assert ks_statistic(np.random.default_rng(0).normal(size=10_000)) < 0.02

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, 20, elements=st.floats(-4, 4)))
    def test_ordering_invariance_and_range(self, x):
        d = ks_statistic(x)
        assert 0.0 <= d <= 1.0
        assert ks_statistic(x[::-1]) == d

    def test_empty(self):
        with pytest.raises(StatisticsError):
            ks_statistic([])


class TestQQ:
    def test_diagonal_for_plotting_positions(self):
        n = 25
        samples = normal_quantile((np.arange(1, n + 1) - 0.5) / n)
        frame = qq_data(samples[::-1])
        np.testing.assert_allclose(frame["theoretical"], frame["sample"])

    def test_affine_transform_gives_line(self):
        z = np.random.default_rng(3).normal(size=300)
        frame = qq_data(2.0 * z + 3.0)
        base = qq_data(z)
        np.testing.assert_allclose(frame["sample"], 2.0 * base["sample"] + 3.0)

    def test_length_and_increasing_positions(self):
        frame = qq_data(np.random.default_rng(4).normal(size=17))
        assert len(frame) == 17
        assert np.all(np.diff(frame["theoretical"]) > 0)
        assert list(frame.columns) == ["theoretical", "sample"]

    def test_positions_depend_only_on_n(self):
        a = qq_data([5.0, -1.0, 2.0])
        b = qq_data([0.1, 0.2, 0.3])
        assert np.array_equal(a["theoretical"], b["theoretical"])


class TestEvaluate:
    def test_collapsed_generator_covers_at_most_one_mode(self, tiny_config):
        state = trainer_new(tiny_config.model_copy(update={"generator_init_scale": 1e-6}))
        report = evaluate(state, ring_mixture(), 2000, 100, Rng(0))
        assert report.modes_covered <= 1
        assert report.n_modes == 8
        assert all(math.isfinite(v) for v in report.sw_per_dim + report.ks_per_dim)
        assert math.isfinite(report.reverse_kl)

    def test_more_generated_samples_never_lose_modes(self, tiny_config):
        state = trainer_new(tiny_config.model_copy(update={"generator_init_scale": 4.0}))
        grid = grid_mixture()
        counts = [
            evaluate(state, grid, n, 50, Rng.derive(0, "eval", 0), radius_factor=40.0).modes_covered
            for n in (200, 2000, 20_000)
        ]
        assert counts == sorted(counts)

    @pytest.mark.parametrize("chunk_size", [7, 64, 1000])
    def test_generation_is_chunk_prefix_stable(self, tiny_config, chunk_size):
        g = trainer_new(tiny_config).g
        small = generate(g, 150, Rng(4), chunk_size)
        large = generate(g, 400, Rng(4), chunk_size)
        assert large.shape == (400, 2)
        np.testing.assert_allclose(small, large[:150], rtol=1e-12, atol=1e-12)

    def test_true_sampler_as_generator(self, tiny_config):
        state = trainer_new(tiny_config)
        ring = ring_mixture()

        class MixtureSampler:
            in_features = 2

            def __init__(self):
                self.rng = Rng(17)

            def predict(self, z):
                return sample_mixture(ring, z.shape[0], self.rng)

        state.g = MixtureSampler()
        report = evaluate(state, ring, 20_000, 100, Rng(0))
        assert report.quality >= 0.985
        assert abs(report.reverse_kl) <= 0.02
        assert report.modes_covered == 8

    def test_evaluation_is_read_only(self, tiny_config):
        state = trainer_new(tiny_config)
        before = [p.copy() for net in state.networks().values() for p, _ in net.parameters()]
        rng_before = state.rng.get_state()
        evaluate(state, ring_mixture(), 500, 50, Rng(0))
        after = [p for net in state.networks().values() for p, _ in net.parameters()]
        assert all(np.array_equal(a, b) for a, b in zip(before, after))
        assert state.rng.get_state() == rng_before

    def test_identity_inverse_of_normal_data(self, tiny_config):
        state = trainer_new(tiny_config)
        state.f = Mlp([AffineLayer(np.eye(2), np.zeros(2), Activation.IDENTITY)])
        ring = ring_mixture()
        report = evaluate(state, ring, 100, 500, Rng(2))
        assert report.sw_mean < 0.96
        assert report.inverse_w2 > 0.0

    def test_constant_inverse_is_rejected(self, tiny_config):
        state = trainer_new(tiny_config)
        state.f = Mlp([AffineLayer(np.zeros((2, 2)), np.array([0.5, -0.5]), Activation.IDENTITY)])
        with pytest.raises(StatisticsError, match="dimension 1"):
            evaluate(state, ring_mixture(), 100, 50, Rng(0))

    def test_inverse_normality_flags_the_constant_dimension(self, np_rng):
        z = np.column_stack([np_rng.normal(size=40), np.full(40, 2.0)])
        with pytest.raises(StatisticsError, match="dimension 2"):
            inverse_normality(z)

    def test_inverse_normality_ranges(self, np_rng):
        sw, ks = inverse_normality(np_rng.normal(size=(300, 2)))
        assert all(0.0 < w <= 1.0 for w in sw)
        assert all(0.0 <= d <= 1.0 for d in ks)

    def test_report_rejects_impossible_coverage(self):
        with pytest.raises(ValueError):
            MetricsReport(
                n_modes=8,
                modes_covered=9,
                quality=1.0,
                reverse_kl=0.0,
                sw_per_dim=[1.0],
                ks_per_dim=[0.0],
                sw_mean=1.0,
                sw_min=1.0,
                inverse_w2=0.0,
                inverse_kl=0.0,
            )

    def test_csv_row_columns(self):
        report = MetricsReport(
            step=5,
            n_modes=8,
            modes_covered=8,
            quality=0.99,
            reverse_kl=0.1,
            sw_per_dim=[0.98, 0.97],
            ks_per_dim=[0.05, 0.06],
            sw_mean=0.975,
            sw_min=0.97,
            inverse_w2=0.01,
            inverse_kl=0.02,
        )
        assert list(report.csv_row()) == ["step", "modes", "quality", "rkl", "sw_1", "sw_2", "ks_1", "ks_2"]

    def test_small_real_sample(self, tiny_config):
        with pytest.raises(ValueError):
            evaluate(trainer_new(tiny_config), ring_mixture(), 10, 2, Rng(0))
