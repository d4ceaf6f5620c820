"""Tests for the target mixtures and the seeded samplers."""

import numpy as np
import pytest
from scipy import stats

from src.metrics import ks_statistic, shapiro_wilk
from src.synthdata import (
    Dataset,
    GaussianMixture,
    Rng,
    box_muller,
    grid_mixture,
    mixture_for,
    ring_mixture,
    sample_mixture,
    sample_mixture_labeled,
    sample_standard_normal,
)


class TestMixtures:
    def test_ring_layout(self):
        ring = ring_mixture()
        assert ring.n_modes == 8
        assert ring.std == 0.001
        np.testing.assert_allclose(ring.centers[1], [0.0, 2.0], atol=1e-15)
        np.testing.assert_allclose(np.linalg.norm(ring.centers, axis=1), 2.0)

    def test_grid_layout(self):
        grid = grid_mixture()
        assert grid.n_modes == 25
        assert grid.std == 0.0025
        centers = {tuple(c) for c in grid.centers.tolist()}
        assert (0.0, 0.0) in centers
        assert (-4.0, 4.0) in centers

    def test_mixture_for_overrides_std(self):
        assert mixture_for(Dataset.GRID, 0.1).std == 0.1
        assert mixture_for("ring").n_modes == 8

    def test_duplicate_centers_rejected(self):
        with pytest.raises(ValueError):
            GaussianMixture(np.array([[0.0, 0.0], [0.0, 0.0]]), 0.1)

    def test_non_positive_std_rejected(self):
        with pytest.raises(ValueError):
            GaussianMixture(np.array([[0.0, 0.0]]), 0.0)


class TestSampleMixture:
    def test_tiny_std_lands_on_centers(self, rng):
        mix = ring_mixture(std=1e-12)
        samples = sample_mixture(mix, 200, rng)
        nearest = np.min(np.linalg.norm(samples[:, None, :] - mix.centers[None], axis=2), axis=1)
        assert np.all(nearest < 1e-9)

    def test_mode_frequencies_are_uniform(self):
        _, modes = sample_mixture_labeled(ring_mixture(), 100_000, Rng(0))
        counts = np.bincount(modes, minlength=8)
        sigma = np.sqrt(100_000 * (1 / 8) * (7 / 8))
        assert np.all(np.abs(counts - 12_500) < 5 * sigma)
        assert stats.chisquare(counts).pvalue > 0.001

    def test_labels_match_nearest_center(self, rng):
        mix = grid_mixture()
        samples, modes = sample_mixture_labeled(mix, 500, rng)
        nearest = np.argmin(np.linalg.norm(samples[:, None, :] - mix.centers[None], axis=2), axis=1)
        assert np.array_equal(nearest, modes)

    def test_fixed_seed_is_deterministic(self):
        assert np.array_equal(
            sample_mixture(ring_mixture(), 64, Rng(9)), sample_mixture(ring_mixture(), 64, Rng(9))
        )

    def test_longer_draw_extends_shorter(self):
        short = sample_mixture(ring_mixture(), 10, Rng(4))
        long = sample_mixture(ring_mixture(), 25, Rng(4))
        assert np.array_equal(long[:10], short)

    def test_non_positive_n(self, rng):
        with pytest.raises(ValueError):
            sample_mixture(ring_mixture(), 0, rng)


class TestStandardNormal:
    def test_moments(self):
        z = sample_standard_normal(100_000, 1, Rng(0))[:, 0]
        assert abs(z.mean()) < 0.02
        assert abs(z.var() - 1.0) < 0.03

    def test_deterministic(self):
        assert np.array_equal(
            sample_standard_normal(5, 3, Rng(1)), sample_standard_normal(5, 3, Rng(1))
        )

    def test_odd_sizes(self, rng):
        assert sample_standard_normal(3, 3, rng).shape == (3, 3)

    def test_normality_statistics(self):
        assert shapiro_wilk(sample_standard_normal(500, 1, Rng(2))[:, 0]) >= 0.98
        n = 10_000
        assert ks_statistic(sample_standard_normal(n, 1, Rng(3))[:, 0]) < 3 * 1.36 / np.sqrt(n)

    @pytest.mark.parametrize("n, dim", [(0, 2), (2, 0)])
    def test_invalid_shape(self, rng, n, dim):
        with pytest.raises(ValueError):
            sample_standard_normal(n, dim, rng)

    def test_box_muller_known_values(self):
        z0, z1 = box_muller(np.array([1 - np.exp(-0.5)]), np.array([0.25]))
        np.testing.assert_allclose(z0, [0.0], atol=1e-15)
        np.testing.assert_allclose(z1, [1.0])


class TestRng:
    def test_state_round_trip(self):
        a = Rng(10)
        a.uniform(7)
        b = Rng.from_state(10, a.get_state())
        assert np.array_equal(a.uniform(5), b.uniform(5))

    def test_derive_is_keyed_by_tags(self):
        assert np.array_equal(Rng.derive(1, "eval", 3).uniform(4), Rng.derive(1, "eval", 3).uniform(4))
        assert not np.array_equal(Rng.derive(1, "eval", 3).uniform(4), Rng.derive(1, "eval", 4).uniform(4))

    def test_split_children_are_distinct_and_reproducible(self):
        first = [r.uniform(3) for r in Rng(5).split(3)]
        second = [r.uniform(3) for r in Rng(5).split(3)]
        assert all(np.array_equal(a, b) for a, b in zip(first, second))
        assert not np.array_equal(first[0], first[1])

    def test_split_child_does_not_depend_on_count(self):
        assert np.array_equal(Rng(5).split(2)[1].uniform(4), Rng(5).split(7)[1].uniform(4))

    def test_split_leaves_parent_draws_alone(self):
        a, b = Rng(8), Rng(8)
        a.split(3)
        assert np.array_equal(a.uniform(5), b.uniform(5))
