import numpy as np
import pytest

from panza.metrics.kmeans import kmeans
from panza.metrics.mauve import (
    SMOOTHING_EPS,
    default_cluster_count,
    kl_divergence,
    mauve,
)


class TestKl:
    def test_self_divergence_zero(self):
        p = np.array([0.2, 0.3, 0.5])
        assert kl_divergence(p, p) == 0.0

    def test_gibbs_nonnegative(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = rng.random(8) + SMOOTHING_EPS
            q = rng.random(8) + SMOOTHING_EPS
            p, q = p / p.sum(), q / q.sum()
            assert kl_divergence(p, q) >= 0.0


class TestKmeans:
    def test_deterministic(self):
        X = np.random.default_rng(1).normal(size=(60, 4))
        a = kmeans(X, 5, seed=42)
        b = kmeans(X, 5, seed=42)
        np.testing.assert_array_equal(a, b)

    def test_separated_clusters_found(self):
        rng = np.random.default_rng(2)
        X = np.vstack([rng.normal(0, 0.1, size=(20, 3)),
                       rng.normal(10, 0.1, size=(20, 3))])
        labels = kmeans(X, 2, seed=0)
        assert len(set(labels[:20])) == 1
        assert len(set(labels[20:])) == 1
        assert labels[0] != labels[20]

    def test_bad_k(self):
        X = np.zeros((5, 2))
        with pytest.raises(ValueError):
            kmeans(X, 6, seed=0)


class TestMauve:
    def gaussians(self, n, dim, seed, shift=0.0):
        rng = np.random.default_rng(seed)
        return rng.normal(shift, 1.0, size=(n, dim))

    def test_identical_inputs_score_one(self):
        vecs = self.gaussians(50, 8, seed=0)
        score, curve = mauve(vecs, vecs.copy(), seed=1)
        assert score == pytest.approx(1.0, abs=1e-9)
        assert all(x == 1.0 and y == 1.0 for x, y in curve.points[1:-1])

    def test_antipodal_clusters_near_zero(self):
        rng = np.random.default_rng(3)
        p = rng.normal(0, 0.05, size=(40, 4)); p[:, 0] += 10
        q = rng.normal(0, 0.05, size=(40, 4)); q[:, 0] -= 10
        score, _ = mauve(p, q, k=2, seed=0)
        assert score < 0.01

    def test_score_in_unit_interval(self):
        p = self.gaussians(40, 6, seed=4)
        q = self.gaussians(40, 6, seed=5, shift=0.5)
        score, _ = mauve(p, q, seed=0)
        assert 0.0 <= score <= 1.0

    def test_permutation_invariance(self):
        p = self.gaussians(30, 5, seed=6)
        q = self.gaussians(30, 5, seed=7, shift=1.0)
        score_a, _ = mauve(p, q, k=4, seed=0)
        perm = np.random.default_rng(8).permutation(30)
        score_b, _ = mauve(p[perm], q, k=4, seed=0)
        assert score_a == score_b

    def test_seed_stability(self):
        rng = np.random.default_rng(10)
        p = rng.normal(size=(400, 64))
        q = p + rng.normal(scale=0.5, size=p.shape)
        s1, _ = mauve(p, q, seed=0)
        s2, _ = mauve(p, q, seed=1)
        assert abs(s1 - s2) < 0.05

    def test_noise_degrades_score(self):
        rng = np.random.default_rng(12)
        p = rng.normal(size=(400, 64))
        scores = []
        for noise in [0.0, 0.5, 1.0, 2.0, 4.0]:
            q = p + rng.normal(scale=noise, size=p.shape) if noise else p.copy()
            s, _ = mauve(p, q, seed=0)
            scores.append(s)
        # non-increasing, allowing one small inversion for clustering noise
        inversions = [max(0.0, scores[i + 1] - scores[i]) for i in range(len(scores) - 1)]
        assert sum(1 for inv in inversions if inv > 0) <= 1
        assert all(inv <= 0.02 for inv in inversions)

    def test_too_few_samples(self):
        with pytest.raises(ValueError, match="smaller k"):
            mauve(np.zeros((3, 2)), np.zeros((3, 2)), k=5)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mauve(np.zeros((10, 3)), np.zeros((10, 4)))

    def test_default_k_rule(self):
        assert default_cluster_count(10, 10) == 2
        assert default_cluster_count(100, 100) == 20
        assert default_cluster_count(5000, 5000) == 500

    def test_curve_augmented_endpoints(self):
        p = self.gaussians(30, 4, seed=13)
        _, curve = mauve(p, p.copy(), seed=0)
        assert curve.points[0] == (0.0, 1.0)
        assert curve.points[-1] == (1.0, 0.0)
        assert len(curve.lambda_grid) == 25
