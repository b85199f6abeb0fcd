"""t-SNE tests: oracle checks for distances, affinities, objective, gradient,
plus embedding behaviour and SVG scatter structure."""

import math

import numpy as np
import pytest

from clinrel.features import FeatureSet
from clinrel.tsne import (
    TsneConfig,
    kl_gradient,
    kl_objective,
    pairwise_sq_dists,
    perplexity_calibration,
    render_scatter,
    tsne_embed,
)


def oracle_sq_dists(X):
    n = X.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(X.shape[1]):
                acc += (float(X[i, k]) - float(X[j, k])) ** 2
            D[i, j] = acc
    return D


def oracle_kl(P, Y):
    n = Y.shape[0]
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d2 = float(np.sum((Y[i] - Y[j]) ** 2))
                W[i, j] = 1.0 / (1.0 + d2)
    Q = W / W.sum()
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                p = max(P[i, j], 1e-12)
                q = max(Q[i, j], 1e-12)
                total += p * math.log(p / q)
    return total


def random_affinities(rng, n):
    """A symmetric joint distribution with zero diagonal summing to 1."""
    raw = rng.rand(n, n)
    raw = raw + raw.T
    np.fill_diagonal(raw, 0.0)
    return raw / raw.sum()


class TestPairwiseSqDists:
    def test_three_four_five_triangle(self):
        X = np.array([[0.0, 0.0], [3.0, 4.0]])
        D = pairwise_sq_dists(X)
        assert np.array_equal(D, [[0.0, 25.0], [25.0, 0.0]])

    def test_identical_rows_zero(self):
        X = np.ones((4, 3))
        assert np.all(pairwise_sq_dists(X) == 0.0)

    def test_matches_double_loop_oracle(self):
        rng = np.random.RandomState(1)
        X = rng.randn(5, 3)
        D = pairwise_sq_dists(X)
        O = oracle_sq_dists(X)
        assert np.allclose(D, O, rtol=1e-12, atol=1e-12)

    def test_symmetric_with_zero_diagonal(self):
        rng = np.random.RandomState(2)
        X = rng.randn(12, 6)
        D = pairwise_sq_dists(X)
        assert np.array_equal(D, D.T)
        assert np.all(np.diag(D) == 0.0)

    def test_accepts_feature_set(self):
        fs = FeatureSet(data=[[0.0, 0.0], [3.0, 4.0]])
        assert pairwise_sq_dists(fs)[0, 1] == 25.0


class TestPerplexityCalibration:
    def test_equidistant_triple_gives_uniform_rows(self):
        # three points on an equilateral triangle: conditionals are (1/2, 1/2)
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
        D = pairwise_sq_dists(X)
        P, calib = perplexity_calibration(D, TsneConfig(perplexity=2.0))
        off = P[~np.eye(3, dtype=bool)]
        assert np.allclose(off, 1.0 / 6.0, atol=1e-12)
        assert np.allclose(calib.achieved_perplexity, 2.0, atol=1e-5)

    def test_sums_to_one_and_symmetric(self):
        rng = np.random.RandomState(3)
        for n, d, perp in [(10, 4, 4.0), (25, 8, 7.0), (40, 3, 12.0)]:
            D = pairwise_sq_dists(rng.randn(n, d))
            P, _ = perplexity_calibration(D, TsneConfig(perplexity=perp))
            assert abs(P.sum() - 1.0) <= 1e-12
            assert np.array_equal(P, P.T)
            assert np.all(P >= 0.0)
            assert np.all(np.diag(P) == 0.0)

    def test_achieved_perplexity_via_independent_entropy(self):
        rng = np.random.RandomState(4)
        X = rng.randn(20, 5)
        D = pairwise_sq_dists(X)
        cfg = TsneConfig(perplexity=5.0)
        P, calib = perplexity_calibration(D, cfg)
        # recompute the conditional entropy from the reported precisions
        for i in range(20):
            row = np.exp(-calib.beta[i] * np.delete(D[i], i))
            row /= row.sum()
            h_bits = -np.sum(row * np.log2(row))
            assert 2.0**h_bits == pytest.approx(5.0, abs=1e-4)
            assert calib.achieved_perplexity[i] == pytest.approx(2.0**h_bits, abs=1e-9)
        assert calib.converged.all()
        assert calib.effective_perplexity == 5.0

    def test_perplexity_capped_for_small_n(self):
        rng = np.random.RandomState(5)
        D = pairwise_sq_dists(rng.randn(10, 3))
        P, calib = perplexity_calibration(D, TsneConfig(perplexity=30.0))
        assert calib.effective_perplexity == pytest.approx(3.0)  # (10-1)/3
        assert abs(P.sum() - 1.0) <= 1e-12


class TestKlObjective:
    def test_two_point_degeneracy(self):
        P = np.array([[0.0, 0.5], [0.5, 0.0]])
        rng = np.random.RandomState(6)
        for _ in range(5):
            Y = rng.randn(2, 2) * rng.uniform(0.1, 10)
            assert kl_objective(P, Y) == pytest.approx(0.0, abs=1e-12)

    def test_p_equals_q_gives_zero(self):
        rng = np.random.RandomState(7)
        Y = rng.randn(6, 2)
        D = pairwise_sq_dists(Y)
        W = 1.0 / (1.0 + D)
        np.fill_diagonal(W, 0.0)
        Q = W / W.sum()
        assert kl_objective(Q, Y) == pytest.approx(0.0, abs=1e-12)

    def test_matches_double_loop_oracle(self):
        rng = np.random.RandomState(8)
        for _ in range(10):
            n = rng.randint(4, 9)
            P = random_affinities(rng, n)
            Y = rng.randn(n, 2) * 2.0
            assert kl_objective(P, Y) == pytest.approx(oracle_kl(P, Y), rel=1e-12, abs=1e-12)

    def test_translation_invariance(self):
        rng = np.random.RandomState(9)
        P = random_affinities(rng, 8)
        Y = rng.randn(8, 2)
        shift = np.array([13.7, -4.2])
        assert kl_objective(P, Y) == pytest.approx(kl_objective(P, Y + shift), abs=1e-12)

    def test_non_negative(self):
        rng = np.random.RandomState(10)
        for _ in range(20):
            n = rng.randint(3, 10)
            P = random_affinities(rng, n)
            Y = rng.randn(n, 2)
            assert kl_objective(P, Y) >= -1e-9


class TestKlGradient:
    def test_coincident_points_uniform_affinities(self):
        n = 5
        P = np.full((n, n), 1.0 / (n * (n - 1)))
        np.fill_diagonal(P, 0.0)
        Y = np.zeros((n, 2))
        assert np.all(kl_gradient(P, Y) == 0.0)

    def test_two_points_constant_objective(self):
        P = np.array([[0.0, 0.5], [0.5, 0.0]])
        rng = np.random.RandomState(11)
        for _ in range(5):
            Y = rng.randn(2, 2)
            assert np.allclose(kl_gradient(P, Y), 0.0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_finite_differences(self, seed):
        rng = np.random.RandomState(100 + seed)
        n = rng.randint(5, 13)
        P = random_affinities(rng, n)
        Y = rng.randn(n, 2)
        grad = kl_gradient(P, Y)
        h = 1e-5
        for i in range(n):
            for k in range(2):
                Yp = Y.copy()
                Ym = Y.copy()
                Yp[i, k] += h
                Ym[i, k] -= h
                fd = (kl_objective(P, Yp) - kl_objective(P, Ym)) / (2 * h)
                denom = max(abs(fd), abs(grad[i, k]), 1e-8)
                assert abs(grad[i, k] - fd) / denom < 1e-4


def three_clusters(n_per=50, d=10, sep=10.0, seed=0):
    rng = np.random.RandomState(seed)
    centers = np.zeros((3, d))
    centers[1, 0] = sep
    centers[2, 1] = sep
    X = np.vstack([rng.randn(n_per, d) + c for c in centers])
    labels = np.repeat(np.arange(3), n_per)
    return X.astype(np.float32), labels


def nearest_centroid_accuracy(coords, labels):
    centroids = np.vstack([coords[labels == c].mean(axis=0) for c in range(3)])
    d2 = ((coords[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assigned = d2.argmin(axis=1)
    return float((assigned == labels).mean())


class TestTsneEmbed:
    def test_deterministic(self):
        X, _ = three_clusters(n_per=12, d=5, seed=3)
        cfg = TsneConfig(max_iter=60, seed=42)
        r1 = tsne_embed(FeatureSet(data=X), cfg)
        r2 = tsne_embed(FeatureSet(data=X), cfg)
        assert r1.coords.tobytes() == r2.coords.tobytes()
        assert r1.final_kl == r2.final_kl

    def test_seed_changes_init(self):
        X, _ = three_clusters(n_per=10, d=4, seed=4)
        a = tsne_embed(FeatureSet(data=X), TsneConfig(max_iter=5, seed=1))
        b = tsne_embed(FeatureSet(data=X), TsneConfig(max_iter=5, seed=2))
        assert a.coords.tobytes() != b.coords.tobytes()

    @pytest.mark.slow
    def test_cluster_recovery(self):
        X, labels = three_clusters(n_per=50, d=10, sep=10.0, seed=7)
        result = tsne_embed(FeatureSet(data=X), TsneConfig(seed=11))
        assert nearest_centroid_accuracy(result.coords, labels) >= 0.95

    def test_post_exaggeration_trend(self):
        X, _ = three_clusters(n_per=15, d=6, seed=8)
        cfg = TsneConfig(max_iter=400, exagg_iters=100, seed=9)
        result = tsne_embed(FeatureSet(data=X), cfg)
        assert result.final_kl <= result.kl_trace[cfg.exagg_iters + 1]
        assert result.final_kl >= 0.0

    def test_two_points_returns_init_scale(self):
        X = np.array([[0.0, 0.0], [5.0, 5.0]], dtype=np.float32)
        result = tsne_embed(FeatureSet(data=X), TsneConfig(seed=1))
        assert result.coords.shape == (2, 2)
        assert np.all(np.abs(result.coords) < 1e-2)  # still near the tiny init
        assert result.final_kl == pytest.approx(0.0, abs=1e-9)

    def test_coords_finite_and_shape(self):
        X, _ = three_clusters(n_per=8, d=3, seed=12)
        result = tsne_embed(FeatureSet(data=X), TsneConfig(max_iter=50, seed=3))
        assert result.coords.shape == (24, 2)
        assert np.all(np.isfinite(result.coords))
        assert len(result.kl_trace) == 50


class TestRenderScatter:
    def make_result(self, n=8, seed=0):
        X, labels = three_clusters(n_per=max(3, n // 3 + 1), d=4, seed=seed)
        X = X[:n]
        result = tsne_embed(FeatureSet(data=X), TsneConfig(max_iter=10, seed=5))
        return result

    def test_one_circle_per_point(self):
        result = self.make_result(n=9)
        labels = [("real", "AD")] * 4 + [("synthetic", "NonAD")] * 5
        svg = render_scatter(result, labels)
        assert svg.count("<circle") == 9
        assert svg.startswith("<?xml") or svg.startswith("<svg")

    def test_legend_has_four_entries_for_two_by_two(self):
        result = self.make_result(n=8)
        labels = [
            ("real", "AD"),
            ("real", "NonAD"),
            ("synthetic", "AD"),
            ("synthetic", "NonAD"),
        ] * 2
        svg = render_scatter(result, labels)
        for text in ("real AD", "real NonAD", "synthetic AD", "synthetic NonAD"):
            assert text in svg

    def test_label_length_mismatch(self):
        result = self.make_result(n=8)
        with pytest.raises(ValueError, match="labels"):
            render_scatter(result, [("real", "AD")] * 3)

    def test_writes_file(self, tmp_path):
        result = self.make_result(n=8)
        labels = [("real", "AD")] * 8
        out = tmp_path / "plot.svg"
        svg = render_scatter(result, labels, path=out)
        assert out.read_text() == svg

    def test_viewbox_margin(self):
        result = self.make_result(n=8)
        svg = render_scatter(result, [("real", "AD")] * 8)
        assert "viewBox=" in svg
