"""Logistic-regression harness tests: training, metrics, augmentation runs."""

import json

import numpy as np
import pytest

from clinrel.classify import (
    ConfusionMatrix,
    LogRegConfig,
    augmentation_experiment,
    confusion,
    metrics,
    predict,
    render_aug_report,
    standardize_apply,
    standardize_fit,
    train_logreg,
)
from clinrel.errors import MissingRoleError
from clinrel.registry import load_manifest

from aug_fixture import GOLDEN_PATH, build_fixture


class TestStandardize:
    def test_two_value_column(self):
        std = standardize_fit(np.array([[1.0], [3.0]]))
        out = standardize_apply(std, np.array([[3.0]]))
        assert out[0, 0] == 1.0  # mean 2, population std 1

    def test_constant_column_shifts_only(self):
        X = np.array([[5.0, 1.0], [5.0, 3.0], [5.0, 5.0]])
        std = standardize_fit(X)
        out = standardize_apply(std, X)
        assert np.all(out[:, 0] == 0.0)

    def test_self_application_centers(self):
        rng = np.random.RandomState(0)
        X = rng.randn(40, 5) * 3.0 + 7.0
        out = standardize_apply(standardize_fit(X), X)
        assert np.allclose(out.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(out.std(axis=0), 1.0, atol=1e-12)


def logistic_loss(X, y, w, b, l2):
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))


class TestTrainLogreg:
    def test_separable_pair(self):
        X = np.array([[-1.0], [1.0]])
        y = np.array([0, 1])
        model = train_logreg(X, y, LogRegConfig())
        assert np.array_equal(predict(model, X), y)

    def test_gradient_at_zero_init(self):
        # balanced labels: bias gradient at (w=0, b=0) is exactly zero and the
        # weight gradient is -(1/n) sum (y_i - 0.5) x_i on standardized data
        rng = np.random.RandomState(1)
        X = rng.randn(10, 3)
        y = np.array([0, 1] * 5)
        Xs = standardize_apply(standardize_fit(X), X)
        grad_w = -np.mean((y - 0.5)[:, None] * Xs, axis=0)
        # numeric cross-check via finite differences of the loss at the origin
        h = 1e-7
        for k in range(3):
            w = np.zeros(3)
            wp, wm = w.copy(), w.copy()
            wp[k] += h
            wm[k] -= h
            fd = (logistic_loss(Xs, y, wp, 0.0, 0.0) - logistic_loss(Xs, y, wm, 0.0, 0.0)) / (2 * h)
            assert fd == pytest.approx(grad_w[k], abs=1e-6)
        fd_b = (logistic_loss(Xs, y, np.zeros(3), h, 0.0) - logistic_loss(Xs, y, np.zeros(3), -h, 0.0)) / (2 * h)
        assert fd_b == pytest.approx(0.0, abs=1e-9)

    def test_converges_and_beats_random_search(self):
        rng = np.random.RandomState(2)
        X = rng.randn(60, 4)
        true_w = np.array([2.0, -1.0, 0.5, 0.0])
        y = (X @ true_w + 0.3 * rng.randn(60) > 0).astype(int)
        cfg = LogRegConfig()
        model = train_logreg(X, y, cfg)
        Xs = standardize_apply(model.standardizer, X)
        z = Xs @ model.weights + model.bias
        p = 1.0 / (1.0 + np.exp(-z))
        grad_w = Xs.T @ (p - y) / len(y) + cfg.l2 * model.weights
        grad_b = float(np.mean(p - y))
        assert max(np.abs(grad_w).max(), abs(grad_b)) < cfg.grad_tol
        # the convex minimum beats 500 random candidates
        best_loss = logistic_loss(Xs, y, model.weights, model.bias, cfg.l2)
        for _ in range(500):
            w = rng.uniform(-5, 5, size=4)
            w *= min(1.0, 5.0 / np.linalg.norm(w))
            b = rng.uniform(-5, 5)
            assert best_loss <= logistic_loss(Xs, y, w, b, cfg.l2) + 1e-12

    def test_deterministic(self):
        rng = np.random.RandomState(3)
        X = rng.randn(30, 3)
        y = (rng.rand(30) > 0.5).astype(int)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        m1 = train_logreg(X, y, LogRegConfig())
        m2 = train_logreg(X, y, LogRegConfig())
        assert m1.weights.tobytes() == m2.weights.tobytes()
        assert m1.bias == m2.bias

    def test_loss_trace_non_increasing(self):
        rng = np.random.RandomState(4)
        X = rng.randn(50, 4)
        y = (X[:, 0] + 0.5 * rng.randn(50) > 0).astype(int)
        model = train_logreg(X, y, LogRegConfig())
        trace = np.array(model.loss_trace)
        assert np.all(np.diff(trace) <= 1e-15)

    def test_single_class_rejected(self):
        X = np.zeros((5, 2))
        with pytest.raises(ValueError, match="single-class"):
            train_logreg(X, np.ones(5, dtype=int), LogRegConfig())


class TestPredictConfusion:
    def test_all_correct(self):
        y = np.array([1, 0, 1, 0])
        cm = confusion(y, y)
        assert (cm.fp, cm.fn) == (0, 0)
        assert (cm.tp, cm.tn) == (2, 2)

    def test_hand_counts(self):
        cm = confusion(np.array([1, 1, 0]), np.array([1, 0, 0]))
        assert (cm.tp, cm.fn, cm.fp, cm.tn) == (1, 1, 0, 1)

    def test_counts_sum_to_n(self):
        rng = np.random.RandomState(5)
        for _ in range(10):
            n = rng.randint(1, 50)
            yt = rng.randint(0, 2, size=n)
            yp = rng.randint(0, 2, size=n)
            cm = confusion(yt, yp)
            assert cm.tp + cm.fn + cm.fp + cm.tn == n

    def test_threshold_consistency(self):
        rng = np.random.RandomState(6)
        X = rng.randn(40, 3)
        y = (X[:, 0] > 0).astype(int)
        model = train_logreg(X, y, LogRegConfig())
        Xs = standardize_apply(model.standardizer, X)
        z = Xs @ model.weights + model.bias
        assert np.array_equal(predict(model, X), (z >= 0).astype(int))


class TestMetrics:
    def test_reference_confusion_reproduces_golden_values(self):
        # 77 positives / 36 negatives in the test split
        report = metrics(ConfusionMatrix(tp=64, fn=13, fp=17, tn=19))
        assert round(report.positive.precision, 4) == 0.7901
        assert round(report.positive.recall, 4) == 0.8312
        assert round(report.positive.f1, 4) == 0.8101
        assert round(report.negative.precision, 4) == 0.5938
        assert round(report.negative.recall, 4) == 0.5278
        assert round(report.negative.f1, 4) == 0.5588
        assert round(report.balanced_accuracy, 4) == 0.6795

    def test_perfect_classifier(self):
        report = metrics(ConfusionMatrix(tp=10, fn=0, fp=0, tn=5))
        for m in (report.positive, report.negative):
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)
        assert report.balanced_accuracy == 1.0

    def test_degenerate_all_negative_predictor(self):
        report = metrics(ConfusionMatrix(tp=0, fn=77, fp=0, tn=36))
        assert report.positive.recall == 0.0
        assert report.negative.recall == 1.0
        assert report.balanced_accuracy == 0.5
        assert "AD precision" in report.zero_division_flags

    def test_f1_is_harmonic_mean(self):
        rng = np.random.RandomState(7)
        for _ in range(20):
            cm = ConfusionMatrix(*(int(v) for v in rng.randint(1, 60, size=4)))
            rep = metrics(cm)
            for m in (rep.positive, rep.negative):
                want = 2 * m.precision * m.recall / (m.precision + m.recall)
                assert m.f1 == pytest.approx(want, abs=1e-12)
            assert rep.balanced_accuracy == pytest.approx(
                (rep.positive.recall + rep.negative.recall) / 2, abs=1e-15
            )

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ConfusionMatrix(tp=-1, fn=0, fp=0, tn=0)


@pytest.fixture(scope="module")
def fixture_manifests(tmp_path_factory):
    return build_fixture(tmp_path_factory.mktemp("augdata"))


@pytest.fixture(scope="module")
def same_variant_report(fixture_manifests):
    registry = load_manifest(fixture_manifests["same"])
    return augmentation_experiment(registry, LogRegConfig())


class TestAugmentationExperiment:
    def test_no_synthetic_gives_identical_reports(self, fixture_manifests):
        registry = load_manifest(fixture_manifests["real_only"])
        aug = augmentation_experiment(registry, LogRegConfig())
        assert aug.real_only == aug.real_plus_synth

    def test_minority_augmentation_direction(self, fixture_manifests):
        registry = load_manifest(fixture_manifests["same"])
        aug = augmentation_experiment(registry, LogRegConfig())
        assert aug.real_plus_synth.negative.recall >= aug.real_only.negative.recall

    def test_swapped_augmentation_degrades(self, fixture_manifests):
        registry = load_manifest(fixture_manifests["swap"])
        aug = augmentation_experiment(registry, LogRegConfig())
        assert aug.real_plus_synth.balanced_accuracy <= aug.real_only.balanced_accuracy

    def test_matches_committed_golden_values(self, fixture_manifests):
        from aug_fixture import report_to_dict

        golden = json.loads(GOLDEN_PATH.read_text())
        for variant in ("same", "swap"):
            registry = load_manifest(fixture_manifests[variant])
            aug = augmentation_experiment(registry, LogRegConfig())
            got = {
                "real_only": report_to_dict(aug.real_only),
                "real_plus_synth": report_to_dict(aug.real_plus_synth),
            }
            for run in ("real_only", "real_plus_synth"):
                for side in ("positive", "negative"):
                    for key in ("precision", "recall", "f1"):
                        assert got[run][side][key] == pytest.approx(
                            golden[variant][run][side][key], abs=1e-12
                        )
                assert got[run]["balanced_accuracy"] == pytest.approx(
                    golden[variant][run]["balanced_accuracy"], abs=1e-12
                )

    def test_train_counts_recorded(self, fixture_manifests):
        registry = load_manifest(fixture_manifests["same"])
        aug = augmentation_experiment(registry, LogRegConfig())
        assert aug.train_counts["real"] == {"AD": 80, "NonAD": 12}
        assert aug.train_counts["synthetic"] == {"AD": 0, "NonAD": 68}
        assert aug.test_counts == {"AD": 60, "NonAD": 60}

    def test_missing_test_split_errors(self, tmp_path):
        from clinrel.features import FeatureSet, write_feature_file

        rng = np.random.RandomState(8)
        for name, klass in [("tr_ad", "AD"), ("tr_nonad", "NonAD")]:
            write_feature_file(
                FeatureSet(data=rng.randn(5, 3).astype(np.float32)),
                tmp_path / f"{name}.fvec",
            )
        entries = [
            {"id": "tr_ad", "path": "tr_ad.fvec", "source": "real", "class": "AD", "split": "train"},
            {"id": "tr_nonad", "path": "tr_nonad.fvec", "source": "real", "class": "NonAD", "split": "train"},
        ]
        (tmp_path / "m.json").write_text(json.dumps(entries))
        with pytest.raises(MissingRoleError, match="test"):
            augmentation_experiment(load_manifest(tmp_path / "m.json"), LogRegConfig())


class TestRenderAugReport:
    @pytest.fixture
    def report(self, same_variant_report):
        return same_variant_report

    def test_markdown_two_rows_four_decimals(self, report):
        md = render_aug_report(report, "markdown")
        assert "| Real |" in md
        assert "| Real+Synthetic |" in md
        import re

        cells = re.findall(r"\| (\d\.\d{4}) ", md)
        assert len(cells) >= 14  # seven numeric columns per run

    def test_json_carries_counts(self, report):
        doc = json.loads(render_aug_report(report, "json"))
        assert doc["train_counts"]["synthetic"]["NonAD"] == 68
        assert set(doc["runs"]) == {"real_only", "real_plus_synth"}

    def test_csv_shape(self, report):
        lines = render_aug_report(report, "csv").strip().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("Real,")
        assert lines[2].startswith("Real+Synthetic,")
