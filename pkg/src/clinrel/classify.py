"""Feature-space augmentation experiment.

Trains an L2-regularized logistic regression twice, once on real training
features and once on real plus synthetic, then evaluates both on the same
real test split and reports per-class precision/recall/F1 plus balanced
accuracy. Training is full-batch gradient descent with Armijo backtracking
from a zero start, so runs are deterministic and the loss trace is
non-increasing by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import MissingRoleError
from .registry import DatasetRegistry, Source, Split


@dataclass(frozen=True)
class LogRegConfig:
    l2: float = 1e-4
    max_epochs: int = 2000
    grad_tol: float = 1e-6
    init_step: float = 1.0
    armijo_c: float = 1e-4
    class_weights: tuple[float, float] | None = None  # (weight for 0, for 1)

    def __post_init__(self):
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        for name in ("max_epochs", "grad_tol", "init_step", "armijo_c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.class_weights is not None and min(self.class_weights) <= 0:
            raise ValueError("class_weights must be positive")


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray  # population std; zero-variance columns use 1.0


@dataclass(frozen=True)
class LogRegModel:
    weights: np.ndarray
    bias: float
    standardizer: Standardizer
    loss_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassificationReport:
    positive: ClassMetrics
    negative: ClassMetrics
    balanced_accuracy: float
    zero_division_flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class AugReport:
    real_only: ClassificationReport
    real_plus_synth: ClassificationReport
    train_counts: dict
    test_counts: dict


def standardize_fit(X: np.ndarray) -> Standardizer:
    """Per-feature mean and population std from training data."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 1:
        raise ValueError("cannot standardize an empty training set")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return Standardizer(mean=mean, scale=scale)


def standardize_apply(std: Standardizer, X: np.ndarray) -> np.ndarray:
    return (np.asarray(X, dtype=np.float64) - std.mean) / std.scale


def _sigmoid(z: np.ndarray) -> np.ndarray:
    p = np.empty_like(z)
    pos = z >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    p[~pos] = ez / (1.0 + ez)
    return p


def train_logreg(X: np.ndarray, y: np.ndarray, cfg: LogRegConfig) -> LogRegModel:
    """Minimize mean logistic loss + (l2/2)||w||^2 (bias unregularized).

    Steepest descent with Armijo backtracking from w=0, b=0; stops when the
    gradient infinity norm falls below grad_tol or epochs run out.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if y.min() == y.max():
        raise ValueError("single-class input: need both labels 0 and 1")
    std = standardize_fit(X)
    Xs = standardize_apply(std, X)
    yf = y.astype(np.float64)
    n = Xs.shape[0]
    if cfg.class_weights is None:
        sw = np.ones(n)
    else:
        sw = np.where(yf == 0, cfg.class_weights[0], cfg.class_weights[1])

    def loss_grad(w, b):
        z = Xs @ w + b
        ce = np.logaddexp(0.0, z) - yf * z
        loss = float(np.mean(sw * ce) + 0.5 * cfg.l2 * (w @ w))
        resid = sw * (_sigmoid(z) - yf)
        gw = Xs.T @ resid / n + cfg.l2 * w
        gb = float(np.mean(resid))
        return loss, gw, gb

    w = np.zeros(Xs.shape[1])
    b = 0.0
    loss, gw, gb = loss_grad(w, b)
    trace = [loss]
    prev = None  # (w, b, gw, gb) at the last accepted point
    for _ in range(cfg.max_epochs):
        if max(np.abs(gw).max(), abs(gb)) < cfg.grad_tol:
            break
        gsq = float(gw @ gw) + gb * gb
        # Barzilai-Borwein trial step (safeguarded by the Armijo test below);
        # a plain unit step crawls once the logits saturate
        alpha = cfg.init_step
        if prev is not None:
            sw_, sb_ = w - prev[0], b - prev[1]
            yw_, yb_ = gw - prev[2], gb - prev[3]
            sy = float(sw_ @ yw_) + sb_ * yb_
            if sy > 0:
                alpha = min(max((float(sw_ @ sw_) + sb_ * sb_) / sy, 1e-10), 1e6)
        accepted = False
        for _ in range(80):
            w_new = w - alpha * gw
            b_new = b - alpha * gb
            loss_new, gw_new, gb_new = loss_grad(w_new, b_new)
            if loss_new <= loss - cfg.armijo_c * alpha * gsq:
                prev = (w, b, gw, gb)
                w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break  # step size underflowed: no further decrease possible
        trace.append(loss)
    return LogRegModel(weights=w, bias=b, standardizer=std, loss_trace=tuple(trace))


def predict(model: LogRegModel, X: np.ndarray) -> np.ndarray:
    """Labels in {0, 1}; 1 iff the standardized logit is non-negative."""
    Xs = standardize_apply(model.standardizer, X)
    return (Xs @ model.weights + model.bias >= 0).astype(int)


def confusion(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionMatrix:
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    return ConfusionMatrix(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
    )


def _safe_div(num: int, den: int, flag: str, flags: list) -> float:
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def metrics(
    cm: ConfusionMatrix, labels: tuple[str, str] = ("AD", "NonAD")
) -> ClassificationReport:
    """Per-class precision/recall/F1 (positive class first) and balanced
    accuracy. Zero denominators yield 0.0 and a named flag."""
    pos_label, neg_label = labels
    flags: list[str] = []

    def one_class(tp, fp, fn, label):
        precision = _safe_div(tp, tp + fp, f"{label} precision", flags)
        recall = _safe_div(tp, tp + fn, f"{label} recall", flags)
        if precision + recall == 0:
            flags.append(f"{label} f1")
            f1 = 0.0
        else:
            f1 = 2 * precision * recall / (precision + recall)
        return ClassMetrics(label=label, precision=precision, recall=recall, f1=f1)

    positive = one_class(cm.tp, cm.fp, cm.fn, pos_label)
    negative = one_class(cm.tn, cm.fn, cm.fp, neg_label)
    return ClassificationReport(
        positive=positive,
        negative=negative,
        balanced_accuracy=(positive.recall + negative.recall) / 2.0,
        zero_division_flags=tuple(flags),
    )


def _load_role(registry, klass, split):
    fset = registry.gather(Source.REAL, klass, split=split)
    return fset.data.astype(np.float64)


def _load_synthetic_train(registry, klass, iteration):
    entries = [
        e
        for e in registry.find(Source.SYNTHETIC, klass, iteration)
        if e.split is not Split.TEST
    ]
    if not entries:
        return np.zeros((0, 0))
    from .features import load_feature_file

    parts = [load_feature_file(registry.resolve_path(e), id=e.id).data for e in entries]
    return np.vstack(parts).astype(np.float64)


def augmentation_experiment(
    registry: DatasetRegistry,
    cfg: LogRegConfig,
    class_labels: tuple[str, str] = ("AD", "NonAD"),
    iteration: int | None = None,
) -> AugReport:
    """Train on real vs real+synthetic and evaluate both on one test split.

    The positive class is ``class_labels[0]``. Synthetic training sets are
    optional (per class; filtered to ``iteration`` when given); with none
    present the two runs coincide. Test features are shared between runs.
    """
    pos, neg = class_labels
    train_pos = _load_role(registry, pos, Split.TRAIN)
    train_neg = _load_role(registry, neg, Split.TRAIN)
    test_pos = _load_role(registry, pos, Split.TEST)
    test_neg = _load_role(registry, neg, Split.TEST)
    synth_pos = _load_synthetic_train(registry, pos, iteration)
    synth_neg = _load_synthetic_train(registry, neg, iteration)

    X_test = np.vstack([test_pos, test_neg])
    y_test = np.concatenate([np.ones(len(test_pos), int), np.zeros(len(test_neg), int)])

    def run(X_pos, X_neg):
        X = np.vstack([X_pos, X_neg])
        y = np.concatenate([np.ones(len(X_pos), int), np.zeros(len(X_neg), int)])
        model = train_logreg(X, y, cfg)
        return metrics(confusion(y_test, predict(model, X_test)), labels=class_labels)

    aug_pos = train_pos if synth_pos.size == 0 else np.vstack([train_pos, synth_pos])
    aug_neg = train_neg if synth_neg.size == 0 else np.vstack([train_neg, synth_neg])
    return AugReport(
        real_only=run(train_pos, train_neg),
        real_plus_synth=run(aug_pos, aug_neg),
        train_counts={
            "real": {pos: len(train_pos), neg: len(train_neg)},
            "synthetic": {pos: len(synth_pos), neg: len(synth_neg)},
        },
        test_counts={pos: len(test_pos), neg: len(test_neg)},
    )


def _report_row(rep: ClassificationReport):
    return [
        rep.positive.precision,
        rep.positive.recall,
        rep.positive.f1,
        rep.negative.precision,
        rep.negative.recall,
        rep.negative.f1,
        rep.balanced_accuracy,
    ]


def render_aug_report(report: AugReport, format: str = "markdown") -> str:
    """Two-row comparison table (Real vs Real+Synthetic): markdown at four
    decimals, csv/json at full precision with the training counts attached."""
    pos = report.real_only.positive.label
    neg = report.real_only.negative.label
    columns = [
        f"{pos} Precision",
        f"{pos} Recall",
        f"{pos} F1",
        f"{neg} Precision",
        f"{neg} Recall",
        f"{neg} F1",
        "Balanced Accuracy",
    ]
    rows = [
        ("Real", _report_row(report.real_only)),
        ("Real+Synthetic", _report_row(report.real_plus_synth)),
    ]
    if format in ("markdown", "md"):
        lines = [
            "| Training images | " + " | ".join(columns) + " |",
            "| " + " | ".join("---" for _ in range(len(columns) + 1)) + " |",
        ]
        for name, vals in rows:
            lines.append(f"| {name} | " + " | ".join(f"{v:.4f}" for v in vals) + " |")
        tc = report.train_counts
        lines.append("")
        lines.append(
            f"Training samples: real {pos}={tc['real'][pos]}, {neg}={tc['real'][neg]}; "
            f"synthetic {pos}={tc['synthetic'][pos]}, {neg}={tc['synthetic'][neg]}. "
            f"Test samples: {pos}={report.test_counts[pos]}, {neg}={report.test_counts[neg]}."
        )
        return "\n".join(lines) + "\n"
    if format == "csv":
        header = "train_set," + ",".join(
            c.lower().replace(" ", "_") for c in columns
        )
        lines = [header]
        for name, vals in rows:
            lines.append(name + "," + ",".join(repr(float(v)) for v in vals))
        return "\n".join(lines) + "\n"
    if format == "json":
        def as_dict(rep):
            return {
                "positive": {
                    "label": rep.positive.label,
                    "precision": rep.positive.precision,
                    "recall": rep.positive.recall,
                    "f1": rep.positive.f1,
                },
                "negative": {
                    "label": rep.negative.label,
                    "precision": rep.negative.precision,
                    "recall": rep.negative.recall,
                    "f1": rep.negative.f1,
                },
                "balanced_accuracy": rep.balanced_accuracy,
                "zero_division_flags": list(rep.zero_division_flags),
            }

        doc = {
            "runs": {
                "real_only": as_dict(report.real_only),
                "real_plus_synth": as_dict(report.real_plus_synth),
            },
            "train_counts": report.train_counts,
            "test_counts": report.test_counts,
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"unknown format {format!r} (markdown|csv|json)")
