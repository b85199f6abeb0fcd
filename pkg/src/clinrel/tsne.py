"""Exact t-SNE over feature sets, plus SVG scatter rendering.

The pipeline is the classic dense formulation: squared Euclidean distances,
per-point precision calibrated by binary search until the conditional
distribution's perplexity (2^entropy) hits the target, symmetrized joint
affinities P, and gradient descent with momentum and early exaggeration on
the KL divergence between P and a Student-t low-dimensional affinity Q.

Probabilities are clamped to 1e-12 inside the KL objective and gradient (and
only there), so the affinity matrix itself sums to one. Initial coordinates
come from a seeded PCG32 stream (sigma 1e-4, row-major order), which makes
embeddings bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import FeatureSet
from .rng import Pcg32

P_CLAMP = 1e-12
_INIT_SIGMA = 1e-4
_BROADCAST_LIMIT = 1 << 24  # n*n*d above this: row-chunked distance loop


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    max_iter: int = 1000
    exaggeration: float = 12.0
    exagg_iters: int = 250
    learning_rate: float = 200.0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 0
    calib_tol: float = 1e-5
    calib_max_steps: int = 64

    def __post_init__(self):
        if self.perplexity < 2:
            raise ValueError(f"perplexity must be >= 2, got {self.perplexity}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class CalibrationReport:
    """Per-point calibration diagnostics (precision, achieved perplexity)."""

    beta: np.ndarray
    achieved_perplexity: np.ndarray
    converged: np.ndarray
    effective_perplexity: float


@dataclass(frozen=True)
class TsneResult:
    coords: np.ndarray
    final_kl: float
    calib_report: CalibrationReport
    kl_trace: tuple[float, ...] = field(default_factory=tuple)


def _as_matrix(X) -> np.ndarray:
    data = X.data if isinstance(X, FeatureSet) else X
    return np.asarray(data, dtype=np.float64)


def pairwise_sq_dists(X) -> np.ndarray:
    """Symmetric n x n squared-Euclidean distances with an exact zero diagonal."""
    M = _as_matrix(X)
    n, d = M.shape
    if n < 2:
        raise ValueError(f"need at least 2 rows, got {n}")
    if n * n * d <= _BROADCAST_LIMIT:
        diff = M[:, None, :] - M[None, :, :]
        D = (diff * diff).sum(axis=2)
    else:
        D = np.empty((n, n))
        for i in range(n):
            diff = M - M[i]
            D[i] = (diff * diff).sum(axis=1)
    np.fill_diagonal(D, 0.0)
    return D


def _effective_perplexity(perplexity: float, n: int) -> float:
    return max(2.0, min(perplexity, (n - 1) / 3.0))


def _calibrate_row(dists: np.ndarray, target: float, tol: float, max_steps: int):
    """Binary search the precision beta so the row perplexity hits target.

    Returns (probabilities over the n-1 neighbors, beta, achieved, converged).
    """
    beta, beta_min, beta_max = 1.0, -math.inf, math.inf
    shifted = dists - dists.min()
    p = None
    achieved = math.nan
    converged = False
    for _ in range(max_steps):
        e = np.exp(-beta * shifted)
        s = e.sum()
        p = e / s
        entropy_nat = math.log(s) + beta * float(np.dot(p, shifted))
        achieved = math.exp(entropy_nat)
        if abs(achieved - target) <= tol:
            converged = True
            break
        if achieved > target:  # too spread out: sharpen
            beta_min = beta
            beta = beta * 2.0 if beta_max == math.inf else (beta + beta_max) / 2.0
        else:
            beta_max = beta
            beta = beta / 2.0 if beta_min == -math.inf else (beta + beta_min) / 2.0
    return p, beta, achieved, converged


def perplexity_calibration(D: np.ndarray, cfg: TsneConfig):
    """Conditional-Gaussian calibration and symmetrization.

    Returns (P, CalibrationReport). P is the joint affinity matrix
    (p_{j|i} + p_{i|j}) / 2n: symmetric, zero diagonal, summing to one.
    Targets above (n-1)/3 are capped (floored at 2) rather than rejected.
    """
    n = D.shape[0]
    target = _effective_perplexity(cfg.perplexity, n)
    cond = np.zeros((n, n))
    beta = np.empty(n)
    achieved = np.empty(n)
    converged = np.empty(n, dtype=bool)
    others = np.arange(n)
    for i in range(n):
        mask = others != i
        p, beta[i], achieved[i], converged[i] = _calibrate_row(
            D[i, mask], target, cfg.calib_tol, cfg.calib_max_steps
        )
        cond[i, mask] = p
    P = (cond + cond.T) / (2.0 * n)
    report = CalibrationReport(
        beta=beta,
        achieved_perplexity=achieved,
        converged=converged,
        effective_perplexity=target,
    )
    return P, report


def _student_t_affinities(Y: np.ndarray):
    """Unnormalized Student-t weights W and normalized Q for coords Y."""
    W = 1.0 / (1.0 + pairwise_sq_dists(Y))
    np.fill_diagonal(W, 0.0)
    Q = W / W.sum()
    return W, Q


def _kl_from_q(P: np.ndarray, Q: np.ndarray) -> float:
    Pc = np.maximum(P, P_CLAMP)
    Qc = np.maximum(Q, P_CLAMP)
    # clamped zero diagonals give log(1) = 0, so no masking is needed
    return float(np.sum(Pc * np.log(Pc / Qc)))


def kl_objective(P: np.ndarray, Y: np.ndarray) -> float:
    """KL(P || Q) with Student-t Q over the embedding coordinates."""
    P = np.asarray(P, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if P.shape[0] != Y.shape[0]:
        raise ValueError(f"shape mismatch: P {P.shape} vs Y {Y.shape}")
    _, Q = _student_t_affinities(Y)
    return _kl_from_q(P, Q)


def _gradient_from_wq(P: np.ndarray, W: np.ndarray, Q: np.ndarray, Y: np.ndarray):
    M = (np.maximum(P, P_CLAMP) - np.maximum(Q, P_CLAMP)) * W
    return 4.0 * (M.sum(axis=1)[:, None] * Y - M @ Y)


def kl_gradient(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Analytic gradient of kl_objective: 4 sum_j (p-q)(y_i-y_j)/(1+||y_i-y_j||^2)."""
    P = np.asarray(P, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if P.shape[0] != Y.shape[0]:
        raise ValueError(f"shape mismatch: P {P.shape} vs Y {Y.shape}")
    W, Q = _student_t_affinities(Y)
    return _gradient_from_wq(P, W, Q, Y)


def tsne_embed(X, cfg: TsneConfig = TsneConfig()) -> TsneResult:
    """Embed a feature set into 2-D. Deterministic given (X, cfg).

    kl_trace[t] is the (unexaggerated) objective at the start of iteration t;
    final_kl is the objective at the returned coordinates. For n == 2 the
    objective is constant and the seeded initialization is returned as-is.
    """
    M = _as_matrix(X)
    n = M.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    rng = Pcg32(cfg.seed)
    Y = _INIT_SIGMA * rng.normal_array(2 * n).reshape(n, 2)
    D = pairwise_sq_dists(M)
    P, calib = perplexity_calibration(D, cfg)
    if n == 2:
        return TsneResult(
            coords=Y, final_kl=kl_objective(P, Y), calib_report=calib, kl_trace=()
        )
    update = np.zeros_like(Y)
    trace = []
    for it in range(cfg.max_iter):
        exagg = cfg.exaggeration if it < cfg.exagg_iters else 1.0
        momentum = (
            cfg.momentum_early if it < cfg.momentum_switch_iter else cfg.momentum_late
        )
        W, Q = _student_t_affinities(Y)
        trace.append(_kl_from_q(P, Q))
        grad = _gradient_from_wq(P * exagg, W, Q, Y)
        update = momentum * update - cfg.learning_rate * grad
        Y = Y + update
        Y = Y - Y.mean(axis=0)
    return TsneResult(
        coords=Y,
        final_kl=kl_objective(P, Y),
        calib_report=calib,
        kl_trace=tuple(trace),
    )


# fixed palette; classes are assigned colors in sorted order
_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def render_scatter(result: TsneResult, labels, path: str | Path | None = None) -> str:
    """SVG scatter of an embedding: color by class, fill by source.

    ``labels`` is one (source, class) pair per point, where source is "real"
    (filled marker) or "synthetic" (hollow marker). The viewBox is fitted to
    the points with a 5% margin. Returns the SVG text; also writes it to
    ``path`` when given.
    """
    coords = np.asarray(result.coords, dtype=np.float64)
    n = coords.shape[0]
    if n == 0:
        raise ValueError("nothing to plot: empty embedding")
    labels = list(labels)
    if len(labels) != n:
        raise ValueError(f"labels length {len(labels)} != point count {n}")

    xs = coords[:, 0]
    ys = -coords[:, 1]  # SVG y grows downward; flip so +y plots upward
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-6)
    margin = 0.05 * span
    classes = sorted({c for _, c in labels})
    color = {c: _PALETTE[i % len(_PALETTE)] for i, c in enumerate(classes)}
    r = 0.012 * span
    stroke = 0.45 * r

    # reserve headroom above the points for the legend
    combos = sorted({(c, s) for s, c in labels})
    legend_h = (len(combos) + 1) * 0.05 * span
    vb = (
        f"{x0 - margin:.6f} {y0 - margin - legend_h:.6f} "
        f"{(x1 - x0) + 2 * margin:.6f} {(y1 - y0) + 2 * margin + legend_h:.6f}"
    )
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}" '
        f'width="640" height="640">',
    ]
    font = 0.04 * span
    for k, (klass, source) in enumerate(combos):
        lx = x0
        ly = y0 - margin - legend_h + (k + 0.8) * 0.05 * span
        # rect swatches keep the circle count equal to the point count
        if source == "real":
            style = f'fill="{color[klass]}"'
        else:
            style = f'fill="none" stroke="{color[klass]}" stroke-width="{stroke:.6f}"'
        out.append(
            f'<rect x="{lx - r:.6f}" y="{ly - r:.6f}" '
            f'width="{2 * r:.6f}" height="{2 * r:.6f}" {style}/>'
        )
        out.append(
            f'<text x="{lx + 2 * r:.6f}" y="{ly + 0.35 * font:.6f}" '
            f'font-size="{font:.6f}" font-family="sans-serif">{source} {klass}</text>'
        )
    for (x, y), (source, klass) in zip(zip(xs, ys), labels):
        if source == "real":
            out.append(
                f'<circle cx="{x:.6f}" cy="{y:.6f}" r="{r:.6f}" fill="{color[klass]}"/>'
            )
        else:
            out.append(
                f'<circle cx="{x:.6f}" cy="{y:.6f}" r="{r:.6f}" fill="none" '
                f'stroke="{color[klass]}" stroke-width="{stroke:.6f}"/>'
            )
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
