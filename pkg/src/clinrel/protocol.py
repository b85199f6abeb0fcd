"""Directional KID protocol: four comparisons per iteration, sweep, selection.

Each generator iteration is scored by pairing its synthetic AD and NonAD sets
against both real classes. Same-class distances should be small (the
synthetic set resembles its own pathology) while cross-class distances should
stay large (the classes remain distinct). The sweep marks per-column extrema
and a combined score picks one iteration:

    score(it) = (same_ad + same_nonad) - lambda * (cross_ad + cross_nonad)

minimized over iterations, ties broken toward the smallest iteration.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .kid import KidConfig, KidEstimate, kid_estimate
from .registry import DatasetRegistry, Source

# Column -> objective. "min" columns compare a synthetic class against its own
# real class; "max" columns compare it against the opposite class.
COLUMNS = {
    "same_ad": "min",
    "cross_ad": "max",
    "same_nonad": "min",
    "cross_nonad": "max",
}


@dataclass(frozen=True)
class ComparisonRow:
    iteration: int
    same_ad: KidEstimate
    cross_ad: KidEstimate
    same_nonad: KidEstimate
    cross_nonad: KidEstimate


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[ComparisonRow, ...]
    best_markers: dict[str, tuple[int, ...]]
    class_labels: tuple[str, str] = ("AD", "NonAD")


@dataclass(frozen=True)
class SelectionResult:
    chosen_iteration: int
    score_per_iteration: dict[int, float]
    lambda_: float


def make_sweep_table(
    rows, class_labels: tuple[str, str] = ("AD", "NonAD")
) -> SweepTable:
    """Sort rows by iteration and mark every column's extremum (ties included)."""
    rows = sorted(rows, key=lambda r: r.iteration)
    if not rows:
        raise ValueError("empty sweep: no comparison rows")
    markers = {}
    for column, objective in COLUMNS.items():
        means = [getattr(r, column).mean for r in rows]
        best = min(means) if objective == "min" else max(means)
        markers[column] = tuple(
            r.iteration for r, m in zip(rows, means) if m == best
        )
    return SweepTable(rows=tuple(rows), best_markers=markers, class_labels=class_labels)


def directional_matrix(
    registry: DatasetRegistry,
    iteration: int,
    cfg: KidConfig,
    class_labels: tuple[str, str] = ("AD", "NonAD"),
) -> ComparisonRow:
    """The four KID estimates for one iteration, all under the same config."""
    a, b = class_labels
    real_a = registry.gather(Source.REAL, a)
    real_b = registry.gather(Source.REAL, b)
    synth_a = registry.gather(Source.SYNTHETIC, a, iteration=iteration)
    synth_b = registry.gather(Source.SYNTHETIC, b, iteration=iteration)
    return ComparisonRow(
        iteration=iteration,
        same_ad=kid_estimate(synth_a, real_a, cfg),
        cross_ad=kid_estimate(synth_a, real_b, cfg),
        same_nonad=kid_estimate(synth_b, real_b, cfg),
        cross_nonad=kid_estimate(synth_b, real_a, cfg),
    )


def iteration_sweep(
    registry: DatasetRegistry,
    iterations,
    cfg: KidConfig,
    class_labels: tuple[str, str] = ("AD", "NonAD"),
    max_workers: int | None = None,
) -> SweepTable:
    """One ComparisonRow per iteration. Rows are independent, so they may be
    computed by a worker pool; assembly order is fixed by iteration."""
    iterations = list(iterations)
    if not iterations:
        raise ValueError("empty iteration list")

    def row(it):
        return directional_matrix(registry, it, cfg, class_labels)

    if max_workers is None or max_workers <= 1 or len(iterations) == 1:
        rows = [row(it) for it in iterations]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(row, iterations))
    return make_sweep_table(rows, class_labels)


def select_iteration(table: SweepTable, lambda_: float = 1.0) -> SelectionResult:
    """Argmin of the same-minus-cross score; smallest iteration wins ties."""
    scores = {
        r.iteration: (r.same_ad.mean + r.same_nonad.mean)
        - lambda_ * (r.cross_ad.mean + r.cross_nonad.mean)
        for r in table.rows
    }
    chosen = min(scores, key=lambda it: (scores[it], it))
    return SelectionResult(chosen_iteration=chosen, score_per_iteration=scores, lambda_=lambda_)


def _fmt_cell(est: KidEstimate, bold: bool) -> str:
    cell = f"{est.mean:.3f} ({est.std:.3f})"
    return f"**{cell}**" if bold else cell


def _column_headers(class_labels: tuple[str, str]) -> list[str]:
    a, b = class_labels
    return [
        f"Synthetic {a} vs Real {a} ↓",
        f"Synthetic {a} vs Real {b} ↑",
        f"Synthetic {b} vs Real {b} ↓",
        f"Synthetic {b} vs Real {a} ↑",
    ]


def _render_markdown(table: SweepTable, selection: SelectionResult) -> str:
    headers = ["Iteration"] + _column_headers(table.class_labels)
    lines = [
        "| " + " | ".join(headers) + " |",
        "| " + " | ".join("---" for _ in headers) + " |",
    ]
    for r in table.rows:
        cells = [str(r.iteration)]
        for column in COLUMNS:
            bold = r.iteration in table.best_markers[column]
            cells.append(_fmt_cell(getattr(r, column), bold))
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    lines.append(
        f"Selected iteration: **{selection.chosen_iteration}** "
        f"(lambda = {selection.lambda_:g}, "
        f"score = {selection.score_per_iteration[selection.chosen_iteration]:.6f})"
    )
    lines.append("")
    lines.append("| Iteration | Score |")
    lines.append("| --- | --- |")
    for it in sorted(selection.score_per_iteration):
        lines.append(f"| {it} | {selection.score_per_iteration[it]:.6f} |")
    return "\n".join(lines) + "\n"


def _render_csv(table: SweepTable) -> str:
    cols = ["iteration"]
    for column in COLUMNS:
        cols += [f"{column}_mean", f"{column}_std"]
    lines = [",".join(cols)]
    for r in table.rows:
        cells = [str(r.iteration)]
        for column in COLUMNS:
            est = getattr(r, column)
            cells += [repr(float(est.mean)), repr(float(est.std))]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_json(table: SweepTable, selection: SelectionResult) -> str:
    doc = {
        "rows": [
            {
                "iteration": r.iteration,
                **{
                    column: {
                        "mean": getattr(r, column).mean,
                        "std": getattr(r, column).std,
                    }
                    for column in COLUMNS
                },
            }
            for r in table.rows
        ],
        "markers": {column: list(table.best_markers[column]) for column in COLUMNS},
        "selection": {
            "chosen": selection.chosen_iteration,
            "lambda": selection.lambda_,
            "scores": {
                str(it): selection.score_per_iteration[it]
                for it in sorted(selection.score_per_iteration)
            },
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def render_sweep_report(
    table: SweepTable, selection: SelectionResult, format: str = "markdown"
) -> str:
    """Render the sweep as markdown (3-decimal cells, extrema bolded), csv, or
    json (both full precision)."""
    if format in ("markdown", "md"):
        return _render_markdown(table, selection)
    if format == "csv":
        return _render_csv(table)
    if format == "json":
        return _render_json(table, selection)
    raise ValueError(f"unknown format {format!r} (markdown|csv|json)")
