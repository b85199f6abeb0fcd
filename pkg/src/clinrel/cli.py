"""Command-line surface: validate -> sweep -> tsne -> classify -> report.

All knobs live in a JSON config file; flags override file values. Every
command is deterministic given its config (seeds are explicit, never
wall-clock) and idempotent: rerunning writes byte-identical outputs. The
CLINREL_THREADS environment variable caps the worker pool used for
independent work items (sweep rows, per-iteration embeddings).

Exit codes: 0 success; 1 validation or domain failure; 2 I/O or config
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .classify import LogRegConfig, augmentation_experiment, render_aug_report
from .errors import ClinrelError
from .kid import KernelConfig, KidConfig, KidEstimate
from .protocol import (
    ComparisonRow,
    SweepTable,
    iteration_sweep,
    make_sweep_table,
    render_sweep_report,
    select_iteration,
)
from .registry import DatasetRegistry, Source, load_manifest, validate_registry
from .tsne import TsneConfig, render_scatter, tsne_embed

_FORMATS = ("md", "csv", "json")


@dataclass
class RunConfig:
    manifest: Path
    out: Path
    iterations: list[int] | None
    lambda_: float
    formats: tuple[str, ...]
    classes: tuple[str, str]
    kid: KidConfig
    tsne: TsneConfig
    logreg: LogRegConfig
    threads: int


def _threads_from_env() -> int:
    raw = os.environ.get("CLINREL_THREADS", "")
    if raw.strip():
        n = int(raw)
        if n < 1:
            raise ValueError(f"CLINREL_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def _build_config(args) -> RunConfig:
    doc = {}
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text())
        if not isinstance(doc, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")

    manifest = getattr(args, "manifest", None) or doc.get("manifest")
    if manifest is None:
        raise ValueError("no manifest given (flag --manifest or config key 'manifest')")
    manifest = Path(manifest)
    if not manifest.is_absolute() and getattr(args, "config", None):
        manifest = Path(args.config).parent / manifest

    out = getattr(args, "out", None) or doc.get("out") or "out"
    seed = getattr(args, "seed", None)

    kid_doc = dict(doc.get("kid", {}))
    kernel = KernelConfig(
        degree=int(kid_doc.pop("degree", 3)),
        gamma=kid_doc.pop("gamma", None),
        coef=float(kid_doc.pop("coef", 1.0)),
    )
    kid = KidConfig(
        subset_size=int(kid_doc.get("subset_size", 100)),
        n_subsets=int(kid_doc.get("n_subsets", 100)),
        seed=int(kid_doc.get("seed", 0)),
        kernel=kernel,
    )
    tsne = TsneConfig(**doc.get("tsne", {}))
    logreg = LogRegConfig(**doc.get("logreg", {}))
    if seed is not None:
        kid = replace(kid, seed=seed)
        tsne = replace(tsne, seed=seed)

    fmt = getattr(args, "format", None)
    formats = (fmt,) if fmt else tuple(doc.get("formats", _FORMATS))
    for f in formats:
        if f not in _FORMATS:
            raise ValueError(f"unknown format {f!r} (md|csv|json)")

    classes = tuple(doc.get("classes", ("AD", "NonAD")))
    if len(classes) != 2:
        raise ValueError("config key 'classes' must list exactly two labels")

    iterations = doc.get("iterations")
    if iterations is not None:
        iterations = [int(i) for i in iterations]

    return RunConfig(
        manifest=manifest,
        out=Path(out),
        iterations=iterations,
        lambda_=float(doc.get("lambda", 1.0)),
        formats=formats,
        classes=classes,
        kid=kid,
        tsne=tsne,
        logreg=logreg,
        threads=_threads_from_env(),
    )


def _load_validated(cfg: RunConfig) -> DatasetRegistry:
    registry = load_manifest(cfg.manifest)
    report = validate_registry(registry)
    if not report.ok:
        for entry_id, message in report.issues:
            print(f"invalid registry: {entry_id}: {message}", file=sys.stderr)
        raise ClinrelError(f"registry validation failed with {len(report.issues)} issue(s)")
    return registry


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / name
    path.write_text(text)
    return path


def _sweep_iterations(cfg: RunConfig, registry: DatasetRegistry) -> list[int]:
    its = cfg.iterations if cfg.iterations is not None else registry.iterations()
    if not its:
        raise ClinrelError("no iterations to sweep (none in config or registry)")
    return its


def _render_fmt(fmt: str) -> str:
    return "markdown" if fmt == "md" else fmt


def _write_sweep_outputs(cfg: RunConfig, table: SweepTable, selection) -> None:
    for fmt in cfg.formats:
        _write(cfg, f"sweep.{fmt}", render_sweep_report(table, selection, _render_fmt(fmt)))


def _rows_from_precomputed(path: Path) -> list[ComparisonRow]:
    doc = json.loads(Path(path).read_text())
    rows_doc = doc["rows"] if isinstance(doc, dict) else doc
    rows = []
    for row in rows_doc:
        ests = {}
        for column in ("same_ad", "cross_ad", "same_nonad", "cross_nonad"):
            cell = row[column]
            ests[column] = KidEstimate(
                mean=float(cell["mean"]),
                std=float(cell.get("std", 0.0)),
                n_subsets=int(cell.get("n_subsets", 0)),
                subset_size=int(cell.get("subset_size", 0)),
            )
        rows.append(ComparisonRow(iteration=int(row["iteration"]), **ests))
    return rows


def cmd_validate(args) -> int:
    registry = load_manifest(args.manifest)
    report = validate_registry(registry)
    if report.ok:
        print(f"ok: {len(registry.entries)} entries validated")
        return 0
    for entry_id, message in report.issues:
        print(f"{entry_id}: {message}")
    return 1


def cmd_sweep(args) -> int:
    cfg = _build_config(args)
    if getattr(args, "precomputed", None):
        table = make_sweep_table(_rows_from_precomputed(args.precomputed), cfg.classes)
    else:
        registry = _load_validated(cfg)
        iterations = _sweep_iterations(cfg, registry)
        table = iteration_sweep(
            registry, iterations, cfg.kid, cfg.classes, max_workers=cfg.threads
        )
    selection = select_iteration(table, cfg.lambda_)
    _write_sweep_outputs(cfg, table, selection)
    print(
        f"sweep: {len(table.rows)} iterations, chosen {selection.chosen_iteration} "
        f"(lambda={selection.lambda_:g})"
    )
    return 0


def _coords_csv(result, labels) -> str:
    lines = ["index,x,y,source,class"]
    for i, ((x, y), (source, klass)) in enumerate(zip(result.coords, labels)):
        lines.append(f"{i},{float(x)!r},{float(y)!r},{source},{klass}")
    return "\n".join(lines) + "\n"


def _trace_csv(result) -> str:
    lines = ["iter,kl"]
    for i, kl in enumerate(result.kl_trace):
        lines.append(f"{i},{float(kl)!r}")
    lines.append(f"final,{float(result.final_kl)!r}")
    return "\n".join(lines) + "\n"


def _embed_entries(cfg: RunConfig, registry: DatasetRegistry, entries, stem: str):
    import numpy as np

    from .features import FeatureSet, load_feature_file

    parts, labels = [], []
    for e in entries:
        fset = load_feature_file(registry.resolve_path(e), id=e.id)
        parts.append(fset.data)
        labels.extend([(e.source.value, e.class_label)] * fset.count)
    stacked = FeatureSet(data=np.vstack(parts))
    result = tsne_embed(stacked, cfg.tsne)
    render_scatter(result, labels, path=cfg.out / f"{stem}.svg")
    _write(cfg, f"{stem}_coords.csv", _coords_csv(result, labels))
    _write(cfg, f"{stem}_kl.csv", _trace_csv(result))
    return result


def _iteration_entry_sets(cfg: RunConfig, registry: DatasetRegistry, iterations):
    sets = []
    for it in iterations:
        entries = [
            e
            for e in registry.entries
            if (e.source is Source.REAL and e.class_label in cfg.classes)
            or (e.source is Source.SYNTHETIC and e.iteration == it and e.class_label in cfg.classes)
        ]
        sets.append((it, entries))
    return sets


def _run_tsne_plots(cfg: RunConfig, registry: DatasetRegistry, iterations) -> list:
    cfg.out.mkdir(parents=True, exist_ok=True)
    work = _iteration_entry_sets(cfg, registry, iterations)

    def job(item):
        it, entries = item
        return it, _embed_entries(cfg, registry, entries, f"tsne_{it}")

    if cfg.threads <= 1 or len(work) == 1:
        return [job(item) for item in work]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(job, work))


def cmd_tsne(args) -> int:
    cfg = _build_config(args)
    registry = _load_validated(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if args.entry_ids:
        by_id = {e.id: e for e in registry.entries}
        missing = [i for i in args.entry_ids if i not in by_id]
        if missing:
            raise ClinrelError(f"unknown entry ids: {', '.join(missing)}")
        result = _embed_entries(
            cfg, registry, [by_id[i] for i in args.entry_ids], "tsne_selected"
        )
        print(f"tsne: {result.coords.shape[0]} points, final KL {result.final_kl:.4f}")
        return 0
    iterations = _sweep_iterations(cfg, registry)
    results = _run_tsne_plots(cfg, registry, iterations)
    for it, result in results:
        print(f"tsne: iteration {it}, final KL {result.final_kl:.4f}")
    return 0


def cmd_classify(args) -> int:
    cfg = _build_config(args)
    registry = _load_validated(cfg)
    report = augmentation_experiment(
        registry, cfg.logreg, class_labels=cfg.classes, iteration=args.iteration
    )
    for fmt in cfg.formats:
        _write(cfg, f"augmentation.{fmt}", render_aug_report(report, _render_fmt(fmt)))
    print(
        "classify: balanced accuracy "
        f"real={report.real_only.balanced_accuracy:.4f} "
        f"real+synthetic={report.real_plus_synth.balanced_accuracy:.4f}"
    )
    return 0


def cmd_report(args) -> int:
    cfg = _build_config(args)
    registry = _load_validated(cfg)
    iterations = _sweep_iterations(cfg, registry)
    table = iteration_sweep(
        registry, iterations, cfg.kid, cfg.classes, max_workers=cfg.threads
    )
    selection = select_iteration(table, cfg.lambda_)
    _write_sweep_outputs(cfg, table, selection)
    tsne_results = dict(_run_tsne_plots(cfg, registry, iterations))

    chosen = selection.chosen_iteration
    synth_at_chosen = [
        e
        for e in registry.find(Source.SYNTHETIC, iteration=chosen)
        if e.class_label in cfg.classes
    ]
    aug_iteration = chosen if synth_at_chosen else None
    aug = augmentation_experiment(
        registry, cfg.logreg, class_labels=cfg.classes, iteration=aug_iteration
    )
    for fmt in cfg.formats:
        _write(cfg, f"augmentation.{fmt}", render_aug_report(aug, _render_fmt(fmt)))

    lines = ["# Clinical relevance report", ""]
    lines.append("## Strategy 1: directional KID sweep")
    lines.append("")
    lines.append(render_sweep_report(table, selection, "markdown").rstrip())
    lines.append("")
    lines.append("## Strategy 2: t-SNE embeddings")
    lines.append("")
    lines.append("| Iteration | Plot | Final KL | Score |")
    lines.append("| --- | --- | --- | --- |")
    for it in iterations:
        result = tsne_results[it]
        lines.append(
            f"| {it} | [tsne_{it}.svg](tsne_{it}.svg) | {result.final_kl:.4f} "
            f"| {selection.score_per_iteration[it]:.6f} |"
        )
    lines.append("")
    lines.append("## Strategy 3: augmentation experiment")
    lines.append("")
    which = f"iteration {aug_iteration}" if aug_iteration is not None else "all iterations"
    lines.append(f"Synthetic training sets: {which}.")
    lines.append("")
    lines.append(render_aug_report(aug, "markdown").rstrip())
    lines.append("")
    _write(cfg, "report.md", "\n".join(lines) + "\n")
    print(f"report: wrote {cfg.out / 'report.md'} (chosen iteration {chosen})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clinrel",
        description="Evaluate the clinical relevance of synthetic feature sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", help="registry manifest JSON (overrides config)")
        p.add_argument("--config", help="JSON run config; flags override its values")
        p.add_argument("--out", help="output directory (default: 'out')")
        p.add_argument("--seed", type=int, help="override kid and tsne seeds")
        p.add_argument("--format", choices=_FORMATS, help="restrict report formats")

    p = sub.add_parser("validate", help="check every file referenced by a manifest")
    p.add_argument("manifest", help="registry manifest JSON")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="directional KID table across iterations")
    common(p)
    p.add_argument(
        "--precomputed",
        help="JSON file of precomputed rows to render instead of estimating",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tsne", help="t-SNE scatter plots (per iteration or by entry id)")
    common(p)
    p.add_argument("entry_ids", nargs="*", help="plot these entries together instead")
    p.set_defaults(func=cmd_tsne)

    p = sub.add_parser("classify", help="real vs real+synthetic augmentation experiment")
    common(p)
    p.add_argument("--iteration", type=int, help="restrict synthetic sets to one iteration")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", help="run all three strategies and write report.md")
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ClinrelError, ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
