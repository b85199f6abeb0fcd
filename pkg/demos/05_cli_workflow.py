"""The full CLI workflow: validate -> sweep -> tsne -> classify -> report.

Generates a complete synthetic workspace (feature files + manifest + run
config), then drives the installed command-line interface end to end. The
same commands work from a shell:

    clinrel validate manifest.json
    clinrel sweep    --config config.json
    clinrel tsne     --config config.json
    clinrel classify --config config.json
    clinrel report   --config config.json
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from clinrel import FeatureSet, write_feature_file
from clinrel.cli import main

workdir = Path(tempfile.mkdtemp(prefix="clinrel_cli_"))
rng = np.random.RandomState(123)
dim = 8
center_ad = np.r_[2.0, np.zeros(dim - 1)]
center_nonad = -center_ad

entries = []


def emit(name, data, source, klass, iteration=None, split=None):
    write_feature_file(FeatureSet(data=data.astype(np.float32)), workdir / f"{name}.fvec")
    e = {"id": name, "path": f"{name}.fvec", "source": source, "class": klass}
    if iteration is not None:
        e["iteration"] = iteration
    if split is not None:
        e["split"] = split
    entries.append(e)


emit("real_ad_train", rng.randn(40, dim) + center_ad, "real", "AD", split="train")
emit("real_nonad_train", rng.randn(40, dim) + center_nonad, "real", "NonAD", split="train")
emit("real_ad_test", rng.randn(30, dim) + center_ad, "real", "AD", split="test")
emit("real_nonad_test", rng.randn(30, dim) + center_nonad, "real", "NonAD", split="test")
for iteration in (1000, 2000, 4000):
    frac = iteration / 4000
    emit(f"synth_ad_{iteration}", rng.randn(30, dim) + frac * center_ad, "synthetic", "AD", iteration=iteration)
    emit(f"synth_nonad_{iteration}", rng.randn(30, dim) + frac * center_nonad, "synthetic", "NonAD", iteration=iteration)

(workdir / "manifest.json").write_text(json.dumps(entries, indent=2))
(workdir / "config.json").write_text(
    json.dumps(
        {
            "manifest": "manifest.json",
            "out": str(workdir / "out"),
            "lambda": 1.0,
            "kid": {"subset_size": 30, "n_subsets": 20, "seed": 1},
            "tsne": {"perplexity": 12.0, "max_iter": 300, "seed": 2},
            "logreg": {},
        },
        indent=2,
    )
)

for argv in (
    ["validate", str(workdir / "manifest.json")],
    ["report", "--config", str(workdir / "config.json")],
):
    print(f"$ clinrel {' '.join(argv)}")
    code = main(argv)
    print(f"(exit {code})\n")

out = workdir / "out"
print("outputs:")
for p in sorted(out.iterdir()):
    print(f"  {p.relative_to(workdir)}  ({p.stat().st_size} bytes)")
print()
print((out / "report.md").read_text())
