"""Does synthetic data help a downstream classifier?

Builds an imbalanced training registry (majority AD, minority NonAD), then
runs the augmentation experiment twice: once adding synthetic minority
samples drawn from the true minority distribution, once adding synthetic
sets whose labels contradict their geometry. Helpful augmentation lifts
minority recall; mislabeled augmentation drags balanced accuracy down.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from clinrel import FeatureSet, LogRegConfig, augmentation_experiment, load_manifest, render_aug_report, write_feature_file

workdir = Path(tempfile.mkdtemp(prefix="clinrel_aug_"))
rng = np.random.RandomState(99)
dim = 6
center_ad = np.r_[0.8, 0.8, np.zeros(dim - 2)]
center_nonad = -center_ad


def emit(name, n, center):
    data = (rng.randn(n, dim) + center).astype(np.float32)
    write_feature_file(FeatureSet(data=data), workdir / f"{name}.fvec")


emit("real_ad_train", 80, center_ad)
emit("real_nonad_train", 12, center_nonad)      # minority class
emit("real_ad_test", 60, center_ad)
emit("real_nonad_test", 60, center_nonad)
emit("synth_nonad_good", 68, center_nonad)      # same distribution, to parity
emit("synth_ad_bad", 40, center_nonad)          # swapped: label says AD,
emit("synth_nonad_bad", 40, center_ad)          # geometry says otherwise

real = [
    {"id": "real_ad_train", "path": "real_ad_train.fvec", "source": "real", "class": "AD", "split": "train"},
    {"id": "real_nonad_train", "path": "real_nonad_train.fvec", "source": "real", "class": "NonAD", "split": "train"},
    {"id": "real_ad_test", "path": "real_ad_test.fvec", "source": "real", "class": "AD", "split": "test"},
    {"id": "real_nonad_test", "path": "real_nonad_test.fvec", "source": "real", "class": "NonAD", "split": "test"},
]
good = real + [{"id": "synth_nonad_good", "path": "synth_nonad_good.fvec", "source": "synthetic", "class": "NonAD", "split": "train"}]
bad = real + [
    {"id": "synth_ad_bad", "path": "synth_ad_bad.fvec", "source": "synthetic", "class": "AD", "split": "train"},
    {"id": "synth_nonad_bad", "path": "synth_nonad_bad.fvec", "source": "synthetic", "class": "NonAD", "split": "train"},
]

for name, entries in [("good", good), ("bad", bad)]:
    (workdir / f"manifest_{name}.json").write_text(json.dumps(entries, indent=2))
    registry = load_manifest(workdir / f"manifest_{name}.json")
    report = augmentation_experiment(registry, LogRegConfig())
    print(f"=== {name} synthetic data ===")
    print(render_aug_report(report, "markdown"))
