"""Shared fixtures: golden sweep values and synthetic registries on disk."""

import json

import numpy as np
import pytest

from clinrel.features import FeatureSet, write_feature_file
from clinrel.kid import KidEstimate
from clinrel.protocol import ComparisonRow

# Golden 8-step sweep used across report/selection tests. Known extrema:
# same_ad min 0.069 at {4000, 6000, 8000}; cross_ad max 0.118 at {2000};
# same_nonad min 0.081 at {8000}; cross_nonad max 0.067 at {2000}.
# With lambda=1 the combined score is minimized at 8000 (score -0.016).
GOLDEN_SWEEP = {
    1000: ((0.073, 0.002), (0.111, 0.003), (0.094, 0.003), (0.061, 0.001)),
    2000: ((0.079, 0.002), (0.118, 0.004), (0.100, 0.003), (0.067, 0.002)),
    3000: ((0.077, 0.002), (0.114, 0.004), (0.087, 0.003), (0.061, 0.001)),
    4000: ((0.069, 0.001), (0.106, 0.004), (0.085, 0.003), (0.057, 0.002)),
    5000: ((0.074, 0.002), (0.114, 0.004), (0.083, 0.003), (0.056, 0.002)),
    6000: ((0.069, 0.002), (0.104, 0.003), (0.087, 0.003), (0.064, 0.002)),
    7000: ((0.076, 0.002), (0.115, 0.003), (0.091, 0.003), (0.064, 0.002)),
    8000: ((0.069, 0.002), (0.105, 0.004), (0.081, 0.003), (0.061, 0.002)),
}


def golden_rows():
    rows = []
    for iteration, cells in GOLDEN_SWEEP.items():
        ests = [
            KidEstimate(mean=m, std=s, n_subsets=100, subset_size=100)
            for (m, s) in cells
        ]
        rows.append(
            ComparisonRow(
                iteration=iteration,
                same_ad=ests[0],
                cross_ad=ests[1],
                same_nonad=ests[2],
                cross_nonad=ests[3],
            )
        )
    return rows


@pytest.fixture
def reference_rows():
    return golden_rows()


def build_sweep_registry(
    root,
    iterations=(1000, 2000),
    n_real=24,
    n_synth=20,
    dim=6,
    seed=123,
    with_splits=False,
):
    """Write a small two-class registry to disk.

    Real AD sits at +2 in the first coordinate, real NonAD at -2. Synthetic
    sets interpolate toward their own class as the iteration grows, so
    same-class KID falls and cross-class KID stays high.
    """
    rng = np.random.RandomState(seed)
    root.mkdir(parents=True, exist_ok=True)
    center_ad = np.zeros(dim)
    center_ad[0] = 2.0
    center_nonad = np.zeros(dim)
    center_nonad[0] = -2.0
    entries = []

    def emit(name, data, source, klass, iteration=None, split=None):
        write_feature_file(FeatureSet(data=data.astype(np.float32)), root / f"{name}.fvec")
        entry = {"id": name, "path": f"{name}.fvec", "source": source, "class": klass}
        if iteration is not None:
            entry["iteration"] = iteration
        if split is not None:
            entry["split"] = split
        entries.append(entry)

    if with_splits:
        emit("real_ad_train", rng.randn(n_real, dim) + center_ad, "real", "AD", split="train")
        emit("real_nonad_train", rng.randn(n_real, dim) + center_nonad, "real", "NonAD", split="train")
        emit("real_ad_test", rng.randn(n_real, dim) + center_ad, "real", "AD", split="test")
        emit("real_nonad_test", rng.randn(n_real, dim) + center_nonad, "real", "NonAD", split="test")
    else:
        emit("real_ad", rng.randn(n_real, dim) + center_ad, "real", "AD")
        emit("real_nonad", rng.randn(n_real, dim) + center_nonad, "real", "NonAD")

    for it in iterations:
        frac = it / max(iterations)
        emit(
            f"synth_ad_{it}",
            rng.randn(n_synth, dim) + frac * center_ad,
            "synthetic",
            "AD",
            iteration=it,
        )
        emit(
            f"synth_nonad_{it}",
            rng.randn(n_synth, dim) + frac * center_nonad,
            "synthetic",
            "NonAD",
            iteration=it,
        )

    manifest = root / "manifest.json"
    manifest.write_text(json.dumps(entries, indent=2))
    return manifest
