"""Dataset registry: a JSON manifest cataloguing feature files by role.

Each entry carries (source, class, iteration, split) so the comparison
protocol and the augmentation experiment can look sets up by role. Manifest
paths are resolved relative to the manifest's own directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import FvecFormatError, ManifestError, MissingRoleError
from .features import FeatureSet, load_feature_file


class Source(Enum):
    REAL = "real"
    SYNTHETIC = "synthetic"


class Split(Enum):
    TRAIN = "train"
    TEST = "test"
    UNSPLIT = "unsplit"


@dataclass(frozen=True)
class DatasetEntry:
    id: str
    path: str
    source: Source
    class_label: str
    iteration: int | None = None
    split: Split = Split.UNSPLIT

    def __post_init__(self):
        if self.source is Source.REAL and self.iteration is not None:
            raise ManifestError(
                f"entry '{self.id}': iteration is only valid for synthetic entries"
            )
        if self.iteration is not None and self.iteration < 0:
            raise ManifestError(f"entry '{self.id}': iteration must be non-negative")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[tuple[str, str], ...]

    @classmethod
    def from_issues(cls, issues: list[tuple[str, str]]) -> "ValidationReport":
        return cls(ok=not issues, issues=tuple(issues))


@dataclass(frozen=True)
class DatasetRegistry:
    """Immutable catalog of dataset entries sharing one embedding dimension."""

    entries: tuple[DatasetEntry, ...]
    dim: int | None = None
    base_dir: Path | None = None

    def resolve_path(self, entry: DatasetEntry) -> Path:
        p = Path(entry.path)
        if not p.is_absolute() and self.base_dir is not None:
            p = self.base_dir / p
        return p

    def find(
        self,
        source: Source | None = None,
        class_label: str | None = None,
        iteration: int | None = None,
        split: Split | None = None,
    ) -> list[DatasetEntry]:
        """Entries matching every given filter, in manifest order."""
        out = []
        for e in self.entries:
            if source is not None and e.source is not source:
                continue
            if class_label is not None and e.class_label != class_label:
                continue
            if iteration is not None and e.iteration != iteration:
                continue
            if split is not None and e.split is not split:
                continue
            out.append(e)
        return out

    def gather(
        self,
        source: Source,
        class_label: str,
        iteration: int | None = None,
        split: Split | None = None,
    ) -> FeatureSet:
        """Load and row-stack every entry for a role; error if none exist."""
        found = self.find(source, class_label, iteration, split)
        if not found:
            role = f"{source.value}/{class_label}"
            if iteration is not None:
                role += f"@{iteration}"
            if split is not None:
                role += f" [{split.value}]"
            raise MissingRoleError(f"no {role}")
        sets = [load_feature_file(self.resolve_path(e), id=e.id) for e in found]
        dims = {s.dim for s in sets}
        if len(dims) > 1:
            raise ManifestError(f"role {source.value}/{class_label}: mixed dims {sorted(dims)}")
        data = sets[0].data if len(sets) == 1 else np.vstack([s.data for s in sets])
        return FeatureSet(data=data, id="+".join(e.id for e in found))

    def iterations(self) -> list[int]:
        """Sorted distinct iterations over synthetic entries."""
        its = {e.iteration for e in self.entries if e.source is Source.SYNTHETIC}
        return sorted(i for i in its if i is not None)


def _parse_entry(obj: dict, index: int) -> DatasetEntry:
    try:
        entry_id = obj["id"]
        path = obj["path"]
        source = Source(obj["source"])
        class_label = obj["class"]
    except KeyError as e:
        raise ManifestError(f"entry #{index}: missing key {e.args[0]!r}") from None
    except ValueError:
        raise ManifestError(
            f"entry #{index}: source must be 'real' or 'synthetic', got {obj.get('source')!r}"
        ) from None
    iteration = obj.get("iteration")
    if iteration is not None:
        iteration = int(iteration)
    split = Split(obj["split"]) if "split" in obj else Split.UNSPLIT
    return DatasetEntry(
        id=str(entry_id),
        path=str(path),
        source=source,
        class_label=str(class_label),
        iteration=iteration,
        split=split,
    )


def load_manifest(path: str | Path) -> DatasetRegistry:
    """Parse a manifest JSON file into a registry (feature files stay closed).

    Raises ManifestError on duplicate ids, bad enum values, or a document
    that is not a JSON array of entry objects.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path}: unparseable manifest: {e}") from None
    if not isinstance(doc, list):
        raise ManifestError(f"{path}: manifest must be a JSON array of entries")
    entries = []
    seen: set[str] = set()
    for i, obj in enumerate(doc):
        if not isinstance(obj, dict):
            raise ManifestError(f"{path}: entry #{i} is not an object")
        entry = _parse_entry(obj, i)
        if entry.id in seen:
            raise ManifestError(f"{path}: duplicate id '{entry.id}'")
        seen.add(entry.id)
        entries.append(entry)
    return DatasetRegistry(entries=tuple(entries), base_dir=path.parent)


def validate_registry(registry: DatasetRegistry) -> ValidationReport:
    """Open every referenced file and report problems instead of raising.

    Checks: file present and well-formed, all dims equal (to registry.dim
    when set, else to the first readable file's dim).
    """
    issues: list[tuple[str, str]] = []
    expected_dim = registry.dim
    for entry in registry.entries:
        p = registry.resolve_path(entry)
        if not p.is_file():
            issues.append((entry.id, f"file not found: {p}"))
            continue
        try:
            fset = load_feature_file(p, id=entry.id)
        except FvecFormatError as e:
            issues.append((entry.id, str(e)))
            continue
        if expected_dim is None:
            expected_dim = fset.dim
        elif fset.dim != expected_dim:
            issues.append((entry.id, f"dim mismatch {fset.dim} != {expected_dim}"))
    return ValidationReport.from_issues(issues)
