"""Feature sets and the FVEC binary file format.

A feature set is an n x d matrix of finite float32 embeddings plus a free-form
label. On disk it is a little-endian FVEC file:

    bytes 0-3    ASCII "FVEC"
    bytes 4-7    u32 format version (currently 1)
    bytes 8-11   u32 count (rows)
    bytes 12-15  u32 dim (columns)
    bytes 16-    count*dim IEEE-754 binary32 values, row-major

Writes are bit-deterministic; reads verify magic, version, and that the
declared count*dim payload is fully present.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FvecFormatError

FVEC_MAGIC = b"FVEC"
FVEC_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def _first_nonfinite(data: np.ndarray) -> tuple[int, int] | None:
    bad = np.argwhere(~np.isfinite(data))
    if bad.size == 0:
        return None
    row, col = bad[0]
    return int(row), int(col)


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """Immutable matrix of per-sample embedding vectors.

    ``data`` is copied to a read-only C-contiguous float32 array. Equality
    compares shape and values; the ``id`` label is metadata and excluded.
    """

    data: np.ndarray
    id: str = ""

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float32, order="C", copy=True)
        if arr.ndim != 2:
            raise ValueError(f"feature data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"feature data must be at least 1x1, got {arr.shape}")
        bad = _first_nonfinite(arr)
        if bad is not None:
            raise ValueError(f"non-finite value at ({bad[0]}, {bad[1]})")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureSet):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return f"FeatureSet(id={self.id!r}, count={self.count}, dim={self.dim})"


def write_feature_file(fset: FeatureSet, path: str | Path) -> None:
    """Write ``fset`` to ``path`` in FVEC format (bit-deterministic)."""
    bad = _first_nonfinite(fset.data)
    if bad is not None:
        raise FvecFormatError(f"non-finite value at ({bad[0]}, {bad[1]})")
    header = _HEADER.pack(FVEC_MAGIC, FVEC_VERSION, fset.count, fset.dim)
    payload = np.ascontiguousarray(fset.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def load_feature_file(path: str | Path, id: str | None = None) -> FeatureSet:
    """Read an FVEC file back into a FeatureSet.

    Raises FvecFormatError on bad magic, unsupported version, a payload
    shorter than the declared count*dim, or non-finite values.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise FvecFormatError(f"{path}: truncated: header needs {_HEADER.size} bytes, got {len(raw)}")
    magic, version, count, dim = _HEADER.unpack_from(raw)
    if magic != FVEC_MAGIC:
        raise FvecFormatError(f"{path}: bad magic {magic!r}")
    if version != FVEC_VERSION:
        raise FvecFormatError(f"{path}: unsupported version {version}")
    if count < 1 or dim < 1:
        raise FvecFormatError(f"{path}: count and dim must be >= 1, got {count}x{dim}")
    expected = count * dim * 4
    got = len(raw) - _HEADER.size
    if got < expected:
        raise FvecFormatError(f"{path}: truncated: expected {expected} bytes, got {got}")
    data = np.frombuffer(raw, dtype="<f4", count=count * dim, offset=_HEADER.size)
    data = data.reshape(count, dim)
    bad = _first_nonfinite(data)
    if bad is not None:
        raise FvecFormatError(f"{path}: non-finite value at ({bad[0]}, {bad[1]})")
    return FeatureSet(data=data, id=path.stem if id is None else id)
