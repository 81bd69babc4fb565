"""Early fusion of the four modality blocks and the feature-matrix file.

Block order is fixed: facial (3,780), oculomotor (7), acoustic (203),
textual (384), for 4,374 total. The binary matrix file stores one row
per window as little-endian 32-bit floats, with a CSV sidecar carrying
window, bundle and speaker ids plus the seven labels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from podium.dimensions import DIMENSIONS
from podium.errors import FormatError, ValidationError
from podium.features.acoustic import ACOUSTIC_DIM
from podium.features.facial import FACIAL_DIM
from podium.features.oculomotor import OCULOMOTOR_DIM
from podium.features.text import TEXT_DIM

MODALITY_ORDER = ("facial", "oculomotor", "acoustic", "textual")
MODALITY_DIMS = {
    "facial": FACIAL_DIM,
    "oculomotor": OCULOMOTOR_DIM,
    "acoustic": ACOUSTIC_DIM,
    "textual": TEXT_DIM,
}
FUSED_DIM = sum(MODALITY_DIMS.values())


def _ranges() -> dict[str, tuple[int, int]]:
    out, pos = {}, 0
    for name in MODALITY_ORDER:
        out[name] = (pos, pos + MODALITY_DIMS[name])
        pos += MODALITY_DIMS[name]
    return out


MODALITY_RANGES = _ranges()


@dataclass
class FusedVector:
    values: np.ndarray
    modality_index: dict[str, tuple[int, int]]


def fuse(facial, oculomotor, acoustic, textual) -> FusedVector:
    blocks = {
        "facial": np.asarray(facial, dtype=np.float64),
        "oculomotor": np.asarray(oculomotor, dtype=np.float64),
        "acoustic": np.asarray(acoustic, dtype=np.float64),
        "textual": np.asarray(textual, dtype=np.float64),
    }
    for name in MODALITY_ORDER:
        want = MODALITY_DIMS[name]
        if blocks[name].shape != (want,):
            raise ValidationError(
                f"{name} block has shape {blocks[name].shape}, expected ({want},)"
            )
    values = np.concatenate([blocks[n] for n in MODALITY_ORDER])
    if not np.isfinite(values).all():
        bad = [n for n in MODALITY_ORDER if not np.isfinite(blocks[n]).all()]
        raise ValidationError(f"non-finite values in block(s): {bad}")
    return FusedVector(values, dict(MODALITY_RANGES))


@dataclass
class FeatureMatrix:
    """Fused rows plus their window/bundle/speaker index and labels."""

    X: np.ndarray                  # [n, 4374] float32
    window_ids: list[str]
    bundle_ids: list[str]
    speaker_ids: list[str]
    labels: np.ndarray | None      # [n, 7] or None

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != FUSED_DIM:
            raise ValidationError(f"feature matrix must be [n, {FUSED_DIM}]")
        n = len(self.X)
        if not (len(self.window_ids) == len(self.bundle_ids) == len(self.speaker_ids) == n):
            raise ValidationError("sidecar length mismatch")
        if self.labels is not None and self.labels.shape != (n, len(DIMENSIONS)):
            raise ValidationError("labels must be [n, 7]")


def write_matrix(prefix, matrix: FeatureMatrix) -> tuple[Path, Path]:
    prefix = Path(prefix)
    bin_path = prefix.with_suffix(".f32")
    idx_path = prefix.with_suffix(".index.csv")
    matrix.X.astype("<f4").tofile(bin_path)
    with open(idx_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["row", "window_id", "bundle_id", "speaker_id", *DIMENSIONS])
        for i in range(len(matrix.X)):
            labels = (
                [repr(float(v)) for v in matrix.labels[i]]
                if matrix.labels is not None
                else [""] * len(DIMENSIONS)
            )
            w.writerow([i, matrix.window_ids[i], matrix.bundle_ids[i],
                        matrix.speaker_ids[i], *labels])
    return bin_path, idx_path


def read_matrix(prefix) -> FeatureMatrix:
    prefix = Path(prefix)
    bin_path = prefix.with_suffix(".f32")
    idx_path = prefix.with_suffix(".index.csv")
    raw = np.fromfile(bin_path, dtype="<f4")
    if raw.size % FUSED_DIM:
        raise FormatError(f"{bin_path}: size {raw.size} not a multiple of {FUSED_DIM}")
    X = raw.reshape(-1, FUSED_DIM)
    window_ids, bundle_ids, speaker_ids, labels = [], [], [], []
    with open(idx_path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header[:4] != ["row", "window_id", "bundle_id", "speaker_id"]:
            raise FormatError(f"{idx_path}: bad sidecar header")
        for row in reader:
            window_ids.append(row[1])
            bundle_ids.append(row[2])
            speaker_ids.append(row[3])
            labels.append([float(v) for v in row[4:]] if row[4] else None)
    if len(window_ids) != len(X):
        raise FormatError(f"{idx_path}: {len(window_ids)} rows for {len(X)} matrix rows")
    have_labels = all(l is not None for l in labels) and labels
    return FeatureMatrix(
        X,
        window_ids,
        bundle_ids,
        speaker_ids,
        np.asarray(labels, dtype=np.float64) if have_labels else None,
    )
