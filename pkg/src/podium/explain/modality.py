"""Normalized modality-level attribution shares.

For one model, mean absolute attribution per feature over an
evaluation set is summed within each modality's index range and
normalized so the four shares total one. Shares reflect signal use,
not block width: a handful of informative features can out-attribute
thousands of redundant ones.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from podium.errors import ValidationError
from podium.boost.model import BoostedModel
from podium.explain.treeshap import tree_shap
from podium.features.fuse import MODALITY_ORDER

SHARE_ORDER = ("acoustic", "facial", "oculomotor", "textual")


@dataclass
class ModalityAttribution:
    dimension: str
    shares: dict[str, float]
    n_rows: int
    flags: dict = field(default_factory=dict)

    def validate(self) -> None:
        vals = np.array([self.shares[m] for m in SHARE_ORDER])
        if (vals < 0).any():
            raise ValidationError("negative modality share")
        if abs(vals.sum() - 1.0) > 1e-9:
            raise ValidationError(f"modality shares sum to {vals.sum()!r}, not 1")


def mean_abs_attribution(model: BoostedModel, X_eval: np.ndarray) -> np.ndarray:
    X_eval = np.atleast_2d(np.asarray(X_eval, dtype=np.float64))
    if len(X_eval) < 1:
        raise ValidationError("attribution needs at least one evaluation row")
    acc = np.zeros(model.n_features)
    for row in X_eval:
        acc += np.abs(tree_shap(model, row).phi)
    return acc / len(X_eval)


def modality_attribution(
    model: BoostedModel,
    X_eval: np.ndarray,
    modality_index: dict[str, tuple[int, int]],
) -> ModalityAttribution:
    ranges = sorted(modality_index.values())
    pos = 0
    for lo, hi in ranges:
        if lo != pos:
            raise ValidationError("modality ranges must partition the feature space")
        pos = hi
    if pos != model.n_features:
        raise ValidationError(
            f"modality ranges cover [0, {pos}), model has {model.n_features} features"
        )

    mean_abs = mean_abs_attribution(model, X_eval)
    totals = {m: float(mean_abs[lo:hi].sum()) for m, (lo, hi) in modality_index.items()}
    grand = sum(totals.values())
    flags = {}
    if grand == 0:
        shares = {m: 1.0 / len(totals) for m in totals}
        flags["uniform"] = "zero total attribution"
    else:
        shares = {m: totals[m] / grand for m in totals}
    att = ModalityAttribution(model.dimension, shares, len(np.atleast_2d(X_eval)), flags)
    att.validate()
    return att


def write_attribution_table(path, rows: list[ModalityAttribution]) -> None:
    """Delimited export, one row per dimension, shares in fixed order."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["dimension", *SHARE_ORDER])
        for r in rows:
            w.writerow([r.dimension, *[f"{r.shares[m]:.3f}" for m in SHARE_ORDER]])


def read_attribution_table(path) -> list[dict]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["dimension", *SHARE_ORDER]:
            raise ValidationError(f"bad attribution header: {header}")
        return [
            {"dimension": row[0], **{m: float(v) for m, v in zip(SHARE_ORDER, row[1:])}}
            for row in reader
        ]


assert set(SHARE_ORDER) == set(MODALITY_ORDER)
