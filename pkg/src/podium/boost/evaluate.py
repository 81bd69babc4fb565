"""Model evaluation: R-squared, MAE and Spearman at segment and video level."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from podium.errors import ValidationError
from podium.psych import spearman

SCORE_MIN, SCORE_MAX = 1.0, 5.0


@dataclass
class LevelMetrics:
    r2: float
    mae: float
    rho: float
    n: int
    flags: dict = field(default_factory=dict)


@dataclass
class EvalReport:
    dimension: str
    segment: LevelMetrics
    video: LevelMetrics | None = None


def _metrics(pred: np.ndarray, y: np.ndarray) -> LevelMetrics:
    pred = np.asarray(pred, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    mae = float(np.abs(pred - y).mean())
    sst = float(((y - y.mean()) ** 2).sum())
    flags = {}
    if sst == 0:
        r2 = np.nan
        flags["r2_undefined"] = "zero target variance"
    else:
        r2 = 1.0 - float(((y - pred) ** 2).sum()) / sst
    rho = spearman(pred, y) if len(y) >= 3 else np.nan
    return LevelMetrics(r2=r2, mae=mae, rho=rho, n=len(y), flags=flags)


def aggregate_video_score(segment_predictions) -> float:
    """Clamp each segment prediction to [1, 5], then average."""
    p = np.asarray(segment_predictions, dtype=np.float64)
    if p.size == 0:
        raise ValidationError("no segment predictions to aggregate")
    return float(np.clip(p, SCORE_MIN, SCORE_MAX).mean())


def evaluate(
    model,
    X_test: np.ndarray,
    y_test: np.ndarray,
    bundle_ids: list[str] | None = None,
    dimension: str | None = None,
) -> EvalReport:
    """Segment-level metrics, plus video-level when bundle ids are given."""
    pred = model.predict(X_test)
    report = EvalReport(
        dimension=dimension or getattr(model, "dimension", ""),
        segment=_metrics(pred, y_test),
    )
    if bundle_ids is not None:
        if len(bundle_ids) != len(pred):
            raise ValidationError("bundle_ids must align with test rows")
        order = sorted(set(bundle_ids))
        vp, vy = [], []
        y_arr = np.asarray(y_test, dtype=np.float64)
        for b in order:
            rows = [i for i, bid in enumerate(bundle_ids) if bid == b]
            vp.append(aggregate_video_score(pred[rows]))
            vy.append(float(y_arr[rows].mean()))
        report.video = _metrics(np.array(vp), np.array(vy))
    return report
