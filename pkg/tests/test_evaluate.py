import numpy as np
import pytest

from podium.errors import ValidationError
from podium.boost.evaluate import aggregate_video_score, evaluate


class Identity:
    """Model stub: prediction = first feature."""

    def predict(self, X):
        return np.asarray(X)[:, 0].astype(np.float64)


def test_perfect_fit():
    y = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    rep = evaluate(Identity(), y[:, None], y, dimension="Topic")
    assert rep.segment.r2 == pytest.approx(1.0)
    assert rep.segment.mae == pytest.approx(0.0)
    assert rep.segment.rho == pytest.approx(1.0)


def test_reversed_ranking_rho_minus_one():
    y = np.array([1.0, 2.0, 3.0, 4.0])
    rep = evaluate(Identity(), (-y)[:, None], y)
    assert rep.segment.rho == pytest.approx(-1.0)


def test_zero_variance_target_flagged():
    y = np.full(5, 3.0)
    rep = evaluate(Identity(), y[:, None], y)
    assert np.isnan(rep.segment.r2)
    assert "r2_undefined" in rep.segment.flags


class TestVideoAggregation:
    def test_singleton(self):
        assert aggregate_video_score([3.7]) == pytest.approx(3.7)

    def test_mean(self):
        assert aggregate_video_score([1.0, 5.0]) == pytest.approx(3.0)

    def test_clamps_before_averaging(self):
        assert aggregate_video_score([5.4, 5.0]) == pytest.approx(5.0)
        assert aggregate_video_score([0.0, 3.0]) == pytest.approx(2.0)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            aggregate_video_score([])


def test_video_level_metrics_group_by_bundle():
    preds = np.array([2.0, 2.2, 4.0, 4.2])
    y = np.array([2.0, 2.0, 4.0, 4.0])
    rep = evaluate(Identity(), preds[:, None], y, bundle_ids=["a", "a", "b", "b"])
    assert rep.video is not None
    assert rep.video.n == 2
    assert rep.video.mae == pytest.approx(0.15, abs=1e-9)
