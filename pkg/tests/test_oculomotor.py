import numpy as np
import pytest

from podium.errors import ValidationError
from podium.features.oculomotor import GazeConfig, extract_oculomotor

FPS = 30.0


def eye_frames(points_xy, jitter=0.0, seed=0):
    """[n, 30, 3] eye landmarks whose centroid follows points_xy."""
    rng = np.random.default_rng(seed)
    n = len(points_xy)
    base = rng.random((30, 3)) * 0.01
    frames = np.repeat(base[None], n, axis=0)
    frames[:, :, 0] += np.asarray(points_xy)[:, 0][:, None]
    frames[:, :, 1] += np.asarray(points_xy)[:, 1][:, None]
    if jitter:
        frames += jitter * rng.standard_normal(frames.shape)
    return frames


def test_output_length_is_7():
    gaze = np.tile([0.5, 0.5], (60, 1))
    out = extract_oculomotor(eye_frames(gaze), FPS)
    assert out.shape == (7,)


def test_perfectly_fixed_gaze():
    n = 60
    gaze = np.tile([0.5, 0.5], (n, 1))
    out = extract_oculomotor(eye_frames(gaze), FPS)
    mean_fix, fix_rate, sacc_rate, amp, sdx, sdy, on_cam = out
    assert mean_fix == pytest.approx(n / FPS)
    assert sacc_rate == 0.0
    assert amp == 0.0
    assert sdx == pytest.approx(0.0, abs=1e-12)
    assert sdy == pytest.approx(0.0, abs=1e-12)
    assert on_cam == 1.0


def test_alternating_gaze_saccade_rate_matches_direct_count():
    """A/B alternation every 250 ms; the oracle is the direct flip count."""
    duration = 10.0
    n = int(duration * FPS)
    a, b = np.array([0.3, 0.5]), np.array([0.7, 0.5])
    points = np.array([a if int(t / 0.25) % 2 == 0 else b for t in np.arange(n) / FPS])

    flips = int(np.sum(np.any(points[1:] != points[:-1], axis=1)))
    assert flips == 39  # 40 dwell periods in 10 s

    cfg = GazeConfig(dispersion_threshold=0.05, min_fixation_s=0.1)
    out = extract_oculomotor(eye_frames(points), FPS, cfg)
    sacc_rate = out[2]
    assert sacc_rate == pytest.approx(flips / duration, abs=0.5)
    assert out[3] == pytest.approx(0.4, abs=0.02)  # saccade amplitude = |a - b|


def test_on_camera_ratio_with_explicit_calibration():
    n = 90
    points = np.tile([0.5, 0.5], (n, 1))
    points[60:] = [0.9, 0.9]  # last third looks away
    out = extract_oculomotor(
        eye_frames(points), FPS,
        GazeConfig(on_camera_radius=0.05),
        calibration=np.array([0.5, 0.5]),
    )
    assert out[6] == pytest.approx(2 / 3, abs=0.02)


def test_two_frames_minimum():
    with pytest.raises(ValidationError):
        extract_oculomotor(eye_frames(np.tile([0.5, 0.5], (1, 1))), FPS)


def test_missing_eye_landmarks_error():
    with pytest.raises(ValidationError):
        extract_oculomotor(np.zeros((10, 0, 3)), FPS)
    bad = eye_frames(np.tile([0.5, 0.5], (10, 1)))
    bad[3, 2, 0] = np.nan
    with pytest.raises(ValidationError):
        extract_oculomotor(bad, FPS)
