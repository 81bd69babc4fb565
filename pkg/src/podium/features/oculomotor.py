"""Gaze-behavior indicators from eye-region landmarks.

The gaze proxy is the 2-D centroid of the eye-region landmarks per
frame (an iris-center estimate). Fixations come from dispersion
thresholding (I-DT): a candidate group of frames is a fixation when it
lasts at least `min_fixation_s` and its x plus y extent stays under
`dispersion_threshold`; saccades are the transitions between
consecutive fixations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from podium.errors import ValidationError

OCULOMOTOR_DIM = 7


@dataclass(frozen=True)
class GazeConfig:
    dispersion_threshold: float = 0.02   # normalized image units, x + y extent
    min_fixation_s: float = 0.100
    on_camera_radius: float = 0.05       # distance from calibration centroid


@dataclass
class Fixation:
    start: int   # frame index, inclusive
    end: int     # exclusive
    centroid: np.ndarray


def gaze_proxy(eye_landmarks: np.ndarray) -> np.ndarray:
    """[n_frames, 2] gaze point from [n_frames, k, 3] eye landmarks."""
    if eye_landmarks.ndim != 3 or eye_landmarks.shape[1] == 0:
        raise ValidationError("eye landmarks missing or empty")
    if not np.isfinite(eye_landmarks).all():
        raise ValidationError("eye landmarks contain non-finite values")
    return eye_landmarks[:, :, :2].mean(axis=1)


def _dispersion(points: np.ndarray) -> float:
    return float(np.ptp(points[:, 0]) + np.ptp(points[:, 1]))


def detect_fixations(gaze: np.ndarray, fps: float, config: GazeConfig) -> list[Fixation]:
    min_len = max(2, int(round(config.min_fixation_s * fps)))
    fixations: list[Fixation] = []
    i = 0
    n = len(gaze)
    while i + min_len <= n:
        j = i + min_len
        if _dispersion(gaze[i:j]) > config.dispersion_threshold:
            i += 1
            continue
        while j < n and _dispersion(gaze[i : j + 1]) <= config.dispersion_threshold:
            j += 1
        fixations.append(Fixation(i, j, gaze[i:j].mean(axis=0)))
        i = j
    return fixations


def extract_oculomotor(
    eye_landmarks: np.ndarray,
    fps: float,
    config: GazeConfig | None = None,
    calibration: np.ndarray | None = None,
) -> np.ndarray:
    """Seven indicators over one window.

    Order: mean fixation duration (s), fixation rate (1/s), saccade
    rate (1/s), mean saccade amplitude, gaze dispersion SD x, SD y,
    on-camera gaze ratio. The calibration point defaults to the
    window's own gaze centroid.
    """
    config = config or GazeConfig()
    if len(eye_landmarks) < 2:
        raise ValidationError("oculomotor extraction needs at least 2 frames")
    gaze = gaze_proxy(np.asarray(eye_landmarks, dtype=np.float64))
    duration = len(gaze) / fps

    fixations = detect_fixations(gaze, fps, config)
    n_fix = len(fixations)
    if n_fix:
        durations = [(f.end - f.start) / fps for f in fixations]
        mean_fix = float(np.mean(durations))
    else:
        mean_fix = 0.0

    amplitudes = [
        float(np.linalg.norm(b.centroid - a.centroid))
        for a, b in zip(fixations, fixations[1:])
    ]
    n_sacc = len(amplitudes)

    if calibration is None:
        calibration = gaze.mean(axis=0)
    on_camera = float(
        (np.linalg.norm(gaze - calibration, axis=1) <= config.on_camera_radius).mean()
    )

    return np.array(
        [
            mean_fix,
            n_fix / duration,
            n_sacc / duration,
            float(np.mean(amplitudes)) if amplitudes else 0.0,
            float(gaze[:, 0].std()),
            float(gaze[:, 1].std()),
            on_camera,
        ]
    )
