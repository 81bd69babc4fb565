"""Energy-based voice activity detection.

Frame decisions come from short-time log energy against an adaptive
threshold (estimated noise floor plus a margin), with a zero-crossing
veto for broadband noise and hangover smoothing so brief dips inside a
phrase do not split it. Runs shorter than `min_run_s` are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from podium.errors import ValidationError

_DB_FLOOR = 1e-12  # -120 dBFS


@dataclass(frozen=True)
class VadConfig:
    frame_s: float = 0.025
    hop_s: float = 0.010
    margin_db: float = 6.0       # threshold sits this far above the noise floor
    noise_floor_cap_db: float = -40.0
    noise_percentile: float = 10.0
    zcr_veto: float = 0.35       # crossings per sample above which a frame is vetoed
    hangover_s: float = 0.200
    min_run_s: float = 0.500

    def __post_init__(self):
        if self.frame_s <= 0 or self.hop_s <= 0:
            raise ValidationError("frame and hop lengths must be positive")
        if self.hangover_s < 0 or self.min_run_s < 0:
            raise ValidationError("hangover and min_run must be nonnegative")


@dataclass
class SpeechActivityMask:
    frame_length: float                 # hop between decisions, seconds
    frame_decisions: np.ndarray         # bool per frame
    active_runs: list[tuple[float, float]]
    duration: float

    def total_active(self) -> float:
        return float(sum(e - s for s, e in self.active_runs))


def frame_signal(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    """View of x as [n_frames, frame] without copying."""
    n = 1 + (len(x) - frame) // hop if len(x) >= frame else 0
    if n <= 0:
        return np.empty((0, frame), dtype=x.dtype)
    stride = x.strides[0]
    return np.lib.stride_tricks.as_strided(
        x, shape=(n, frame), strides=(hop * stride, stride), writeable=False
    )


def detect_speech_activity(
    audio: np.ndarray, sample_rate: int, config: VadConfig | None = None
) -> SpeechActivityMask:
    config = config or VadConfig()
    audio = np.asarray(audio, dtype=np.float64)
    if audio.size == 0:
        raise ValidationError("cannot run VAD on zero-length audio")
    if np.isnan(audio).all():
        raise ValidationError("audio is all NaN")

    frame = max(1, int(round(config.frame_s * sample_rate)))
    hop = max(1, int(round(config.hop_s * sample_rate)))
    frames = frame_signal(audio, frame, hop)
    duration = len(audio) / sample_rate
    if len(frames) == 0:
        return SpeechActivityMask(config.hop_s, np.zeros(0, dtype=bool), [], duration)

    energy_db = 10.0 * np.log10(np.mean(frames * frames, axis=1) + _DB_FLOOR)
    # Cap keeps the floor estimate honest when the recording never goes quiet.
    noise_floor = min(
        float(np.percentile(energy_db, config.noise_percentile)),
        config.noise_floor_cap_db,
    )
    threshold = noise_floor + config.margin_db

    crossings = np.abs(np.diff(np.signbit(frames).astype(np.int8), axis=1)).sum(axis=1)
    zcr = crossings / frame

    active = (energy_db > threshold) & (zcr < config.zcr_veto)

    hang = int(round(config.hangover_s / config.hop_s))
    if hang > 0 and active.any():
        n = len(active)
        last = np.where(active, np.arange(n), -n)
        last = np.maximum.accumulate(last)
        active = (np.arange(n) - last) <= hang

    runs = _runs_from_frames(active, config.hop_s, frame / sample_rate, duration)
    runs = [(s, e) for s, e in runs if e - s >= config.min_run_s]

    return SpeechActivityMask(config.hop_s, active, runs, duration)


def _runs_from_frames(
    active: np.ndarray, hop_s: float, frame_s: float, duration: float
) -> list[tuple[float, float]]:
    if not active.any():
        return []
    padded = np.concatenate(([False], active, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, ends = edges[0::2], edges[1::2]
    runs = []
    for s, e in zip(starts, ends):
        # last frame of the run covers frame_s seconds past its hop position
        runs.append((s * hop_s, min((e - 1) * hop_s + frame_s, duration)))
    return runs
