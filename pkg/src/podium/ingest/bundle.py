"""Media bundles, rating records, lead trimming and label broadcast.

A bundle holds one recording's ingested raw signals on a single clock:
audio samples, the per-frame landmark track, the word-timed transcript
and the two emotion posterior tracks. `trim_lead` rebases that clock so
everything downstream can ignore the unstable opening seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from podium.dimensions import DIMENSIONS, N_DIMENSIONS
from podium.errors import EmptyBundleError, ValidationError

N_LANDMARKS = 478
N_EMOTIONS = 6
EMOTIONS = ("anger", "disgust", "fear", "happiness", "sadness", "surprise")

DEFAULT_LEAD_TRIM_S = 2.0

_PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class Word:
    text: str
    start: float
    end: float


@dataclass
class MediaBundle:
    """One recording's ingested signals, all on the same clock."""

    bundle_id: str
    speaker_id: str
    audio: np.ndarray            # mono float samples in [-1, 1]
    sample_rate: int
    landmarks: np.ndarray        # [n_frames, 478, 3] normalized image units
    fps: float
    transcript: list[Word]
    face_posteriors: np.ndarray  # [n_samples, 7]: timestamp + 6 probabilities
    voice_posteriors: np.ndarray  # [n_segments, 8]: start, end + 6 probabilities
    duration: float

    def validate(self) -> None:
        if self.sample_rate < 8000:
            raise ValidationError(f"sample rate {self.sample_rate} below 8000 Hz")
        if self.landmarks.ndim != 3 or self.landmarks.shape[1:] != (N_LANDMARKS, 3):
            raise ValidationError(
                f"landmark frames must be [n, {N_LANDMARKS}, 3], got {self.landmarks.shape}"
            )
        if self.duration <= 0:
            raise ValidationError("bundle duration must be positive")
        for w in self.transcript:
            if not (0.0 <= w.start <= w.end <= self.duration + 1e-9):
                raise ValidationError(f"word {w.text!r} timed outside [0, duration]")
        if len(self.face_posteriors):
            t = self.face_posteriors[:, 0]
            if t.min() < -1e-9 or t.max() > self.duration + 1e-9:
                raise ValidationError("face posterior timestamps outside [0, duration]")
            _check_probs(self.face_posteriors[:, 1:], "face")
        if len(self.voice_posteriors):
            _check_probs(self.voice_posteriors[:, 2:], "voice")

    @property
    def n_frames(self) -> int:
        return self.landmarks.shape[0]


def _check_probs(p: np.ndarray, channel: str) -> None:
    if p.shape[1] != N_EMOTIONS:
        raise ValidationError(f"{channel} posteriors must have {N_EMOTIONS} classes")
    if (p < -1e-12).any():
        raise ValidationError(f"{channel} posterior has negative entries")
    s = p.sum(axis=1)
    if np.abs(s - 1.0).max() > _PROB_SUM_TOL:
        raise ValidationError(f"{channel} posterior rows must sum to 1 +- {_PROB_SUM_TOL}")


def trim_lead(bundle: MediaBundle, trim: float = DEFAULT_LEAD_TRIM_S) -> MediaBundle:
    """Drop the first `trim` seconds and rebase all timestamps to the cut.

    Returns a new bundle; the input is left untouched. Raises
    EmptyBundleError when nothing would remain.
    """
    if trim < 0:
        raise ValidationError("trim must be >= 0")
    if trim == 0:
        return bundle
    if bundle.duration <= trim:
        raise EmptyBundleError(
            f"bundle {bundle.bundle_id}: duration {bundle.duration:.3f}s <= trim {trim:.3f}s"
        )

    first_sample = int(round(trim * bundle.sample_rate))
    first_frame = int(round(trim * bundle.fps))
    words = [
        Word(w.text, w.start - trim, w.end - trim)
        for w in bundle.transcript
        if w.start >= trim
    ]
    face = bundle.face_posteriors
    if len(face):
        keep = face[:, 0] >= trim - 1e-9
        face = face[keep].copy()
        face[:, 0] -= trim
    voice = bundle.voice_posteriors
    if len(voice):
        keep = voice[:, 0] >= trim - 1e-9
        voice = voice[keep].copy()
        voice[:, 0] -= trim
        voice[:, 1] -= trim

    return replace(
        bundle,
        audio=bundle.audio[first_sample:],
        landmarks=bundle.landmarks[first_frame:],
        transcript=words,
        face_posteriors=face,
        voice_posteriors=voice,
        duration=bundle.duration - trim,
    )


@dataclass(frozen=True)
class RatingRecord:
    """One rater's video-level scores over the seven rubric dimensions."""

    bundle_id: str
    rater_id: str
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.scores) != N_DIMENSIONS:
            raise ValidationError(
                f"rating needs {N_DIMENSIONS} scores, got {len(self.scores)}"
            )
        for name, s in zip(DIMENSIONS, self.scores):
            if not (1.0 <= s <= 5.0):
                raise ValidationError(f"{name} score {s} outside [1, 5]")


def mean_ratings(ratings: list[RatingRecord]) -> dict[str, np.ndarray]:
    """Per-bundle arithmetic mean of rater scores, as a 7-vector."""
    by_bundle: dict[str, list[tuple[float, ...]]] = {}
    for r in ratings:
        by_bundle.setdefault(r.bundle_id, []).append(r.scores)
    return {b: np.mean(np.asarray(rows), axis=0) for b, rows in by_bundle.items()}


def broadcast_labels(windows, ratings: list[RatingRecord]):
    """Label every window with its bundle's mean rating vector.

    Ratings are video level; the mean across raters is broadcast to each
    of the bundle's windows. A window whose bundle has no rating is an
    error.
    """
    means = mean_ratings(ratings)
    out = []
    for w in windows:
        if w.bundle_id not in means:
            raise ValidationError(f"window {w.window_id}: bundle {w.bundle_id} has no ratings")
        out.append((w.window_id, means[w.bundle_id]))
    return out


def ratings_matrix(ratings: list[RatingRecord], dimension: str) -> np.ndarray:
    """Pivot ratings into an items x raters grid for one dimension.

    Bundles are items (sorted by id), raters are columns (sorted by id).
    Every bundle must be scored by every rater; reliability statistics
    on incomplete designs go through the psych module's alpha instead.
    """
    d = DIMENSIONS.index(dimension)
    bundles = sorted({r.bundle_id for r in ratings})
    raters = sorted({r.rater_id for r in ratings})
    grid = np.full((len(bundles), len(raters)), np.nan)
    for r in ratings:
        grid[bundles.index(r.bundle_id), raters.index(r.rater_id)] = r.scores[d]
    if np.isnan(grid).any():
        raise ValidationError("ratings grid incomplete: every rater must score every bundle")
    return grid
