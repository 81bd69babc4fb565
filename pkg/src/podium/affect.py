"""Expressive-emotion aggregation and lexical valence-arousal quadrants.

The engine never classifies emotion itself: facial and vocal posterior
tracks arrive from upstream recognizers (deterministic stubs cover
tests) and are averaged into segment- and video-level distributions
over the six basic emotions. Transcript tokens map through a
valence-arousal lexicon into four affective orientations.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from podium.errors import FormatError, ValidationError
from podium.ingest.bundle import EMOTIONS, N_EMOTIONS

QUADRANTS = ("positive-high", "positive-low", "negative-high", "negative-low")
NEUTRAL_DEADBAND = 0.1

_TOKEN = re.compile(r"[a-z']+")


@dataclass
class EmotionDistribution:
    probs: np.ndarray            # 6 values over EMOTIONS order
    scope: str                   # segment | video
    channel: str                 # facial | vocal
    flags: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.probs.shape != (N_EMOTIONS,):
            raise ValidationError("emotion distribution needs 6 probabilities")
        if (self.probs < -1e-12).any():
            raise ValidationError("negative emotion probability")
        if abs(self.probs.sum() - 1.0) > 1e-6:
            raise ValidationError(f"emotion probabilities sum to {self.probs.sum()!r}")

    def as_dict(self) -> dict[str, float]:
        return {e: float(p) for e, p in zip(EMOTIONS, self.probs)}

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())


def _mean_renormalize(rows: np.ndarray) -> np.ndarray:
    mean = rows.mean(axis=0)
    total = mean.sum()
    if total <= 0:
        raise ValidationError("cannot normalize an all-zero distribution")
    return mean / total


def aggregate_facial(track: np.ndarray, start: float, end: float) -> EmotionDistribution:
    """Mean of the 0.5 s facial posteriors sampled inside [start, end)."""
    track = np.asarray(track, dtype=np.float64)
    if track.ndim != 2 or track.shape[1] != 1 + N_EMOTIONS:
        raise ValidationError("facial track rows must be timestamp + 6 probabilities")
    inside = (track[:, 0] >= start) & (track[:, 0] < end)
    if not inside.any():
        raise ValidationError(f"no facial posterior samples in [{start}, {end})")
    dist = EmotionDistribution(_mean_renormalize(track[inside, 1:]), "segment", "facial")
    dist.validate()
    return dist


def aggregate_vocal(segments: np.ndarray, start: float, end: float) -> EmotionDistribution:
    """Mean of the per-segment vocal posteriors overlapping [start, end)."""
    segments = np.asarray(segments, dtype=np.float64)
    if segments.ndim != 2 or segments.shape[1] != 2 + N_EMOTIONS:
        raise ValidationError("vocal rows must be start, end + 6 probabilities")
    overlap = (segments[:, 0] < end) & (segments[:, 1] > start)
    if not overlap.any():
        raise ValidationError(f"no vocal posterior segments overlap [{start}, {end})")
    dist = EmotionDistribution(_mean_renormalize(segments[overlap, 2:]), "segment", "vocal")
    dist.validate()
    return dist


def normalize_per_video(distributions: list[EmotionDistribution]) -> EmotionDistribution:
    """Segment distributions to one per-video distribution (mean, renorm)."""
    if not distributions:
        raise ValidationError("no segment distributions to aggregate")
    channel = distributions[0].channel
    rows = np.stack([d.probs for d in distributions])
    dist = EmotionDistribution(_mean_renormalize(rows), "video", channel)
    dist.validate()
    return dist


# ----------------------------------------------------------------- lexicon

@dataclass(frozen=True)
class Lexicon:
    table: dict[str, tuple[float, float]]  # word -> (valence, arousal)

    def __post_init__(self):
        for w, (v, a) in self.table.items():
            if w != w.lower():
                raise FormatError(f"lexicon keys must be lowercase: {w!r}")
            if not (-1.0 <= v <= 1.0 and -1.0 <= a <= 1.0):
                raise FormatError(f"lexicon entry {w!r} outside [-1, 1]")

    def __contains__(self, word: str) -> bool:
        return word in self.table

    def __len__(self) -> int:
        return len(self.table)


def load_lexicon(path=None) -> Lexicon:
    if path is None:
        path = resources.files("podium.data") / "affect_lexicon.txt"
    table = {}
    text = Path(str(path)).read_text() if not hasattr(path, "read_text") else path.read_text()
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header != ["word", "valence", "arousal"]:
        raise FormatError(f"bad lexicon header: {header}")
    for row in reader:
        if not row:
            continue
        if len(row) != 3:
            raise FormatError(f"lexicon row needs 3 columns: {row}")
        table[row[0]] = (float(row[1]), float(row[2]))
    return Lexicon(table)


@dataclass
class QuadrantDistribution:
    shares: dict[str, float]
    coverage: float               # fraction of tokens that contributed
    n_tokens: int
    flags: dict = field(default_factory=dict)

    def validate(self) -> None:
        vals = np.array([self.shares[q] for q in QUADRANTS])
        if (vals < 0).any():
            raise ValidationError("negative quadrant share")
        if self.coverage > 0 and abs(vals.sum() - 1.0) > 1e-9:
            raise ValidationError("quadrant shares must sum to 1 when coverage > 0")
        if self.coverage == 0 and vals.sum() != 0:
            raise ValidationError("zero-coverage distribution must be all zero")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def lexical_affect(
    tokens: list[str] | str,
    lexicon: Lexicon,
    deadband: float = NEUTRAL_DEADBAND,
) -> QuadrantDistribution:
    """Quadrant shares over the tokens the lexicon can orient.

    A token counts when it is in the lexicon and both |valence| and
    |arousal| clear the neutral deadband; coverage is the counted
    fraction of all tokens. Zero coverage yields a flagged all-zero
    distribution.
    """
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    counts = {q: 0 for q in QUADRANTS}
    counted = 0
    for tok in tokens:
        entry = lexicon.table.get(tok)
        if entry is None:
            continue
        v, a = entry
        if abs(v) < deadband or abs(a) < deadband:
            continue
        q = ("positive-" if v > 0 else "negative-") + ("high" if a > 0 else "low")
        counts[q] += 1
        counted += 1

    if counted == 0:
        dist = QuadrantDistribution(
            {q: 0.0 for q in QUADRANTS}, 0.0, len(tokens), flags={"empty": "no oriented tokens"}
        )
    else:
        dist = QuadrantDistribution(
            {q: counts[q] / counted for q in QUADRANTS},
            counted / len(tokens),
            len(tokens),
        )
    dist.validate()
    return dist


# ------------------------------------------------- deterministic test stubs

def stub_face_posteriors(landmarks: np.ndarray, duration: float, step: float = 0.5) -> np.ndarray:
    """Posterior track from landmark summary stats via a fixed softmax.

    Stands in for the external facial emotion recognizer in tests and
    synthetic corpora; deterministic in its inputs.
    """
    times = np.arange(0.0, duration, step)
    if not len(times):
        raise ValidationError("duration too short for any posterior sample")
    n = len(landmarks)
    rows = []
    for t in times:
        i = min(int(t / duration * n), n - 1) if n else 0
        frame = landmarks[i] if n else np.zeros((1, 3))
        stats = np.array([
            frame[:, 0].mean(), frame[:, 1].mean(), frame[:, 0].std(),
            frame[:, 1].std(), frame[:, 2].mean(), np.abs(frame).mean(),
        ])
        logits = np.array([
            3 * stats[2], 2 * stats[3], stats[4], 4 * stats[0] - stats[1],
            stats[1], 2 * stats[5],
        ])
        e = np.exp(logits - logits.max())
        rows.append(np.concatenate(([t], e / e.sum())))
    return np.stack(rows)


def stub_voice_posteriors(audio: np.ndarray, sample_rate: int, duration: float,
                          segment_s: float = 2.0) -> np.ndarray:
    """Per-segment vocal posterior stub from audio energy statistics."""
    rows = []
    start = 0.0
    while start < duration:
        end = min(start + segment_s, duration)
        lo = int(start * sample_rate)
        hi = max(lo + 1, int(end * sample_rate))
        seg = np.asarray(audio[lo:hi], dtype=np.float64)
        rms = float(np.sqrt(np.mean(seg * seg))) if len(seg) else 0.0
        zc = float(np.abs(np.diff(np.signbit(seg).astype(np.int8))).mean()) if len(seg) > 1 else 0.0
        logits = np.array([5 * rms, 3 * zc, rms + zc, 8 * rms, 2 - 4 * rms, 6 * zc])
        e = np.exp(logits - logits.max())
        rows.append(np.concatenate(([start, end], e / e.sum())))
        start = end
    if not rows:
        raise ValidationError("duration too short for any vocal segment")
    return np.stack(rows)
