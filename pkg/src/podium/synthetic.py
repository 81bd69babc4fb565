"""Deterministic synthetic bundles for tests, demos and benchmarks.

Every speaker gets a parameter set (pitch, loudness modulation, facial
motion energy, gaze style, vocabulary bias) drawn from the seed, so
features genuinely vary across speakers while staying reproducible
bit for bit. The upstream extractors the engine does not own (emotion
recognizers) are stood in by the affect module's deterministic stubs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from podium.affect import stub_face_posteriors, stub_voice_posteriors
from podium.dimensions import DIMENSIONS
from podium.ingest.bundle import MediaBundle, RatingRecord, Word
from podium.ingest import io as ingest_io

_TOPOLOGY_SEED = 424242

POSITIVE_WORDS = (
    "great excellent exciting wonderful amazing confident inspiring strong "
    "clear helpful valuable success improve learn discover create team future hope"
).split()
NEGATIVE_WORDS = (
    "problem difficult hard risk doubt confusing unclear wrong bad tired "
    "boring struggle stress worried failure poor loss serious"
).split()
NEUTRAL_WORDS = (
    "the a and to of in we this that model data point section slide result "
    "method example question today first second next part process system"
).split()


def face_topology() -> np.ndarray:
    """Shared 478-point base face in normalized image units."""
    rng = np.random.default_rng(_TOPOLOGY_SEED)
    t = np.linspace(0, 2 * np.pi, 478, endpoint=False)
    x = 0.5 + 0.18 * np.cos(t) * (1 + 0.25 * rng.standard_normal(478) * 0.2)
    y = 0.5 + 0.24 * np.sin(t) * (1 + 0.25 * rng.standard_normal(478) * 0.2)
    z = 0.05 * rng.standard_normal(478)
    pts = np.stack([x, y, z], axis=1)
    pts += rng.uniform(-0.02, 0.02, size=pts.shape)
    return pts


_BASE_FACE = None


def _base_face() -> np.ndarray:
    global _BASE_FACE
    if _BASE_FACE is None:
        _BASE_FACE = face_topology()
    return _BASE_FACE


@dataclass
class SpeakerParams:
    f0: float                 # base pitch, Hz
    vibrato: float            # relative pitch wobble
    am_depth: float           # loudness modulation depth
    am_rate: float            # loudness modulation rate, Hz
    motion: float             # facial motion energy
    gaze_jitter: float        # gaze wander scale
    saccade_every: float      # seconds between deliberate gaze jumps
    positivity: float         # vocabulary bias in [0, 1]
    rate_wps: float           # words per second


def speaker_params(seed: int) -> SpeakerParams:
    rng = np.random.default_rng(seed)
    return SpeakerParams(
        f0=float(rng.uniform(95, 260)),
        vibrato=float(rng.uniform(0.0, 0.06)),
        am_depth=float(rng.uniform(0.05, 0.6)),
        am_rate=float(rng.uniform(1.5, 5.0)),
        motion=float(rng.uniform(0.002, 0.02)),
        gaze_jitter=float(rng.uniform(0.001, 0.02)),
        saccade_every=float(rng.uniform(0.5, 3.0)),
        positivity=float(rng.uniform(0.1, 0.9)),
        rate_wps=float(rng.uniform(1.8, 3.2)),
    )


def synth_speech(
    params: SpeakerParams, duration: float, sample_rate: int, seed: int = 0
) -> np.ndarray:
    """Harmonic voiced-like signal with loudness modulation."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    f0 = params.f0 * (1.0 + params.vibrato * np.sin(2 * np.pi * 0.4 * t))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    wave = np.zeros_like(t)
    for k, amp in enumerate((1.0, 0.5, 0.3, 0.15), start=1):
        wave += amp * np.sin(k * phase + rng.uniform(0, 2 * np.pi))
    am = 1.0 + params.am_depth * np.sin(2 * np.pi * params.am_rate * t)
    wave *= am / (1.0 + params.am_depth)
    wave += 0.002 * rng.standard_normal(len(t))
    return (0.35 * wave / np.max(np.abs(wave) + 1e-9)).astype(np.float64)


def synth_landmark_track(
    params: SpeakerParams, n_frames: int, fps: float, seed: int = 0
) -> np.ndarray:
    base = _base_face()
    rng = np.random.default_rng(seed)
    t = np.arange(n_frames) / fps
    frames = np.repeat(base[None, :, :], n_frames, axis=0)

    # expressive motion: slow sinusoids with per-landmark phase
    phases = rng.uniform(0, 2 * np.pi, size=(478, 3))
    rates = rng.uniform(0.5, 2.5, size=(478, 3))
    motion = params.motion * np.sin(
        2 * np.pi * rates[None, :, :] * t[:, None, None] + phases[None, :, :]
    )
    frames = frames + motion
    frames += 0.15 * params.motion * rng.standard_normal(frames.shape)

    # gaze behavior: eye-region landmarks share a wander plus jumps
    gaze = np.zeros((n_frames, 2))
    point = np.zeros(2)
    next_jump = params.saccade_every
    for i, ti in enumerate(t):
        if ti >= next_jump:
            point = rng.uniform(-3 * params.gaze_jitter, 3 * params.gaze_jitter, 2)
            next_jump += params.saccade_every
        gaze[i] = point + 0.2 * params.gaze_jitter * rng.standard_normal(2)
    eye_band = (t[:, None] * 0 + 1)[:, :, None]  # broadcast helper
    frames[:, :60, :2] += gaze[:, None, :] * eye_band[:, :60, :]
    return frames


def synth_transcript(
    params: SpeakerParams, duration: float, seed: int = 0, start: float = 0.0
) -> list[Word]:
    rng = np.random.default_rng(seed)
    words = []
    t = start + 0.3
    while t < start + duration - 0.5:
        r = rng.random()
        if r < 0.5:
            bank = NEUTRAL_WORDS
        elif r < 0.5 + 0.5 * params.positivity:
            bank = POSITIVE_WORDS
        else:
            bank = NEGATIVE_WORDS
        w = bank[int(rng.integers(len(bank)))]
        dur = 1.0 / params.rate_wps
        words.append(Word(w, round(t, 3), round(min(t + 0.8 * dur, duration + start), 3)))
        t += dur
    return words


def synth_bundle(
    bundle_id: str,
    speaker_id: str,
    seed: int,
    *,
    active_s: float = 36.0,
    lead_s: float = 2.0,
    tail_s: float = 1.0,
    sample_rate: int = 16000,
    fps: float = 30.0,
) -> MediaBundle:
    """One recording: quiet lead, continuous speech, quiet tail."""
    params = speaker_params(seed)
    rng = np.random.default_rng(seed + 1)
    duration = lead_s + active_s + tail_s

    speech = synth_speech(params, active_s, sample_rate, seed + 2)
    lead = 0.0005 * rng.standard_normal(int(round(lead_s * sample_rate)))
    tail = 0.0005 * rng.standard_normal(int(round(tail_s * sample_rate)))
    audio = np.concatenate([lead, speech, tail])

    n_frames = int(round(duration * fps))
    landmarks = synth_landmark_track(params, n_frames, fps, seed + 3)
    transcript = synth_transcript(params, active_s, seed + 4, start=lead_s)

    face_post = stub_face_posteriors(landmarks, duration)
    voice_post = stub_voice_posteriors(audio, sample_rate, duration)

    bundle = MediaBundle(
        bundle_id=bundle_id,
        speaker_id=speaker_id,
        audio=audio,
        sample_rate=sample_rate,
        landmarks=landmarks,
        fps=fps,
        transcript=transcript,
        face_posteriors=face_post,
        voice_posteriors=voice_post,
        duration=duration,
    )
    bundle.validate()
    return bundle


def synth_ratings(
    bundle_ids: list[str], seed: int, n_raters: int = 3
) -> list[RatingRecord]:
    """Three-rater video-level ratings around a per-bundle latent quality."""
    rng = np.random.default_rng(seed)
    ratings = []
    for b in bundle_ids:
        latent = rng.uniform(1.8, 4.6, size=len(DIMENSIONS))
        for r in range(n_raters):
            noisy = np.clip(np.round(latent + 0.3 * rng.standard_normal(len(DIMENSIONS)), 1), 1, 5)
            ratings.append(RatingRecord(b, f"rater{r}", tuple(float(v) for v in noisy)))
    return ratings


def write_bundle_files(bundle: MediaBundle, out_dir) -> Path:
    """Write one bundle's files plus its manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ingest_io.write_wav(out_dir / "audio.wav", bundle.audio, bundle.sample_rate)
    ingest_io.write_landmarks(out_dir / "landmarks.csv", bundle.landmarks, bundle.fps)
    ingest_io.write_transcript(out_dir / "transcript.csv", bundle.transcript)
    ingest_io.write_posteriors(out_dir / "face_posteriors.csv", bundle.face_posteriors)
    ingest_io.write_posteriors(out_dir / "voice_posteriors.csv", bundle.voice_posteriors, segmented=True)
    manifest = out_dir / "bundle.json"
    ingest_io.write_bundle_manifest(
        manifest,
        bundle.bundle_id,
        bundle.speaker_id,
        {
            "audio": "audio.wav",
            "landmarks": "landmarks.csv",
            "transcript": "transcript.csv",
            "face_posteriors": "face_posteriors.csv",
            "voice_posteriors": "voice_posteriors.csv",
        },
        duration=bundle.duration,
    )
    return manifest


def write_corpus(
    out_dir,
    n_speakers: int = 6,
    seed: int = 0,
    active_s: float = 36.0,
    sample_rate: int = 16000,
) -> Path:
    """A small on-disk corpus: bundles, ratings, corpus manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifests = []
    bundle_ids = []
    for i in range(n_speakers):
        bundle = synth_bundle(
            f"bundle{i:03d}", f"speaker{i:03d}", seed + 100 * i,
            active_s=active_s, sample_rate=sample_rate,
        )
        manifests.append(
            write_bundle_files(bundle, out_dir / bundle.bundle_id).relative_to(out_dir)
        )
        bundle_ids.append(bundle.bundle_id)
    ratings = synth_ratings(bundle_ids, seed + 7)
    ingest_io.write_ratings(out_dir / "ratings.csv", ratings)
    corpus = out_dir / "corpus.json"
    ingest_io.write_corpus_manifest(corpus, manifests, "ratings.csv")
    return corpus


def plant_multimodal_target(
    X: np.ndarray, modality_ranges: dict[str, tuple[int, int]], seed: int = 0
) -> tuple[np.ndarray, dict]:
    """Monotone target built from one high-variance column per modality.

    y = 1 + 4 * sigmoid(weighted sum of z-scored columns), monotone in
    every chosen column, spanning all four modalities.
    """
    rng = np.random.default_rng(seed)
    chosen = {}
    z = np.zeros(len(X))
    weights = {"facial": 0.8, "oculomotor": 0.7, "acoustic": 1.0, "textual": 0.6}
    for name, (lo, hi) in modality_ranges.items():
        block = X[:, lo:hi]
        sd = block.std(axis=0)
        col = lo + int(np.argmax(sd))
        mu, sigma = X[:, col].mean(), X[:, col].std() + 1e-12
        z += weights[name] * (X[:, col] - mu) / sigma
        chosen[name] = col
    y = 1.0 + 4.0 / (1.0 + np.exp(-z / 1.5))
    return np.clip(y, 1.0, 5.0), {"columns": chosen, "weights": weights}
