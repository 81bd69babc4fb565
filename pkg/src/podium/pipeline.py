"""Bundle-to-features orchestration and single-bundle scoring.

One context object holds the loaded manifests, rubric, lexicon and
embedder so batch jobs and the service share identical settings.
Bundles are independent: extraction is pure per bundle, with the
speaker signature computed once before window-level work.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from podium.affect import (
    EmotionDistribution,
    Lexicon,
    aggregate_facial,
    aggregate_vocal,
    lexical_affect,
    load_lexicon,
    normalize_per_video,
)
from podium.dimensions import DIMENSIONS
from podium.errors import ValidationError
from podium.boost.evaluate import aggregate_video_score
from podium.coach.report import FeedbackReport, build_report
from podium.coach.rubric import Rubric, load_rubric
from podium.explain.modality import modality_attribution
from podium.features.acoustic import (
    AcousticManifest,
    SpeakerSignature,
    extract_acoustic,
    load_acoustic_manifest,
    select_speaker_signature,
)
from podium.features.facial import FacialManifest, extract_facial, load_facial_manifest
from podium.features.fuse import FUSED_DIM, MODALITY_RANGES, FeatureMatrix, fuse
from podium.features.oculomotor import GazeConfig, extract_oculomotor
from podium.features.text import HashingEmbedder, embed_text
from podium.ingest.bundle import MediaBundle, trim_lead
from podium.ingest.vad import SpeechActivityMask, VadConfig, detect_speech_activity
from podium.ingest.windows import SegmentWindow, segment_windows


@dataclass
class EngineContext:
    facial_manifest: FacialManifest = field(default_factory=load_facial_manifest)
    acoustic_manifest: AcousticManifest = field(default_factory=load_acoustic_manifest)
    rubric: Rubric = field(default_factory=load_rubric)
    lexicon: Lexicon = field(default_factory=load_lexicon)
    embedder: object = field(default_factory=HashingEmbedder)
    vad: VadConfig = field(default_factory=VadConfig)
    gaze: GazeConfig = field(default_factory=GazeConfig)
    lead_trim_s: float = 2.0
    focus_threshold: float = 3.0


@dataclass
class BundleFeatures:
    bundle_id: str
    speaker_id: str
    windows: list[SegmentWindow]
    X: np.ndarray                         # [n_windows, 4374]
    mask: SpeechActivityMask
    signature: SpeakerSignature
    facial_segments: list[EmotionDistribution]
    vocal_segments: list[EmotionDistribution]
    transcript_text: str
    empty_text_windows: int = 0


def _active_audio(bundle: MediaBundle, mask: SpeechActivityMask) -> np.ndarray:
    parts = [
        bundle.audio[int(round(s * bundle.sample_rate)) : int(round(e * bundle.sample_rate))]
        for s, e in mask.active_runs
    ]
    return np.concatenate(parts) if parts else np.zeros(0)


def _window_words(bundle: MediaBundle, w: SegmentWindow) -> str:
    return " ".join(
        word.text for word in bundle.transcript if w.start <= word.start < w.end
    )


def extract_bundle_features(bundle: MediaBundle, ctx: EngineContext) -> BundleFeatures:
    """Trim, detect speech, window, and compute fused vectors per window."""
    bundle.validate()
    trimmed = trim_lead(bundle, ctx.lead_trim_s) if ctx.lead_trim_s > 0 else bundle
    mask = detect_speech_activity(trimmed.audio, trimmed.sample_rate, ctx.vad)
    windows = segment_windows(mask, trimmed.bundle_id)
    if not windows:
        raise ValidationError(
            f"bundle {bundle.bundle_id}: no speech-active window of 2 s found"
        )

    active = _active_audio(trimmed, mask)
    signature = select_speaker_signature(
        trimmed.bundle_id, active, trimmed.sample_rate, ctx.acoustic_manifest
    )

    eye_idx = np.array(ctx.facial_manifest.region("eyes").landmarks)
    sr = trimmed.sample_rate
    fps = trimmed.fps
    frames_per_window = int(round(2.0 * fps))

    rows = []
    facial_segments: list[EmotionDistribution] = []
    vocal_segments: list[EmotionDistribution] = []
    empty_text = 0
    for w in windows:
        f0 = int(round(w.start * fps))
        frames = trimmed.landmarks[f0 : f0 + frames_per_window]
        facial_vec = extract_facial(frames, ctx.facial_manifest)
        ocular_vec = extract_oculomotor(frames[:, eye_idx, :], fps, ctx.gaze)
        audio_w = trimmed.audio[int(round(w.start * sr)) : int(round(w.end * sr))]
        acoustic_vec = extract_acoustic(audio_w, sr, signature, ctx.acoustic_manifest)
        emb = embed_text(_window_words(trimmed, w), ctx.embedder)
        if emb.empty:
            empty_text += 1
        rows.append(fuse(facial_vec, ocular_vec, acoustic_vec, emb.values).values)

        if len(trimmed.face_posteriors):
            facial_segments.append(
                aggregate_facial(trimmed.face_posteriors, w.start, w.end)
            )
        if len(trimmed.voice_posteriors):
            vocal_segments.append(
                aggregate_vocal(trimmed.voice_posteriors, w.start, w.end)
            )

    return BundleFeatures(
        bundle_id=trimmed.bundle_id,
        speaker_id=trimmed.speaker_id,
        windows=windows,
        X=np.asarray(rows, dtype=np.float64),
        mask=mask,
        signature=signature,
        facial_segments=facial_segments,
        vocal_segments=vocal_segments,
        transcript_text=" ".join(word.text for word in trimmed.transcript),
        empty_text_windows=empty_text,
    )


def features_to_matrix(
    parts: list[BundleFeatures], labels: dict[str, np.ndarray] | None = None
) -> FeatureMatrix:
    """Stack per-bundle features into one training/scoring matrix."""
    window_ids, bundle_ids, speaker_ids, rows, y = [], [], [], [], []
    for bf in parts:
        for i, w in enumerate(bf.windows):
            window_ids.append(w.window_id)
            bundle_ids.append(bf.bundle_id)
            speaker_ids.append(bf.speaker_id)
            rows.append(bf.X[i])
            if labels is not None:
                y.append(labels[bf.bundle_id])
    return FeatureMatrix(
        X=np.asarray(rows, dtype=np.float32),
        window_ids=window_ids,
        bundle_ids=bundle_ids,
        speaker_ids=speaker_ids,
        labels=np.asarray(y, dtype=np.float64) if labels is not None else None,
    )


def _top_segments(windows, segments: list[EmotionDistribution], k: int = 3) -> list[str]:
    # most peaked distributions mark the most expressive segments
    scored = sorted(
        zip(windows, segments), key=lambda p: -float(p[1].probs.max())
    )
    return [w.window_id for w, _ in scored[:k]]


def score_bundle(
    bundle: MediaBundle,
    models: dict[str, "BoostedModel"],
    ctx: EngineContext,
    explain_rows: int = 12,
    created: float = 0.0,
) -> tuple[FeedbackReport, dict]:
    """Run the full per-bundle pipeline into a three-layer report.

    `explain_rows` caps how many windows feed the per-dimension
    modality attribution (attribution cost grows with rows).
    """
    missing = [d for d in DIMENSIONS if d not in models]
    if missing:
        raise ValidationError(f"models missing for dimensions: {missing}")
    feats = extract_bundle_features(bundle, ctx)

    scores: dict[str, float] = {}
    segment_scores: dict[str, list[float]] = {}
    for d in DIMENSIONS:
        preds = models[d].predict(feats.X)
        segment_scores[d] = [float(p) for p in preds]
        scores[d] = aggregate_video_score(preds)

    step = max(1, len(feats.X) // explain_rows)
    X_eval = feats.X[::step]
    shap_tables = {
        d: modality_attribution(models[d], X_eval, dict(MODALITY_RANGES)).shares
        for d in DIMENSIONS
    }

    facial_video = (
        normalize_per_video(feats.facial_segments) if feats.facial_segments else None
    )
    vocal_video = (
        normalize_per_video(feats.vocal_segments) if feats.vocal_segments else None
    )
    quadrants = lexical_affect(feats.transcript_text, ctx.lexicon)
    top_segments = {}
    if feats.facial_segments:
        top_segments["facial"] = _top_segments(feats.windows, feats.facial_segments)
    if feats.vocal_segments:
        top_segments["vocal"] = _top_segments(feats.windows, feats.vocal_segments)

    report = build_report(
        bundle_id=feats.bundle_id,
        scores=scores,
        rubric=ctx.rubric,
        shap_tables=shap_tables,
        facial=facial_video,
        vocal=vocal_video,
        quadrants=quadrants,
        transcript_text=feats.transcript_text,
        top_segments=top_segments,
        focus_threshold=ctx.focus_threshold,
        created=created,
    )
    details = {
        "segment_scores": segment_scores,
        "n_windows": len(feats.windows),
        "speaker_id": feats.speaker_id,
        "signature_fallback": feats.signature.fallback,
    }
    return report, details
