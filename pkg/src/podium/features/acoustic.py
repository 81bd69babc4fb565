"""The 101-descriptor acoustic block, speaker signatures, 203-D vectors.

The block layout (names, order and scale class under waveform gain) is
owned by the acoustic manifest data file; extraction computes a value
per manifest entry and emits them in manifest order. A bundle's
speaker signature is the minimum prosodic-variance 30-second span of
its active speech; each window's 203-D acoustic vector is its own
block (101) followed by the signature block (101) and the signature
stability scalar.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from podium.errors import FormatError, ValidationError
from podium.features import dsp

BLOCK_DIM = 101
ACOUSTIC_DIM = 2 * BLOCK_DIM + 1

SIGNATURE_S = 30.0
SIGNATURE_STRIDE_S = 1.0
MIN_BLOCK_S = 0.5

PAUSE_DB = -45.0
_EPS = 1e-10


@dataclass(frozen=True)
class AcousticManifest:
    """Ordered descriptor names with their gain scale classes."""

    version: str
    names: tuple[str, ...]
    scale_classes: tuple[str, ...]  # per entry: invariant | linear | none

    def __post_init__(self):
        if len(self.names) != BLOCK_DIM:
            raise FormatError(f"acoustic manifest must list {BLOCK_DIM} entries, got {len(self.names)}")
        if len(set(self.names)) != len(self.names):
            raise FormatError("acoustic manifest has duplicate entries")

    def index(self, name: str) -> int:
        return self.names.index(name)


def load_acoustic_manifest(path=None) -> AcousticManifest:
    if path is None:
        path = resources.files("podium.data") / "acoustic_manifest.txt"
    text = Path(str(path)).read_text() if not hasattr(path, "read_text") else path.read_text()
    version = None
    names, classes = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(",")
        if key == "version":
            version = rest
        elif key == "entry":
            name, _, cls = rest.partition(",")
            if cls not in ("invariant", "linear", "none"):
                raise FormatError(f"bad scale class {cls!r} for {name}")
            names.append(name)
            classes.append(cls)
        else:
            raise FormatError(f"unknown acoustic manifest key {key!r}")
    if version is None:
        raise FormatError("acoustic manifest missing version")
    return AcousticManifest(version, tuple(names), tuple(classes))


def _slope(values: np.ndarray, hop_s: float) -> float:
    if len(values) < 2:
        return 0.0
    t = np.arange(len(values)) * hop_s
    t = t - t.mean()
    denom = float(np.dot(t, t))
    if denom < _EPS:
        return 0.0
    return float(np.dot(t, values - values.mean()) / denom)


def _runs(mask: np.ndarray) -> int:
    if not mask.any():
        return 0
    return int(np.count_nonzero(np.diff(np.concatenate(([False], mask)).astype(np.int8)) == 1))


def compute_block_values(audio: np.ndarray, sample_rate: int) -> dict[str, float]:
    """All 101 descriptor values for one interval, keyed by name."""
    audio = np.asarray(audio, dtype=np.float64)
    if len(audio) < MIN_BLOCK_S * sample_rate:
        raise ValidationError(
            f"acoustic block needs at least {MIN_BLOCK_S}s of audio, got {len(audio) / sample_rate:.3f}s"
        )

    out: dict[str, float] = {}

    cep = dsp.mfcc(audio, sample_rate)
    d1 = dsp.delta(cep)
    d2 = dsp.delta(d1)
    for i in range(dsp.N_MFCC):
        out[f"mfcc{i + 1}_mean"] = float(cep[:, i].mean())
        out[f"mfcc{i + 1}_sd"] = float(cep[:, i].std())
        out[f"dmfcc{i + 1}_mean"] = float(d1[:, i].mean())
        out[f"dmfcc{i + 1}_sd"] = float(d1[:, i].std())
        out[f"ddmfcc{i + 1}_mean"] = float(d2[:, i].mean())

    cand, peak, f0_rms = dsp.f0_candidates(audio, sample_rate)
    f0, voiced = dsp.voicing_gate(cand, peak, f0_rms)
    vf = f0[voiced]
    if len(vf):
        out["f0_mean"] = float(vf.mean())
        out["f0_sd"] = float(vf.std())
        out["f0_min"] = float(vf.min())
        out["f0_max"] = float(vf.max())
        out["f0_range"] = float(vf.max() - vf.min())
        out["f0_median"] = float(np.median(vf))
        out["f0_slope"] = _slope(vf, dsp.HOP_S)
        out["f0_cv"] = float(vf.std() / (vf.mean() + _EPS))
    else:
        for k in ("f0_mean", "f0_sd", "f0_min", "f0_max", "f0_range", "f0_median", "f0_slope", "f0_cv"):
            out[k] = 0.0
    out["voiced_ratio"] = float(voiced.mean()) if len(voiced) else 0.0

    formants = dsp.formant_track(audio, sample_rate)
    for j in range(3):
        col = formants[:, j]
        col = col[np.isfinite(col)]
        out[f"f{j + 1}_mean"] = float(col.mean()) if len(col) else 0.0
        out[f"f{j + 1}_sd"] = float(col.std()) if len(col) else 0.0

    spec = dsp.spectral_descriptors(audio, sample_rate)
    for key in ("centroid", "rolloff", "flux", "flatness", "bandwidth"):
        out[f"{key}_mean"] = float(spec[key].mean())
        out[f"{key}_sd"] = float(spec[key].std())

    zcr = dsp.frame_zcr(audio, sample_rate)
    out["zcr_mean"] = float(zcr.mean())
    out["zcr_sd"] = float(zcr.std())

    rms = dsp.frame_rms(audio, sample_rate)
    out["rms_mean"] = float(rms.mean())
    out["rms_sd"] = float(rms.std())
    out["rms_slope"] = _slope(rms, dsp.HOP_S)

    # jitter/shimmer on consecutive voiced frames only
    pair = voiced[:-1] & voiced[1:] if len(voiced) > 1 else np.zeros(0, dtype=bool)
    if pair.any():
        periods = 1.0 / np.maximum(f0, _EPS)
        pj = np.abs(periods[1:] - periods[:-1])[pair]
        out["jitter"] = float(pj.mean() / (periods[np.concatenate((pair, [False]))].mean() + _EPS))
        pa = np.abs(f0_rms[1:] - f0_rms[:-1])[pair]
        out["shimmer"] = float(pa.mean() / (f0_rms[voiced].mean() + _EPS))
    else:
        out["jitter"] = 0.0
        out["shimmer"] = 0.0

    out["hnr"] = float(dsp.harmonic_ratio_db(peak[voiced]).mean()) if voiced.any() else 0.0

    db = 20.0 * np.log10(rms + 1e-6)
    out["pause_ratio"] = float((db < PAUSE_DB).mean())
    out["voiced_segment_rate"] = _runs(voiced) / (len(audio) / sample_rate)
    out["energy_range_db"] = float(db.max() - db.min())

    return out


def extract_acoustic_block(
    audio: np.ndarray, sample_rate: int, manifest: AcousticManifest
) -> np.ndarray:
    values = compute_block_values(audio, sample_rate)
    missing = [n for n in manifest.names if n not in values]
    if missing:
        raise FormatError(f"manifest names not computed: {missing[:5]}")
    return np.array([values[n] for n in manifest.names], dtype=np.float64)


@dataclass
class SpeakerSignature:
    bundle_id: str
    start: float                 # in concatenated active-speech time
    end: float
    descriptor: np.ndarray       # 101 values
    stability: float             # F0 + energy variance objective at the span
    fallback: bool = False       # True when < 30 s of speech forced whole-speech use


def _normalized_variance(x: np.ndarray) -> float:
    if len(x) == 0:
        return 1e6  # spans with no usable track never win
    m = float(np.mean(x))
    return float(np.var(x) / (m * m + _EPS))


def signature_objective(audio: np.ndarray, sample_rate: int) -> float:
    """Prosodic instability of a span: normalized F0 + energy variance."""
    f0, voiced, rms = dsp.f0_track(audio, sample_rate)
    return _normalized_variance(f0[voiced]) + _normalized_variance(rms)


def select_speaker_signature(
    bundle_id: str,
    active_audio: np.ndarray,
    sample_rate: int,
    manifest: AcousticManifest,
) -> SpeakerSignature:
    """Scan 30 s candidate spans of the concatenated active speech.

    Candidates start at 1 s strides; the span minimizing the prosodic
    variance objective wins (earliest on ties). Bundles with under 30 s
    of active speech fall back to the whole stream, flagged.
    """
    total_s = len(active_audio) / sample_rate
    win = int(round(SIGNATURE_S * sample_rate))
    if total_s < SIGNATURE_S:
        return SpeakerSignature(
            bundle_id,
            0.0,
            total_s,
            extract_acoustic_block(active_audio, sample_rate, manifest),
            signature_objective(active_audio, sample_rate),
            fallback=True,
        )

    # One candidate track over the whole stream; spans are hop-aligned
    # slices of it, so slicing the track equals re-analyzing the span.
    cand, peak, rms = dsp.f0_candidates(active_audio, sample_rate)
    hop = int(round(dsp.HOP_S * sample_rate))
    flen = int(round(dsp.F0_FRAME_S * sample_rate))
    span_frames = 1 + (win - flen) // hop

    stride = int(round(SIGNATURE_STRIDE_S * sample_rate))
    starts = list(range(0, len(active_audio) - win + 1, stride))
    best_start, best_obj = starts[0], np.inf
    for s in starts:
        i0 = s // hop
        i1 = i0 + span_frames
        f0s, voiceds = dsp.voicing_gate(cand[i0:i1], peak[i0:i1], rms[i0:i1])
        obj = _normalized_variance(f0s[voiceds]) + _normalized_variance(rms[i0:i1])
        if obj < best_obj - 1e-15:
            best_start, best_obj = s, obj
    span = active_audio[best_start : best_start + win]
    return SpeakerSignature(
        bundle_id,
        best_start / sample_rate,
        (best_start + win) / sample_rate,
        extract_acoustic_block(span, sample_rate, manifest),
        float(best_obj),
    )


def extract_acoustic(
    window_audio: np.ndarray,
    sample_rate: int,
    signature: SpeakerSignature,
    manifest: AcousticManifest,
) -> np.ndarray:
    """[segment 101 | signature 101 | stability], length 203."""
    if signature is None:
        raise ValidationError("speaker signature missing for acoustic extraction")
    segment = extract_acoustic_block(window_audio, sample_rate, manifest)
    return np.concatenate([segment, signature.descriptor, [signature.stability]])
