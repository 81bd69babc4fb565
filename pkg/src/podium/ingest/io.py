"""On-disk formats for bundles and ratings.

Audio is RIFF/WAVE 16-bit mono PCM. Everything else is comma-delimited
text with a header row, except the landmark track whose first line
declares the frame rate. A JSON manifest binds one bundle's files
together; a corpus manifest lists bundle manifests plus a ratings file.
"""

from __future__ import annotations

import csv
import json
import wave
from pathlib import Path

import numpy as np

from podium.errors import FormatError
from podium.ingest.bundle import N_LANDMARKS, MediaBundle, RatingRecord, Word

_PCM_SCALE = 32767.0


def write_wav(path, samples: np.ndarray, sample_rate: int) -> None:
    pcm = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = (pcm * _PCM_SCALE).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(pcm.tobytes())


def read_wav(path) -> tuple[np.ndarray, int]:
    with wave.open(str(path), "rb") as w:
        if w.getnchannels() != 1:
            raise FormatError(f"{path}: expected mono audio, got {w.getnchannels()} channels")
        if w.getsampwidth() != 2:
            raise FormatError(f"{path}: expected 16-bit PCM")
        sr = w.getframerate()
        raw = w.readframes(w.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / _PCM_SCALE
    return samples, sr


def write_landmarks(path, frames: np.ndarray, fps: float) -> None:
    frames = np.asarray(frames)
    with open(path, "w", newline="") as f:
        f.write(f"fps,{fps}\n")
        flat = frames.reshape(len(frames), -1)
        for i, row in enumerate(flat):
            f.write(str(i) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_landmarks(path) -> tuple[np.ndarray, float]:
    with open(path) as f:
        header = f.readline().strip().split(",")
        if len(header) != 2 or header[0] != "fps":
            raise FormatError(f"{path}: first line must be 'fps,<value>'")
        fps = float(header[1])
        rows = []
        for line in f:
            parts = line.rstrip("\n").split(",")
            vals = np.array(parts[1:], dtype=np.float64)
            if vals.size != N_LANDMARKS * 3:
                raise FormatError(
                    f"{path}: frame {parts[0]} has {vals.size} values, "
                    f"expected {N_LANDMARKS * 3}"
                )
            rows.append(vals.reshape(N_LANDMARKS, 3))
    return (np.stack(rows) if rows else np.empty((0, N_LANDMARKS, 3))), fps


def write_transcript(path, words: list[Word]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["word", "start_s", "end_s"])
        for word in words:
            w.writerow([word.text, repr(word.start), repr(word.end)])


def read_transcript(path) -> list[Word]:
    words = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["word", "start_s", "end_s"]:
            raise FormatError(f"{path}: bad transcript header {header}")
        for row in reader:
            if len(row) != 3:
                raise FormatError(f"{path}: transcript row needs 3 columns, got {row}")
            words.append(Word(row[0], float(row[1]), float(row[2])))
    return words


_POSTERIOR_HEADER = ["timestamp_s", "anger", "disgust", "fear", "happiness", "sadness", "surprise"]
_VOICE_HEADER = ["start_s", "end_s"] + _POSTERIOR_HEADER[1:]


def write_posteriors(path, track: np.ndarray, segmented: bool = False) -> None:
    header = _VOICE_HEADER if segmented else _POSTERIOR_HEADER
    track = np.asarray(track)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in track:
            w.writerow([repr(float(v)) for v in row])


def read_posteriors(path, segmented: bool = False) -> np.ndarray:
    expect = _VOICE_HEADER if segmented else _POSTERIOR_HEADER
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != expect:
            raise FormatError(f"{path}: bad posterior header {header}")
        rows = [np.array(r, dtype=np.float64) for r in reader if r]
    if not rows:
        return np.empty((0, len(expect)))
    out = np.stack(rows)
    if out.shape[1] != len(expect):
        raise FormatError(f"{path}: posterior rows must have {len(expect)} columns")
    return out


def write_ratings(path, ratings: list[RatingRecord]) -> None:
    from podium.dimensions import DIMENSIONS

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["bundle_id", "rater_id", *DIMENSIONS])
        for r in ratings:
            w.writerow([r.bundle_id, r.rater_id, *[repr(s) for s in r.scores]])


def read_ratings(path) -> list[RatingRecord]:
    from podium.dimensions import DIMENSIONS

    ratings = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["bundle_id", "rater_id", *DIMENSIONS]:
            raise FormatError(f"{path}: bad ratings header {header}")
        for row in reader:
            if len(row) != 2 + len(DIMENSIONS):
                raise FormatError(f"{path}: ratings row needs {2 + len(DIMENSIONS)} columns")
            ratings.append(RatingRecord(row[0], row[1], tuple(float(v) for v in row[2:])))
    return ratings


def write_bundle_manifest(path, bundle_id, speaker_id, files: dict, duration=None, embeddings=None):
    doc = {
        "bundle_id": bundle_id,
        "speaker_id": speaker_id,
        "files": {k: str(v) for k, v in files.items()},
    }
    if duration is not None:
        doc["duration"] = duration
    if embeddings is not None:
        doc["embeddings"] = str(embeddings)
    Path(path).write_text(json.dumps(doc, indent=2))


def read_bundle(manifest_path) -> MediaBundle:
    """Load one bundle from its manifest and referenced files."""
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{manifest_path}: not valid JSON ({e})") from e
    base = manifest_path.parent
    try:
        files = doc["files"]
        audio, sr = read_wav(base / files["audio"])
        landmarks, fps = read_landmarks(base / files["landmarks"])
        transcript = read_transcript(base / files["transcript"])
        face = read_posteriors(base / files["face_posteriors"])
        voice = read_posteriors(base / files["voice_posteriors"], segmented=True)
    except KeyError as e:
        raise FormatError(f"{manifest_path}: manifest missing entry {e}") from e
    duration = float(doc.get("duration", len(audio) / sr))
    bundle = MediaBundle(
        bundle_id=doc["bundle_id"],
        speaker_id=doc["speaker_id"],
        audio=audio,
        sample_rate=sr,
        landmarks=landmarks,
        fps=fps,
        transcript=transcript,
        face_posteriors=face,
        voice_posteriors=voice,
        duration=duration,
    )
    bundle.validate()
    return bundle


def read_corpus_manifest(path) -> tuple[list[Path], Path]:
    """Corpus manifest: JSON with bundle manifest paths and a ratings file."""
    path = Path(path)
    doc = json.loads(path.read_text())
    base = path.parent
    bundles = [base / p for p in doc["bundles"]]
    ratings = base / doc["ratings"]
    return bundles, ratings


def write_corpus_manifest(path, bundle_manifests, ratings_file) -> None:
    Path(path).write_text(
        json.dumps(
            {"bundles": [str(p) for p in bundle_manifests], "ratings": str(ratings_file)},
            indent=2,
        )
    )
