import numpy as np
import pytest

from podium.errors import FormatError
from podium.ingest import io as iio
from podium.ingest.bundle import RatingRecord, Word
from podium.synthetic import synth_bundle, write_bundle_files


def test_wav_round_trip(tmp_path):
    sr = 16000
    t = np.arange(sr) / sr
    x = 0.5 * np.sin(2 * np.pi * 220 * t)
    iio.write_wav(tmp_path / "a.wav", x, sr)
    y, sr2 = iio.read_wav(tmp_path / "a.wav")
    assert sr2 == sr
    assert np.abs(x - y).max() < 1.0 / 32767 + 1e-6


def test_landmarks_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    frames = rng.random((5, 478, 3))
    iio.write_landmarks(tmp_path / "l.csv", frames, 30.0)
    out, fps = iio.read_landmarks(tmp_path / "l.csv")
    assert fps == 30.0
    assert np.array_equal(out, frames)


def test_landmarks_wrong_width_rejected(tmp_path):
    (tmp_path / "l.csv").write_text("fps,30\n0,1.0,2.0\n")
    with pytest.raises(FormatError):
        iio.read_landmarks(tmp_path / "l.csv")


def test_transcript_round_trip(tmp_path):
    words = [Word("hello", 0.5, 0.9), Word("world", 1.0, 1.4)]
    iio.write_transcript(tmp_path / "t.csv", words)
    assert iio.read_transcript(tmp_path / "t.csv") == words


def test_posteriors_round_trip(tmp_path):
    track = np.array([[0.0, 0.1, 0.2, 0.3, 0.2, 0.1, 0.1]])
    iio.write_posteriors(tmp_path / "p.csv", track)
    assert np.array_equal(iio.read_posteriors(tmp_path / "p.csv"), track)
    seg = np.array([[0.0, 2.0, 0.1, 0.2, 0.3, 0.2, 0.1, 0.1]])
    iio.write_posteriors(tmp_path / "v.csv", seg, segmented=True)
    assert np.array_equal(iio.read_posteriors(tmp_path / "v.csv", segmented=True), seg)


def test_posterior_header_checked(tmp_path):
    (tmp_path / "p.csv").write_text("time,a,b,c,d,e,f\n0,1,0,0,0,0,0\n")
    with pytest.raises(FormatError):
        iio.read_posteriors(tmp_path / "p.csv")


def test_ratings_round_trip(tmp_path):
    ratings = [RatingRecord("b1", "r1", (1.0, 2.0, 3.0, 4.0, 5.0, 3.5, 4.5))]
    iio.write_ratings(tmp_path / "r.csv", ratings)
    assert iio.read_ratings(tmp_path / "r.csv") == ratings


def test_bundle_manifest_round_trip(tmp_path):
    bundle = synth_bundle("bx", "sx", seed=2, active_s=4.0)
    manifest = write_bundle_files(bundle, tmp_path / "bx")
    out = iio.read_bundle(manifest)
    assert out.bundle_id == "bx"
    assert out.speaker_id == "sx"
    assert out.sample_rate == bundle.sample_rate
    assert len(out.transcript) == len(bundle.transcript)
    assert np.array_equal(out.landmarks, bundle.landmarks)
    # PCM quantization bounds the audio error
    assert np.abs(out.audio - bundle.audio).max() < 1e-4


def test_manifest_missing_entry(tmp_path):
    (tmp_path / "m.json").write_text('{"bundle_id": "b", "speaker_id": "s", "files": {}}')
    with pytest.raises(FormatError):
        iio.read_bundle(tmp_path / "m.json")


def test_corpus_manifest_round_trip(tmp_path):
    iio.write_corpus_manifest(tmp_path / "c.json", ["a/bundle.json"], "ratings.csv")
    bundles, ratings = iio.read_corpus_manifest(tmp_path / "c.json")
    assert bundles == [tmp_path / "a/bundle.json"]
    assert ratings == tmp_path / "ratings.csv"
