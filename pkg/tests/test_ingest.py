import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from podium.errors import EmptyBundleError, ValidationError
from podium.ingest.bundle import MediaBundle, RatingRecord, Word, broadcast_labels, trim_lead
from podium.ingest.vad import SpeechActivityMask, VadConfig, detect_speech_activity
from podium.ingest.windows import SegmentWindow, segment_windows, window_count
from podium.synthetic import synth_bundle

SR = 16000


def tiny_bundle(duration=10.0, words=None):
    n = int(duration * SR)
    t = np.arange(n) / SR
    return MediaBundle(
        bundle_id="b1",
        speaker_id="s1",
        audio=0.3 * np.sin(2 * np.pi * 220 * t),
        sample_rate=SR,
        landmarks=np.zeros((int(duration * 30), 478, 3)),
        fps=30.0,
        transcript=words or [Word("hello", 2.5, 2.9), Word("there", 3.0, 3.4)],
        face_posteriors=np.array([[0.5, 1, 0, 0, 0, 0, 0], [9.5, 0, 0, 0, 1, 0, 0]], dtype=float),
        voice_posteriors=np.array([[0.0, 5.0, 0, 0, 0, 1, 0, 0]], dtype=float),
        duration=duration,
    )


class TestTrimLead:
    def test_zero_trim_is_identity(self):
        b = tiny_bundle()
        assert trim_lead(b, 0.0) is b

    def test_time_shift(self):
        b = tiny_bundle(10.0)
        out = trim_lead(b, 2.0)
        assert out.duration == pytest.approx(8.0)
        assert out.transcript[0].start == pytest.approx(0.5)
        assert len(out.audio) == 8 * SR
        assert len(out.landmarks) == 8 * 30
        # posterior before the cut dropped, after the cut rebased
        assert len(out.face_posteriors) == 1
        assert out.face_posteriors[0, 0] == pytest.approx(7.5)

    def test_default_trim_is_two_seconds(self):
        from podium.ingest.bundle import DEFAULT_LEAD_TRIM_S

        assert DEFAULT_LEAD_TRIM_S == 2.0
        out = trim_lead(tiny_bundle(10.0))
        assert out.duration == pytest.approx(8.0)

    def test_overtrim_errors(self):
        with pytest.raises(EmptyBundleError):
            trim_lead(tiny_bundle(1.5), 2.0)

    def test_negative_trim_rejected(self):
        with pytest.raises(ValidationError):
            trim_lead(tiny_bundle(), -1.0)


class TestVad:
    def test_digital_silence_has_no_runs(self):
        mask = detect_speech_activity(np.zeros(3 * SR), SR)
        assert mask.active_runs == []

    def test_full_scale_tone_is_one_run(self):
        t = np.arange(10 * SR) / SR
        mask = detect_speech_activity(np.sin(2 * np.pi * 220 * t), SR)
        assert len(mask.active_runs) == 1
        s, e = mask.active_runs[0]
        assert s == pytest.approx(0.0, abs=0.05)
        assert e == pytest.approx(10.0, abs=0.05)

    def test_tone_silence_tone_derived_oracle(self):
        """Two runs near [0, 3) and [5, 8), against a direct frame-energy oracle."""
        cfg = VadConfig()
        t1 = np.arange(3 * SR) / SR
        audio = np.concatenate([
            0.5 * np.sin(2 * np.pi * 220 * t1),
            np.zeros(2 * SR),
            0.5 * np.sin(2 * np.pi * 220 * t1),
        ])

        # oracle: frame energies computed directly from the waveform
        frame = int(cfg.frame_s * SR)
        hop = int(cfg.hop_s * SR)
        energies = []
        for start in range(0, len(audio) - frame + 1, hop):
            seg = audio[start : start + frame]
            energies.append(10 * math.log10(float(np.mean(seg**2)) + 1e-12))
        floor = min(np.percentile(energies, 10), cfg.noise_floor_cap_db)
        oracle_active = np.array(energies) > floor + cfg.margin_db
        # oracle run boundaries in seconds (ignoring hangover smoothing)
        edges = np.flatnonzero(np.diff(np.concatenate(([0], oracle_active.view(np.int8), [0]))))
        oracle_runs = [(edges[i] * cfg.hop_s, edges[i + 1] * cfg.hop_s) for i in range(0, len(edges), 2)]
        assert len(oracle_runs) == 2

        mask = detect_speech_activity(audio, SR, cfg)
        assert len(mask.active_runs) == 2
        slack = cfg.hangover_s + cfg.frame_s
        for (s, e), (os_, oe) in zip(mask.active_runs, oracle_runs):
            assert s == pytest.approx(os_, abs=slack)
            assert e == pytest.approx(oe, abs=slack)

    def test_zero_length_audio_rejected(self):
        with pytest.raises(ValidationError):
            detect_speech_activity(np.zeros(0), SR)

    def test_all_nan_rejected(self):
        with pytest.raises(ValidationError):
            detect_speech_activity(np.full(SR, np.nan), SR)

    def test_white_noise_vetoed_by_zcr(self):
        rng = np.random.default_rng(0)
        mask = detect_speech_activity(0.5 * rng.standard_normal(2 * SR), SR)
        assert mask.active_runs == []

    def test_determinism(self):
        b = synth_bundle("d1", "s1", seed=3, active_s=10.0)
        m1 = detect_speech_activity(b.audio, b.sample_rate)
        m2 = detect_speech_activity(b.audio, b.sample_rate)
        assert np.array_equal(m1.frame_decisions, m2.frame_decisions)
        assert m1.active_runs == m2.active_runs


def mask_with_runs(runs, duration=None):
    duration = duration or (runs[-1][1] if runs else 0.0)
    return SpeechActivityMask(0.01, np.zeros(0, dtype=bool), list(runs), duration)


class TestWindows:
    def test_exact_two_second_run_gives_one_window(self):
        ws = segment_windows(mask_with_runs([(0.0, 2.0)]), "b")
        assert len(ws) == 1
        assert ws[0].end - ws[0].start == pytest.approx(2.0)

    def test_short_run_gives_none(self):
        assert segment_windows(mask_with_runs([(0.0, 1.5)]), "b") == []

    def test_87s_run_gives_86_windows(self):
        assert len(segment_windows(mask_with_runs([(0.0, 87.0)]), "b")) == 86

    def test_windows_stay_inside_their_run(self):
        runs = [(0.0, 5.3), (7.0, 9.4), (12.0, 13.0)]
        for w in segment_windows(mask_with_runs(runs), "b"):
            s, e = runs[w.source_run]
            assert s <= w.start and w.end <= e + 1e-9

    def test_stride_is_one_second(self):
        ws = segment_windows(mask_with_runs([(3.0, 8.0)]), "b")
        starts = [w.start for w in ws]
        assert starts == pytest.approx([3.0, 4.0, 5.0, 6.0])

    @settings(max_examples=80, deadline=None)
    @given(st.floats(min_value=0.1, max_value=300.0))
    def test_window_count_law(self, run_length):
        # oracle: count strides that still fit a full window
        count, k = 0, 0
        while k + 2.0 <= run_length + 1e-9:
            count += 1
            k += 1.0
        assert window_count(run_length) == count
        assert count == (int(math.floor(run_length - 2.0 + 1e-9)) + 1 if run_length >= 2.0 - 1e-9 else 0)


class TestBroadcast:
    def windows(self):
        return [SegmentWindow("w0", "b1", 0, 2, 0), SegmentWindow("w1", "b1", 1, 3, 0)]

    def test_single_rater_broadcasts_to_all_windows(self):
        ratings = [RatingRecord("b1", "r1", (4.0,) * 7)]
        out = broadcast_labels(self.windows(), ratings)
        assert len(out) == 2
        for _, vec in out:
            assert vec == pytest.approx([4.0] * 7)

    def test_three_raters_mean(self):
        ratings = [RatingRecord("b1", f"r{i}", (float(s),) * 7) for i, s in enumerate((3, 4, 5))]
        out = broadcast_labels(self.windows(), ratings)
        assert out[0][1][0] == pytest.approx(4.0)

    def test_unrated_bundle_errors(self):
        with pytest.raises(ValidationError):
            broadcast_labels(self.windows(), [RatingRecord("other", "r1", (3.0,) * 7)])

    def test_rating_bounds_enforced(self):
        with pytest.raises(ValidationError):
            RatingRecord("b1", "r1", (0.5,) * 7)
        with pytest.raises(ValidationError):
            RatingRecord("b1", "r1", (3.0,) * 6)
