"""Acoustic block tests, including the definitional MFCC and DFT oracles."""

import math

import numpy as np
import pytest

from podium.errors import ValidationError
from podium.features import dsp
from podium.features.acoustic import (
    ACOUSTIC_DIM,
    BLOCK_DIM,
    compute_block_values,
    extract_acoustic,
    extract_acoustic_block,
    load_acoustic_manifest,
    select_speaker_signature,
)

SR = 16000
MANIFEST = load_acoustic_manifest()


def tone(freq, duration=2.0, amp=0.5, sr=SR):
    t = np.arange(int(duration * sr)) / sr
    return amp * np.sin(2 * np.pi * freq * t)


def speechlike(seed=0, duration=2.0, f0=150.0, sr=SR):
    rng = np.random.default_rng(seed)
    t = np.arange(int(duration * sr)) / sr
    f = f0 * (1 + 0.05 * np.sin(2 * np.pi * 2.0 * t))
    phase = 2 * np.pi * np.cumsum(f) / sr
    x = sum(a * np.sin(k * phase) for k, a in ((1, 1.0), (2, 0.5), (3, 0.25)))
    x *= 1 + 0.3 * np.sin(2 * np.pi * 3.0 * t)
    return 0.3 * x / np.abs(x).max() + 0.001 * rng.standard_normal(len(t))


class TestManifest:
    def test_101_entries(self):
        assert len(MANIFEST.names) == BLOCK_DIM == 101
        assert ACOUSTIC_DIM == 203

    def test_scale_classes_declared(self):
        assert set(MANIFEST.scale_classes) <= {"invariant", "linear", "none"}
        assert MANIFEST.scale_classes[MANIFEST.index("rms_mean")] == "linear"
        assert MANIFEST.scale_classes[MANIFEST.index("f0_mean")] == "invariant"


class TestF0:
    @pytest.mark.parametrize("freq", [110.0, 220.0, 440.0])
    def test_pure_tones_within_3_percent(self, freq):
        f0, voiced, _ = dsp.f0_track(tone(freq), SR)
        assert voiced.mean() > 0.9
        est = np.median(f0[voiced])
        assert abs(est - freq) / freq < 0.03

    def test_silence_unvoiced(self):
        values = compute_block_values(np.zeros(SR), SR)
        assert values["voiced_ratio"] == 0.0
        assert values["rms_mean"] == pytest.approx(0.0, abs=1e-9)
        assert values["f0_mean"] == 0.0

    def test_white_noise_mostly_unvoiced_and_flat(self):
        rng = np.random.default_rng(1)
        noise = 0.3 * rng.standard_normal(2 * SR)
        values = compute_block_values(noise, SR)
        assert values["voiced_ratio"] < 0.1
        assert values["flatness_mean"] > 0.5

    def test_flatness_matches_definitional_dft_oracle(self):
        """Flatness of one frame vs geometric/arithmetic means over an
        explicitly computed DFT power spectrum."""
        rng = np.random.default_rng(2)
        audio = 0.3 * rng.standard_normal(SR)
        frame_len = int(dsp.FRAME_S * SR)
        frame = audio[:frame_len]
        window = np.hamming(frame_len)
        n_fft = 1 << (frame_len - 1).bit_length()
        x = np.concatenate([frame * window, np.zeros(n_fft - frame_len)])
        k = np.arange(n_fft // 2 + 1)
        n = np.arange(n_fft)
        dft = np.exp(-2j * np.pi * np.outer(k, n) / n_fft) @ x
        power = np.abs(dft) ** 2
        eps = 1e-10
        oracle = math.exp(np.mean(np.log(power + eps))) / (np.mean(power) + eps)

        got = dsp.spectral_descriptors(audio, SR)["flatness"][0]
        assert got == pytest.approx(oracle, abs=1e-9)


class TestMfccOracle:
    def test_50_random_frames_match_definitional_pipeline(self):
        """Implementation vs an explicit DFT + mel triangle + DCT-II oracle."""
        rng = np.random.default_rng(3)
        audio = 0.3 * rng.standard_normal(SR)
        got = dsp.mfcc(audio, SR)

        frame_len = int(dsp.FRAME_S * SR)
        hop = int(dsp.HOP_S * SR)
        n_fft = 1 << (frame_len - 1).bit_length()
        window = np.hamming(frame_len)
        freqs = np.linspace(0.0, SR / 2, n_fft // 2 + 1)

        def mel(f):
            return 2595.0 * math.log10(1.0 + f / 700.0)

        def mel_inv(m):
            return 700.0 * (10 ** (m / 2595.0) - 1.0)

        edges = [mel_inv(mel(0.0) + i * (mel(SR / 2) - mel(0.0)) / 27) for i in range(28)]

        frame_ids = rng.choice(got.shape[0], size=50, replace=False)
        k = np.arange(n_fft)
        for fi in frame_ids:
            frame = audio[fi * hop : fi * hop + frame_len] * window
            x = np.concatenate([frame, np.zeros(n_fft - frame_len)])
            spectrum = np.array([
                abs(sum(x[n] * np.exp(-2j * np.pi * kk * n / n_fft) for n in range(n_fft))) ** 2
                for kk in range(n_fft // 2 + 1)
            ])
            mel_e = np.zeros(26)
            for m in range(26):
                lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
                up = (freqs - lo) / (mid - lo)
                down = (hi - freqs) / (hi - mid)
                w = np.maximum(0.0, np.minimum(up, down))
                mel_e[m] = float(w @ spectrum)
            logmel = np.log(mel_e + 1e-10)
            oracle = np.zeros(13)
            for c in range(13):
                s = sum(logmel[m] * math.cos(math.pi * c * (2 * m + 1) / (2 * 26)) for m in range(26))
                oracle[c] = s * math.sqrt(2.0 / 26) * (math.sqrt(0.5) if c == 0 else 1.0)
            assert np.abs(got[fi] - oracle).max() <= 1e-6


class TestBlock:
    def test_block_length_101(self):
        out = extract_acoustic_block(speechlike(0), SR, MANIFEST)
        assert out.shape == (101,)
        assert np.isfinite(out).all()

    def test_too_short_interval_rejected(self):
        with pytest.raises(ValidationError):
            extract_acoustic_block(tone(220, duration=0.3), SR, MANIFEST)

    def test_scale_classes_under_gain(self):
        """Per-descriptor behavior under waveform gain, as declared."""
        audio = speechlike(4)
        g = 1.7
        a = extract_acoustic_block(audio, SR, MANIFEST)
        b = extract_acoustic_block(g * audio, SR, MANIFEST)
        for i, (name, cls) in enumerate(zip(MANIFEST.names, MANIFEST.scale_classes)):
            if cls == "invariant":
                scale = max(1.0, abs(a[i]))
                assert abs(b[i] - a[i]) / scale < 5e-2, f"{name} not gain invariant"
            elif cls == "linear":
                assert b[i] == pytest.approx(g * a[i], rel=1e-6), f"{name} not linear in gain"

    def test_203_vector_and_signature_sharing(self):
        sig = select_speaker_signature("b", speechlike(5, duration=31.0), SR, MANIFEST)
        w1 = extract_acoustic(speechlike(6), SR, sig, MANIFEST)
        w2 = extract_acoustic(speechlike(7), SR, sig, MANIFEST)
        assert w1.shape == (203,)
        assert np.array_equal(w1[101:], w2[101:])
        assert w1[-1] == sig.stability

    def test_window_equal_to_signature_span(self):
        audio = speechlike(8, duration=30.0)
        sig = select_speaker_signature("b", audio, SR, MANIFEST)
        out = extract_acoustic(audio, SR, sig, MANIFEST)
        assert np.array_equal(out[:101], out[101:202])

    def test_missing_signature_is_an_error(self):
        with pytest.raises(ValidationError):
            extract_acoustic(speechlike(9), SR, None, MANIFEST)
