"""Frame-level speech DSP: MFCC, pitch, formants, spectral descriptors.

Conventions used throughout:

* analysis frames are 25 ms with a 10 ms hop unless stated otherwise;
* MFCC uses a Hamming window, an FFT zero-padded to the next power of
  two, 26 triangular mel filters (HTK mel scale) spanning 0..sr/2, a
  natural-log compression and an orthonormal DCT-II keeping the first
  13 coefficients;
* pitch uses 40 ms frames, normalized autocorrelation restricted to a
  50..500 Hz lag band with parabolic peak interpolation;
* formants come from LPC (autocorrelation method, Levinson-Durbin) of
  order 2 + sr/1000 on pre-emphasized Hamming frames, taking the first
  three well-damped roots.
"""

from __future__ import annotations

import numpy as np

from podium.errors import ValidationError
from podium.ingest.vad import frame_signal

FRAME_S = 0.025
HOP_S = 0.010
N_MELS = 26
N_MFCC = 13
F0_FRAME_S = 0.040
F0_MIN_HZ = 50.0
F0_MAX_HZ = 500.0
VOICING_PEAK_MIN = 0.45
_EPS = 1e-10


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int) -> np.ndarray:
    """Triangular filters on the Hz axis, shape [n_mels, n_fft//2 + 1]."""
    edges = mel_to_hz(np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2), n_mels + 2))
    bins = np.linspace(0.0, sample_rate / 2, n_fft // 2 + 1)
    fb = np.zeros((n_mels, len(bins)))
    for m in range(n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (bins - lo) / max(mid - lo, _EPS)
        down = (hi - bins) / max(hi - mid, _EPS)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


def dct_matrix(n_out: int, n_in: int) -> np.ndarray:
    """Orthonormal DCT-II rows."""
    n = np.arange(n_in)
    mat = np.cos(np.pi * np.outer(np.arange(n_out), 2 * n + 1) / (2 * n_in))
    mat *= np.sqrt(2.0 / n_in)
    mat[0] *= np.sqrt(0.5)
    return mat


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def frame_audio(audio: np.ndarray, sample_rate: int, frame_s=FRAME_S, hop_s=HOP_S):
    frame = int(round(frame_s * sample_rate))
    hop = int(round(hop_s * sample_rate))
    frames = frame_signal(np.ascontiguousarray(audio, dtype=np.float64), frame, hop)
    if len(frames) == 0:
        raise ValidationError("audio shorter than one analysis frame")
    return frames


def power_spectra(frames: np.ndarray, window: np.ndarray | None = None) -> np.ndarray:
    """Windowed, zero-padded power spectra, one row per frame."""
    n = frames.shape[1]
    if window is None:
        window = np.hamming(n)
    n_fft = _next_pow2(n)
    spec = np.fft.rfft(frames * window, n=n_fft, axis=1)
    return (spec.real**2 + spec.imag**2)


def mfcc(audio: np.ndarray, sample_rate: int) -> np.ndarray:
    """[n_frames, 13] cepstral coefficients."""
    frames = frame_audio(audio, sample_rate)
    power = power_spectra(frames)
    n_fft = 2 * (power.shape[1] - 1)
    fb = mel_filterbank(N_MELS, n_fft, sample_rate)
    mel_e = power @ fb.T
    logmel = np.log(mel_e + _EPS)
    return logmel @ dct_matrix(N_MFCC, N_MELS).T


def delta(track: np.ndarray, width: int = 2) -> np.ndarray:
    """Regression delta over +-width frames with edge repetition."""
    if len(track) == 0:
        return track.copy()
    pad = np.concatenate([np.repeat(track[:1], width, axis=0), track,
                          np.repeat(track[-1:], width, axis=0)], axis=0)
    denom = 2.0 * sum(k * k for k in range(1, width + 1))
    out = np.zeros_like(track, dtype=np.float64)
    for k in range(1, width + 1):
        out += k * (pad[width + k : width + k + len(track)]
                    - pad[width - k : width - k + len(track)])
    return out / denom


def frame_rms(audio: np.ndarray, sample_rate: int, frame_s=FRAME_S, hop_s=HOP_S) -> np.ndarray:
    frames = frame_audio(audio, sample_rate, frame_s, hop_s)
    return np.sqrt(np.mean(frames * frames, axis=1))


def frame_zcr(audio: np.ndarray, sample_rate: int) -> np.ndarray:
    frames = frame_audio(audio, sample_rate)
    crossings = np.abs(np.diff(np.signbit(frames).astype(np.int8), axis=1)).sum(axis=1)
    return crossings / frames.shape[1]


def f0_candidates(audio: np.ndarray, sample_rate: int, fmin=F0_MIN_HZ, fmax=F0_MAX_HZ):
    """Per-frame pitch candidates before any voicing decision.

    Returns (f0_hz, peak, rms): the interpolated autocorrelation-peak
    frequency, the normalized peak height and the frame RMS.
    """
    frames = frame_audio(audio, sample_rate, F0_FRAME_S, HOP_S)
    n = frames.shape[1]
    frames = frames - frames.mean(axis=1, keepdims=True)
    lag_lo = max(2, int(np.floor(sample_rate / fmax)))
    lag_hi = min(n - 2, int(np.ceil(sample_rate / fmin)))
    if lag_hi <= lag_lo:
        raise ValidationError("pitch lag band empty: frame too short for fmin")
    # circular autocorrelation is exact for lags < n_fft - n
    n_fft = _next_pow2(n + lag_hi + 2)
    spec = np.fft.rfft(frames, n=n_fft, axis=1)
    ac = np.fft.irfft(spec.real**2 + spec.imag**2, n=n_fft, axis=1)[:, :n]
    r0 = ac[:, 0] + _EPS

    band = ac[:, lag_lo : lag_hi + 1]
    peak_idx = np.argmax(band, axis=1) + lag_lo
    rows = np.arange(len(frames))
    peak = ac[rows, peak_idx] / r0

    # parabolic interpolation around the integer peak
    l = np.clip(peak_idx, lag_lo + 1, lag_hi - 1)
    y0, y1, y2 = ac[rows, l - 1], ac[rows, l], ac[rows, l + 1]
    denom = y0 - 2 * y1 + y2
    shift = np.where(np.abs(denom) > _EPS, 0.5 * (y0 - y2) / np.where(denom == 0, 1, denom), 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    lag = np.where(peak_idx == l, peak_idx + shift, peak_idx.astype(np.float64))

    rms = np.sqrt(np.mean(frames * frames, axis=1))
    return sample_rate / lag, peak, rms


def harmonic_ratio_db(peak: np.ndarray) -> np.ndarray:
    """Harmonics-to-noise ratio per frame from the normalized peak."""
    r = np.clip(peak, 1e-6, 1.0 - 1e-6)
    return 10.0 * np.log10(r / (1.0 - r))


def voicing_gate(f0: np.ndarray, peak: np.ndarray, rms: np.ndarray, fmin=F0_MIN_HZ, fmax=F0_MAX_HZ):
    """Voicing decision for a span given its candidate track.

    The energy gate is relative to the span's loud frames so the
    decision is invariant under waveform gain.
    """
    gate = 0.05 * (np.percentile(rms, 95) + _EPS) if len(rms) else 0.0
    voiced = (peak > VOICING_PEAK_MIN) & (rms > gate) & (f0 >= fmin) & (f0 <= fmax)
    return np.where(voiced, f0, 0.0), voiced


def f0_track(audio: np.ndarray, sample_rate: int, fmin=F0_MIN_HZ, fmax=F0_MAX_HZ):
    """Autocorrelation pitch track: (f0_hz, voiced, rms) per frame.

    f0 is 0 where unvoiced. A frame is voiced when its normalized
    autocorrelation peak inside the lag band clears VOICING_PEAK_MIN
    and its energy clears the span-relative gate.
    """
    cand, peak, rms = f0_candidates(audio, sample_rate, fmin, fmax)
    f0, voiced = voicing_gate(cand, peak, rms, fmin, fmax)
    return f0, voiced, rms


def levinson_durbin(r: np.ndarray, order: int) -> np.ndarray:
    """LPC coefficients a[0..order] with a[0] = 1 from autocorrelation r."""
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    if err <= 0:
        return a
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1 : 0 : -1])
        k = -acc / err
        a[1:i] = a[1:i] + k * a[1:i][::-1]
        a[i] = k
        err *= 1.0 - k * k
        if err <= 0:
            break
    return a


def levinson_batch(r: np.ndarray, order: int) -> np.ndarray:
    """Levinson-Durbin across frames: r [n, order+1] -> a [n, order+1]."""
    n = len(r)
    a = np.zeros((n, order + 1))
    a[:, 0] = 1.0
    err = r[:, 0].copy()
    dead = err <= 0
    err[dead] = 1.0  # frozen; their coefficients stay at the identity
    for i in range(1, order + 1):
        acc = r[:, i] + np.einsum("nj,nj->n", a[:, 1:i], r[:, i - 1 : 0 : -1])
        k = np.where(dead, 0.0, -acc / err)
        a[:, 1:i] = a[:, 1:i] + k[:, None] * a[:, 1:i][:, ::-1]
        a[:, i] = k
        err *= 1.0 - k * k
        dead |= err <= 0
        err[err <= 0] = 1.0
    return a


def lpc_formants(frame: np.ndarray, sample_rate: int, n_formants: int = 3):
    """First formant frequencies from LPC roots, NaN-padded to n_formants."""
    return formant_frames(frame[None, :], sample_rate, n_formants)[0]


def formant_frames(frames: np.ndarray, sample_rate: int, n_formants: int = 3) -> np.ndarray:
    """Batched LPC formants: frames [n, L] -> [n, n_formants] (NaN padded)."""
    order = int(2 + sample_rate / 1000)
    n, L = frames.shape
    if L <= order + 1:
        return np.full((n, n_formants), np.nan)
    w = frames * np.hamming(L)
    n_fft = _next_pow2(2 * L)
    spec = np.fft.rfft(w, n=n_fft, axis=1)
    ac = np.fft.irfft(spec.real**2 + spec.imag**2, n=n_fft, axis=1)[:, : order + 1]
    a = levinson_batch(ac, order)

    comp = np.zeros((n, order, order))
    idx = np.arange(order - 1)
    comp[:, idx + 1, idx] = 1.0
    comp[:, 0, :] = -a[:, 1:]
    roots = np.linalg.eigvals(comp)

    freqs = np.angle(roots) * sample_rate / (2 * np.pi)
    bw = -np.log(np.abs(roots) + _EPS) * sample_rate / np.pi
    ok = (np.imag(roots) > 1e-8) & (freqs > 90.0) & (freqs < sample_rate / 2 - 50.0) & (bw < 400.0)
    freqs = np.where(ok, freqs, np.inf)
    freqs.sort(axis=1)
    out = freqs[:, :n_formants]
    return np.where(np.isfinite(out), out, np.nan)


MAX_FORMANT_FRAMES = 600


def formant_track(audio: np.ndarray, sample_rate: int) -> np.ndarray:
    """[n_frames, 3] formant frequencies; NaN where estimation failed.

    Long intervals are subsampled to MAX_FORMANT_FRAMES analysis frames
    (the block statistics do not need every 10 ms step).
    """
    emphasized = np.append(audio[0], audio[1:] - 0.97 * audio[:-1])
    frames = frame_audio(emphasized, sample_rate)
    if len(frames) > MAX_FORMANT_FRAMES:
        stride = int(np.ceil(len(frames) / MAX_FORMANT_FRAMES))
        frames = frames[::stride]
    return formant_frames(np.ascontiguousarray(frames), sample_rate)


def spectral_descriptors(audio: np.ndarray, sample_rate: int) -> dict[str, np.ndarray]:
    """Per-frame centroid, rolloff(85%), flux, flatness and bandwidth."""
    frames = frame_audio(audio, sample_rate)
    power = power_spectra(frames)
    n_fft = 2 * (power.shape[1] - 1)
    freqs = np.linspace(0.0, sample_rate / 2, power.shape[1])

    total = power.sum(axis=1) + _EPS
    centroid = (power * freqs).sum(axis=1) / total
    bandwidth = np.sqrt((power * (freqs - centroid[:, None]) ** 2).sum(axis=1) / total)

    cum = np.cumsum(power, axis=1)
    target = 0.85 * cum[:, -1:]
    rolloff_idx = np.argmax(cum >= target, axis=1)
    rolloff = freqs[rolloff_idx]

    flatness = np.exp(np.mean(np.log(power + _EPS), axis=1)) / (power.mean(axis=1) + _EPS)

    mag = np.sqrt(power)
    norm = np.linalg.norm(mag, axis=1, keepdims=True) + _EPS
    unit = mag / norm
    flux = np.zeros(len(frames))
    if len(frames) > 1:
        flux[1:] = np.linalg.norm(np.diff(unit, axis=0), axis=1)

    return {
        "centroid": centroid,
        "rolloff": rolloff,
        "flux": flux,
        "flatness": flatness,
        "bandwidth": bandwidth,
    }
