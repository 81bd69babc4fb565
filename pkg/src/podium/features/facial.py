"""Geometric facial descriptors over a 60-frame landmark window.

Seven named regions each contribute 540 features: time mean and SD of
30 landmark positions (x, y, z), of their inter-frame displacement
magnitudes per coordinate, of 60 inter-point distances, and of 30
unsigned interior angles (at the middle landmark of each triplet).
Region layout lives in the facial manifest data file; any alternative
decomposition that totals 3,780 can be swapped in.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from podium.errors import FormatError, ValidationError

FACIAL_DIM = 3780
WINDOW_FRAMES = 60
MAX_PAD_FRAMES = 2
N_REGION_LANDMARKS = 30
N_REGION_PAIRS = 60
N_REGION_TRIPLETS = 30
REGION_DIM = 540

_EPS = 1e-9


@dataclass(frozen=True)
class FacialRegion:
    name: str
    landmarks: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    triplets: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class FacialManifest:
    version: str
    regions: tuple[FacialRegion, ...]

    def __post_init__(self):
        if len(self.regions) != 7:
            raise FormatError(f"facial manifest needs 7 regions, got {len(self.regions)}")
        for r in self.regions:
            if len(r.landmarks) != N_REGION_LANDMARKS:
                raise FormatError(f"region {r.name}: needs {N_REGION_LANDMARKS} landmarks")
            if len(r.pairs) != N_REGION_PAIRS:
                raise FormatError(f"region {r.name}: needs {N_REGION_PAIRS} pairs")
            if len(r.triplets) != N_REGION_TRIPLETS:
                raise FormatError(f"region {r.name}: needs {N_REGION_TRIPLETS} triplets")
            for idx in (*r.landmarks, *(i for p in r.pairs for i in p),
                        *(i for t in r.triplets for i in t)):
                if not (0 <= idx < 478):
                    raise FormatError(f"region {r.name}: landmark index {idx} out of [0, 478)")
        if self.total_dim != FACIAL_DIM:
            raise FormatError(f"facial manifest totals {self.total_dim}, expected {FACIAL_DIM}")

    @property
    def total_dim(self) -> int:
        return REGION_DIM * len(self.regions)

    def region(self, name: str) -> FacialRegion:
        for r in self.regions:
            if r.name == name:
                return r
        raise KeyError(name)


def load_facial_manifest(path=None) -> FacialManifest:
    if path is None:
        path = resources.files("podium.data") / "facial_manifest.txt"
    text = Path(str(path)).read_text() if not hasattr(path, "read_text") else path.read_text()
    version = None
    regions: list[FacialRegion] = []
    name, landmarks, pairs, triplets = None, None, None, None

    def flush():
        nonlocal name, landmarks, pairs, triplets
        if name is not None:
            if landmarks is None or pairs is None or triplets is None:
                raise FormatError(f"region {name}: incomplete definition")
            regions.append(FacialRegion(name, landmarks, pairs, triplets))
        name = landmarks = pairs = triplets = None

    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(",")
        if key == "version":
            version = rest
        elif key == "region":
            flush()
            name = rest
        elif key == "landmarks":
            landmarks = tuple(int(v) for v in rest.split(","))
        elif key == "pairs":
            pairs = tuple(tuple(int(v) for v in p.split(":")) for p in rest.split(","))
        elif key == "triplets":
            triplets = tuple(tuple(int(v) for v in t.split(":")) for t in rest.split(","))
        else:
            raise FormatError(f"unknown facial manifest key {key!r}")
    flush()
    if version is None:
        raise FormatError("facial manifest missing version")
    return FacialManifest(version, tuple(regions))


def _pad_frames(frames: np.ndarray) -> np.ndarray:
    n = len(frames)
    if n == WINDOW_FRAMES:
        return frames
    if WINDOW_FRAMES - MAX_PAD_FRAMES <= n < WINDOW_FRAMES:
        pad = np.repeat(frames[-1:], WINDOW_FRAMES - n, axis=0)
        return np.concatenate([frames, pad], axis=0)
    raise ValidationError(
        f"facial window needs {WINDOW_FRAMES} frames "
        f"(short by at most {MAX_PAD_FRAMES}), got {n}"
    )


def extract_facial(frames: np.ndarray, manifest: FacialManifest) -> np.ndarray:
    """3,780 features from a [60, 478, 3] landmark window.

    Windows at a run's tail may be short by up to two frames; the last
    frame is repeated to keep the 60-frame contract.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 3 or frames.shape[1:] != (478, 3):
        raise ValidationError(f"expected [n, 478, 3] landmarks, got {frames.shape}")
    frames = _pad_frames(frames)

    out = np.empty(manifest.total_dim)
    pos = 0
    for region in manifest.regions:
        sel = frames[:, region.landmarks, :]                      # [60, 30, 3]
        out[pos : pos + 90] = sel.mean(axis=0).ravel(); pos += 90
        out[pos : pos + 90] = sel.std(axis=0).ravel(); pos += 90

        vel = np.abs(np.diff(sel, axis=0))                        # [59, 30, 3]
        out[pos : pos + 90] = vel.mean(axis=0).ravel(); pos += 90
        out[pos : pos + 90] = vel.std(axis=0).ravel(); pos += 90

        a = np.array([p[0] for p in region.pairs])
        b = np.array([p[1] for p in region.pairs])
        dist = np.linalg.norm(frames[:, a, :] - frames[:, b, :], axis=2)  # [60, 60]
        out[pos : pos + 60] = dist.mean(axis=0); pos += 60
        out[pos : pos + 60] = dist.std(axis=0); pos += 60

        ta = np.array([t[0] for t in region.triplets])
        tb = np.array([t[1] for t in region.triplets])
        tc = np.array([t[2] for t in region.triplets])
        u = frames[:, ta, :] - frames[:, tb, :]
        w = frames[:, tc, :] - frames[:, tb, :]
        cosang = (u * w).sum(axis=2) / (
            np.linalg.norm(u, axis=2) * np.linalg.norm(w, axis=2) + _EPS
        )
        ang = np.arccos(np.clip(cosang, -1.0, 1.0))               # [60, 30]
        out[pos : pos + 30] = ang.mean(axis=0); pos += 30
        out[pos : pos + 30] = ang.std(axis=0); pos += 30

    return out
