"""Sliding analysis windows over speech-active runs.

Each active run of length T yields floor(T - 2) + 1 two-second windows
at a one-second stride (none if T < 2). Windows never span a silent
gap: they are anchored at the run start and must fit inside the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from podium.ingest.vad import SpeechActivityMask

WINDOW_S = 2.0
STRIDE_S = 1.0

_EPS = 1e-9


@dataclass(frozen=True)
class SegmentWindow:
    window_id: str
    bundle_id: str
    start: float
    end: float
    source_run: int


def window_count(run_length: float) -> int:
    """floor(T - 2) + 1 for T >= 2, else 0."""
    if run_length < WINDOW_S - _EPS:
        return 0
    return int(math.floor(run_length - WINDOW_S + _EPS)) + 1


def segment_windows(mask: SpeechActivityMask, bundle_id: str = "") -> list[SegmentWindow]:
    windows: list[SegmentWindow] = []
    k = 0
    for run_idx, (s, e) in enumerate(mask.active_runs):
        for j in range(window_count(e - s)):
            start = s + j * STRIDE_S
            windows.append(
                SegmentWindow(
                    window_id=f"{bundle_id}:w{k:05d}" if bundle_id else f"w{k:05d}",
                    bundle_id=bundle_id,
                    start=start,
                    end=start + WINDOW_S,
                    source_run=run_idx,
                )
            )
            k += 1
    return windows
