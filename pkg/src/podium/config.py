"""JSON engine configuration for the CLI and the server."""

from __future__ import annotations

import json
from pathlib import Path

from podium.errors import FormatError
from podium.features.oculomotor import GazeConfig
from podium.ingest.vad import VadConfig
from podium.pipeline import EngineContext


def load_context(config_path=None) -> EngineContext:
    """EngineContext from a JSON file; missing keys keep their defaults."""
    if config_path is None:
        return EngineContext()
    doc = json.loads(Path(config_path).read_text())
    known = {"vad", "gaze", "lead_trim_s", "focus_threshold"}
    unknown = set(doc) - known
    if unknown:
        raise FormatError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    if "vad" in doc:
        kwargs["vad"] = VadConfig(**doc["vad"])
    if "gaze" in doc:
        kwargs["gaze"] = GazeConfig(**doc["gaze"])
    for key in ("lead_trim_s", "focus_threshold"):
        if key in doc:
            kwargs[key] = float(doc[key])
    return EngineContext(**kwargs)
