from podium.ingest.bundle import (
    MediaBundle,
    RatingRecord,
    Word,
    broadcast_labels,
    ratings_matrix,
    trim_lead,
)
from podium.ingest.vad import SpeechActivityMask, VadConfig, detect_speech_activity
from podium.ingest.windows import SegmentWindow, segment_windows

__all__ = [
    "MediaBundle",
    "RatingRecord",
    "Word",
    "SpeechActivityMask",
    "VadConfig",
    "SegmentWindow",
    "broadcast_labels",
    "detect_speech_activity",
    "ratings_matrix",
    "segment_windows",
    "trim_lead",
]
