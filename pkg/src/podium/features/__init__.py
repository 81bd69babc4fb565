from podium.features.acoustic import (
    AcousticManifest,
    SpeakerSignature,
    extract_acoustic,
    extract_acoustic_block,
    select_speaker_signature,
)
from podium.features.facial import FacialManifest, extract_facial
from podium.features.fuse import (
    FUSED_DIM,
    MODALITY_RANGES,
    FusedVector,
    fuse,
)
from podium.features.oculomotor import extract_oculomotor
from podium.features.text import HashingEmbedder, TextEmbedding, embed_text

__all__ = [
    "AcousticManifest",
    "FacialManifest",
    "FUSED_DIM",
    "FusedVector",
    "HashingEmbedder",
    "MODALITY_RANGES",
    "SpeakerSignature",
    "TextEmbedding",
    "embed_text",
    "extract_acoustic",
    "extract_acoustic_block",
    "extract_facial",
    "extract_oculomotor",
    "fuse",
    "select_speaker_signature",
]
