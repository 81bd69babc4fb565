"""Closed-loop multimodal presentation assessment and coaching engine."""

__version__ = "0.1.0"

from podium.dimensions import DIMENSIONS

__all__ = ["DIMENSIONS", "__version__"]
