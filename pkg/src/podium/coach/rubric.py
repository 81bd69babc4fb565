"""The bundled behaviorally anchored rating scale and score cards.

Anchor text on a card is always a verbatim string from the rubric data
file; interpolated scores get a band label describing where they sit
relative to the nearest anchored level.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from podium.dimensions import DIMENSIONS
from podium.errors import FormatError, ValidationError

FOCUS_THRESHOLD = 3.0
ANCHOR_LEVELS = (1, 3, 5)


@dataclass(frozen=True)
class RubricDimension:
    name: str
    question: str
    anchors: dict[int, str]


@dataclass(frozen=True)
class Rubric:
    version: str
    dimensions: dict[str, RubricDimension]

    def __post_init__(self):
        missing = [d for d in DIMENSIONS if d not in self.dimensions]
        if missing:
            raise FormatError(f"rubric missing dimensions: {missing}")


def load_rubric(path=None) -> Rubric:
    if path is None:
        path = resources.files("podium.data") / "bars_rubric.txt"
    text = Path(str(path)).read_text() if not hasattr(path, "read_text") else path.read_text()
    version = None
    dims: dict[str, RubricDimension] = {}
    name, question, anchors = None, None, {}

    def flush():
        nonlocal name, question, anchors
        if name is not None:
            if question is None or set(anchors) != set(ANCHOR_LEVELS):
                raise FormatError(f"rubric dimension {name}: needs question and anchors 1/3/5")
            dims[name] = RubricDimension(name, question, dict(anchors))
        name, question, anchors = None, None, {}

    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if parts[0] == "version":
            version = parts[1]
        elif parts[0] == "dimension":
            flush()
            name = parts[1]
        elif parts[0] == "question":
            question = parts[1]
        elif parts[0] == "anchor":
            anchors[int(parts[1])] = parts[2]
        else:
            raise FormatError(f"unknown rubric key {parts[0]!r}")
    flush()
    if version is None:
        raise FormatError("rubric missing version")
    return Rubric(version, dims)


@dataclass
class ScoreCard:
    dimension: str
    score: float
    anchor_level: int
    anchor_text: str
    band_label: str
    focus: bool

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "score": self.score,
            "anchor_level": self.anchor_level,
            "anchor_text": self.anchor_text,
            "band_label": self.band_label,
            "focus": self.focus,
        }


def make_scorecard(
    rubric: Rubric, dimension: str, score: float, focus_threshold: float = FOCUS_THRESHOLD
) -> ScoreCard:
    if dimension not in rubric.dimensions:
        raise ValidationError(f"unknown rubric dimension {dimension!r}")
    if not (1.0 <= score <= 5.0):
        raise ValidationError(f"{dimension} score {score} outside [1, 5]")
    level = min(ANCHOR_LEVELS, key=lambda l: (abs(score - l), l))
    if abs(score - level) <= 0.25:
        band = f"at level {level}"
    elif score > level:
        band = f"above level {level}"
    else:
        band = f"approaching level {level}"
    return ScoreCard(
        dimension=dimension,
        score=round(float(score), 2),
        anchor_level=level,
        anchor_text=rubric.dimensions[dimension].anchors[level],
        band_label=band,
        focus=score < focus_threshold,
    )
