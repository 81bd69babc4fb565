"""Three-layer feedback reports.

Layer 1 is the summary plus seven score cards; layer 2 the expressive
diagnostics per channel with segment drill-down ids; layer 3 the
evidence bundle that grounds tutoring and rhetorical guidance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from podium.dimensions import DIMENSIONS
from podium.errors import ValidationError
from podium.affect import EmotionDistribution, QuadrantDistribution
from podium.coach.rubric import FOCUS_THRESHOLD, Rubric, ScoreCard, make_scorecard

# fixed channel-to-dimension links; cues never step outside them
CHANNEL_DIMENSIONS = {
    "facial": ("Nonverbal Expressiveness", "Eye Contact"),
    "vocal": ("Voice & Talk",),
    "lexical": ("Topic", "Content", "Clarity", "Voice & Talk"),
}

_CHANNEL_ORDER = ("facial", "vocal", "lexical")


@dataclass
class DiagnosticCue:
    channel: str
    linked_dimensions: tuple[str, ...]
    distribution: dict[str, float]
    top_segments: list[str]
    template_id: str
    rank_key: float
    mode: str  # deficit | informational

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "linked_dimensions": list(self.linked_dimensions),
            "distribution": self.distribution,
            "top_segments": self.top_segments,
            "template_id": self.template_id,
            "rank_key": self.rank_key,
            "mode": self.mode,
        }


def _entropy(values: list[float]) -> float:
    p = np.array([v for v in values if v > 0])
    return float(-(p * np.log(p)).sum()) if len(p) else 0.0


def map_diagnostics(
    channels: dict[str, EmotionDistribution | QuadrantDistribution],
    scores: dict[str, float],
    focus_threshold: float = FOCUS_THRESHOLD,
    top_segments: dict[str, list[str]] | None = None,
) -> list[DiagnosticCue]:
    """One cue per available channel, ranked by linked-dimension deficit.

    With no dimension below threshold the cues switch to informational
    mode and are ranked by the channel distribution's entropy instead.
    """
    top_segments = top_segments or {}
    cues = []
    any_deficit = False
    for channel in _CHANNEL_ORDER:
        dist = channels.get(channel)
        if dist is None:
            continue
        linked = CHANNEL_DIMENSIONS[channel]
        deficits = [max(0.0, focus_threshold - scores[d]) for d in linked if d in scores]
        deficit = max(deficits) if deficits else 0.0
        if deficit > 0:
            any_deficit = True
        if isinstance(dist, QuadrantDistribution):
            snapshot = dict(dist.shares)
        else:
            snapshot = dist.as_dict()
        cues.append(
            DiagnosticCue(
                channel=channel,
                linked_dimensions=linked,
                distribution=snapshot,
                top_segments=list(top_segments.get(channel, []))[:3],
                template_id=f"{channel}_deficit" if deficit > 0 else f"{channel}_info",
                rank_key=deficit,
                mode="deficit",
            )
        )
    if not any_deficit:
        for cue in cues:
            cue.rank_key = _entropy(list(cue.distribution.values()))
            cue.mode = "informational"
            cue.template_id = f"{cue.channel}_info"
    cues.sort(key=lambda c: (-c.rank_key, _CHANNEL_ORDER.index(c.channel)))
    return cues


@dataclass
class FeedbackReport:
    bundle_id: str
    summary: str
    cards: list[ScoreCard]
    diagnostics: list[DiagnosticCue]
    evidence: dict
    created: float = 0.0

    def __post_init__(self):
        if [c.dimension for c in self.cards] != list(DIMENSIONS):
            raise ValidationError("report must carry the 7 cards in rubric order")

    def score(self, dimension: str) -> float:
        for c in self.cards:
            if c.dimension == dimension:
                return c.score
        raise KeyError(dimension)

    def to_dict(self) -> dict:
        return {
            "bundle_id": self.bundle_id,
            "summary": self.summary,
            "cards": [c.to_dict() for c in self.cards],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "evidence": self.evidence,
            "created": self.created,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @staticmethod
    def from_dict(doc: dict) -> "FeedbackReport":
        return FeedbackReport(
            bundle_id=doc["bundle_id"],
            summary=doc["summary"],
            cards=[ScoreCard(**c) for c in doc["cards"]],
            diagnostics=[
                DiagnosticCue(
                    channel=d["channel"],
                    linked_dimensions=tuple(d["linked_dimensions"]),
                    distribution=d["distribution"],
                    top_segments=d["top_segments"],
                    template_id=d["template_id"],
                    rank_key=d["rank_key"],
                    mode=d["mode"],
                )
                for d in doc["diagnostics"]
            ],
            evidence=doc["evidence"],
            created=doc.get("created", 0.0),
        )


def _summary_text(cards: list[ScoreCard], diagnostics: list[DiagnosticCue]) -> str:
    overall = next(c for c in cards if c.dimension == "Overall Rating")
    focus = [c.dimension for c in cards if c.focus]
    parts = [
        f"Overall Rating {overall.score} out of 5 ({overall.band_label}: "
        f"\"{overall.anchor_text}\")."
    ]
    if focus:
        parts.append("Focus areas: " + ", ".join(focus) + ".")
    else:
        parts.append("No dimension fell below the focus threshold this round.")
    if diagnostics:
        lead = diagnostics[0]
        top = max(lead.distribution, key=lead.distribution.get)
        parts.append(
            f"The {lead.channel} channel is the most telling signal right now "
            f"(dominated by {top})."
        )
    return " ".join(parts)


def build_report(
    bundle_id: str,
    scores: dict[str, float],
    rubric: Rubric,
    shap_tables: dict[str, dict[str, float]] | None = None,
    facial: EmotionDistribution | None = None,
    vocal: EmotionDistribution | None = None,
    quadrants: QuadrantDistribution | None = None,
    transcript_text: str = "",
    top_segments: dict[str, list[str]] | None = None,
    focus_threshold: float = FOCUS_THRESHOLD,
    created: float = 0.0,
) -> FeedbackReport:
    missing = [d for d in DIMENSIONS if d not in scores]
    if missing:
        raise ValidationError(f"report missing dimension scores: {missing}")

    cards = [make_scorecard(rubric, d, scores[d], focus_threshold) for d in DIMENSIONS]
    channels: dict = {}
    if facial is not None:
        channels["facial"] = facial
    if vocal is not None:
        channels["vocal"] = vocal
    if quadrants is not None:
        channels["lexical"] = quadrants
    diagnostics = map_diagnostics(channels, scores, focus_threshold, top_segments)

    evidence = {
        "scores": {d: scores[d] for d in DIMENSIONS},
        "anchors": {c.dimension: c.anchor_text for c in cards},
        "shap": shap_tables or {},
        "facial": facial.as_dict() if facial is not None else None,
        "vocal": vocal.as_dict() if vocal is not None else None,
        "lexical": dict(quadrants.shares) if quadrants is not None else None,
        "lexical_coverage": quadrants.coverage if quadrants is not None else None,
        "transcript": transcript_text,
    }
    return FeedbackReport(
        bundle_id=bundle_id,
        summary=_summary_text(cards, diagnostics),
        cards=cards,
        diagnostics=diagnostics,
        evidence=evidence,
        created=created,
    )
