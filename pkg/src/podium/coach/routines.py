"""Modular tutoring routines with GROW-ordered, evidence-cited output.

Each routine is a lightweight specification: an instructional goal,
the evidence fields it refuses to run without, and the GROW section
schema its output follows. Responses are template instantiations;
every slot is filled from retrieved evidence and every sentence cites
the evidence ids behind it. Coaching phrasing is sampled
deterministically from the bundled phrase library.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from podium.errors import FormatError, ValidationError
from podium.coach.record import EvidenceItem, RetrievalResult

GROW_ORDER = ("Goal", "Reality", "Options", "Will")


@dataclass(frozen=True)
class TutoringRoutine:
    routine_id: str
    goal: str
    required_fields: tuple[str, ...]


ROUTINES: dict[str, TutoringRoutine] = {
    "summarize": TutoringRoutine(
        "summarize",
        "Summarize the latest practice performance across every rubric dimension.",
        ("scores",),
    ),
    "strengths_weaknesses": TutoringRoutine(
        "strengths_weaknesses",
        "Contrast the strongest dimension with the weakest and point practice at the gap.",
        ("scores",),
    ),
    "translate_indicators": TutoringRoutine(
        "translate_indicators",
        "Translate the analytic indicators behind one dimension into plain behavior.",
        ("scores", "shap"),
    ),
}


@dataclass(frozen=True)
class Phrase:
    phrase_id: str
    kind: str
    routine: str
    dimension: str
    section: str
    template: str


@dataclass(frozen=True)
class PhraseLibrary:
    version: str
    phrases: tuple[Phrase, ...]

    def matching(self, kind: str, routine: str, section: str, dimension: str) -> list[Phrase]:
        pool = [p for p in self.phrases
                if p.kind == kind and p.section == section
                and p.routine in (routine, "any")]
        specific = [p for p in pool if p.dimension == dimension]
        return specific if specific else [p for p in pool if p.dimension == "any"]


def load_phrase_library(path=None) -> PhraseLibrary:
    if path is None:
        path = resources.files("podium.data") / "phrase_library.txt"
    text = Path(str(path)).read_text() if not hasattr(path, "read_text") else path.read_text()
    version = None
    phrases = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if parts[0] == "version":
            version = parts[1]
        elif parts[0] == "phrase":
            if len(parts) != 7:
                raise FormatError(f"phrase line needs 7 fields: {line!r}")
            if parts[5] not in GROW_ORDER:
                raise FormatError(f"phrase {parts[1]}: bad section {parts[5]!r}")
            phrases.append(Phrase(parts[1], parts[2], parts[3], parts[4], parts[5], parts[6]))
        else:
            raise FormatError(f"unknown phrase library key {parts[0]!r}")
    if version is None:
        raise FormatError("phrase library missing version")
    return PhraseLibrary(version, tuple(phrases))


@dataclass
class GroundedSentence:
    text: str
    evidence_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"text": self.text, "evidence_ids": list(self.evidence_ids)}


@dataclass
class TutorResponse:
    routine_id: str
    sections: dict[str, list[GroundedSentence]]
    phrase_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        if tuple(self.sections.keys()) != GROW_ORDER:
            raise ValidationError("tutor response sections must follow GROW order")

    def sentences(self):
        for section in GROW_ORDER:
            for i, s in enumerate(self.sections[section]):
                yield section, i, s

    def text(self) -> str:
        blocks = []
        for section in GROW_ORDER:
            body = " ".join(s.text for s in self.sections[section])
            blocks.append(f"{section}: {body}")
        return "\n".join(blocks)

    def to_dict(self) -> dict:
        return {
            "routine_id": self.routine_id,
            "sections": {k: [s.to_dict() for s in v] for k, v in self.sections.items()},
            "phrase_ids": self.phrase_ids,
        }


def _stable_rng(seed_key: str) -> np.random.Generator:
    digest = hashlib.sha256(seed_key.encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


class _Builder:
    def __init__(self, library: PhraseLibrary, routine_id: str, rng: np.random.Generator):
        self.library = library
        self.routine_id = routine_id
        self.rng = rng
        self.used: list[str] = []

    def sentence(self, section: str, kind: str, dimension: str, slots: dict,
                 cites: tuple[str, ...]) -> GroundedSentence:
        options = self.library.matching(kind, self.routine_id, section, dimension)
        if not options:
            raise ValidationError(
                f"phrase library has no {kind!r} entry for {section}/{dimension}"
            )
        phrase = options[int(self.rng.integers(len(options)))]
        try:
            text = phrase.template.format(**slots)
        except KeyError as e:
            raise ValidationError(f"phrase {phrase.phrase_id}: unfilled slot {e}") from e
        if not cites:
            raise ValidationError("grounded sentences need at least one citation")
        self.used.append(phrase.phrase_id)
        return GroundedSentence(text, tuple(cites))


def _score_items(retrieval: RetrievalResult) -> dict[str, EvidenceItem]:
    return {it.payload["dimension"]: it for it in retrieval.field_items("scores")}


def _slots_for(item: EvidenceItem, extra: dict | None = None) -> dict:
    slots = {
        "dimension": item.payload.get("dimension", ""),
        "score": f"{item.payload.get('score', 0):.2f}".rstrip("0").rstrip("."),
    }
    if extra:
        slots.update(extra)
    return slots


def run_routine(
    routine: TutoringRoutine | str,
    retrieval: RetrievalResult,
    library: PhraseLibrary,
    seed_key: str,
    focus_dimension: str | None = None,
) -> TutorResponse:
    """Instantiate one routine against retrieved evidence.

    Refuses (naming the field) when a required evidence field is
    missing from the retrieval. Identical inputs and seed key produce
    identical responses.
    """
    if isinstance(routine, str):
        try:
            routine = ROUTINES[routine]
        except KeyError:
            raise ValidationError(f"unknown routine {routine!r}") from None
    for name in routine.required_fields:
        if not retrieval.field_items(name):
            raise ValidationError(f"routine {routine.routine_id}: missing required evidence field {name!r}")

    rng = _stable_rng(f"{seed_key}|{routine.routine_id}")
    b = _Builder(library, routine.routine_id, rng)
    scores = _score_items(retrieval)
    ordered = sorted(scores.values(), key=lambda it: it.payload["score"])
    lowest, highest = ordered[0], ordered[-1]
    focus_item = scores.get(focus_dimension) if focus_dimension else None
    focus_item = focus_item or lowest
    focus_dim = focus_item.payload["dimension"]

    goal = [b.sentence("Goal", "goal", focus_dim, _slots_for(focus_item), (focus_item.evidence_id,))]

    reality: list[GroundedSentence] = []
    if routine.routine_id == "summarize":
        for it in scores.values():
            reality.append(b.sentence("Reality", "score", it.payload["dimension"],
                                      _slots_for(it), (it.evidence_id,)))
    elif routine.routine_id == "strengths_weaknesses":
        reality.append(b.sentence("Reality", "strength", highest.payload["dimension"], {
            "strength_dimension": highest.payload["dimension"],
            "strength_score": f"{highest.payload['score']:.2f}",
        }, (highest.evidence_id,)))
        reality.append(b.sentence("Reality", "weakness", lowest.payload["dimension"], {
            "weakness_dimension": lowest.payload["dimension"],
            "weakness_score": f"{lowest.payload['score']:.2f}",
        }, (lowest.evidence_id,)))
        focus_item, focus_dim = lowest, lowest.payload["dimension"]
    else:  # translate_indicators
        reality.append(b.sentence("Reality", "score", focus_dim, _slots_for(focus_item),
                                  (focus_item.evidence_id,)))
        shap_items = {it.payload["dimension"]: it for it in retrieval.field_items("shap")}
        shap_it = shap_items.get(focus_dim) or next(iter(shap_items.values()))
        shares = shap_it.payload["shares"]
        top = shap_it.payload["top_modality"]
        reality.append(b.sentence("Reality", "translate", focus_dim, {
            "dimension": shap_it.payload["dimension"],
            "top_modality": top,
            "top_share": f"{shares[top] * 100:.0f}%",
        }, (shap_it.evidence_id, focus_item.evidence_id)))
        for channel in ("facial", "vocal"):
            for it in retrieval.field_items(channel):
                reality.append(b.sentence("Reality", channel, focus_dim, {
                    "dimension": focus_dim,
                    f"top_{channel}": it.payload["top"],
                }, (it.evidence_id,)))

    options = [b.sentence("Options", "options", focus_dim, _slots_for(focus_item),
                          (focus_item.evidence_id,))]
    will = [b.sentence("Will", "will", focus_dim, _slots_for(focus_item),
                       (focus_item.evidence_id,))]

    response = TutorResponse(
        routine_id=routine.routine_id,
        sections={"Goal": goal, "Reality": reality, "Options": options, "Will": will},
        phrase_ids=b.used,
    )
    # construction guarantees grounding; enforce it anyway
    from podium.coach.grounding import validate_grounding

    result = validate_grounding(response, retrieval)
    if not result.ok:
        raise ValidationError(f"routine emitted ungrounded output: {result.violations}")
    return response
