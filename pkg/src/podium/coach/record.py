"""Learner records and lexical evidence retrieval.

A record is an append-only sequence of practice submissions; every
fact a tutoring routine might cite (a score, an attribution statement,
an emotion mix, a transcript sentence) becomes an evidence item with a
stable id. Retrieval ranks item texts against the query with tf-idf
cosine and merges in the structured fields a routine requires.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from podium.dimensions import DIMENSIONS
from podium.errors import ValidationError

_TOKEN = re.compile(r"[a-z0-9']+")


def dim_slug(dimension: str) -> str:
    return dimension.lower().replace(" & ", "-and-").replace(" ", "-")


_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_SPLIT.split(text) if s.strip()]


@dataclass(frozen=True)
class EvidenceItem:
    evidence_id: str
    kind: str          # score | shap | emotion | lexical | transcript
    text: str
    payload: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass
class Submission:
    submission_id: str
    timestamp: float
    scores: dict[str, float]
    transcript: str = ""
    shap: dict[str, dict[str, float]] = field(default_factory=dict)
    facial: dict[str, float] | None = None
    vocal: dict[str, float] | None = None
    lexical: dict[str, float] | None = None
    report_id: str = ""

    def evidence_items(self) -> list[EvidenceItem]:
        sid = self.submission_id
        items: list[EvidenceItem] = []
        for d in DIMENSIONS:
            if d in self.scores:
                items.append(EvidenceItem(
                    f"{sid}:score:{dim_slug(d)}", "score",
                    f"{d} scored {self.scores[d]:.2f} out of 5.",
                    {"dimension": d, "score": self.scores[d]},
                ))
        for d, shares in self.shap.items():
            if not shares:
                continue
            top = max(shares, key=shares.get)
            items.append(EvidenceItem(
                f"{sid}:shap:{dim_slug(d)}", "shap",
                f"{d} relied mostly on {top} cues "
                f"({shares[top] * 100:.0f} percent of model attribution).",
                {"dimension": d, "shares": dict(shares), "top_modality": top},
            ))
        for channel, dist in (("facial", self.facial), ("vocal", self.vocal)):
            if dist:
                top = max(dist, key=dist.get)
                mix = ", ".join(f"{k} {v * 100:.0f}%" for k, v in dist.items())
                items.append(EvidenceItem(
                    f"{sid}:emotion:{channel}", "emotion",
                    f"{channel.capitalize()} expression mix: {mix}.",
                    {"channel": channel, "distribution": dict(dist), "top": top},
                ))
        if self.lexical:
            top = max(self.lexical, key=self.lexical.get)
            mix = ", ".join(f"{k} {v * 100:.0f}%" for k, v in self.lexical.items())
            items.append(EvidenceItem(
                f"{sid}:lexical", "lexical",
                f"Wording leaned {top} (quadrant mix: {mix}).",
                {"distribution": dict(self.lexical), "top": top},
            ))
        for i, sentence in enumerate(split_sentences(self.transcript)):
            items.append(EvidenceItem(
                f"{sid}:transcript:{i}", "transcript",
                f"You said: \"{sentence}\"",
                {"sentence": sentence, "index": i},
            ))
        return items


@dataclass
class LearnerRecord:
    learner_id: str
    submissions: list[Submission] = field(default_factory=list)

    def add(self, submission: Submission) -> None:
        self.submissions.append(submission)

    @property
    def latest(self) -> Submission:
        if not self.submissions:
            raise ValidationError(f"learner {self.learner_id} has no submissions")
        return self.submissions[-1]

    def evidence_items(self) -> list[EvidenceItem]:
        items = []
        for sub in self.submissions:
            items.extend(sub.evidence_items())
        return items


@dataclass
class RetrievalResult:
    snippets: list[tuple[str, str, float]]      # (evidence_id, text, score)
    fields: dict[str, list[EvidenceItem]]       # structured fields by name
    ids: set[str]

    def field_items(self, name: str) -> list[EvidenceItem]:
        return self.fields.get(name, [])


def _tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _tfidf_rank(items: list[EvidenceItem], query: str) -> list[tuple[EvidenceItem, float]]:
    docs = [_tokenize(it.text) for it in items]
    n = len(docs)
    df = Counter()
    for toks in docs:
        df.update(set(toks))
    idf = {t: math.log(n / (1 + c)) + 1.0 for t, c in df.items()}

    def vec(tokens):
        tf = Counter(tokens)
        return {t: (1 + math.log(c)) * idf.get(t, 1.0) for t, c in tf.items()}

    qv = vec(_tokenize(query))
    qn = math.sqrt(sum(v * v for v in qv.values())) or 1.0
    scored = []
    for it, toks in zip(items, docs):
        dv = vec(toks)
        dn = math.sqrt(sum(v * v for v in dv.values())) or 1.0
        dot = sum(qv.get(t, 0.0) * v for t, v in dv.items())
        scored.append((it, dot / (qn * dn)))
    scored.sort(key=lambda p: (-p[1], p[0].evidence_id))
    return scored


# structured fields a routine can require, mapped to item kinds
FIELD_KINDS = {
    "scores": ("score",),
    "shap": ("shap",),
    "facial": ("emotion",),
    "vocal": ("emotion",),
    "lexical": ("lexical",),
    "transcript": ("transcript",),
}


def retrieve_evidence(
    record: LearnerRecord,
    query: str,
    k: int = 5,
    required_fields: tuple[str, ...] = (),
) -> RetrievalResult:
    """Top-k ranked snippets plus every field the active routine needs.

    All returned evidence carries ids resolvable in the record; k = 0
    yields structured fields only.
    """
    items = record.evidence_items()
    if not items:
        raise ValidationError(f"learner {record.learner_id} has an empty record")

    snippets: list[tuple[str, str, float]] = []
    if k > 0 and query.strip():
        for it, score in _tfidf_rank(items, query)[:k]:
            snippets.append((it.evidence_id, it.text, float(score)))

    latest = record.latest.submission_id
    fields: dict[str, list[EvidenceItem]] = {}
    for name in required_fields:
        kinds = FIELD_KINDS.get(name)
        if kinds is None:
            raise ValidationError(f"unknown evidence field {name!r}")
        got = [it for it in items
               if it.kind in kinds and it.evidence_id.startswith(latest + ":")]
        if name in ("facial", "vocal"):
            got = [it for it in got if it.payload.get("channel") == name]
        fields[name] = got

    ids = {it.evidence_id for it in items}
    return RetrievalResult(snippets=snippets, fields=fields, ids=ids)
