"""Sentence-level rhetorical guidance: original, revised, rationale.

The external generation client is optional. When it is absent, times
out, or returns items that break the schema, a rule-based fallback
produces the revision instead: filler-word removal, splitting of
sentences over 25 words, and a simple passive-to-active rewrite.
Originals are always kept byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from podium.errors import ValidationError

MAX_SENTENCE_WORDS = 25

_FILLERS = re.compile(
    r"\b(um+|uh+|erm*|ah+|you know|kind of|sort of|basically|literally)\b[,]?\s*",
    re.IGNORECASE,
)
_PASSIVE = re.compile(
    r"\b(was|were|is|are|been|being)\s+(\w+(?:ed|en))\s+by\s+(the\s+\w+|\w+)",
    re.IGNORECASE,
)
_SPLIT_WORDS = ("and", "but", "so", "because", "which")


@dataclass
class Revision:
    original: str
    revised: str
    rationale: str
    source: str = "rules"   # rules | client

    def to_dict(self) -> dict:
        return {
            "original": self.original,
            "revised": self.revised,
            "rationale": self.rationale,
            "source": self.source,
        }


class ExternalGenerationClient:
    """Abstract transport to a hosted generator.

    generate() takes {instructions, items, schema} and returns a list
    of dicts matching the schema. Implementations may raise TimeoutError
    or any exception; callers fall back to rules.
    """

    def generate(self, request: dict) -> list[dict]:  # pragma: no cover - interface
        raise NotImplementedError


class RecordedClient(ExternalGenerationClient):
    """Replays canned responses; the test double for the external client."""

    def __init__(self, responses: list[list[dict]]):
        self.responses = list(responses)
        self.requests: list[dict] = []

    def generate(self, request: dict) -> list[dict]:
        self.requests.append(request)
        if not self.responses:
            raise TimeoutError("no recorded response left")
        return self.responses.pop(0)


def _strip_fillers(sentence: str) -> str | None:
    cleaned, n = _FILLERS.subn("", sentence)
    if n == 0:
        return None
    cleaned = re.sub(r"\s{2,}", " ", cleaned).strip(" ,")
    if cleaned and not cleaned[0].isupper():
        cleaned = cleaned[0].upper() + cleaned[1:]
    return cleaned


def _split_long(sentence: str) -> str | None:
    words = sentence.split()
    if len(words) <= MAX_SENTENCE_WORDS:
        return None
    mid = len(words) // 2
    best = None
    for i, w in enumerate(words):
        if w.strip(",;").lower() in _SPLIT_WORDS and abs(i - mid) < (abs(best - mid) if best is not None else 10**9):
            best = i
    if best is None or best in (0, len(words) - 1):
        best = mid
    head = " ".join(words[:best]).rstrip(",;")
    tail = " ".join(words[best:])
    tail = tail[0].upper() + tail[1:] if tail else tail
    if not head.endswith((".", "!", "?")):
        head += "."
    return f"{head} {tail}"


def _activate(sentence: str) -> str | None:
    m = _PASSIVE.search(sentence)
    if not m:
        return None
    agent = m.group(3)
    verb = m.group(2)
    return sentence[: m.start()] + f"{agent} {verb}" + sentence[m.end():]


def rules_revision(sentence: str) -> Revision:
    cleaned = _strip_fillers(sentence)
    if cleaned is not None:
        return Revision(sentence, cleaned, "removed filler words", "rules")
    split = _split_long(sentence)
    if split is not None:
        return Revision(
            sentence, split,
            f"split a sentence over {MAX_SENTENCE_WORDS} words into two",
            "rules",
        )
    active = _activate(sentence)
    if active is not None:
        return Revision(sentence, active, "rewrote passive phrasing in active voice", "rules")
    return Revision(sentence, sentence, "already concise and direct", "rules")


_ITEM_KEYS = {"original", "revised", "rationale"}


def _valid_item(item, original: str) -> bool:
    return (
        isinstance(item, dict)
        and _ITEM_KEYS <= set(item)
        and item["original"] == original
        and isinstance(item["revised"], str)
        and isinstance(item["rationale"], str)
        and item["rationale"].strip() != ""
    )


def rhetorical_guidance(
    sentences: list[str],
    client: ExternalGenerationClient | None = None,
) -> tuple[list[Revision], dict]:
    """One revision triplet per input sentence, plus path flags."""
    if not sentences:
        raise ValidationError("rhetorical guidance needs at least one sentence")
    flags: dict = {}
    items: list[dict] | None = None
    if client is not None:
        request = {
            "instructions": "Revise each sentence for on-camera delivery; keep meaning.",
            "items": [{"index": i, "original": s} for i, s in enumerate(sentences)],
            "schema": {"fields": sorted(_ITEM_KEYS)},
        }
        try:
            items = client.generate(request)
        except Exception as e:
            flags["client_error"] = f"{type(e).__name__}: {e}"
            items = None

    out: list[Revision] = []
    for i, sentence in enumerate(sentences):
        item = items[i] if items is not None and i < len(items) else None
        if item is not None and _valid_item(item, sentence):
            out.append(Revision(sentence, item["revised"], item["rationale"], "client"))
        else:
            if item is not None:
                flags.setdefault("schema_rejects", []).append(i)
            out.append(rules_revision(sentence))
    return out, flags
