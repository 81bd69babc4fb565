"""Grounding validation: every sentence cites retrieved evidence.

Applied to template output and external-generation output alike; a
response fails if any sentence lacks a citation or cites an evidence
id outside the retrieval set.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class GroundingResult:
    ok: bool
    violations: list[str] = field(default_factory=list)


def validate_grounding(response, retrieval) -> GroundingResult:
    allowed = set(retrieval.ids)
    violations = []
    for section, index, sentence in response.sentences():
        where = f"{section}[{index}]"
        if not sentence.evidence_ids:
            violations.append(f"{where}: sentence has no citation")
            continue
        foreign = [e for e in sentence.evidence_ids if e not in allowed]
        for e in foreign:
            violations.append(f"{where}: cites unknown evidence id {e!r}")
    return GroundingResult(ok=not violations, violations=violations)
