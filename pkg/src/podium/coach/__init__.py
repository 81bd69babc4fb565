from podium.coach.grounding import GroundingResult, validate_grounding
from podium.coach.record import LearnerRecord, RetrievalResult, Submission, retrieve_evidence
from podium.coach.report import DiagnosticCue, FeedbackReport, build_report, map_diagnostics
from podium.coach.rhetoric import rhetorical_guidance
from podium.coach.routines import (
    ROUTINES,
    PhraseLibrary,
    TutorResponse,
    load_phrase_library,
    run_routine,
)
from podium.coach.rubric import Rubric, ScoreCard, load_rubric, make_scorecard

__all__ = [
    "DiagnosticCue",
    "FeedbackReport",
    "GroundingResult",
    "LearnerRecord",
    "PhraseLibrary",
    "ROUTINES",
    "RetrievalResult",
    "Rubric",
    "ScoreCard",
    "Submission",
    "TutorResponse",
    "build_report",
    "load_phrase_library",
    "load_rubric",
    "make_scorecard",
    "map_diagnostics",
    "retrieve_evidence",
    "rhetorical_guidance",
    "run_routine",
    "validate_grounding",
]
