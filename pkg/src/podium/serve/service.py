"""Session lifecycle, usage logging and tutoring on top of the store.

Phase rules mirror the field-study protocol: one pretest, a practice
window during which evaluative uploads are rejected (tutoring stays
open), then one posttest once the window has elapsed. Reports are
immutable documents; every served tutor response has passed grounding
validation before it leaves this module.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field

import numpy as np

from podium.dimensions import DIMENSIONS
from podium.errors import NotFoundError, PodiumError, PolicyError, ValidationError
from podium.coach.grounding import validate_grounding
from podium.coach.record import LearnerRecord, Submission, retrieve_evidence
from podium.coach.routines import ROUTINES, load_phrase_library, run_routine
from podium.ingest.io import read_bundle
from podium.pipeline import EngineContext, score_bundle
from podium.psych import PracticeLog, eligibility_filter
from podium.serve.store import Store

PHASES = ("pretest", "practice", "posttest")


@dataclass
class ServiceConfig:
    practice_window_days: float = 30.0
    auth_token: str | None = None
    explain_rows: int = 8


class CoachService:
    def __init__(
        self,
        store: Store,
        models: dict,
        ctx: EngineContext | None = None,
        config: ServiceConfig | None = None,
        clock=time.time,
    ):
        self.store = store
        self.models = models
        self.ctx = ctx or EngineContext()
        self.config = config or ServiceConfig()
        self.clock = clock
        self.phrases = load_phrase_library()

    # ------------------------------------------------------------- sessions

    def _sessions_for(self, learner_id: str) -> list[dict]:
        docs = [
            self.store.get("session", sid)
            for sid in self.store.list_ids("session")
        ]
        return sorted(
            (d for d in docs if d["learner_id"] == learner_id),
            key=lambda d: d["created"],
        )

    def _check_phase(self, learner_id: str, phase: str, now: float) -> None:
        if phase not in PHASES:
            raise ValidationError(f"unknown phase {phase!r}")
        if phase == "practice":
            raise PolicyError(
                "evaluative uploads are disabled during the practice window; "
                "keep practicing with the tutor and submit a posttest when the window ends"
            )
        sessions = self._sessions_for(learner_id)
        have = [s for s in sessions if s["phase"] == phase]
        if have:
            raise PolicyError(f"learner {learner_id} already submitted a {phase}")
        if phase == "posttest":
            pre = [s for s in sessions if s["phase"] == "pretest" and s["status"] == "scored"]
            if not pre:
                raise PolicyError("a scored pretest is required before the posttest")
            elapsed_days = (now - pre[0]["created"]) / 86400.0
            if elapsed_days < self.config.practice_window_days:
                raise PolicyError(
                    f"practice window still open ({elapsed_days:.1f} of "
                    f"{self.config.practice_window_days} days elapsed)"
                )

    def submit_bundle(self, learner_id: str, manifest_path, phase: str) -> dict:
        """Ingest, score and persist one submission; returns the session doc."""
        now = self.clock()
        self._check_phase(learner_id, phase, now)
        session_id = f"sess-{uuid.uuid4().hex[:12]}"
        self.store.append_event(learner_id, "upload", now, 0.0)

        session = {
            "session_id": session_id,
            "learner_id": learner_id,
            "phase": phase,
            "manifest": str(manifest_path),
            "created": now,
            "status": "processing",
            "report_id": None,
            "failure": None,
        }
        try:
            bundle = read_bundle(manifest_path)
            report, details = score_bundle(
                bundle, self.models, self.ctx,
                explain_rows=self.config.explain_rows, created=now,
            )
        except PodiumError as e:
            session["status"] = "unprocessable"
            session["failure"] = str(e)
            self.store.put("session", session_id, session, created=now)
            return session

        report_id = f"rep-{session_id}"
        session["status"] = "scored"
        session["report_id"] = report_id
        session["bundle_id"] = report.bundle_id
        self.store.put("report", report_id, report.to_json(), created=now)
        self.store.put(
            "submission",
            session_id,
            {
                "session_id": session_id,
                "learner_id": learner_id,
                "phase": phase,
                "created": now,
                "scores": report.evidence["scores"],
                "shap": report.evidence["shap"],
                "facial": report.evidence["facial"],
                "vocal": report.evidence["vocal"],
                "lexical": report.evidence["lexical"],
                "transcript": report.evidence["transcript"],
                "report_id": report_id,
                "details": details,
            },
            created=now,
        )
        self.store.put("session", session_id, session, created=now)
        return session

    def get_report_text(self, report_id: str) -> str:
        return self.store.get_text("report", report_id)

    def get_report(self, report_id: str) -> dict:
        return json.loads(self.get_report_text(report_id))

    def get_history(self, learner_id: str) -> list[dict]:
        return self._sessions_for(learner_id)

    # ------------------------------------------------------------- tutoring

    def _learner_record(self, learner_id: str) -> LearnerRecord:
        record = LearnerRecord(learner_id)
        for sid in self.store.list_ids("submission"):
            doc = self.store.get("submission", sid)
            if doc["learner_id"] != learner_id or doc.get("scores") is None:
                continue
            record.add(Submission(
                submission_id=doc["session_id"],
                timestamp=doc["created"],
                scores=doc["scores"],
                transcript=doc.get("transcript", ""),
                shap=doc.get("shap", {}),
                facial=doc.get("facial"),
                vocal=doc.get("vocal"),
                lexical=doc.get("lexical"),
                report_id=doc.get("report_id", ""),
            ))
        return record

    @staticmethod
    def route_message(text: str) -> tuple[str, str | None]:
        """Keyword routing over the three routines; default translates."""
        low = text.lower()
        focus = None
        for d in DIMENSIONS:
            if d.lower() in low:
                focus = d
                break
        if any(k in low for k in ("summary", "summarize", "how did i do", "overview")):
            return "summarize", focus
        if any(k in low for k in ("strength", "weakness", "weak", "best", "worst")):
            return "strengths_weaknesses", focus
        return "translate_indicators", focus

    def tutor_message(self, learner_id: str, text: str) -> dict:
        record = self._learner_record(learner_id)
        if not record.submissions:
            raise PolicyError(
                "no scored submission yet; upload a pretest before asking the tutor"
            )
        routine_id, focus = self.route_message(text)
        routine = ROUTINES[routine_id]
        required = tuple(
            set(routine.required_fields) | {"facial", "vocal", "transcript"}
        )
        retrieval = retrieve_evidence(record, text, k=5, required_fields=required)
        seed_key = f"{learner_id}|{record.latest.submission_id}"
        response = run_routine(routine, retrieval, self.phrases, seed_key, focus)
        check = validate_grounding(response, retrieval)
        if not check.ok:
            raise ValidationError(f"ungrounded tutor response: {check.violations}")
        self.store.append_event(learner_id, "tutor_message", self.clock(), 0.0)
        return {
            "routine": routine_id,
            "focus_dimension": focus,
            "response": response.to_dict(),
            "snippets": [
                {"evidence_id": e, "text": t, "score": s}
                for e, t, s in retrieval.snippets
            ],
        }

    # ------------------------------------------------------- usage and study

    def log_usage(self, learner_id: str, kind: str, duration_s: float = 0.0) -> None:
        self.store.append_event(learner_id, kind, self.clock(), duration_s)

    def practice_log(self, learner_id: str) -> PracticeLog:
        events = self.store.events_for(learner_id)
        sessions = self._sessions_for(learner_id)
        pre = next((s for s in sessions if s["phase"] == "pretest"), None)
        post = next((s for s in sessions if s["phase"] == "posttest"), None)
        return PracticeLog(
            learner_id=learner_id,
            interactions=sum(1 for e in events if e["kind"] == "tutor_message"),
            non_upload_minutes=sum(
                e["duration_s"] for e in events if e["kind"] != "upload"
            ) / 60.0,
            pretest_id=pre["session_id"] if pre else None,
            posttest_id=post["session_id"] if post else None,
            pretest_scorable=bool(pre and pre["status"] == "scored"),
            posttest_scorable=bool(post and post["status"] == "scored"),
            usage_count=len(events),
            events=events,
        )

    def eligibility(self) -> tuple[list[PracticeLog], list[tuple[PracticeLog, str]]]:
        session_learners = {
            self.store.get("session", sid)["learner_id"]
            for sid in self.store.list_ids("session")
        }
        learners = sorted(set(self.store.learners_with_events()) | session_learners)
        logs = [self.practice_log(l) for l in learners]
        return eligibility_filter(logs)

    def model_info(self) -> dict:
        return {
            "dimensions": list(DIMENSIONS),
            "models": {
                d: {
                    "n_trees": len(m.trees),
                    "eta": m.eta,
                    "base_score": m.base_score,
                    "n_features": m.n_features,
                    "hyperparams": m.hyperparams,
                }
                for d, m in self.models.items()
            },
        }
