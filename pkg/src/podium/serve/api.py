"""HTTP surface for the dashboard: plain JSON over a handful of routes."""

from __future__ import annotations

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from pydantic import BaseModel

from podium.errors import NotFoundError, PodiumError, PolicyError
from podium.serve.service import CoachService


class SubmitRequest(BaseModel):
    learner_id: str
    manifest_path: str
    phase: str


class TutorRequest(BaseModel):
    learner_id: str
    text: str


class UsageRequest(BaseModel):
    learner_id: str
    kind: str
    duration_s: float = 0.0


def create_app(service: CoachService, attribution_path=None) -> FastAPI:
    app = FastAPI(title="podium", version="0.1.0")

    def check_token(x_auth_token: str | None = Header(default=None)):
        expected = service.config.auth_token
        if expected and x_auth_token != expected:
            raise HTTPException(status_code=401, detail="bad or missing token")

    guarded = Depends(check_token)

    @app.post("/submit", dependencies=[guarded])
    def submit(req: SubmitRequest):
        try:
            return service.submit_bundle(req.learner_id, req.manifest_path, req.phase)
        except PolicyError as e:
            raise HTTPException(status_code=409, detail=str(e))
        except PodiumError as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.get("/report/{report_id}", dependencies=[guarded])
    def report(report_id: str):
        try:
            body = service.get_report_text(report_id)
        except NotFoundError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return Response(content=body, media_type="application/json")

    @app.get("/history/{learner_id}", dependencies=[guarded])
    def history(learner_id: str):
        return service.get_history(learner_id)

    @app.post("/tutor", dependencies=[guarded])
    def tutor(req: TutorRequest):
        try:
            return service.tutor_message(req.learner_id, req.text)
        except PolicyError as e:
            raise HTTPException(status_code=409, detail=str(e))
        except PodiumError as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.post("/usage", dependencies=[guarded])
    def usage(req: UsageRequest):
        try:
            service.log_usage(req.learner_id, req.kind, req.duration_s)
        except PodiumError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return {"ok": True}

    @app.get("/model-info", dependencies=[guarded])
    def model_info():
        return service.model_info()

    @app.get("/attribution", dependencies=[guarded])
    def attribution():
        if attribution_path is None:
            raise HTTPException(status_code=404, detail="no attribution table configured")
        from podium.explain.modality import read_attribution_table

        try:
            return read_attribution_table(attribution_path)
        except FileNotFoundError:
            raise HTTPException(status_code=404, detail="attribution table not found")

    @app.get("/study-stats", dependencies=[guarded])
    def study_stats():
        included, excluded = service.eligibility()
        return {
            "included": [l.learner_id for l in included],
            "excluded": [
                {"learner_id": l.learner_id, "reason": r} for l, r in excluded
            ],
        }

    return app
