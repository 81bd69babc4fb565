"""Recorded dashboard payloads for offline frontend work.

Runs one synthetic learner through the live service (submit, report,
three tutor turns, history) and saves each response body as JSON under
the output directory. The dashboard's fixture mode replays these.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from podium.pipeline import EngineContext
from podium.serve.service import CoachService, ServiceConfig
from podium.serve.store import Store
from podium.synthetic import synth_bundle, write_bundle_files

TUTOR_TURNS = (
    "How did I do overall?",
    "Why did I get a low score in Voice & Talk?",
    "What are my strengths and weaknesses?",
)


def write_frontend_fixtures(model_dir, out_dir, seed: int = 0) -> list[Path]:
    from podium.cli import _load_models

    models = _load_models(model_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    store = Store(":memory:")
    service = CoachService(
        store, models, EngineContext(),
        ServiceConfig(practice_window_days=0.0),
        clock=lambda: 1_700_000_000.0,
    )
    learner = "demo-learner"
    with tempfile.TemporaryDirectory() as tmp:
        bundle = synth_bundle("demo-bundle", "demo-speaker", seed=seed + 17, active_s=34.0)
        manifest = write_bundle_files(bundle, Path(tmp) / "bundle")
        session = service.submit_bundle(learner, manifest, "pretest")
    if session["status"] != "scored":
        raise RuntimeError(f"fixture bundle failed to score: {session['failure']}")

    report = service.get_report(session["report_id"])
    turns = []
    for text in TUTOR_TURNS:
        turns.append({"request": {"learner_id": learner, "text": text},
                      "response": service.tutor_message(learner, text)})
    service.log_usage(learner, "dashboard_view", 90.0)
    history = service.get_history(learner)

    paths = []
    for name, payload in (
        ("report.json", report),
        ("history.json", history),
        ("tutor.json", turns),
        ("model_info.json", service.model_info()),
        ("session.json", session),
    ):
        path = out / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        paths.append(path)
    return paths
