"""Command-line interface.

Subcommands cover the batch paths: synthesize a demo corpus, train the
seven models from a corpus manifest, score a bundle, export modality
attribution, render a full report (figures plus delimited output), run
the pre/post study statistics, and serve the HTTP API.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import traceback
from dataclasses import replace
from pathlib import Path

import numpy as np

from podium.dimensions import DIMENSIONS
from podium.errors import PodiumError
from podium.coach.record import dim_slug


def _load_models(model_dir):
    from podium.boost.io import load_model

    model_dir = Path(model_dir)
    models = {}
    for d in DIMENSIONS:
        path = model_dir / f"{dim_slug(d)}.model.txt"
        if not path.exists():
            raise PodiumError(f"missing model dump: {path}")
        models[d] = load_model(path)
    return models


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


# ----------------------------------------------------------------- commands

def cmd_synth(args):
    from podium.synthetic import write_corpus

    corpus = write_corpus(
        args.out, n_speakers=args.speakers, seed=args.seed, active_s=args.active_seconds
    )
    print(f"wrote corpus manifest {corpus}")
    return 0


def cmd_train(args):
    from podium.boost.split import make_split_plan
    from podium.boost.evaluate import evaluate
    from podium.boost.io import save_model
    from podium.boost.model import Hyperparams
    from podium.boost.tune import ParamSpec, SearchSpace
    from podium.boost.workflow import train_all_dimensions
    from podium.explain.modality import modality_attribution, write_attribution_table
    from podium.features.fuse import MODALITY_RANGES
    from podium.ingest.bundle import mean_ratings
    from podium.ingest.io import read_bundle, read_corpus_manifest, read_ratings
    from podium.config import load_context
    from podium.pipeline import extract_bundle_features, features_to_matrix

    out = Path(args.model_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = load_context(args.config)

    bundle_manifests, ratings_path = read_corpus_manifest(args.corpus)
    ratings = read_ratings(ratings_path)
    labels = mean_ratings(ratings)

    parts = []
    for mpath in bundle_manifests:
        bundle = read_bundle(mpath)
        parts.append(extract_bundle_features(bundle, ctx))
        print(f"  features: {bundle.bundle_id} ({len(parts[-1].windows)} windows)")
    matrix = features_to_matrix(parts, labels)

    speakers = matrix.speaker_ids
    plan = make_split_plan(sorted(set(speakers)), seed=args.seed)

    space = SearchSpace.default()
    base_hp = Hyperparams(early_stopping_patience=30, seed=args.seed)
    if args.fast:
        space = SearchSpace((
            ParamSpec("eta", 0.05, 0.3, log=True),
            ParamSpec("max_depth", 3, 4, integer=True),
            ParamSpec("n_trees", 20, 60, integer=True),
            ParamSpec("feature_subsample", 0.1, 0.3),
        ))
        base_hp = replace(base_hp, early_stopping_patience=8)

    models, logs = train_all_dimensions(
        matrix.X, matrix.labels, speakers, plan,
        space=space, trials=args.trials, seed=args.seed, base_hp=base_hp,
    )

    part = np.array([plan.assignment[s] for s in speakers])
    test = part == "test"
    eval_rows = []
    att_rows = []
    for d in DIMENSIONS:
        save_model(models[d], out / f"{dim_slug(d)}.model.txt")
        _write_csv(
            out / f"{dim_slug(d)}.trials.csv",
            ["trial", "phase", "objective", "params"],
            [[t.number, t.phase, repr(t.objective), json.dumps(t.params)] for t in logs[d]],
        )
        di = DIMENSIONS.index(d)
        rep = evaluate(models[d], matrix.X[test], matrix.labels[test, di],
                       [b for b, m in zip(matrix.bundle_ids, test) if m], d)
        eval_rows.append([
            d, rep.segment.n, f"{rep.segment.r2:.3f}", f"{rep.segment.mae:.3f}",
            f"{rep.segment.rho:.3f}",
            f"{rep.video.r2:.3f}", f"{rep.video.mae:.3f}", f"{rep.video.rho:.3f}",
        ])
        att_rows.append(modality_attribution(
            models[d], matrix.X[test][:: max(1, int(test.sum()) // 16)].astype(np.float64),
            dict(MODALITY_RANGES),
        ))
        print(f"  trained {d}: segment R2 {rep.segment.r2:.3f} MAE {rep.segment.mae:.3f}")

    _write_csv(out / "eval.csv",
               ["dimension", "n_segments", "segment_r2", "segment_mae", "segment_rho",
                "video_r2", "video_mae", "video_rho"], eval_rows)
    write_attribution_table(out / "attribution.csv", att_rows)
    (out / "split_plan.json").write_text(json.dumps({
        "seed": args.seed, "assignment": plan.assignment, "folds": plan.folds,
        "digest": plan.digest(),
    }, indent=2))
    print(f"wrote models and reports to {out}")
    return 0


def cmd_score(args):
    from podium.ingest.io import read_bundle
    from podium.config import load_context
    from podium.pipeline import score_bundle

    models = _load_models(args.models)
    bundle = read_bundle(args.manifest)
    report, details = score_bundle(bundle, models, load_context(args.config))
    out = Path(args.out) if args.out else Path("scores.csv")
    _write_csv(out, ["dimension", "score"],
               [[d, report.score(d)] for d in DIMENSIONS])
    print(f"wrote {out}")
    for d in DIMENSIONS:
        print(f"  {d}: {report.score(d):.2f}")
    return 0


def cmd_explain(args):
    from podium.explain.modality import modality_attribution, write_attribution_table
    from podium.features.fuse import MODALITY_RANGES, read_matrix

    models = _load_models(args.models)
    matrix = read_matrix(args.matrix)
    step = max(1, len(matrix.X) // args.rows)
    X_eval = matrix.X[::step].astype(np.float64)
    rows = [
        modality_attribution(models[d], X_eval, dict(MODALITY_RANGES))
        for d in DIMENSIONS
    ]
    write_attribution_table(args.out, rows)
    print(f"wrote {args.out}")
    return 0


def cmd_report(args):
    from podium.figures import render_report_figures
    from podium.ingest.io import read_bundle
    from podium.config import load_context
    from podium.pipeline import score_bundle

    models = _load_models(args.models)
    bundle = read_bundle(args.manifest)
    report, details = score_bundle(bundle, models, load_context(args.config))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    _write_csv(out / "scores.csv",
               ["dimension", "score", "anchor_level", "band", "focus", "anchor_text"],
               [[c.dimension, c.score, c.anchor_level, c.band_label, c.focus, c.anchor_text]
                for c in report.cards])
    _write_csv(out / "diagnostics.csv",
               ["channel", "mode", "rank_key", "linked_dimensions", "top_segments"],
               [[d.channel, d.mode, f"{d.rank_key:.4f}", "|".join(d.linked_dimensions),
                 "|".join(d.top_segments)] for d in report.diagnostics])
    figures = render_report_figures(report.to_dict(), out / "figures")
    print(f"wrote report to {out} ({len(figures)} figures)")
    return 0


def cmd_study(args):
    from podium.figures import render_effect_sizes
    from podium.psych import PracticeLog, eligibility_filter, ols_standardized, paired_t

    logs_dir = Path(args.logs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    logs = []
    with open(logs_dir / "logs.csv", newline="") as f:
        for row in csv.DictReader(f):
            logs.append(PracticeLog(
                learner_id=row["learner_id"],
                interactions=int(row["interactions"]),
                non_upload_minutes=float(row["non_upload_minutes"]),
                pretest_id=row["pretest_id"] or None,
                posttest_id=row["posttest_id"] or None,
                pretest_scorable=row.get("pretest_scorable", "1") in ("1", "true", "True"),
                posttest_scorable=row.get("posttest_scorable", "1") in ("1", "true", "True"),
                usage_count=int(row.get("usage_count", 0)),
            ))
    included, excluded = eligibility_filter(logs)
    _write_csv(out / "eligibility.csv", ["learner_id", "included", "reason"],
               [[l.learner_id, 1, ""] for l in included]
               + [[l.learner_id, 0, r] for l, r in excluded])

    scores: dict[tuple[str, str], dict[str, float]] = {}
    with open(logs_dir / "scores.csv", newline="") as f:
        for row in csv.DictReader(f):
            scores[(row["learner_id"], row["phase"])] = {
                d: float(row[d]) for d in DIMENSIONS
            }
    keep = [l.learner_id for l in included
            if (l.learner_id, "pretest") in scores and (l.learner_id, "posttest") in scores]

    paired_rows, effect_rows = [], []
    for d in DIMENSIONS:
        pre = np.array([scores[(l, "pretest")][d] for l in keep])
        post = np.array([scores[(l, "posttest")][d] for l in keep])
        r = paired_t(pre, post)
        paired_rows.append([d, len(keep), f"{r.value:.2f}", r.df, f"{r.p:.4g}",
                            f"{r.effect_size:.2f}", f"{r.ci[0]:.2f}", f"{r.ci[1]:.2f}"])
        effect_rows.append({"dimension": d, "d": r.effect_size,
                            "ci_low": r.ci[0], "ci_high": r.ci[1]})
    _write_csv(out / "paired_stats.csv",
               ["dimension", "n", "t", "df", "p", "cohens_d", "d_ci_low", "d_ci_high"],
               paired_rows)
    render_effect_sizes(effect_rows, out / "effects.png")

    demo_path = logs_dir / "demographics.csv"
    if demo_path.exists() and keep:
        demo = {}
        with open(demo_path, newline="") as f:
            reader = csv.DictReader(f)
            demo_cols = [c for c in reader.fieldnames if c != "learner_id"]
            for row in reader:
                demo[row["learner_id"]] = row
        usage = {l.learner_id: l for l in included}
        reg_rows = []
        for d in DIMENSIONS:
            continuous = {
                "pretest": np.array([scores[(l, "pretest")][d] for l in keep]),
                "usage_count": np.array([float(usage[l].usage_count) for l in keep]),
                "usage_minutes": np.array([usage[l].non_upload_minutes for l in keep]),
            }
            categorical = {}
            for c in demo_cols:
                values = [demo[l][c] for l in keep]
                try:
                    continuous[c] = np.array([float(v) for v in values])
                except ValueError:
                    categorical[c] = (values, sorted(set(values))[0])
            y = np.array([scores[(l, "posttest")][d] for l in keep])
            fit = ols_standardized(y, continuous, categorical)
            reg_rows.append([
                d, f"{fit.beta('pretest'):.2f}", f"{fit.beta('usage_count'):.2f}",
                f"{fit.beta('usage_minutes'):.2f}", f"{fit.adjusted_r2:.2f}",
                f"{fit.f.value:.2f}", f"({fit.f.df[0]}, {fit.f.df[1]})", f"{fit.f.p:.4g}",
            ])
        _write_csv(out / "regression.csv",
                   ["dimension", "beta_pretest", "beta_usage_count", "beta_usage_minutes",
                    "adjusted_r2", "F", "df", "p"], reg_rows)

    print(f"wrote study outputs to {out} "
          f"({len(included)} included, {len(excluded)} excluded)")
    return 0


def cmd_serve(args):
    import uvicorn

    from podium.serve.api import create_app
    from podium.serve.service import CoachService, ServiceConfig
    from podium.serve.store import Store

    import os

    models = _load_models(args.models)
    store = Store(args.store)
    config = ServiceConfig(
        practice_window_days=args.practice_window_days,
        auth_token=os.environ.get("PODIUM_TOKEN"),
    )
    from podium.config import load_context

    service = CoachService(store, models, load_context(args.config), config)
    attribution = Path(args.models) / "attribution.csv"
    app = create_app(service, attribution if attribution.exists() else None)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_fixtures(args):
    from podium.serve.fixtures import write_frontend_fixtures

    paths = write_frontend_fixtures(args.models, args.out, seed=args.seed)
    for p in paths:
        print(f"wrote {p}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="podium", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic demo corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--speakers", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--active-seconds", type=float, default=36.0)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("train", help="train the seven dimension models from a corpus")
    p.add_argument("--config", help="engine config JSON")
    p.add_argument("--corpus", required=True, help="corpus manifest JSON")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fast", action="store_true", help="compact search space for demos")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("score", help="score one bundle")
    p.add_argument("--config", help="engine config JSON")
    p.add_argument("--models", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("explain", help="export the modality attribution table")
    p.add_argument("--models", required=True)
    p.add_argument("--matrix", required=True, help="feature matrix prefix")
    p.add_argument("--out", default="attribution.csv")
    p.add_argument("--rows", type=int, default=32)
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("report", help="render a full feedback report with figures")
    p.add_argument("--config", help="engine config JSON")
    p.add_argument("--models", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("study", help="eligibility filter and pre/post statistics")
    p.add_argument("--logs", required=True, help="directory with logs.csv, scores.csv")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_study)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--config", help="engine config JSON")
    p.add_argument("--models", required=True)
    p.add_argument("--store", default="podium.db")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--practice-window-days", type=float, default=30.0)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("fixtures", help="record dashboard fixture payloads")
    p.add_argument("--models", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_fixtures)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PodiumError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
