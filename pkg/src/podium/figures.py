"""Matplotlib renderings for the report and study paths.

Figures land next to the delimited outputs: a score bar chart, facial
and vocal emotion pies, the lexical quadrant bars, and effect sizes
with confidence intervals for pre/post studies.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from podium.dimensions import DIMENSIONS

_SCORE_COLOR = "#3b6ea5"
_FOCUS_COLOR = "#c0392b"


def render_scores(report: dict, path) -> Path:
    cards = report["cards"]
    names = [c["dimension"] for c in cards]
    scores = [c["score"] for c in cards]
    colors = [_FOCUS_COLOR if c["focus"] else _SCORE_COLOR for c in cards]
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.barh(range(len(names)), scores, color=colors)
    ax.set_yticks(range(len(names)), names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlim(0, 5)
    ax.set_xlabel("score (1-5)")
    ax.axvline(3.0, color="#888", linestyle=":", linewidth=1)
    ax.set_title("Presentation scores")
    for i, s in enumerate(scores):
        ax.text(s + 0.05, i, f"{s:.2f}", va="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def _pie(dist: dict, title: str, path) -> Path:
    labels = list(dist.keys())
    values = list(dist.values())
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    keep = [(l, v) for l, v in zip(labels, values) if v > 1e-6]
    if keep:
        ax.pie(
            [v for _, v in keep],
            labels=[l for l, _ in keep],
            autopct="%1.0f%%",
            textprops={"fontsize": 8},
        )
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_report_figures(report: dict, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [render_scores(report, out_dir / "scores.png")]
    ev = report["evidence"]
    if ev.get("facial"):
        written.append(_pie(ev["facial"], "Facial emotive expressions", out_dir / "facial.png"))
    if ev.get("vocal"):
        written.append(_pie(ev["vocal"], "Vocal emotive expressions", out_dir / "vocal.png"))
    if ev.get("lexical") is not None:
        quads = ev["lexical"]
        fig, ax = plt.subplots(figsize=(4.8, 3.2))
        names = list(quads.keys())
        ax.bar(range(len(names)), [quads[n] for n in names], color="#7a5195")
        ax.set_xticks(range(len(names)), names, fontsize=7, rotation=15)
        ax.set_ylabel("share")
        ax.set_title("Lexical affective orientations")
        fig.tight_layout()
        fig.savefig(out_dir / "lexical.png", dpi=120)
        plt.close(fig)
        written.append(out_dir / "lexical.png")
    return written


def render_effect_sizes(rows: list[dict], path) -> Path:
    """rows: dimension, d, ci_low, ci_high."""
    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    ys = range(len(rows))
    ds = [r["d"] for r in rows]
    err_lo = [r["d"] - r["ci_low"] for r in rows]
    err_hi = [r["ci_high"] - r["d"] for r in rows]
    ax.errorbar(ds, list(ys), xerr=[err_lo, err_hi], fmt="o", color=_SCORE_COLOR, capsize=3)
    ax.set_yticks(list(ys), [r["dimension"] for r in rows], fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="#888", linewidth=1)
    ax.set_xlabel("Cohen's d (95% CI)")
    ax.set_title("Pre/post effect sizes")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
