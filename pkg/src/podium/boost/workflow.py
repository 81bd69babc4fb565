"""Corpus-level training: tune and fit one model per rubric dimension."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from podium.dimensions import DIMENSIONS
from podium.errors import ValidationError
from podium.boost.model import BoostedModel, Hyperparams, fit_gbm
from podium.boost.split import SplitPlan
from podium.boost.tune import SearchSpace, Trial, tune


def train_dimension(
    X: np.ndarray,
    y: np.ndarray,
    speakers: list[str],
    plan: SplitPlan,
    dimension: str,
    space: SearchSpace | None = None,
    trials: int = 30,
    seed: int = 0,
    base_hp: Hyperparams | None = None,
) -> tuple[BoostedModel, list[Trial]]:
    """Tune on the train folds, then refit on train plus validation.

    Early stopping against the validation speakers picks the tree
    count; the final model is refit on the combined rows with that
    count fixed (no early stopping on the refit).
    """
    base_hp = base_hp or Hyperparams()
    best, log = tune(X, y, speakers, plan, space=space, trials=trials,
                     seed=seed, base_hp=base_hp)
    hp = replace(base_hp, **best)

    part = np.array([plan.assignment.get(s, "?") for s in speakers])
    if (part == "?").any():
        raise ValidationError("row speaker missing from split plan")
    tr = part == "train"
    va = part == "validation"
    y = np.asarray(y, dtype=np.float64)

    staged = fit_gbm(X[tr], y[tr], hp, eval_X=X[va], eval_y=y[va], dimension=dimension)
    n_final = len(staged.trees)

    final_hp = replace(hp, n_trees=max(1, n_final))
    both = tr | va
    model = fit_gbm(X[both], y[both], final_hp, dimension=dimension)
    model.split_plan_digest = plan.digest()
    model.meta["tuned_params"] = dict(best)
    model.meta["validation_trees"] = n_final
    return model, log


def train_all_dimensions(
    X: np.ndarray,
    Y: np.ndarray,
    speakers: list[str],
    plan: SplitPlan,
    space: SearchSpace | None = None,
    trials: int = 30,
    seed: int = 0,
    base_hp: Hyperparams | None = None,
) -> tuple[dict[str, BoostedModel], dict[str, list[Trial]]]:
    """One tuned model per rubric dimension, all on the same features."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != len(DIMENSIONS):
        raise ValidationError(f"Y must be [n, {len(DIMENSIONS)}] in dimension order")
    models: dict[str, BoostedModel] = {}
    logs: dict[str, list[Trial]] = {}
    for d, name in enumerate(DIMENSIONS):
        models[name], logs[name] = train_dimension(
            X, Y[:, d], speakers, plan, name,
            space=space, trials=trials, seed=seed + d, base_hp=base_hp,
        )
    return models, logs
