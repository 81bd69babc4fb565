"""Gradient-boosted ensembles over fused feature rows.

Boosting is the plain second-order form on squared error (gradient =
prediction - target, hessian = 1), with optional row and feature
subsampling per tree and early stopping on validation MAE. Models are
immutable after fitting; prediction is base score plus the shrinkage-
scaled sum of leaf values.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field

import numpy as np

from podium.errors import ValidationError
from podium.boost.split import SplitPlan
from podium.boost.trees import RegressionTree, grow_tree


@dataclass(frozen=True)
class Hyperparams:
    eta: float = 0.1
    max_depth: int = 4
    n_trees: int = 200
    subsample: float = 1.0
    feature_subsample: float = 1.0
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0
    early_stopping_patience: int = 30
    seed: int = 0

    def validate(self) -> None:
        if not (0 < self.eta <= 1):
            raise ValidationError("eta must be in (0, 1]")
        if self.max_depth < 1 or self.n_trees < 1:
            raise ValidationError("max_depth and n_trees must be positive")
        if not (0 < self.subsample <= 1 and 0 < self.feature_subsample <= 1):
            raise ValidationError("subsample fractions must be in (0, 1]")
        if self.reg_lambda < 0 or self.min_child_weight < 0:
            raise ValidationError("reg_lambda and min_child_weight must be >= 0")


@dataclass
class BoostedModel:
    dimension: str
    base_score: float
    eta: float
    trees: list[RegressionTree]
    n_features: int
    hyperparams: dict = field(default_factory=dict)
    split_plan_digest: str = ""
    meta: dict = field(default_factory=dict)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValidationError(
                f"input has {X.shape[1]} features, model expects {self.n_features}"
            )
        out = np.full(len(X), self.base_score)
        for tree in self.trees:
            out += self.eta * tree.predict(X)
        return out

    def expected_value(self) -> float:
        """Cover-weighted background output (prediction over training mass)."""
        return self.base_score + self.eta * sum(t.expected_value() for t in self.trees)

    def digest(self) -> str:
        parts = [f"{self.base_score!r}|{self.eta!r}|{self.n_features}"]
        for t in self.trees:
            parts.append(t.feature.tobytes().hex())
            parts.append(t.threshold.tobytes().hex())
            parts.append(t.leaf_value.tobytes().hex())
            parts.append(t.cover.tobytes().hex())
        return hashlib.sha256("|".join(parts).encode()).hexdigest()


def predict(model: BoostedModel, x: np.ndarray) -> float:
    """Single fused vector to score."""
    return float(model.predict(np.asarray(x)[None, :])[0])


def _presort(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(X, axis=0, kind="stable").T.astype(np.int32)
    order = np.ascontiguousarray(order)
    vals = np.take_along_axis(np.ascontiguousarray(X.T), order, axis=1)
    return order, vals


def fit_gbm(
    X: np.ndarray,
    y: np.ndarray,
    hp: Hyperparams,
    eval_X: np.ndarray | None = None,
    eval_y: np.ndarray | None = None,
    dimension: str = "",
    presorted: tuple[np.ndarray, np.ndarray] | None = None,
) -> BoostedModel:
    """Fit one ensemble; early-stop on eval MAE when an eval set is given.

    With early stopping the returned model is truncated to the
    validation-optimal round, so it never carries more trees than that
    optimum plus the patience that was spent discovering it. Callers
    fitting the same rows repeatedly (tuning) can pass the `_presort`
    output to skip the per-fit sort.
    """
    hp.validate()
    X = np.ascontiguousarray(X, dtype=np.float32)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise ValidationError("empty training set")
    if len(X) != len(y):
        raise ValidationError("X and y row counts differ")
    if not np.isfinite(X).all():
        raise ValidationError("non-finite feature values are rejected at input")
    if not np.isfinite(y).all():
        raise ValidationError("non-finite targets")

    n, n_features = X.shape
    rng = np.random.default_rng(hp.seed)
    order0, vals0 = presorted if presorted is not None else _presort(X)

    base = float(y.mean())
    pred = np.full(n, base)
    model = BoostedModel(
        dimension=dimension,
        base_score=base,
        eta=hp.eta,
        trees=[],
        n_features=n_features,
        hyperparams=asdict(hp),
    )

    use_eval = eval_X is not None and eval_y is not None and len(eval_y) > 0
    if use_eval:
        eval_X = np.asarray(eval_X, dtype=np.float64)
        eval_pred = np.full(len(eval_X), base)
        best_mae = np.inf
        best_round = -1

    n_cols = max(1, int(round(hp.feature_subsample * n_features)))
    history = []
    for t in range(hp.n_trees):
        if hp.subsample < 1.0:
            w = (rng.random(n) < hp.subsample).astype(np.float64)
            if w.sum() == 0:
                w[rng.integers(0, n)] = 1.0
        else:
            w = np.ones(n)
        g = (pred - y) * w

        if n_cols < n_features:
            cols = np.sort(rng.choice(n_features, size=n_cols, replace=False)).astype(np.int64)
            order = order0[cols].copy()
            vals = vals0[cols].copy()
        else:
            cols = np.arange(n_features, dtype=np.int64)
            order = order0.copy()
            vals = vals0.copy()

        tree, leaf_segments = grow_tree(
            order, vals, g, w, cols,
            max_depth=hp.max_depth,
            reg_lambda=hp.reg_lambda,
            min_child_weight=hp.min_child_weight,
        )
        model.trees.append(tree)
        for node, s, e in leaf_segments:
            pred[order[0, s:e]] += hp.eta * tree.leaf_value[node]

        if use_eval:
            eval_pred += hp.eta * tree.predict(eval_X)
            mae = float(np.abs(eval_pred - eval_y).mean())
            history.append(mae)
            if mae < best_mae - 1e-12:
                best_mae = mae
                best_round = t
            elif t - best_round >= hp.early_stopping_patience:
                break

    if use_eval and best_round >= 0:
        model.trees = model.trees[: best_round + 1]
        model.meta["best_round"] = best_round
        model.meta["best_eval_mae"] = best_mae
        model.meta["eval_history"] = history
    return model


def train_boosted(
    X: np.ndarray,
    y: np.ndarray,
    hp: Hyperparams,
    plan: SplitPlan,
    speakers: list[str],
    dimension: str = "",
) -> BoostedModel:
    """Plan-aware fit: rows are routed by their speaker's partition.

    Train rows fit the ensemble; validation rows drive early stopping.
    Rows from test speakers are refused outright.
    """
    speakers = list(speakers)
    if len(speakers) != len(X):
        raise ValidationError("speakers must align with X rows")
    part = np.array([plan.assignment.get(s, "?") for s in speakers])
    if (part == "?").any():
        raise ValidationError("row speaker missing from split plan")
    if (part == "test").any():
        raise ValidationError("test-speaker rows may not enter training")
    tr = part == "train"
    va = part == "validation"
    model = fit_gbm(
        X[tr], np.asarray(y)[tr], hp,
        eval_X=X[va] if va.any() else None,
        eval_y=np.asarray(y)[va] if va.any() else None,
        dimension=dimension,
    )
    model.split_plan_digest = plan.digest()
    return model
