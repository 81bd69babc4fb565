"""Subset-enumeration Shapley oracle for small models.

Uses the same cover-expectation value function as the fast path: with
a subset S fixed, descending a tree follows x at splits on features in
S and mixes both branches by training cover otherwise. Exponential in
the number of distinct features the model uses, so it is capped.
"""

from __future__ import annotations

from itertools import combinations
from math import factorial

import numpy as np

from podium.errors import ValidationError
from podium.boost.model import BoostedModel
from podium.boost.trees import LEAF, RegressionTree
from podium.explain.treeshap import ShapVector

MAX_FEATURES = 15


def _tree_value(tree: RegressionTree, x: np.ndarray, subset: frozenset) -> float:
    def descend(j: int) -> float:
        f = tree.feature[j]
        if f == LEAF:
            return float(tree.leaf_value[j])
        if int(f) in subset:
            xv = x[int(f)]
            if np.isnan(xv):
                child = tree.left[j] if tree.default_left[j] else tree.right[j]
            else:
                child = tree.left[j] if xv < tree.threshold[j] else tree.right[j]
            return descend(child)
        wl = tree.cover[tree.left[j]] / tree.cover[j]
        wr = tree.cover[tree.right[j]] / tree.cover[j]
        return wl * descend(tree.left[j]) + wr * descend(tree.right[j])

    return descend(0)


def _model_value(model: BoostedModel, x: np.ndarray, subset: frozenset) -> float:
    return model.base_score + model.eta * sum(
        _tree_value(t, x, subset) for t in model.trees
    )


def brute_force_shapley(model: BoostedModel, x: np.ndarray) -> ShapVector:
    """Exact Shapley over the model's used features; dummies get zero."""
    x = np.asarray(x, dtype=np.float64)
    used = sorted(set().union(*[t.used_features() for t in model.trees]) if model.trees else set())
    if len(used) > MAX_FEATURES:
        raise ValidationError(
            f"brute force capped at {MAX_FEATURES} distinct features, model uses {len(used)}"
        )
    phi = np.zeros(model.n_features)
    m = len(used)
    cache: dict[frozenset, float] = {}

    def value(subset: frozenset) -> float:
        if subset not in cache:
            cache[subset] = _model_value(model, x, subset)
        return cache[subset]

    for j in used:
        others = [f for f in used if f != j]
        for k in range(m):
            weight = factorial(k) * factorial(m - k - 1) / factorial(m)
            for combo in combinations(others, k):
                s = frozenset(combo)
                phi[j] += weight * (value(s | {j}) - value(s))

    return ShapVector(phi=phi, base=value(frozenset()))
