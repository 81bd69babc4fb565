"""Exact per-prediction Shapley attribution for tree ensembles.

Path-dependent form: when a subset excludes a split feature, both
branches contribute in proportion to their training cover, so no
background dataset is needed at inference. The polynomial-time
algorithm tracks, along each root-to-leaf path, the proportion of
feature subsets of every size that let the path's splits through,
extending the weight polynomial at each split and unwinding it to read
off one feature's contribution at the leaves.

Attributions satisfy local accuracy by construction: the base value
(cover-weighted expected output) plus the per-feature contributions
equals the model's prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from podium.errors import ValidationError
from podium.boost.model import BoostedModel
from podium.boost.trees import LEAF, RegressionTree


@dataclass
class ShapVector:
    phi: np.ndarray
    base: float

    def total(self) -> float:
        return float(self.base + self.phi.sum())


class _Path:
    """The subset-weight polynomial along one descent."""

    __slots__ = ("d", "z", "o", "w")

    def __init__(self):
        self.d: list[int] = []    # feature of each path element (root marker -1)
        self.z: list[float] = []  # cover fraction when the feature is excluded
        self.o: list[float] = []  # indicator: does x follow this split
        self.w: list[float] = []  # subset weights by path position

    def copy(self) -> "_Path":
        p = _Path()
        p.d = self.d.copy()
        p.z = self.z.copy()
        p.o = self.o.copy()
        p.w = self.w.copy()
        return p

    def extend(self, pz: float, po: float, pi: int) -> None:
        l = len(self.d)
        self.d.append(pi)
        self.z.append(pz)
        self.o.append(po)
        self.w.append(1.0 if l == 0 else 0.0)
        for i in range(l - 1, -1, -1):
            self.w[i + 1] += po * self.w[i] * (i + 1) / (l + 1)
            self.w[i] = pz * self.w[i] * (l - i) / (l + 1)

    def unwind(self, i: int) -> None:
        l = len(self.d) - 1
        n = self.w[l]
        o_i, z_i = self.o[i], self.z[i]
        for j in range(l - 1, -1, -1):
            if o_i != 0.0:
                t = self.w[j]
                self.w[j] = n * (l + 1) / ((j + 1) * o_i)
                n = t - self.w[j] * z_i * (l - j) / (l + 1)
            else:
                self.w[j] = self.w[j] * (l + 1) / (z_i * (l - j))
        for j in range(i, l):
            self.d[j] = self.d[j + 1]
            self.z[j] = self.z[j + 1]
            self.o[j] = self.o[j + 1]
        self.d.pop(); self.z.pop(); self.o.pop(); self.w.pop()

    def unwound_sum(self, i: int) -> float:
        p = self.copy()
        p.unwind(i)
        return sum(p.w)

    def find(self, feature: int) -> int | None:
        for i in range(1, len(self.d)):
            if self.d[i] == feature:
                return i
        return None


def _shap_tree(tree: RegressionTree, x: np.ndarray, phi: np.ndarray) -> None:
    if (tree.cover <= 0).any():
        raise ValidationError("tree node without positive cover; cannot attribute")
    feature = tree.feature
    threshold = tree.threshold
    left = tree.left
    right = tree.right
    value = tree.leaf_value
    cover = tree.cover

    def recurse(j: int, path: _Path, pz: float, po: float, pi: int) -> None:
        path = path.copy()
        path.extend(pz, po, pi)
        if feature[j] == LEAF:
            for i in range(1, len(path.d)):
                w = path.unwound_sum(i)
                phi[path.d[i]] += w * (path.o[i] - path.z[i]) * value[j]
            return
        f = int(feature[j])
        xv = x[f]
        if np.isnan(xv):
            hot = left[j] if tree.default_left[j] else right[j]
        else:
            hot = left[j] if xv < threshold[j] else right[j]
        cold = right[j] if hot == left[j] else left[j]

        iz, io = 1.0, 1.0
        k = path.find(f)
        if k is not None:
            iz, io = path.z[k], path.o[k]
            path.unwind(k)
        recurse(hot, path, iz * cover[hot] / cover[j], io, f)
        recurse(cold, path, iz * cover[cold] / cover[j], 0.0, f)

    recurse(0, _Path(), 1.0, 1.0, -1)


def tree_shap(model: BoostedModel, x: np.ndarray) -> ShapVector:
    """Ensemble attribution: per-tree Shapley values scaled by shrinkage.

    base + sum(phi) equals predict(model, x) to numerical precision.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValidationError(f"x must have shape ({model.n_features},)")
    phi = np.zeros(model.n_features)
    for tree in model.trees:
        tree_phi = np.zeros(model.n_features)
        _shap_tree(tree, x, tree_phi)
        phi += model.eta * tree_phi
    return ShapVector(phi=phi, base=model.expected_value())
