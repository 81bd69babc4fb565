"""Single regression trees: exact greedy splits on presorted columns.

The trainer keeps, per candidate feature, the row ids sorted by that
feature's value ([F, N] layout). Finding a node's best split is one
linear scan per feature over the node's segment; applying a split is a
stable partition of every column's segment, so children keep sorted
order and no re-sorting ever happens. The two hot loops are compiled
with numba.

Split gain is the second-order formula
0.5 * (GL^2/(HL+lam) + GR^2/(HR+lam) - (GL+GR)^2/(HL+HR+lam))
and a leaf's value is -G/(H+lam). Node cover is its hessian sum, which
is the training row weight that reached it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from podium.errors import ValidationError

LEAF = -1


@dataclass
class RegressionTree:
    feature: np.ndarray        # int32 per node, LEAF for leaves
    threshold: np.ndarray      # float64
    left: np.ndarray           # int32
    right: np.ndarray          # int32
    leaf_value: np.ndarray     # float64
    cover: np.ndarray          # float64
    default_left: np.ndarray   # bool, missing-value routing

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def used_features(self) -> set[int]:
        return set(int(f) for f in self.feature if f != LEAF)

    def max_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int32)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[i] + 1
                depth[self.right[i]] = depth[i] + 1
        return int(depth.max()) if self.n_nodes else 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Vectorized root-to-leaf routing; NaN follows the default branch."""
        X = np.atleast_2d(X)
        n = len(X)
        node = np.zeros(n, dtype=np.int32)
        rows = np.arange(n)
        while True:
            f = self.feature[node]
            hot = f != LEAF
            if not hot.any():
                break
            xv = X[rows, np.where(hot, f, 0)]
            nan = np.isnan(xv)
            go_left = np.where(nan, self.default_left[node], xv < self.threshold[node])
            nxt = np.where(go_left, self.left[node], self.right[node])
            node = np.where(hot, nxt, node)
        return self.leaf_value[node]

    def expected_value(self) -> float:
        """Cover-weighted mean leaf value (the tree's background output)."""
        leaves = self.feature == LEAF
        total = self.cover[leaves].sum()
        if total <= 0:
            return 0.0
        return float((self.leaf_value[leaves] * self.cover[leaves]).sum() / total)

    def validate_cover(self, rtol: float = 1e-9) -> None:
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                kids = self.cover[self.left[i]] + self.cover[self.right[i]]
                if abs(kids - self.cover[i]) > rtol * max(1.0, abs(self.cover[i])):
                    raise ValidationError(
                        f"node {i}: cover {self.cover[i]} != children sum {kids}"
                    )


@njit(cache=True)
def _node_totals(order, s, e, g, h):
    G = 0.0
    H = 0.0
    for t in range(s, e):
        r = order[0, t]
        G += g[r]
        H += h[r]
    return G, H


@njit(cache=True)
def _best_split(order, vals, s, e, g, h, lam, min_child_weight, min_gain, G, H):
    F = order.shape[0]
    parent = G * G / (H + lam)
    best_gain = min_gain
    best_f = -1
    best_i = -1
    best_thr = 0.0
    best_hl = 0.0
    for f in range(F):
        GL = 0.0
        HL = 0.0
        for i in range(s, e - 1):
            r = order[f, i]
            GL += g[r]
            HL += h[r]
            if vals[f, i + 1] <= vals[f, i]:
                continue
            HR = H - HL
            if HL < min_child_weight or HR < min_child_weight:
                continue
            GR = G - GL
            gain = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent)
            if gain > best_gain:
                best_gain = gain
                best_f = f
                best_i = i
                best_thr = 0.5 * (np.float64(vals[f, i]) + np.float64(vals[f, i + 1]))
                best_hl = HL
    return best_f, best_i, best_gain, best_thr, best_hl


@njit(cache=True)
def _partition(order, vals, s, e, is_left, scratch_i, scratch_v):
    """Stable-partition every column's [s, e) segment by the row marker."""
    F = order.shape[0]
    nl = 0
    for t in range(s, e):
        if is_left[order[0, t]]:
            nl += 1
    for f in range(F):
        a = 0
        b = nl
        for i in range(s, e):
            r = order[f, i]
            if is_left[r]:
                scratch_i[a] = r
                scratch_v[a] = vals[f, i]
                a += 1
            else:
                scratch_i[b] = r
                scratch_v[b] = vals[f, i]
                b += 1
        for i in range(e - s):
            order[f, s + i] = scratch_i[i]
            vals[f, s + i] = scratch_v[i]
    return nl


@njit(cache=True)
def _set_marker(order, f, s, i_end, is_left, value):
    for i in range(s, i_end + 1):
        is_left[order[f, i]] = value


def grow_tree(
    order: np.ndarray,
    vals: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    col_map: np.ndarray,
    *,
    max_depth: int,
    reg_lambda: float,
    min_child_weight: float,
    min_split_gain: float = 1e-12,
) -> tuple[RegressionTree, list[tuple[int, int, int]]]:
    """Grow one tree over presorted (order, vals), consuming them.

    Returns the tree and the leaf segments [(node, s, e)] so the caller
    can update training predictions without re-traversing.
    """
    n_rows = order.shape[1]
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    leaf_value: list[float] = []
    cover: list[float] = []
    default_left: list[bool] = []
    leaf_segments: list[tuple[int, int, int]] = []

    is_left = np.zeros(len(g), dtype=np.bool_)
    scratch_i = np.empty(n_rows, dtype=np.int32)
    scratch_v = np.empty(n_rows, dtype=np.float32)

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf_value.append(0.0)
        cover.append(0.0)
        default_left.append(True)
        return len(feature) - 1

    root = new_node()
    stack = [(root, 0, n_rows, 0)]
    while stack:
        node, s, e, depth = stack.pop()
        G, H = _node_totals(order, s, e, g, h)
        cover[node] = H
        best_f = -1
        if depth < max_depth and e - s >= 2:
            best_f, best_i, _, best_thr, best_hl = _best_split(
                order, vals, s, e, g, h, reg_lambda, min_child_weight, min_split_gain, G, H
            )
        if best_f < 0:
            leaf_value[node] = -G / (H + reg_lambda) if (H + reg_lambda) > 0 else 0.0
            leaf_segments.append((node, s, e))
            continue

        _set_marker(order, best_f, s, best_i, is_left, True)
        nl = _partition(order, vals, s, e, is_left, scratch_i, scratch_v)
        _set_marker(order, 0, s, s + nl - 1, is_left, False)

        feature[node] = int(col_map[best_f])
        threshold[node] = best_thr
        default_left[node] = best_hl >= H - best_hl
        l_id = new_node()
        r_id = new_node()
        left[node] = l_id
        right[node] = r_id
        stack.append((r_id, s + nl, e, depth + 1))
        stack.append((l_id, s, s + nl, depth + 1))

    tree = RegressionTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        leaf_value=np.asarray(leaf_value, dtype=np.float64),
        cover=np.asarray(cover, dtype=np.float64),
        default_left=np.asarray(default_left, dtype=np.bool_),
    )
    return tree, leaf_segments
