"""Self-describing text dump for boosted models.

Floats are written as C99 hex literals so a dump-parse round trip is
bit exact. Parsing re-validates structural invariants, including the
cover bookkeeping (each internal node's cover equals its children's
sum).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from podium.errors import FormatError
from podium.boost.model import BoostedModel
from podium.boost.trees import LEAF, RegressionTree

MAGIC = "podium-boostdump"
VERSION = 1


def dump_model(model: BoostedModel) -> str:
    lines = [f"{MAGIC} {VERSION}"]
    lines.append(f"dimension\t{model.dimension}")
    lines.append(f"base_score\t{float(model.base_score).hex()}")
    lines.append(f"eta\t{float(model.eta).hex()}")
    lines.append(f"n_features\t{model.n_features}")
    lines.append(f"split_plan\t{model.split_plan_digest}")
    lines.append(f"hyperparams\t{json.dumps(model.hyperparams, sort_keys=True)}")
    lines.append(f"trees\t{len(model.trees)}")
    for ti, t in enumerate(model.trees):
        lines.append(f"tree\t{ti}\t{t.n_nodes}")
        for j in range(t.n_nodes):
            lines.append(
                "node\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}".format(
                    j,
                    int(t.feature[j]),
                    float(t.threshold[j]).hex(),
                    int(t.left[j]),
                    int(t.right[j]),
                    float(t.leaf_value[j]).hex(),
                    float(t.cover[j]).hex(),
                    "L" if t.default_left[j] else "R",
                )
            )
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_model(model: BoostedModel, path) -> None:
    Path(path).write_text(dump_model(model))


def parse_model(text: str) -> BoostedModel:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or not lines[0].startswith(MAGIC):
        raise FormatError("not a model dump (missing magic)")
    magic, ver = lines[0].split()
    if int(ver) != VERSION:
        raise FormatError(f"unsupported dump version {ver}")
    if lines[-1] != "end":
        raise FormatError("truncated dump (missing end marker)")

    fields = {}
    i = 1
    while i < len(lines) and not lines[i].startswith("trees\t"):
        key, _, value = lines[i].partition("\t")
        fields[key] = value
        i += 1
    if i == len(lines):
        raise FormatError("dump missing tree count")
    n_trees = int(lines[i].split("\t")[1])
    i += 1

    trees = []
    for _ in range(n_trees):
        head = lines[i].split("\t")
        if head[0] != "tree":
            raise FormatError(f"expected tree header, got {lines[i]!r}")
        n_nodes = int(head[2])
        i += 1
        feature = np.empty(n_nodes, dtype=np.int32)
        threshold = np.empty(n_nodes)
        left = np.empty(n_nodes, dtype=np.int32)
        right = np.empty(n_nodes, dtype=np.int32)
        leaf_value = np.empty(n_nodes)
        cover = np.empty(n_nodes)
        default_left = np.empty(n_nodes, dtype=np.bool_)
        for j in range(n_nodes):
            parts = lines[i].split("\t")
            if parts[0] != "node" or int(parts[1]) != j:
                raise FormatError(f"bad node line: {lines[i]!r}")
            feature[j] = int(parts[2])
            threshold[j] = float.fromhex(parts[3])
            left[j] = int(parts[4])
            right[j] = int(parts[5])
            leaf_value[j] = float.fromhex(parts[6])
            cover[j] = float.fromhex(parts[7])
            default_left[j] = parts[8] == "L"
            i += 1
        tree = RegressionTree(feature, threshold, left, right, leaf_value, cover, default_left)
        _validate_tree(tree, int(fields["n_features"]))
        trees.append(tree)

    return BoostedModel(
        dimension=fields.get("dimension", ""),
        base_score=float.fromhex(fields["base_score"]),
        eta=float.fromhex(fields["eta"]),
        trees=trees,
        n_features=int(fields["n_features"]),
        hyperparams=json.loads(fields.get("hyperparams", "{}")),
        split_plan_digest=fields.get("split_plan", ""),
    )


def load_model(path) -> BoostedModel:
    return parse_model(Path(path).read_text())


def _validate_tree(tree: RegressionTree, n_features: int) -> None:
    from podium.errors import ValidationError

    for j in range(tree.n_nodes):
        if tree.feature[j] == LEAF:
            if tree.left[j] != -1 or tree.right[j] != -1:
                raise FormatError(f"leaf {j} has children")
        else:
            if not (0 <= tree.feature[j] < n_features):
                raise FormatError(f"node {j}: feature index {tree.feature[j]} out of range")
            for child in (tree.left[j], tree.right[j]):
                if not (0 <= child < tree.n_nodes):
                    raise FormatError(f"node {j}: child {child} out of range")
    try:
        tree.validate_cover()
    except ValidationError as e:
        raise FormatError(f"dump failed cover bookkeeping: {e}") from e
