"""Speaker-disjoint split plans.

Speakers (never rows) are shuffled and partitioned 70/15/15 into
train, validation and test, and the train speakers are dealt into five
folds for cross-validation. No speaker ever appears on two sides of
any boundary, which is what keeps evaluation free of identity leakage.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from podium.errors import ValidationError

N_FOLDS = 5
TRAIN_FRACTION = 0.70
VALIDATION_FRACTION = 0.15


@dataclass
class SplitPlan:
    assignment: dict[str, str]        # speaker -> train | validation | test
    folds: dict[str, int]             # train speaker -> fold in [0, 5)
    seed: int = 0

    def speakers(self, part: str) -> list[str]:
        return sorted(s for s, p in self.assignment.items() if p == part)

    def fold_speakers(self, fold: int) -> list[str]:
        return sorted(s for s, f in self.folds.items() if f == fold)

    def verify_disjoint(self) -> None:
        parts = [set(self.speakers(p)) for p in ("train", "validation", "test")]
        for i in range(3):
            for j in range(i + 1, 3):
                if parts[i] & parts[j]:
                    raise ValidationError(f"speakers shared across partitions: {parts[i] & parts[j]}")
        fold_sets = [set(self.fold_speakers(f)) for f in range(N_FOLDS)]
        for i in range(N_FOLDS):
            for j in range(i + 1, N_FOLDS):
                if fold_sets[i] & fold_sets[j]:
                    raise ValidationError("speakers shared across folds")
        if set(self.folds) != parts[0]:
            raise ValidationError("folds must cover exactly the train speakers")

    def digest(self) -> str:
        body = ";".join(
            f"{s}={p}:{self.folds.get(s, -1)}" for s, p in sorted(self.assignment.items())
        )
        return hashlib.sha256(body.encode()).hexdigest()[:16]


def make_split_plan(speakers: list[str], seed: int = 0) -> SplitPlan:
    speakers = list(speakers)
    if len(set(speakers)) != len(speakers):
        dupes = sorted({s for s in speakers if speakers.count(s) > 1})
        raise ValidationError(f"duplicate speaker ids: {dupes}")
    if len(speakers) < 10:
        raise ValidationError(f"need at least 10 speakers, got {len(speakers)}")

    rng = np.random.default_rng(seed)
    order = sorted(speakers)
    rng.shuffle(order)

    n = len(order)
    n_train = round(TRAIN_FRACTION * n)
    n_val = round(VALIDATION_FRACTION * n)
    assignment: dict[str, str] = {}
    for i, s in enumerate(order):
        if i < n_train:
            assignment[s] = "train"
        elif i < n_train + n_val:
            assignment[s] = "validation"
        else:
            assignment[s] = "test"

    folds = {s: i % N_FOLDS for i, s in enumerate(order[:n_train])}
    plan = SplitPlan(assignment, folds, seed)
    plan.verify_disjoint()
    return plan
