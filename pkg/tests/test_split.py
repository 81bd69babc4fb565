import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from podium.errors import ValidationError
from podium.boost.split import N_FOLDS, make_split_plan


def test_120_speakers_split_84_18_18():
    plan = make_split_plan([f"s{i}" for i in range(120)], seed=0)
    assert len(plan.speakers("train")) == 84
    assert len(plan.speakers("validation")) == 18
    assert len(plan.speakers("test")) == 18


def test_determinism():
    speakers = [f"s{i}" for i in range(40)]
    a = make_split_plan(speakers, seed=7)
    b = make_split_plan(speakers, seed=7)
    assert a.assignment == b.assignment
    assert a.folds == b.folds
    assert a.digest() == b.digest()
    c = make_split_plan(speakers, seed=8)
    assert c.assignment != a.assignment


def test_duplicate_speakers_rejected():
    with pytest.raises(ValidationError, match="duplicate"):
        make_split_plan(["a", "b", "a"] + [f"s{i}" for i in range(10)], seed=0)


def test_too_few_speakers_rejected():
    with pytest.raises(ValidationError):
        make_split_plan([f"s{i}" for i in range(9)], seed=0)


@settings(max_examples=60, deadline=None)
@given(st.integers(10, 300), st.integers(0, 2**31 - 1))
def test_disjointness_and_coverage(n, seed):
    speakers = [f"s{i}" for i in range(n)]
    plan = make_split_plan(speakers, seed=seed)
    plan.verify_disjoint()
    parts = [set(plan.speakers(p)) for p in ("train", "validation", "test")]
    assert set().union(*parts) == set(speakers)
    assert sum(len(p) for p in parts) == n
    # fold sizes near equal
    sizes = [len(plan.fold_speakers(f)) for f in range(N_FOLDS)]
    assert max(sizes) - min(sizes) <= 1
    # proportions approximately 70/15/15 by speaker count
    assert abs(len(parts[0]) - 0.70 * n) <= 1.0
    assert abs(len(parts[1]) - 0.15 * n) <= 1.0
