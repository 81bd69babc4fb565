import numpy as np
import pytest

from podium.errors import ValidationError
from podium.features.fuse import (
    FUSED_DIM,
    MODALITY_RANGES,
    FeatureMatrix,
    fuse,
    read_matrix,
    write_matrix,
)


def blocks(seed=0):
    rng = np.random.default_rng(seed)
    return (rng.random(3780), rng.random(7), rng.random(203), rng.random(384))


def test_total_dimensionality():
    assert FUSED_DIM == 3780 + 7 + 203 + 384 == 4374
    out = fuse(*blocks())
    assert out.values.shape == (4374,)


def test_ranges_partition_feature_space():
    spans = sorted(MODALITY_RANGES.values())
    assert spans[0][0] == 0
    for (a, b), (c, d) in zip(spans, spans[1:]):
        assert b == c
    assert spans[-1][1] == FUSED_DIM
    assert MODALITY_RANGES["facial"] == (0, 3780)
    assert MODALITY_RANGES["oculomotor"] == (3780, 3787)
    assert MODALITY_RANGES["acoustic"] == (3787, 3990)
    assert MODALITY_RANGES["textual"] == (3990, 4374)


def test_feature_3780_is_first_oculomotor():
    f, o, a, t = blocks(1)
    out = fuse(f, o, a, t)
    assert out.values[3780] == o[0]
    assert out.values[3787] == a[0]
    assert out.values[3990] == t[0]


def test_wrong_length_names_the_block():
    f, o, a, t = blocks(2)
    with pytest.raises(ValidationError, match="oculomotor"):
        fuse(f, o[:6], a, t)
    with pytest.raises(ValidationError, match="acoustic"):
        fuse(f, o, a[:100], t)


def test_non_finite_rejected():
    f, o, a, t = blocks(3)
    a[5] = np.nan
    with pytest.raises(ValidationError, match="acoustic"):
        fuse(f, o, a, t)


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    X = rng.random((5, FUSED_DIM)).astype(np.float32)
    labels = rng.uniform(1, 5, size=(5, 7))
    m = FeatureMatrix(X, [f"w{i}" for i in range(5)], ["b0"] * 5, ["s0"] * 5, labels)
    write_matrix(tmp_path / "feat", m)
    out = read_matrix(tmp_path / "feat")
    assert np.array_equal(out.X, X)
    assert out.window_ids == m.window_ids
    assert out.speaker_ids == m.speaker_ids
    assert np.allclose(out.labels, labels)


def test_matrix_without_labels(tmp_path):
    X = np.zeros((2, FUSED_DIM), dtype=np.float32)
    m = FeatureMatrix(X, ["w0", "w1"], ["b"] * 2, ["s"] * 2, None)
    write_matrix(tmp_path / "nolab", m)
    assert read_matrix(tmp_path / "nolab").labels is None
