import numpy as np
import pytest

from podium.errors import ValidationError
from podium.features.text import TEXT_DIM, HashingEmbedder, embed_text


def test_dimension_and_unit_norm():
    out = embed_text("the quick brown fox jumps over the lazy dog")
    assert out.values.shape == (TEXT_DIM,)
    assert not out.empty
    assert np.linalg.norm(out.values) == pytest.approx(1.0, abs=1e-9)


def test_empty_text_zero_vector_flagged():
    out = embed_text("")
    assert out.empty
    assert np.allclose(out.values, 0.0)
    assert embed_text("   ...  !?").empty


def test_determinism():
    a = embed_text("Presentation skills improve with practice.")
    b = embed_text("Presentation skills improve with practice.")
    assert np.array_equal(a.values, b.values)


def test_different_texts_differ():
    a = embed_text("clear and confident voice")
    b = embed_text("monotone mumbling delivery")
    assert not np.allclose(a.values, b.values)


def test_sentence_mean_pooling():
    emb = HashingEmbedder()
    one = emb("alpha beta.")
    two = emb("alpha beta. alpha beta.")
    # identical sentences pool to the same normalized vector
    assert np.allclose(one, two, atol=1e-12)


def test_external_embedder_wrong_dim_rejected():
    class Bad:
        dim = 12

        def __call__(self, text):
            return np.zeros(12)

    with pytest.raises(ValidationError):
        embed_text("hello", Bad())


def test_external_embedder_bad_norm_rejected():
    class Bad:
        def __call__(self, text):
            return np.full(TEXT_DIM, 0.5)

    with pytest.raises(ValidationError):
        embed_text("hello", Bad())
