import numpy as np
import pytest

from podium.errors import FormatError
from podium.boost.io import dump_model, load_model, parse_model, save_model
from podium.boost.model import Hyperparams, fit_gbm


def fitted(seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((250, 9)).astype(np.float32)
    y = np.sin(X[:, 0]) + X[:, 5] * 0.5
    return fit_gbm(X, y, Hyperparams(eta=0.17, max_depth=4, n_trees=14,
                                     subsample=0.9, feature_subsample=0.6, seed=seed),
                   dimension="Clarity")


def test_round_trip_predictions_bit_exact():
    m = fitted(1)
    back = parse_model(dump_model(m))
    rng = np.random.default_rng(2)
    P = rng.standard_normal((1000, 9))
    a = m.predict(P)
    b = back.predict(P)
    assert np.abs(a - b).max() <= 1e-12
    assert back.base_score == m.base_score
    assert back.eta == m.eta
    assert back.dimension == "Clarity"
    assert back.digest() == m.digest()


def test_double_round_trip_stable():
    m = fitted(3)
    once = dump_model(m)
    twice = dump_model(parse_model(once))
    assert once == twice


def test_save_load_file(tmp_path):
    m = fitted(4)
    save_model(m, tmp_path / "m.txt")
    back = load_model(tmp_path / "m.txt")
    assert back.digest() == m.digest()


def test_parse_validates_cover_bookkeeping():
    m = fitted(5)
    text = dump_model(m)
    lines = text.splitlines()
    # corrupt one internal node's cover
    for i, line in enumerate(lines):
        parts = line.split("\t")
        if parts[0] == "node" and int(parts[2]) >= 0:
            parts[7] = (123.456).hex()
            lines[i] = "\t".join(parts)
            break
    with pytest.raises(FormatError):
        parse_model("\n".join(lines))


def test_bad_magic_rejected():
    with pytest.raises(FormatError):
        parse_model("not-a-dump 1\nend")


def test_truncated_dump_rejected():
    m = fitted(6)
    text = dump_model(m)
    with pytest.raises(FormatError):
        parse_model("\n".join(text.splitlines()[:-2]))


def test_hyperparams_preserved():
    m = fitted(7)
    back = parse_model(dump_model(m))
    assert back.hyperparams == m.hyperparams
