"""Shared fixtures: engine context, small corpora, quick trained models."""

from __future__ import annotations

import numpy as np
import pytest

from podium.boost.model import Hyperparams, fit_gbm
from podium.dimensions import DIMENSIONS
from podium.features.fuse import FUSED_DIM, MODALITY_RANGES
from podium.pipeline import EngineContext
from podium.synthetic import synth_bundle, write_corpus


@pytest.fixture(scope="session")
def ctx():
    return EngineContext()


@pytest.fixture(scope="session")
def small_bundle():
    return synth_bundle("bsmall", "ssmall", seed=11, active_s=34.0)


@pytest.fixture(scope="session")
def demo_corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    write_corpus(out, n_speakers=4, seed=9, active_s=34.0)
    return out


def quick_models(seed: int = 0, n_rows: int = 240) -> dict:
    """Seven small ensembles over random fused-width features.

    Targets are planted monotone functions of a few columns so models
    predict inside [1, 5] without a tuning run.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_rows, FUSED_DIM)).astype(np.float32)
    models = {}
    for i, d in enumerate(DIMENSIONS):
        lo, hi = MODALITY_RANGES[("acoustic", "facial", "textual", "oculomotor")[i % 4]]
        col = lo + (i * 37) % (hi - lo)
        y = 3.0 + 1.5 * np.tanh(X[:, col].astype(np.float64))
        models[d] = fit_gbm(
            X, y, Hyperparams(eta=0.3, max_depth=3, n_trees=12, seed=seed + i), dimension=d
        )
    return models


@pytest.fixture(scope="session")
def models_quick():
    return quick_models()


@pytest.fixture(scope="session")
def models_dir(tmp_path_factory, models_quick):
    from podium.boost.io import save_model
    from podium.coach.record import dim_slug

    out = tmp_path_factory.mktemp("models")
    for d, m in models_quick.items():
        save_model(m, out / f"{dim_slug(d)}.model.txt")
    return out
