import numpy as np
import pytest

from podium.errors import ValidationError
from podium.boost.model import BoostedModel, Hyperparams, fit_gbm, predict, train_boosted
from podium.boost.split import make_split_plan
from podium.boost.trees import LEAF


def traversal_oracle(model, x):
    """Definitional per-tree descent, independent of the vectorized path."""
    out = model.base_score
    for tree in model.trees:
        j = 0
        while tree.feature[j] != LEAF:
            f = tree.feature[j]
            if np.isnan(x[f]):
                j = tree.left[j] if tree.default_left[j] else tree.right[j]
            elif x[f] < tree.threshold[j]:
                j = tree.left[j]
            else:
                j = tree.right[j]
        out += model.eta * tree.leaf_value[j]
    return out


class TestFit:
    def test_constant_target_predicts_constant(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((100, 8)).astype(np.float32)
        y = np.full(100, 3.25)
        m = fit_gbm(X, y, Hyperparams(n_trees=10, max_depth=3, seed=0))
        assert np.allclose(m.predict(X), 3.25)
        # no split can improve the gain, so every tree is a single leaf
        assert all(t.n_nodes == 1 for t in m.trees)

    def test_planted_feature_recovered_on_held_out_speakers(self):
        """y equals one acoustic-range feature; held-out rho must clear 0.95."""
        from podium.features.fuse import FUSED_DIM, MODALITY_RANGES
        from podium.psych import spearman

        rng = np.random.default_rng(1)
        X = rng.standard_normal((2000, FUSED_DIM)).astype(np.float32)
        lo, hi = MODALITY_RANGES["acoustic"]
        col = lo + 50
        y = X[:, col].astype(np.float64)
        speakers = [f"s{i % 40}" for i in range(2000)]
        train = [i for i, s in enumerate(speakers) if int(s[1:]) < 32]
        test = [i for i, s in enumerate(speakers) if int(s[1:]) >= 32]
        hp = Hyperparams(eta=0.2, max_depth=4, n_trees=120,
                         feature_subsample=0.3, seed=2)
        m = fit_gbm(X[train], y[train], hp)
        rho = spearman(m.predict(X[test]), y[test])
        assert rho >= 0.95

    def test_determinism_identical_hash(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((300, 20)).astype(np.float32)
        y = X[:, 2] * 2 + rng.standard_normal(300) * 0.1
        hp = Hyperparams(eta=0.2, max_depth=3, n_trees=25, subsample=0.8,
                         feature_subsample=0.5, seed=11)
        assert fit_gbm(X, y, hp).digest() == fit_gbm(X, y, hp).digest()

    def test_non_finite_features_rejected(self):
        X = np.zeros((10, 3), dtype=np.float32)
        X[3, 1] = np.nan
        with pytest.raises(ValidationError):
            fit_gbm(X, np.zeros(10), Hyperparams(n_trees=1))

    def test_empty_training_set_rejected(self):
        with pytest.raises(ValidationError):
            fit_gbm(np.zeros((0, 3), dtype=np.float32), np.zeros(0), Hyperparams())

    def test_training_mae_non_increasing(self):
        """Full batch, no subsampling, enough depth: MAE shrinks monotonically."""
        rng = np.random.default_rng(4)
        X = rng.standard_normal((200, 6)).astype(np.float32)
        y = np.sin(X[:, 0]) + 0.5 * X[:, 1]
        hp = Hyperparams(eta=0.3, max_depth=6, n_trees=30, reg_lambda=0.0, seed=5)
        maes = []
        for k in range(1, 31, 3):
            m = fit_gbm(X, y, Hyperparams(**{**hp.__dict__, "n_trees": k}))
            maes.append(float(np.abs(m.predict(X) - y).mean()))
        assert all(a >= b - 1e-12 for a, b in zip(maes, maes[1:]))


class TestPredict:
    def test_zero_trees_returns_base(self):
        m = BoostedModel("d", 2.5, 0.1, [], 4)
        assert predict(m, np.zeros(4)) == 2.5

    def test_single_stump_hand_trace(self):
        rng = np.random.default_rng(6)
        X = np.array([[0.0], [1.0], [0.0], [1.0]] * 10, dtype=np.float32)
        y = np.where(X[:, 0] < 0.5, 1.0, 3.0)
        m = fit_gbm(X, y, Hyperparams(eta=0.5, max_depth=1, n_trees=1, seed=0))
        t = m.trees[0]
        assert t.feature[0] == 0
        base = y.mean()
        left_residual_value = -((base - 1.0) * 20) / (20 + 1.0)  # -G/(H+lam)
        got = predict(m, np.array([0.0]))
        assert got == pytest.approx(base + 0.5 * left_residual_value)

    def test_matches_traversal_oracle_on_1000_points(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((400, 12)).astype(np.float32)
        y = X[:, 0] - X[:, 3] ** 2 + 0.2 * rng.standard_normal(400)
        m = fit_gbm(X, y, Hyperparams(eta=0.15, max_depth=4, n_trees=20, seed=8))
        P = rng.standard_normal((1000, 12))
        fast = m.predict(P)
        for i in range(1000):
            assert fast[i] == pytest.approx(traversal_oracle(m, P[i]), abs=1e-12)

    def test_missing_value_follows_default_branch(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((200, 4)).astype(np.float32)
        y = np.where(X[:, 1] > 0, 4.0, 2.0)
        m = fit_gbm(X, y, Hyperparams(eta=1.0, max_depth=1, n_trees=1, seed=0))
        x = np.array([0.0, np.nan, 0.0, 0.0])
        assert predict(m, x) == pytest.approx(traversal_oracle(m, x), abs=1e-12)

    def test_wrong_length_rejected(self):
        m = BoostedModel("d", 0.0, 0.1, [], 5)
        with pytest.raises(ValidationError):
            predict(m, np.zeros(4))


class TestEnsembleAlgebra:
    def test_prediction_linearity_of_concatenated_trees(self):
        rng = np.random.default_rng(10)
        X = rng.standard_normal((150, 5)).astype(np.float32)
        ya = X[:, 0]
        yb = np.cos(X[:, 1])
        ma = fit_gbm(X, ya, Hyperparams(eta=0.3, max_depth=3, n_trees=8, seed=1))
        mb = fit_gbm(X, yb, Hyperparams(eta=0.3, max_depth=3, n_trees=8, seed=2))
        combined = BoostedModel("d", ma.base_score, ma.eta, ma.trees + mb.trees, 5)
        P = rng.standard_normal((50, 5))
        want = ma.predict(P) + mb.predict(P) - mb.base_score
        assert np.allclose(combined.predict(P), want, atol=1e-10)

    def test_cover_bookkeeping(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((300, 10)).astype(np.float32)
        y = X[:, 4] + rng.standard_normal(300) * 0.3
        m = fit_gbm(X, y, Hyperparams(eta=0.2, max_depth=5, n_trees=10,
                                      subsample=0.7, seed=3))
        for t in m.trees:
            t.validate_cover()
        # root cover equals the subsampled row weight
        assert all(t.cover[0] <= 300 for t in m.trees)


class TestEarlyStopping:
    def test_never_more_trees_than_optimum_plus_patience(self):
        rng = np.random.default_rng(12)
        X = rng.standard_normal((400, 8)).astype(np.float32)
        y = X[:, 0] + 0.05 * rng.standard_normal(400)
        Xv = rng.standard_normal((150, 8)).astype(np.float32)
        yv = Xv[:, 0] + 0.05 * rng.standard_normal(150)
        hp = Hyperparams(eta=0.3, max_depth=3, n_trees=400,
                         early_stopping_patience=10, seed=4)
        m = fit_gbm(X, y, hp, eval_X=Xv, eval_y=yv)
        assert "best_round" in m.meta
        assert len(m.trees) == m.meta["best_round"] + 1
        assert len(m.trees) <= m.meta["best_round"] + hp.early_stopping_patience
        assert len(m.trees) < 400

    def test_eval_history_tracks_best(self):
        rng = np.random.default_rng(13)
        X = rng.standard_normal((200, 5)).astype(np.float32)
        y = X[:, 1]
        m = fit_gbm(X, y, Hyperparams(eta=0.3, n_trees=60, early_stopping_patience=8, seed=5),
                    eval_X=X, eval_y=y)
        hist = m.meta["eval_history"]
        assert min(hist) == pytest.approx(m.meta["best_eval_mae"])


class TestPlanDiscipline:
    def test_rows_from_test_speakers_refused(self):
        plan = make_split_plan([f"s{i}" for i in range(20)], seed=0)
        test_speaker = plan.speakers("test")[0]
        rng = np.random.default_rng(14)
        X = rng.standard_normal((10, 4)).astype(np.float32)
        y = np.zeros(10)
        speakers = [test_speaker] * 10
        with pytest.raises(ValidationError):
            train_boosted(X, y, Hyperparams(n_trees=1), plan, speakers)

    def test_plan_digest_recorded(self):
        plan = make_split_plan([f"s{i}" for i in range(20)], seed=0)
        train_speakers = plan.speakers("train")
        rng = np.random.default_rng(15)
        X = rng.standard_normal((len(train_speakers) * 3, 4)).astype(np.float32)
        y = X[:, 0].astype(np.float64)
        speakers = [s for s in train_speakers for _ in range(3)]
        m = train_boosted(X, y, Hyperparams(n_trees=5, seed=1), plan, speakers)
        assert m.split_plan_digest == plan.digest()
