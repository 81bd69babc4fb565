import numpy as np
import pytest

from podium.errors import ValidationError
from podium.boost.model import BoostedModel, Hyperparams, fit_gbm, predict
from podium.boost.trees import RegressionTree
from podium.explain import brute_force_shapley, modality_attribution, tree_shap
from podium.explain.modality import SHARE_ORDER, read_attribution_table, write_attribution_table


def small_model(seed, n_features=8, n_trees=4, depth=3, rows=250):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((rows, n_features)).astype(np.float32)
    y = X[:, 0] * 2 + np.sin(2 * X[:, 1]) + 0.3 * X[:, 2] * (X[:, 3] > 0)
    return fit_gbm(X, y, Hyperparams(eta=0.3, max_depth=depth, n_trees=n_trees, seed=seed)), X


def manual_stump(feature, threshold, left_value, right_value, cover=(10.0, 6.0, 4.0)):
    return RegressionTree(
        feature=np.array([feature, -1, -1], dtype=np.int32),
        threshold=np.array([threshold, 0.0, 0.0]),
        left=np.array([1, -1, -1], dtype=np.int32),
        right=np.array([2, -1, -1], dtype=np.int32),
        leaf_value=np.array([0.0, left_value, right_value]),
        cover=np.array(cover),
        default_left=np.array([True, True, True]),
    )


class TestTreeShap:
    def test_single_leaf_tree_gives_zero_phi(self):
        tree = RegressionTree(
            feature=np.array([-1], dtype=np.int32),
            threshold=np.zeros(1), left=np.array([-1], dtype=np.int32),
            right=np.array([-1], dtype=np.int32), leaf_value=np.array([1.5]),
            cover=np.array([20.0]), default_left=np.array([True]),
        )
        m = BoostedModel("d", 2.0, 0.5, [tree], 4)
        sv = tree_shap(m, np.zeros(4))
        assert np.all(sv.phi == 0.0)
        assert sv.base == pytest.approx(2.0 + 0.5 * 1.5)

    def test_local_accuracy_identity(self):
        m, X = small_model(0)
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = rng.standard_normal(8)
            sv = tree_shap(m, x)
            assert sv.total() == pytest.approx(predict(m, x), abs=1e-6)

    def test_one_feature_stump_concentrates_attribution(self):
        m = BoostedModel("d", 1.0, 1.0, [manual_stump(2, 0.0, -1.0, 1.0)], 5)
        x = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
        sv = tree_shap(m, x)
        assert sv.phi[2] == pytest.approx(predict(m, x) - sv.base, abs=1e-12)
        assert np.all(sv.phi[[0, 1, 3, 4]] == 0.0)

    def test_matches_brute_force_on_small_models(self):
        rng = np.random.default_rng(2)
        for seed in range(12):
            m, X = small_model(seed + 10, n_features=6, n_trees=3)
            for _ in range(6):
                x = X[rng.integers(0, len(X))].astype(np.float64)
                fast = tree_shap(m, x)
                brute = brute_force_shapley(m, x)
                assert np.abs(fast.phi - brute.phi).max() <= 1e-9
                assert fast.base == pytest.approx(brute.base, abs=1e-9)

    def test_dummy_features_have_exactly_zero_phi(self):
        m, X = small_model(3)
        used = set().union(*[t.used_features() for t in m.trees])
        unused = [f for f in range(8) if f not in used]
        sv = tree_shap(m, X[0].astype(np.float64))
        for f in unused:
            assert sv.phi[f] == 0.0

    def test_symmetry_of_identically_used_features(self):
        """Two features split identically in symmetric trees get equal phi."""
        t1 = manual_stump(0, 0.0, -1.0, 1.0, cover=(10.0, 5.0, 5.0))
        t2 = manual_stump(1, 0.0, -1.0, 1.0, cover=(10.0, 5.0, 5.0))
        m = BoostedModel("d", 0.0, 1.0, [t1, t2], 3)
        x = np.array([0.7, 0.7, 0.0])
        sv = brute_force_shapley(m, x)
        assert sv.phi[0] == pytest.approx(sv.phi[1], abs=1e-12)
        fast = tree_shap(m, x)
        assert np.abs(fast.phi - sv.phi).max() <= 1e-12

    def test_missing_cover_is_an_error(self):
        tree = manual_stump(0, 0.0, -1.0, 1.0, cover=(10.0, 0.0, 10.0))
        m = BoostedModel("d", 0.0, 1.0, [tree], 2)
        with pytest.raises(ValidationError):
            tree_shap(m, np.zeros(2))


class TestModalityAttribution:
    RANGES = {"facial": (0, 4), "oculomotor": (4, 6), "acoustic": (6, 9), "textual": (9, 12)}

    def model_on(self, cols, seed=0, rows=300):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((rows, 12)).astype(np.float32)
        y = sum(X[:, c] for c in cols).astype(np.float64)
        return fit_gbm(X, y, Hyperparams(eta=0.3, max_depth=3, n_trees=10, seed=seed)), X

    def test_single_modality_support(self):
        m, X = self.model_on([4, 5], seed=1)
        att = modality_attribution(m, X[:20].astype(np.float64), self.RANGES)
        assert att.shares["oculomotor"] == pytest.approx(1.0)
        for other in ("facial", "acoustic", "textual"):
            assert att.shares[other] == pytest.approx(0.0)

    def test_shares_sum_to_one(self):
        m, X = self.model_on([0, 5, 7, 10], seed=2)
        att = modality_attribution(m, X[:25].astype(np.float64), self.RANGES)
        assert sum(att.shares.values()) == pytest.approx(1.0, abs=1e-9)
        att.validate()

    def test_zero_total_gives_flagged_uniform(self):
        m = BoostedModel("d", 2.0, 0.3, [], 12)
        att = modality_attribution(m, np.zeros((3, 12)), self.RANGES)
        assert att.flags.get("uniform")
        assert att.shares["facial"] == pytest.approx(0.25)

    def test_share_not_proportional_to_dimensionality(self):
        """10 informative narrow-block features out-attribute a 3,780-wide block."""
        from podium.features.fuse import FUSED_DIM, MODALITY_RANGES

        rng = np.random.default_rng(3)
        X = rng.standard_normal((400, FUSED_DIM)).astype(np.float32)
        lo, hi = MODALITY_RANGES["acoustic"]
        y = sum(X[:, lo + k] for k in range(10)).astype(np.float64)
        m = fit_gbm(X, y, Hyperparams(eta=0.3, max_depth=3, n_trees=15,
                                      feature_subsample=0.25, seed=4))
        att = modality_attribution(m, X[:10].astype(np.float64), dict(MODALITY_RANGES))
        assert att.shares["acoustic"] > att.shares["facial"]

    def test_bad_ranges_rejected(self):
        m, X = self.model_on([0], seed=5)
        with pytest.raises(ValidationError):
            modality_attribution(m, X[:5].astype(np.float64),
                                 {"facial": (0, 4), "acoustic": (5, 12)})

    def test_table_round_trip(self, tmp_path):
        m, X = self.model_on([0, 7], seed=6)
        att = modality_attribution(m, X[:10].astype(np.float64), self.RANGES)
        att.dimension = "Topic"
        write_attribution_table(tmp_path / "att.csv", [att])
        rows = read_attribution_table(tmp_path / "att.csv")
        assert rows[0]["dimension"] == "Topic"
        assert sum(rows[0][m] for m in SHARE_ORDER) == pytest.approx(1.0, abs=2e-3)
