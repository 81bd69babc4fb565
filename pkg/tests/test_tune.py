import numpy as np
import pytest

from podium.errors import ValidationError
from podium.boost.model import Hyperparams
from podium.boost.split import make_split_plan
from podium.boost.tune import ParamSpec, SearchSpace, cv_objective, minimize_smbo, tune


def eta_space():
    return SearchSpace((ParamSpec("eta", 0.01, 0.3, log=True),))


class TestSmbo:
    def test_1d_concave_objective_found_within_tolerance(self):
        """Known optimum at eta = 0.1; 30 trials must land within 0.02."""
        best, log = minimize_smbo(lambda p: (p["eta"] - 0.1) ** 2, eta_space(),
                                  trials=30, seed=0)
        assert abs(best["eta"] - 0.1) <= 0.02
        assert len(log) == 30

    def test_fixed_seed_identical_trial_sequence(self):
        f = lambda p: (p["eta"] - 0.07) ** 2
        _, log_a = minimize_smbo(f, eta_space(), trials=20, seed=3)
        _, log_b = minimize_smbo(f, eta_space(), trials=20, seed=3)
        assert [t.params for t in log_a] == [t.params for t in log_b]
        assert [t.objective for t in log_a] == [t.objective for t in log_b]

    def test_best_dominates_warmup(self):
        f = lambda p: (p["eta"] - 0.05) ** 2 + p["reg_lambda"] * 0.01
        space = SearchSpace((
            ParamSpec("eta", 0.01, 0.3, log=True),
            ParamSpec("reg_lambda", 0.0, 10.0),
        ))
        best, log = minimize_smbo(f, space, trials=25, seed=1)
        warmup_best = min(t.objective for t in log if t.phase == "warmup")
        assert min(t.objective for t in log) <= warmup_best
        assert f(best) == min(t.objective for t in log)

    def test_integer_parameters_are_integers(self):
        space = SearchSpace((ParamSpec("max_depth", 3, 10, integer=True),))
        best, log = minimize_smbo(lambda p: abs(p["max_depth"] - 5), space,
                                  trials=15, seed=2)
        for t in log:
            assert t.params["max_depth"] == int(t.params["max_depth"])
        assert best["max_depth"] == 5

    def test_non_finite_objective_rejected(self):
        with pytest.raises(ValidationError):
            minimize_smbo(lambda p: float("nan"), eta_space(), trials=10, seed=0)

    def test_too_few_trials_rejected(self):
        with pytest.raises(ValidationError):
            minimize_smbo(lambda p: 0.0, eta_space(), trials=5, seed=0)

    def test_empty_space_rejected(self):
        with pytest.raises(ValidationError):
            SearchSpace(())


class TestDefaultSpace:
    def test_bounds(self):
        space = SearchSpace.default()
        by_name = {p.name: p for p in space.params}
        assert by_name["eta"].low == 0.01 and by_name["eta"].high == 0.3 and by_name["eta"].log
        assert by_name["max_depth"].integer and by_name["max_depth"].high == 10
        assert by_name["n_trees"].low == 100 and by_name["n_trees"].high == 1000
        assert by_name["subsample"].low == 0.6
        assert by_name["feature_subsample"].low == 0.3
        assert by_name["reg_lambda"].high == 10.0
        assert by_name["min_child_weight"].high == 10.0


class TestCvObjective:
    def test_mean_over_folds_and_tune_round_trip(self):
        rng = np.random.default_rng(4)
        speakers_all = [f"s{i}" for i in range(20)]
        plan = make_split_plan(speakers_all, seed=0)
        train_speakers = plan.speakers("train")
        rows_per = 12
        speakers = [s for s in train_speakers for _ in range(rows_per)]
        X = rng.standard_normal((len(speakers), 10)).astype(np.float32)
        y = X[:, 2].astype(np.float64)
        obj = cv_objective(X, y, speakers, plan,
                           Hyperparams(n_trees=20, early_stopping_patience=5))
        val = obj({"eta": 0.2, "max_depth": 3})
        assert np.isfinite(val) and val >= 0.0

        space = SearchSpace((ParamSpec("eta", 0.05, 0.3, log=True),))
        best, log = tune(X, y, speakers, plan, space=space, trials=12, seed=1,
                         base_hp=Hyperparams(n_trees=15, max_depth=3,
                                             early_stopping_patience=4))
        assert 0.05 <= best["eta"] <= 0.3
        assert len(log) == 12
