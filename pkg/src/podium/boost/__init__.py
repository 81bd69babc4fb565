from podium.boost.evaluate import EvalReport, aggregate_video_score, evaluate
from podium.boost.model import BoostedModel, Hyperparams, fit_gbm, predict, train_boosted
from podium.boost.split import SplitPlan, make_split_plan
from podium.boost.trees import RegressionTree
from podium.boost.tune import SearchSpace, cv_objective, minimize_smbo, tune

__all__ = [
    "BoostedModel",
    "EvalReport",
    "Hyperparams",
    "RegressionTree",
    "SearchSpace",
    "SplitPlan",
    "aggregate_video_score",
    "cv_objective",
    "evaluate",
    "fit_gbm",
    "make_split_plan",
    "minimize_smbo",
    "predict",
    "train_boosted",
    "tune",
]
