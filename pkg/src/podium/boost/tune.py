"""Sequential model-based hyperparameter search.

A Gaussian-process surrogate (Matern 5/2 on the unit cube, log
transform where a parameter declares it) is fit to past trials after
ten random warm-up draws; the next trial maximizes expected
improvement over a seeded candidate pool. The tuning objective for
models is the mean validation MAE across the five speaker-disjoint
folds of the split plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from podium.errors import ValidationError
from podium.boost.model import Hyperparams, fit_gbm
from podium.boost.split import N_FOLDS, SplitPlan


@dataclass(frozen=True)
class ParamSpec:
    name: str
    low: float
    high: float
    log: bool = False
    integer: bool = False

    def __post_init__(self):
        if not (self.low < self.high):
            raise ValidationError(f"{self.name}: bounds must be ordered")
        if self.log and self.low <= 0:
            raise ValidationError(f"{self.name}: log scale needs positive bounds")

    def to_unit(self, v: float) -> float:
        if self.log:
            return (math.log(v) - math.log(self.low)) / (math.log(self.high) - math.log(self.low))
        return (v - self.low) / (self.high - self.low)

    def from_unit(self, u: float) -> float:
        u = min(max(u, 0.0), 1.0)
        if self.log:
            v = math.exp(math.log(self.low) + u * (math.log(self.high) - math.log(self.low)))
        else:
            v = self.low + u * (self.high - self.low)
        if self.integer:
            v = int(round(v))
            v = int(min(max(v, self.low), self.high))
        return v


@dataclass(frozen=True)
class SearchSpace:
    params: tuple[ParamSpec, ...]

    def __post_init__(self):
        if not self.params:
            raise ValidationError("search space is empty")

    @staticmethod
    def default() -> "SearchSpace":
        return SearchSpace((
            ParamSpec("eta", 0.01, 0.3, log=True),
            ParamSpec("max_depth", 3, 10, integer=True),
            ParamSpec("n_trees", 100, 1000, integer=True),
            ParamSpec("subsample", 0.6, 1.0),
            ParamSpec("feature_subsample", 0.3, 1.0),
            ParamSpec("reg_lambda", 0.0, 10.0),
            ParamSpec("min_child_weight", 1.0, 10.0),
        ))

    def sample(self, rng: np.random.Generator) -> dict:
        return {p.name: p.from_unit(rng.random()) for p in self.params}

    def to_unit(self, params: dict) -> np.ndarray:
        return np.array([p.to_unit(params[p.name]) for p in self.params])

    def from_unit(self, u: np.ndarray) -> dict:
        return {p.name: p.from_unit(float(v)) for p, v in zip(self.params, u)}


# ------------------------------------------------------------ GP surrogate

_LENGTH_SCALE = 0.3
_NOISE = 1e-6


def _matern52(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2) + 1e-18)
    r = math.sqrt(5.0) * d / _LENGTH_SCALE
    return (1.0 + r + r * r / 3.0) * np.exp(-r)


class _Surrogate:
    def __init__(self, U: np.ndarray, y: np.ndarray):
        self.U = U
        self.mu = float(y.mean())
        self.sd = float(y.std()) or 1.0
        z = (y - self.mu) / self.sd
        K = _matern52(U, U) + _NOISE * np.eye(len(U))
        self.L = np.linalg.cholesky(K)
        self.alpha = np.linalg.solve(self.L.T, np.linalg.solve(self.L, z))

    def posterior(self, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Ks = _matern52(C, self.U)
        mean = Ks @ self.alpha
        v = np.linalg.solve(self.L, Ks.T)
        var = np.maximum(_matern52(C, C).diagonal() - (v * v).sum(axis=0), 1e-12)
        return mean * self.sd + self.mu, np.sqrt(var) * self.sd


def _norm_cdf(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(z / math.sqrt(2.0)))


def _norm_pdf(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def _expected_improvement(mean, sd, best):
    z = (best - mean) / sd
    return (best - mean) * _norm_cdf(z) + sd * _norm_pdf(z)


@dataclass
class Trial:
    number: int
    params: dict
    objective: float
    phase: str  # warmup | guided


def minimize_smbo(
    objective,
    space: SearchSpace,
    trials: int,
    seed: int = 0,
    n_warmup: int = 10,
    n_candidates: int = 256,
) -> tuple[dict, list[Trial]]:
    """Minimize a black-box objective over the space; returns (best, log)."""
    if trials < n_warmup:
        raise ValidationError(f"need at least {n_warmup} trials for warm-up")
    rng = np.random.default_rng(seed)
    log: list[Trial] = []
    observed_u: list[np.ndarray] = []
    observed_y: list[float] = []

    for t in range(trials):
        if t < n_warmup:
            params = space.sample(rng)
            phase = "warmup"
        else:
            U = np.vstack(observed_u)
            y = np.asarray(observed_y)
            gp = _Surrogate(U, y)
            cand = rng.random((n_candidates, len(space.params)))
            # local refinements around the incumbent sharpen late trials
            best_u = U[int(np.argmin(y))]
            local = np.clip(best_u + 0.05 * rng.standard_normal((64, len(space.params))), 0, 1)
            cand = np.vstack([cand, local])
            mean, sd = gp.posterior(cand)
            ei = _expected_improvement(mean, sd, float(y.min()))
            params = space.from_unit(cand[int(np.argmax(ei))])
            phase = "guided"

        value = float(objective(params))
        if not np.isfinite(value):
            raise ValidationError(f"objective returned non-finite value for {params}")
        log.append(Trial(t, params, value, phase))
        observed_u.append(space.to_unit(params))
        observed_y.append(value)

    best = min(log, key=lambda tr: tr.objective)
    return dict(best.params), log


# ------------------------------------------------------- model tuning glue

def cv_objective(
    X: np.ndarray,
    y: np.ndarray,
    speakers: list[str],
    plan: SplitPlan,
    base_hp: Hyperparams | None = None,
):
    """Mean validation MAE across the plan's five speaker-disjoint folds."""
    base_hp = base_hp or Hyperparams()
    X = np.ascontiguousarray(X, dtype=np.float32)
    y = np.asarray(y, dtype=np.float64)
    speakers = np.asarray(speakers)
    fold_of = np.array([plan.folds.get(s, -1) for s in speakers])
    if not (fold_of >= 0).any():
        raise ValidationError("no rows from the plan's train speakers")

    # fold slices and presorts are shared across every trial
    from podium.boost.model import _presort

    folds = []
    for f in range(N_FOLDS):
        tr = (fold_of >= 0) & (fold_of != f)
        va = fold_of == f
        if not tr.any() or not va.any():
            continue
        Xtr = np.ascontiguousarray(X[tr])
        folds.append((Xtr, y[tr], X[va].astype(np.float64), y[va], _presort(Xtr)))

    def objective(params: dict) -> float:
        hp = replace(base_hp, **params)
        maes = []
        for Xtr, ytr, Xva, yva, pre in folds:
            model = fit_gbm(Xtr, ytr, hp, eval_X=Xva, eval_y=yva, presorted=pre)
            maes.append(float(np.abs(model.predict(Xva) - yva).mean()))
        return float(np.mean(maes))

    return objective


def tune(
    X: np.ndarray,
    y: np.ndarray,
    speakers: list[str],
    plan: SplitPlan,
    space: SearchSpace | None = None,
    trials: int = 30,
    seed: int = 0,
    base_hp: Hyperparams | None = None,
) -> tuple[dict, list[Trial]]:
    """Tune one dimension's model; returns (best params, full trial log)."""
    if trials < 10:
        raise ValidationError("tuning needs at least 10 trials")
    space = space or SearchSpace.default()
    return minimize_smbo(
        cv_objective(X, y, speakers, plan, base_hp), space, trials, seed=seed
    )
