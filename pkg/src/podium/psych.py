"""Psychometrics and study statistics.

Reliability (ICC(1,k), ordinal Krippendorff alpha), correlations,
paired t with Cohen's d, standardized-coefficient OLS, and the field
study's eligibility filter. Estimators are written out definitionally;
scipy supplies only distribution tail probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _stats

from podium.errors import ValidationError

Z_95 = 1.959963984540054


@dataclass
class StatResult:
    name: str
    value: float
    df: tuple | float | None = None
    p: float | None = None
    effect_size: float | None = None
    ci: tuple[float, float] | None = None
    n: int | None = None
    flags: dict = field(default_factory=dict)


# ----------------------------------------------------------- reliability

def icc_1k(matrix: np.ndarray) -> StatResult:
    """ICC(1,k): one-way random effects, average of k raters.

    (MSB - MSW) / MSB over the items-by-raters grid. Requires a
    complete grid; MSB of zero is flagged undefined.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 2:
        raise ValidationError("ICC needs at least a 2x2 items-by-raters grid")
    if np.isnan(m).any():
        raise ValidationError("ICC(1,k) requires a complete grid")
    n, k = m.shape
    grand = m.mean()
    item_means = m.mean(axis=1)
    ss_between = k * ((item_means - grand) ** 2).sum()
    ss_within = ((m - item_means[:, None]) ** 2).sum()
    msb = ss_between / (n - 1)
    msw = ss_within / (n * (k - 1))
    if msb == 0:
        return StatResult("ICC(1,k)", np.nan, n=n, flags={"undefined": "MSB = 0"})
    return StatResult("ICC(1,k)", float((msb - msw) / msb), df=(n - 1, n * (k - 1)), n=n)


def krippendorff_alpha_ordinal(matrix: np.ndarray) -> StatResult:
    """Krippendorff's alpha with the ordinal difference function.

    Rows are units, columns raters; NaN marks missing. Categories are
    the distinct observed values in rank order, and the ordinal metric
    between categories c and k squares the cumulative count from c to
    k minus half the endpoints' counts.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValidationError("alpha needs a units-by-raters matrix")
    units = [row[~np.isnan(row)] for row in m]
    units = [u for u in units if len(u) >= 2]
    if len(units) < 2:
        raise ValidationError("alpha needs at least 2 units with 2+ pairable values")

    values = np.unique(np.concatenate(units))
    v_index = {v: i for i, v in enumerate(values)}
    q = len(values)

    # coincidence matrix
    o = np.zeros((q, q))
    for u in units:
        mu = len(u)
        for a in range(mu):
            for b in range(mu):
                if a != b:
                    o[v_index[u[a]], v_index[u[b]]] += 1.0 / (mu - 1)
    n_c = o.sum(axis=1)
    n_total = n_c.sum()

    if q == 1:
        return StatResult(
            "krippendorff_alpha_ordinal", np.nan, n=len(units),
            flags={"undefined": "no category variation (D_expected = 0)"},
        )

    delta = np.zeros((q, q))
    for c in range(q):
        for k in range(c + 1, q):
            run = n_c[c : k + 1].sum() - (n_c[c] + n_c[k]) / 2.0
            delta[c, k] = delta[k, c] = run * run

    d_obs = (o * delta).sum() / n_total
    d_exp = (np.outer(n_c, n_c) * delta).sum() / (n_total * (n_total - 1))
    if d_exp == 0:
        return StatResult(
            "krippendorff_alpha_ordinal", np.nan, n=len(units),
            flags={"undefined": "D_expected = 0"},
        )
    return StatResult(
        "krippendorff_alpha_ordinal", float(1.0 - d_obs / d_exp), n=len(units)
    )


# ---------------------------------------------------------- correlations

def average_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y) or len(x) < 3:
        raise ValidationError("pearson needs equal lengths >= 3")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0:
        return float("nan")
    return float((xc * yc).sum() / denom)


def spearman(x, y) -> float:
    """Pearson on average ranks (tie aware)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y) or len(x) < 3:
        raise ValidationError("spearman needs equal lengths >= 3")
    return pearson(average_ranks(x), average_ranks(y))


# ---------------------------------------------------------- paired tests

def paired_t(pre, post) -> StatResult:
    """Paired t with Cohen's d = mean(diff)/SD(diff) = t/sqrt(n).

    The d confidence interval uses the normal approximation with
    SE(d) = sqrt(1/n + d^2/(2n)).
    """
    pre = np.asarray(pre, dtype=np.float64)
    post = np.asarray(post, dtype=np.float64)
    if len(pre) != len(post) or len(pre) < 2:
        raise ValidationError("paired_t needs equal lengths >= 2")
    diff = post - pre
    n = len(diff)
    sd = diff.std(ddof=1)
    if sd == 0:
        return StatResult("paired_t", np.nan, df=n - 1, n=n,
                          flags={"undefined": "SD(diff) = 0"})
    t = float(diff.mean() / (sd / np.sqrt(n)))
    d = float(diff.mean() / sd)
    se_d = np.sqrt(1.0 / n + d * d / (2.0 * n))
    p = float(2.0 * _stats.t.sf(abs(t), n - 1))
    return StatResult(
        "paired_t", t, df=n - 1, p=p, effect_size=d,
        ci=(d - Z_95 * se_d, d + Z_95 * se_d), n=n,
    )


# ------------------------------------------------------------------- OLS

@dataclass
class OlsFit:
    coefficients: list[dict]       # name, beta, se, t, p per predictor
    f: StatResult                  # model F with (p, n-p-1) df
    r2: float
    adjusted_r2: float
    n: int

    def beta(self, name: str) -> float:
        for c in self.coefficients:
            if c["name"] == name:
                return c["beta"]
        raise KeyError(name)


def ols_standardized(
    y,
    continuous: dict[str, np.ndarray] | None = None,
    categorical: dict[str, tuple[list, object]] | None = None,
) -> OlsFit:
    """OLS with standardized coefficients.

    Continuous predictors and the outcome are z-scored; categorical
    predictors are dummy coded against the named reference level.
    Solved by lstsq (orthogonal decomposition); exact collinearity is
    an error naming the offending columns.
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    names: list[str] = []
    cols: list[np.ndarray] = []
    for name, x in (continuous or {}).items():
        x = np.asarray(x, dtype=np.float64)
        if len(x) != n:
            raise ValidationError(f"predictor {name}: length mismatch")
        sd = x.std(ddof=1)
        if sd == 0:
            raise ValidationError(f"predictor {name}: zero variance")
        names.append(name)
        cols.append((x - x.mean()) / sd)
    for name, (levels, reference) in (categorical or {}).items():
        levels = list(levels)
        if len(levels) != n:
            raise ValidationError(f"predictor {name}: length mismatch")
        uniq = sorted(set(levels), key=str)
        if reference not in uniq:
            raise ValidationError(f"predictor {name}: reference {reference!r} not observed")
        for lv in uniq:
            if lv == reference:
                continue
            names.append(f"{name}[{lv}]")
            cols.append(np.array([1.0 if v == lv else 0.0 for v in levels]))

    p = len(cols)
    if n <= p + 1:
        raise ValidationError(f"need n > p + 1 (n={n}, p={p})")
    y_sd = y.std(ddof=1)
    if y_sd == 0:
        raise ValidationError("outcome has zero variance")
    yz = (y - y.mean()) / y_sd

    design = np.column_stack([np.ones(n), *cols])
    rank = np.linalg.matrix_rank(design)
    if rank < p + 1:
        _, r = np.linalg.qr(design)
        bad = [names[j - 1] for j in range(1, p + 1) if abs(r[j, j]) < 1e-8 * max(1, abs(r[0, 0]))]
        raise ValidationError(f"design is rank deficient; collinear columns: {bad or names}")

    beta, *_ = np.linalg.lstsq(design, yz, rcond=None)
    resid = yz - design @ beta
    sse = float(resid @ resid)
    sst = float(((yz - yz.mean()) ** 2).sum())
    r2 = 1.0 - sse / sst
    df2 = n - p - 1
    adj = 1.0 - (1.0 - r2) * (n - 1) / df2
    f_val = (r2 / p) / ((1.0 - r2) / df2) if r2 < 1.0 else np.inf
    f_p = float(_stats.f.sf(f_val, p, df2)) if np.isfinite(f_val) else 0.0

    sigma2 = sse / df2
    xtx_inv = np.linalg.inv(design.T @ design)
    se = np.sqrt(np.maximum(sigma2 * np.diag(xtx_inv), 0.0))
    coefficients = []
    for j, name in enumerate(names, start=1):
        b = float(beta[j])
        s = float(se[j])
        t = b / s if s > 0 else np.inf
        coefficients.append({
            "name": name, "beta": b, "se": s, "t": t,
            "p": float(2.0 * _stats.t.sf(abs(t), df2)),
        })
    return OlsFit(
        coefficients=coefficients,
        f=StatResult("F", float(f_val), df=(p, df2), p=f_p, n=n),
        r2=float(r2),
        adjusted_r2=float(adj),
        n=n,
    )


# ------------------------------------------------------------ eligibility

MIN_INTERACTIONS = 1
MIN_MINUTES = 5.0


@dataclass
class PracticeLog:
    learner_id: str
    interactions: int
    non_upload_minutes: float
    pretest_id: str | None = None
    posttest_id: str | None = None
    pretest_scorable: bool = True
    posttest_scorable: bool = True
    usage_count: int = 0
    events: list = field(default_factory=list)


def eligibility_filter(logs: list[PracticeLog]) -> tuple[list[PracticeLog], list[tuple[PracticeLog, str]]]:
    """Study inclusion: verified tutor exposure plus scorable pre/post.

    Include iff interactions >= 1, non-upload minutes >= 5, and both
    the pretest and posttest exist and were scorable. Exclusions carry
    the first failing reason in check order.
    """
    included, excluded = [], []
    for log in logs:
        if not log.pretest_id or not log.posttest_id:
            excluded.append((log, "unprocessable/missing"))
        elif not (log.pretest_scorable and log.posttest_scorable):
            excluded.append((log, "unprocessable/missing"))
        elif log.interactions < MIN_INTERACTIONS:
            excluded.append((log, "no tutor interaction"))
        elif log.non_upload_minutes < MIN_MINUTES:
            excluded.append((log, "under 5 minutes"))
        else:
            included.append(log)
    return included, excluded
