"""Session-quality pilot metrics: expert agreement and mean rating."""

from __future__ import annotations

import numpy as np

from podium.psych import krippendorff_alpha_ordinal


def pilot_quality_summary(ratings: np.ndarray) -> dict:
    """Agreement and level summary for expert-rated tutor sessions.

    ratings: sessions x raters grid of 5-point scores (NaN = missing).
    Returns ordinal alpha across raters plus mean and SD of the
    session-level means.
    """
    ratings = np.asarray(ratings, dtype=np.float64)
    alpha = krippendorff_alpha_ordinal(ratings)
    session_means = np.nanmean(ratings, axis=1)
    mean = float(np.mean(session_means))
    sd = float(np.std(session_means, ddof=1))
    return {
        "alpha": alpha.value,
        "alpha_flags": alpha.flags,
        "mean": mean,
        "sd": sd,
        "n_sessions": ratings.shape[0],
        "formatted": (
            f"Krippendorff's alpha = {alpha.value:.2f} (ordinal); "
            f"M = {mean:.2f}, SD = {sd:.2f} over {ratings.shape[0]} sessions"
        ),
    }
