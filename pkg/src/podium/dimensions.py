"""Canonical rubric dimension names, in fixed order.

Every module that keys anything by rubric dimension (labels, models,
score cards, attribution tables) uses this tuple and this order.
"""

DIMENSIONS = (
    "Topic",
    "Content",
    "Clarity",
    "Voice & Talk",
    "Eye Contact",
    "Nonverbal Expressiveness",
    "Overall Rating",
)

N_DIMENSIONS = len(DIMENSIONS)


def dimension_index(name: str) -> int:
    try:
        return DIMENSIONS.index(name)
    except ValueError:
        raise KeyError(f"unknown rubric dimension: {name!r}") from None
