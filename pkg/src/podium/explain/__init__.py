from podium.explain.brute import brute_force_shapley
from podium.explain.modality import ModalityAttribution, modality_attribution
from podium.explain.treeshap import ShapVector, tree_shap

__all__ = [
    "ModalityAttribution",
    "ShapVector",
    "brute_force_shapley",
    "modality_attribution",
    "tree_shap",
]
