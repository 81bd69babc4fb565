"""Window-transcript embeddings.

The embedder contract: deterministic, fixed 384-D output, unit L2 norm
(zero vector for empty text, flagged). The bundled reference embedder
hashes lowercased tokens into signed bins and mean-pools sentence
vectors; production deployments plug in precomputed embeddings or an
external embedding service behind the same contract.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

from podium.errors import ValidationError

TEXT_DIM = 384

_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_TOKEN = re.compile(r"[a-z0-9']+")


@dataclass
class TextEmbedding:
    values: np.ndarray
    empty: bool = False


class HashingEmbedder:
    """Signed feature hashing of tokens, mean-pooled over sentences."""

    dim = TEXT_DIM

    def __call__(self, text: str) -> np.ndarray:
        sentences = [s for s in _SENTENCE_SPLIT.split(text.lower()) if _TOKEN.search(s)]
        if not sentences:
            return np.zeros(self.dim)
        acc = np.zeros(self.dim)
        for sentence in sentences:
            vec = np.zeros(self.dim)
            for tok in _TOKEN.findall(sentence):
                h = int.from_bytes(hashlib.md5(tok.encode()).digest()[:8], "little")
                sign = 1.0 if (h >> 48) & 1 else -1.0
                vec[h % self.dim] += sign
            acc += vec
        acc /= len(sentences)
        norm = np.linalg.norm(acc)
        return acc / norm if norm > 0 else acc


class PrecomputedEmbeddings:
    """Embeddings read from a bundle manifest sidecar, keyed by window id."""

    dim = TEXT_DIM

    def __init__(self, table: dict[str, np.ndarray]):
        self.table = table

    def lookup(self, window_id: str) -> np.ndarray:
        try:
            return np.asarray(self.table[window_id], dtype=np.float64)
        except KeyError:
            raise ValidationError(f"no precomputed embedding for window {window_id}") from None


def embed_text(text: str, embedder=None) -> TextEmbedding:
    embedder = embedder or HashingEmbedder()
    vec = np.asarray(embedder(text), dtype=np.float64)
    if vec.shape != (TEXT_DIM,):
        raise ValidationError(
            f"embedder returned shape {vec.shape}, expected ({TEXT_DIM},)"
        )
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return TextEmbedding(vec, empty=True)
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError(f"embedder output norm {norm:.6f} is neither 0 nor 1")
    return TextEmbedding(vec)
