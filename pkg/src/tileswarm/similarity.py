"""Idea embeddings and similarity scoring.

The reference provider hashes lowercase character trigrams (FNV-1a 64-bit,
modulo the vector dimension) into a count vector and L2-normalizes it.
That makes embeddings bit-identical across runs and platforms, which is
what keeps every simulation deterministic.  A deployment can swap in a
real sentence encoder by registering another provider; only the trigram
provider is bundled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np

from .core import AggregateId, TileId

DIMENSION = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


class DegenerateText(ValueError):
    """Defensive: text too short to embed (validate_idea prevents this)."""


class DimensionMismatch(ValueError):
    pass


class UnknownProvider(KeyError):
    pass


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class EmbeddingProvider(Protocol):
    """Deterministic text-to-unit-vector encoder."""

    name: str
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class TrigramProvider:
    """Hashed character-trigram embedding, the bundled reference provider.

    Vectors are cached per text and must be treated as immutable; the
    cache also interns them so repeated peers' ideas share storage.
    """

    name = "trigram-256"

    def __init__(self, dimension: int = DIMENSION):
        self.dimension = dimension
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, text: str) -> np.ndarray:
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        if len(text) < 1:
            raise DegenerateText("cannot embed empty text")
        padded = f" {text.lower()} "
        counts = np.zeros(self.dimension, dtype=np.float64)
        for i in range(len(padded) - 2):
            idx = fnv1a_64(padded[i : i + 3].encode("utf-8")) % self.dimension
            counts[idx] += 1.0
        vec = counts / np.sqrt(np.add.reduce(counts * counts))
        vec.flags.writeable = False
        self._cache[text] = vec
        return vec


_PROVIDERS: dict[str, EmbeddingProvider] = {}


def register_provider(provider: EmbeddingProvider) -> None:
    _PROVIDERS[provider.name] = provider


def get_provider(name: str) -> EmbeddingProvider:
    try:
        return _PROVIDERS[name]
    except KeyError:
        raise UnknownProvider(f"no embedding provider named {name!r}") from None


register_provider(TrigramProvider())


def embed(text: str, provider: EmbeddingProvider) -> np.ndarray:
    """Embed normalized idea text into a unit-norm vector."""
    return provider.embed(text)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors.

    Uses numpy's own pairwise reduction over the elementwise products so
    the summation order is fixed: symmetry is exact and results do not
    depend on a BLAS build.
    """
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return float(np.add.reduce(a * b))


@dataclass(frozen=True)
class MatchResult:
    tile: TileId
    aggregate: AggregateId
    score: float


def select_best(
    scored: Iterable[tuple[TileId, AggregateId, float]], threshold: float
) -> MatchResult | None:
    """Pick the highest-scoring peer, strictly above threshold.

    Ties break to the lowest TileId; scanning in sorted id order makes the
    result invariant under input permutation.  Shared by best_match, the
    tile decision rule, and the centralized oracle so all three agree on
    edge cases.
    """
    best: MatchResult | None = None
    for tid, agg, score in sorted(scored, key=lambda row: row[0]):
        if best is None or score > best.score:
            best = MatchResult(tid, agg, score)
    if best is None or not (best.score > threshold):
        return None
    return best


def best_match(
    own: np.ndarray,
    peers: Iterable[tuple[TileId, AggregateId, np.ndarray]],
    threshold: float = 0.3,
) -> MatchResult | None:
    """Find the most similar peer, or None when nothing clears the threshold."""
    return select_best(
        ((tid, agg, cosine_similarity(own, emb)) for tid, agg, emb in peers), threshold
    )


_PAIR_CACHE: dict[tuple[str, str, str], float] = {}


def pair_score(provider: EmbeddingProvider, text_a: str, text_b: str) -> float:
    """Memoized cosine similarity between two idea texts.

    Safe because embeddings are pure functions of (provider, text) and
    cosine symmetry is exact.
    """
    lo, hi = (text_a, text_b) if text_a <= text_b else (text_b, text_a)
    key = (provider.name, lo, hi)
    score = _PAIR_CACHE.get(key)
    if score is None:
        score = cosine_similarity(provider.embed(text_a), provider.embed(text_b))
        _PAIR_CACHE[key] = score
    return score
