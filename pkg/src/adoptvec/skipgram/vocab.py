from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np


@dataclass
class Vocabulary:
    """Users ordered by (count desc, user_id asc)."""

    words: List[str]
    counts: np.ndarray
    min_count: int = 1
    index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def count(self, word: str) -> int:
        return int(self.counts[self.index[word]])

    def encode(self, corpus: Sequence[Sequence[str]]) -> List[np.ndarray]:
        """Map walks to index arrays, dropping out-of-vocabulary users."""
        idx = self.index
        return [np.array([idx[w] for w in walk if w in idx], dtype=np.int32) for walk in corpus]


def build_vocabulary(corpus: Sequence[Sequence[str]], min_count: int = 1) -> Vocabulary:
    counts = Counter()
    for walk in corpus:
        counts.update(walk)
    if not counts:
        raise ValueError("empty corpus")
    kept = sorted(((w, c) for w, c in counts.items() if c >= min_count),
                  key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary([w for w, _ in kept], [c for _, c in kept], min_count)


def discard_probabilities(vocab: Vocabulary, threshold: float) -> np.ndarray:
    """Per-word chance of being dropped: ``max(0, 1 - sqrt(threshold / f))``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if math.isinf(threshold):
        return np.zeros(len(vocab))
    freq = vocab.counts / vocab.total
    return np.maximum(0.0, 1.0 - np.sqrt(threshold / freq))


def subsample_encoded(walks: Sequence[np.ndarray], discard: np.ndarray, rng: np.random.Generator):
    """Drop occurrences independently; returns kept walks and, per walk, kept positions."""
    out, kept_pos = [], []
    for walk in walks:
        keep = rng.random(len(walk)) >= discard[walk]
        out.append(walk[keep])
        kept_pos.append(np.flatnonzero(keep))
    return out, kept_pos


def subsample(corpus: Sequence[Sequence[str]], vocab: Vocabulary, threshold: float, seed: int):
    """Frequency-based subsampling of a string corpus (out-of-vocabulary users pass through)."""
    discard = discard_probabilities(vocab, threshold)
    rng = np.random.default_rng(seed)
    out = []
    for walk in corpus:
        draws = rng.random(len(walk))
        out.append([w for w, r in zip(walk, draws)
                    if w not in vocab.index or r >= discard[vocab.index[w]]])
    return out
