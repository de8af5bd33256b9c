"""Skip-gram probabilities, likelihood and per-pair losses.

These are the reference (slow, pure numpy) forms of what the training
kernel does in bulk. They work on word indices of a trained or freshly
initialised :class:`EmbeddingModel`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_expit, logsumexp

from .huffman import HuffmanTree


@dataclass
class EmbeddingModel:
    """Input vectors, context vectors and (for hierarchical softmax) inner-node vectors.

    ``context_vectors`` is the output layer of the full softmax and of
    negative sampling. ``inner_vectors`` has one row per Huffman inner node
    and is ``None`` for models trained without a tree.
    """

    words: List[str]
    input_vectors: np.ndarray
    context_vectors: np.ndarray
    inner_vectors: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.input_vectors.shape != self.context_vectors.shape:
            raise ValueError("input and context matrices must have the same shape")
        if len(self.words) != self.input_vectors.shape[0]:
            raise ValueError("one vector row per word required")

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def __len__(self):
        return len(self.words)

    def vector(self, word: str) -> np.ndarray:
        return self.input_vectors[self.words.index(word)]

    def as_dict(self) -> Dict[str, np.ndarray]:
        return dict(zip(self.words, self.input_vectors))


def init_model(words: Sequence[str], dim: int, seed: int = 1, hierarchical: bool = True) -> EmbeddingModel:
    """Input vectors uniform in [-0.5/d, 0.5/d]; output-side vectors zero."""
    rng = np.random.default_rng(seed)
    n = len(words)
    syn0 = (rng.random((n, dim)) - 0.5) / dim
    inner = np.zeros((max(n - 1, 0), dim)) if hierarchical else None
    return EmbeddingModel(list(words), syn0, np.zeros((n, dim)), inner)


def _log_normalizer(scores: np.ndarray) -> float:
    # max-shifted log-sum-exp; scipy's version carries ~20us of call overhead
    m = scores.max()
    return m + np.log(np.exp(scores - m).sum())


def softmax_probability(model: EmbeddingModel, u: int, c: int) -> float:
    scores = model.context_vectors @ model.input_vectors[u]
    return float(np.exp(scores[c] - _log_normalizer(scores)))


def softmax_distribution(model: EmbeddingModel, u: int) -> np.ndarray:
    scores = model.context_vectors @ model.input_vectors[u]
    return np.exp(scores - _log_normalizer(scores))


def _signs(code: np.ndarray) -> np.ndarray:
    # branch 0 -> +1, branch 1 -> -1
    return 1.0 - 2.0 * code


def hs_log_probability(model: EmbeddingModel, tree: HuffmanTree, u: int, c: int) -> float:
    """log p(c|u) as a product of branch sigmoids along c's path."""
    inner = model.inner_vectors[tree.points[c]]
    return float(log_expit(_signs(tree.codes[c]) * (inner @ model.input_vectors[u])).sum())


def hs_leaf_probabilities(model: EmbeddingModel, tree: HuffmanTree, u: int) -> np.ndarray:
    return np.exp([hs_log_probability(model, tree, u, c) for c in range(tree.num_leaves)])


def window_pairs(walks: Iterable[Sequence[int]], window: int) -> Iterator[Tuple[int, int]]:
    """(center, context) for every pair within ``window`` positions on one walk."""
    for walk in walks:
        n = len(walk)
        for i in range(n):
            for j in range(max(0, i - window), min(n, i + window + 1)):
                if j != i:
                    yield int(walk[i]), int(walk[j])


def corpus_log_likelihood(model: EmbeddingModel, pairs: Iterable[Tuple[int, int]],
                          tree: Optional[HuffmanTree] = None) -> float:
    """Sum of log p(context | center) over pairs.

    Uses the hierarchical-softmax factorisation when ``tree`` is given and
    the full softmax over context vectors otherwise.
    """
    total = 0.0
    if tree is not None:
        for u, c in pairs:
            total += hs_log_probability(model, tree, u, c)
        return total
    cache = {}
    for u, c in pairs:
        if u not in cache:
            scores = model.context_vectors @ model.input_vectors[u]
            cache[u] = scores - logsumexp(scores)
        total += float(cache[u][c])
    return total


def hs_pair_loss_and_gradients(model: EmbeddingModel, tree: HuffmanTree, u: int, c: int):
    """Loss ``-log p(c|u)`` under hierarchical softmax and its gradients.

    Returns ``(loss, grad_input, grad_inner)`` where ``grad_input`` is the
    gradient for ``input_vectors[u]`` and ``grad_inner`` maps inner-node
    index to the gradient for that row.
    """
    v = model.input_vectors[u]
    points = tree.points[c]
    s = _signs(tree.codes[c])
    inner = model.inner_vectors[points]
    x = s * (inner @ v)
    loss = float(-log_expit(x).sum())
    # d/dx [-log sigma(x)] = sigma(x) - 1
    coef = (expit(x) - 1.0) * s
    grad_input = coef @ inner
    grad_inner = {int(p): coef[i] * v for i, p in enumerate(points)}
    return loss, grad_input, grad_inner


def noise_distribution(counts: np.ndarray, power: float = 0.75) -> np.ndarray:
    w = np.asarray(counts, dtype=float) ** power
    return w / w.sum()


def ns_pair_loss_and_gradients(model: EmbeddingModel, noise: np.ndarray, u: int, c: int,
                               k: int, seed: int = 0):
    """Negative-sampling loss for one pair with ``k`` noise draws.

    ``-log sigma(v'_c . v_u) - sum_k log sigma(-v'_n . v_u)``. Returns
    ``(loss, grad_input, grad_context)`` with ``grad_context`` keyed by
    context-row index (repeated draws accumulate).
    """
    rng = np.random.default_rng(seed)
    negatives = rng.choice(len(noise), size=k, p=noise) if k > 0 else np.empty(0, dtype=int)
    rows = np.concatenate([[c], negatives]).astype(int)
    s = np.concatenate([[1.0], -np.ones(k)])
    v = model.input_vectors[u]
    out = model.context_vectors[rows]
    x = s * (out @ v)
    loss = float(-log_expit(x).sum())
    coef = (expit(x) - 1.0) * s
    grad_input = coef @ out
    grad_context: Dict[int, np.ndarray] = {}
    for i, r in enumerate(rows):
        r = int(r)
        g = coef[i] * v
        grad_context[r] = grad_context[r] + g if r in grad_context else g
    return loss, grad_input, grad_context
