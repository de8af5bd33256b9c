"""Unit-normalised user vectors and exact nearest-neighbour search.

:class:`NeighborIndex` wraps a k-d tree with bucket leaves. Queries are
exact: pruning only skips a subtree when its splitting plane is strictly
farther than the current k-th best, so results (including ties, ordered
by user id) match a brute-force scan.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .skipgram.objective import EmbeddingModel

logger = logging.getLogger(__name__)


@dataclass
class NormalizedEmbeddings:
    words: List[str]
    vectors: np.ndarray
    dropped: int = 0

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def __getitem__(self, word) -> np.ndarray:
        return self.vectors[self.index[word]]


def normalize(model, tol: float = 0.0) -> NormalizedEmbeddings:
    """Scale every input vector to unit length; zero vectors are dropped."""
    if isinstance(model, EmbeddingModel):
        words, vecs = model.words, model.input_vectors
    else:
        words, vecs = model
    vecs = np.asarray(vecs, dtype=np.float64)
    norms = np.linalg.norm(vecs, axis=1)
    ok = norms > tol
    dropped = int((~ok).sum())
    if dropped:
        logger.warning("dropped %d zero-norm vectors", dropped)
    kept_words = [w for w, keep in zip(words, ok) if keep]
    return NormalizedEmbeddings(kept_words, vecs[ok] / norms[ok, None], dropped)


def _sqdist(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    diff = points - q
    return np.einsum("ij,ij->i", diff, diff)


class _KDTree:
    def __init__(self, data: np.ndarray, leaf_size: int = 32):
        n = len(data)
        self.leaf_size = max(1, leaf_size)
        self.perm = np.arange(n)
        self.split_dim: List[int] = []
        self.split_val: List[float] = []
        self.children: List[Tuple[int, int]] = []
        self.span: List[Tuple[int, int]] = []
        self._data = data
        if n:
            self._build(0, n)
        self.data = data[self.perm]

    def _new_node(self, lo, hi):
        self.split_dim.append(-1)
        self.split_val.append(0.0)
        self.children.append((-1, -1))
        self.span.append((lo, hi))
        return len(self.span) - 1

    def _build(self, lo, hi):
        node = self._new_node(lo, hi)
        if hi - lo <= self.leaf_size:
            return node
        idx = self.perm[lo:hi]
        pts = self._data[idx]
        spread = pts.max(axis=0) - pts.min(axis=0)
        dim = int(np.argmax(spread))
        if spread[dim] <= 0:
            return node
        mid = (hi - lo) // 2
        order = np.argpartition(pts[:, dim], mid)
        self.perm[lo:hi] = idx[order]
        # left holds values <= split, right values >= split
        self.split_dim[node] = dim
        self.split_val[node] = float(self._data[self.perm[lo + mid], dim])
        left = self._build(lo, lo + mid)
        right = self._build(lo + mid, hi)
        self.children[node] = (left, right)
        return node


class NeighborIndex:
    """Exact Euclidean k-NN over a fixed set of user vectors."""

    def __init__(self, words: Sequence[str], vectors: np.ndarray, leaf_size: int = 32):
        self.words = list(words)
        self.vectors = np.ascontiguousarray(vectors, dtype=np.float64)
        self.index = {w: i for i, w in enumerate(self.words)}
        # tie-break rank: position in user-id order
        self.rank = np.empty(len(self.words), dtype=np.int64)
        self.rank[np.argsort(np.array(self.words, dtype=object), kind="stable")] = np.arange(len(self.words))
        self._tree = _KDTree(self.vectors, leaf_size)

    @classmethod
    def from_embeddings(cls, emb: NormalizedEmbeddings, leaf_size: int = 32) -> "NeighborIndex":
        return cls(emb.words, emb.vectors, leaf_size)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index[word]]

    def knn_indices(self, query: np.ndarray, k: int, exclude: Iterable[int] = ()) -> List[Tuple[int, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")
        if not len(self.words):
            raise ValueError("empty index")
        q = np.asarray(query, dtype=np.float64)
        excluded = set(exclude)
        tree = self._tree
        perm, data, rank = tree.perm, tree.data, self.rank
        heap: List[Tuple[float, int, int]] = []  # (-sqd, -rank, idx): heap[0] is the worst kept

        def visit(node):
            dim = tree.split_dim[node]
            if dim < 0:
                lo, hi = tree.span[node]
                d2 = _sqdist(data[lo:hi], q)
                for off in np.argsort(d2, kind="stable"):
                    sq = float(d2[off])
                    if len(heap) == k and sq > -heap[0][0]:
                        break
                    i = int(perm[lo + off])
                    if i in excluded:
                        continue
                    item = (-sq, -int(rank[i]), i)
                    if len(heap) < k:
                        heapq.heappush(heap, item)
                    elif item > heap[0]:
                        heapq.heapreplace(heap, item)
                return
            left, right = tree.children[node]
            diff = q[dim] - tree.split_val[node]
            near, far = (left, right) if diff <= 0 else (right, left)
            visit(near)
            if len(heap) < k or diff * diff <= -heap[0][0]:
                visit(far)

        visit(0)
        out = sorted(heap, key=lambda t: (-t[0], -t[1]))
        return [(i, float(np.sqrt(-negsq))) for negsq, _, i in out]

    def knn(self, query: np.ndarray, k: int, exclude: Iterable[str] = ()) -> List[Tuple[str, float]]:
        """Up to ``k`` nearest users as ``(user_id, distance)``, ascending, ties by user id."""
        ex = [self.index[u] for u in exclude if u in self.index]
        return [(self.words[i], d) for i, d in self.knn_indices(query, k, ex)]


def brute_force_knn(words: Sequence[str], vectors: np.ndarray, query: np.ndarray, k: int,
                    exclude: Iterable[str] = ()) -> List[Tuple[str, float]]:
    """Reference full scan with the same ordering rule as :meth:`NeighborIndex.knn`."""
    excluded = set(exclude)
    d2 = _sqdist(np.asarray(vectors, dtype=np.float64), np.asarray(query, dtype=np.float64))
    items = sorted((float(d2[i]), w) for i, w in enumerate(words) if w not in excluded)
    return [(w, float(np.sqrt(sq))) for sq, w in items[:k]]
