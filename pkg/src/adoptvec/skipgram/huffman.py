from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import List

import numpy as np

from .vocab import Vocabulary


@dataclass
class HuffmanTree:
    """Binary code tree over the vocabulary.

    ``points[i]`` lists inner-node indices on the root-to-leaf path of word
    ``i``; ``codes[i]`` holds the branch taken at each of them. Inner nodes
    are numbered ``0 .. |V|-2`` with the root last.
    """

    points: List[np.ndarray]
    codes: List[np.ndarray]

    @property
    def num_leaves(self) -> int:
        return len(self.points)

    @property
    def num_inner(self) -> int:
        return self.num_leaves - 1

    def code_lengths(self) -> np.ndarray:
        return np.array([len(c) for c in self.codes])

    def padded(self):
        """``(points, codes, lengths)`` as rectangular arrays for the training kernel."""
        lengths = self.code_lengths().astype(np.int32)
        width = int(lengths.max())
        points = np.zeros((self.num_leaves, width), dtype=np.int32)
        codes = np.zeros((self.num_leaves, width), dtype=np.int8)
        for i, (p, c) in enumerate(zip(self.points, self.codes)):
            points[i, :len(p)] = p
            codes[i, :len(c)] = c
        return points, codes, lengths


def build_huffman_tree(vocab_or_counts) -> HuffmanTree:
    """Repeatedly merge the two lowest-count nodes; ties go to the earlier-inserted node.

    The first node popped in a merge takes branch 0, the second branch 1.
    """
    counts = vocab_or_counts.counts if isinstance(vocab_or_counts, Vocabulary) else vocab_or_counts
    counts = [int(c) for c in counts]
    n = len(counts)
    if n < 2:
        raise ValueError("Huffman tree needs at least 2 words")
    heap = [(c, i, i) for i, c in enumerate(counts)]
    heapq.heapify(heap)
    parent = [0] * (2 * n - 1)
    branch = [0] * (2 * n - 1)
    next_id = n
    while len(heap) > 1:
        c1, _, a = heapq.heappop(heap)
        c2, _, b = heapq.heappop(heap)
        parent[a], branch[a] = next_id, 0
        parent[b], branch[b] = next_id, 1
        heapq.heappush(heap, (c1 + c2, next_id, next_id))
        next_id += 1
    root = 2 * n - 2
    points, codes = [], []
    for leaf in range(n):
        p, c = [], []
        node = leaf
        while node != root:
            p.append(parent[node] - n)
            c.append(branch[node])
            node = parent[node]
        points.append(np.array(p[::-1], dtype=np.int32))
        codes.append(np.array(c[::-1], dtype=np.int8))
    return HuffmanTree(points, codes)
