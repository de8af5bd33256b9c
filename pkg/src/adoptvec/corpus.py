"""Temporal adoption graphs and the random-walk training corpus.

Each topic's tweets become nodes of a directed graph with an edge a -> b
when b comes at or after a in the sequence, within ``tau`` seconds, and
was posted by a different user. One walk of at most ``gamma`` nodes is
sampled from every node; walks are the "sentences" fed to Skip-gram.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Sequence, Union

import numpy as np

from .ingest import AdoptionSequence


@dataclass(frozen=True)
class CorpusConfig:
    tau: int = 3600
    gamma: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.gamma < 2:
            raise ValueError("gamma must be at least 2")


@dataclass
class TemporalGraph:
    users: List[str]
    timestamps: np.ndarray
    successors: List[List[int]]

    def __len__(self):
        return len(self.users)

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.successors)

    def edge_set(self):
        return {(a, b) for a, succ in enumerate(self.successors) for b in succ}


WalkCorpus = List[List[str]]


def build_temporal_graph(seq: AdoptionSequence, cfg: CorpusConfig) -> TemporalGraph:
    users = seq.users
    ts = seq.timestamps
    tlist = ts.tolist()
    successors = []
    for a in range(len(users)):
        # sorted timestamps: candidates are a contiguous run after a
        end = bisect_right(tlist, tlist[a] + cfg.tau, lo=a + 1)
        ua = users[a]
        successors.append([b for b in range(a + 1, end) if users[b] != ua])
    return TemporalGraph(users, ts, successors)


def _topic_rng(seed: int, topic_id: str) -> np.random.Generator:
    digest = hashlib.sha256(topic_id.encode("utf-8")).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "little")])


def sample_path_indices(graph: TemporalGraph, gamma: int, rng: np.random.Generator) -> List[List[int]]:
    """One walk of node indices per node, truncated at dead ends."""
    walks = []
    succ = graph.successors
    for start in range(len(graph)):
        walk = [start]
        node = start
        while len(walk) < gamma and succ[node]:
            options = succ[node]
            node = options[int(rng.integers(len(options)))] if len(options) > 1 else options[0]
            walk.append(node)
        walks.append(walk)
    return walks


def sample_paths(graph: TemporalGraph, cfg: CorpusConfig,
                 rng: Union[np.random.Generator, None] = None) -> WalkCorpus:
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    return [[graph.users[i] for i in walk]
            for walk in sample_path_indices(graph, cfg.gamma, rng)]


def generate_corpus(sequences: Union[Mapping[str, AdoptionSequence], Iterable[AdoptionSequence]],
                    cfg: CorpusConfig) -> WalkCorpus:
    """Walks from every topic, concatenated in topic order.

    Every topic draws from its own stream seeded by ``(seed, topic_id)``, so
    the walks of one topic do not depend on which other topics are present.
    """
    if isinstance(sequences, Mapping):
        sequences = sequences.values()
    corpus: WalkCorpus = []
    for seq in sequences:
        if not len(seq):
            continue
        graph = build_temporal_graph(seq, cfg)
        corpus.extend(sample_paths(graph, cfg, _topic_rng(cfg.rng_seed, seq.topic_id)))
    return corpus


def write_corpus(corpus: Sequence[Sequence[str]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for walk in corpus:
            fh.write(" ".join(walk))
            fh.write("\n")


def read_corpus(path) -> WalkCorpus:
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh if line.strip()]
