"""Future-adopter prediction from the first adopters of a topic.

Candidates are scored by their Euclidean distances to the seed set S
(minimum or mean) and compared against two topic-agnostic or
network-based baselines with Precision@k.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .embed_store import NeighborIndex, _sqdist
from .ingest import AdoptionSequence, FollowerNetwork

logger = logging.getLogger(__name__)

SCORERS = ("min", "average")


@dataclass
class PredictionQuery:
    topic_id: str
    seeds: List[str]
    k: int = 10
    scorer: str = "average"
    fanout: Optional[int] = None

    def __post_init__(self):
        seen = set()
        self.seeds = [s for s in self.seeds if not (s in seen or seen.add(s))]
        if not self.seeds:
            raise ValueError("query needs at least one seed adopter")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.scorer == "avg":
            self.scorer = "average"
        if self.scorer not in SCORERS:
            raise ValueError(f"scorer must be one of {SCORERS}")
        if self.fanout is None:
            self.fanout = 10 * self.k

    @property
    def n(self) -> int:
        return len(self.seeds)


@dataclass
class RankedPrediction:
    ranking: List[Tuple[str, float]]
    ground_truth: Set[str] = field(default_factory=set)
    missing_seeds: int = 0
    empty: bool = False

    @property
    def users(self) -> List[str]:
        return [u for u, _ in self.ranking]


def _seed_rows(query: PredictionQuery, index: NeighborIndex):
    present = [s for s in query.seeds if s in index]
    return present, len(query.seeds) - len(present)


def _top(scores: Mapping[str, float], k: int) -> List[Tuple[str, float]]:
    return sorted(scores.items(), key=lambda kv: (kv[1], kv[0]))[:k]


def candidate_pool(query: PredictionQuery, index: NeighborIndex) -> Dict[str, float]:
    """Union of each seed's ``fanout`` nearest non-seed users, with the minimum distance seen."""
    present, _ = _seed_rows(query, index)
    best: Dict[str, float] = {}
    for s in present:
        for user, dist in index.knn(index.vector(s), query.fanout, exclude=query.seeds):
            if user not in best or dist < best[user]:
                best[user] = dist
    return best


def min_score_rank(query: PredictionQuery, index: NeighborIndex) -> RankedPrediction:
    present, missing = _seed_rows(query, index)
    if not present:
        logger.warning("topic %s: no seed has an embedding", query.topic_id)
        return RankedPrediction([], missing_seeds=missing, empty=True)
    return RankedPrediction(_top(candidate_pool(query, index), query.k), missing_seeds=missing)


def average_score_rank(query: PredictionQuery, index: NeighborIndex) -> RankedPrediction:
    """Mean distance to all of S, over the pool of per-seed nearest neighbours.

    Users outside every seed's ``fanout``-NN list are never scored.
    """
    present, missing = _seed_rows(query, index)
    if not present:
        logger.warning("topic %s: no seed has an embedding", query.topic_id)
        return RankedPrediction([], missing_seeds=missing, empty=True)
    pool = sorted(candidate_pool(query, index))
    if not pool:
        return RankedPrediction([], missing_seeds=missing)
    pts = index.vectors[[index.index[u] for u in pool]]
    total = np.zeros(len(pool))
    for s in present:
        total += np.sqrt(_sqdist(pts, index.vector(s)))
    mean = total / len(present)
    return RankedPrediction(_top(dict(zip(pool, mean.tolist())), query.k), missing_seeds=missing)


def rank(query: PredictionQuery, index: NeighborIndex) -> RankedPrediction:
    return (min_score_rank if query.scorer == "min" else average_score_rank)(query, index)


def adoption_counts(sequences: Iterable[AdoptionSequence]) -> Counter:
    """Number of distinct topics each user adopted."""
    counts: Counter = Counter()
    for seq in sequences:
        counts.update(set(seq.users))
    return counts


def frequency_rank(train_sequences, k: int, exclude: Iterable[str] = ()) -> List[Tuple[str, int]]:
    """Most prolific adopters of the training topics, ties by user id.

    ``train_sequences`` may also be a precomputed :func:`adoption_counts`.
    """
    counts = train_sequences if isinstance(train_sequences, Counter) else adoption_counts(
        train_sequences.values() if isinstance(train_sequences, Mapping) else train_sequences)
    excluded = set(exclude)
    ranked = sorted(((u, c) for u, c in counts.items() if u not in excluded),
                    key=lambda uc: (-uc[1], uc[0]))
    return ranked[:k]


def exposure_scores(seeds: Iterable[str], network: FollowerNetwork) -> Counter:
    """For every non-seed user, how many seeds it follows."""
    seeds = list(dict.fromkeys(seeds))
    seed_set = set(seeds)
    scores: Counter = Counter()
    for a in seeds:
        for follower in network.followers_of(a):
            if follower not in seed_set:
                scores[follower] += 1
    return scores


def exposure_rank(seeds: Iterable[str], network: FollowerNetwork, k: int) -> List[Tuple[str, int]]:
    scores = exposure_scores(seeds, network)
    return sorted(scores.items(), key=lambda uc: (-uc[1], uc[0]))[:k]


def precision_at_k(predicted: Sequence[str], ground_truth: Set[str], k: int) -> float:
    """Hits among the first ``k`` predictions divided by ``k`` (even if fewer were returned)."""
    if k <= 0:
        raise ValueError("k must be positive")
    return len(set(predicted[:k]) & set(ground_truth)) / k


@dataclass
class AdopterEvaluation:
    rows: List[Tuple[str, int, str, float]] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)
    unrankable_truth: Dict[Tuple[str, int], int] = field(default_factory=dict)
    no_embedded_truth: List[Tuple[str, int]] = field(default_factory=list)

    def mean(self, method: str, n: int) -> float:
        vals = [p for _, nn, m, p in self.rows if m == method and nn == n]
        return float(np.mean(vals)) if vals else float("nan")

    def values(self, method: str, n: int) -> List[float]:
        return [p for _, nn, m, p in self.rows if m == method and nn == n]

    def methods(self) -> List[str]:
        return list(dict.fromkeys(m for _, _, m, _ in self.rows))

    def n_values(self) -> List[int]:
        return sorted({n for _, n, _, _ in self.rows})

    def histogram(self, method: str, n: int, bins: int = 10) -> List[Tuple[float, int]]:
        return precision_histogram(self.values(method, n), bins)

    def write_table(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("topic_id\tn\tmethod\tprecision\n")
            for topic, n, method, p in self.rows:
                fh.write(f"{topic}\t{n}\t{method}\t{p:.6f}\n")

    def summary(self) -> str:
        lines = ["method\tn\tmean_precision\ttopics"]
        for method in self.methods():
            for n in self.n_values():
                vals = self.values(method, n)
                if vals:
                    lines.append(f"{method}\t{n}\t{np.mean(vals):.6f}\t{len(vals)}")
        if self.skipped:
            lines.append(f"# skipped topics: {len(self.skipped)}")
        if self.no_embedded_truth:
            lines.append(f"# queries whose future adopters all lack vectors: {len(self.no_embedded_truth)}")
        return "\n".join(lines) + "\n"


def precision_histogram(values: Sequence[float], bins: int = 10) -> List[Tuple[float, int]]:
    """Counts over equal-width bins of [0, 1]; 1.0 falls in the last bin."""
    counts = [0] * bins
    for v in values:
        b = int(np.floor(v * bins + 1e-9))
        counts[min(max(b, 0), bins - 1)] += 1
    return [(i / bins, c) for i, c in enumerate(counts)]


def select_test_topics(sequences: Mapping[str, AdoptionSequence], min_adopters: int,
                       num_topics: Optional[int], seed: int) -> List[str]:
    """Random sample of topics with at least ``min_adopters`` distinct adopters, sorted by id."""
    eligible = sorted(t for t, s in sequences.items() if len(s.first_adopters()) >= min_adopters)
    if not eligible:
        raise ValueError(f"no test topic has at least {min_adopters} distinct adopters")
    if num_topics is None or num_topics >= len(eligible):
        return eligible
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(eligible), size=num_topics, replace=False)
    return sorted(eligible[i] for i in picked)


def evaluate_adopter_prediction(test_sequences: Mapping[str, AdoptionSequence],
                                index: NeighborIndex,
                                train_sequences: Mapping[str, AdoptionSequence],
                                network: Optional[FollowerNetwork] = None,
                                n_values: Sequence[int] = (10,),
                                k: int = 10,
                                scorer: str = "average",
                                fanout: Optional[int] = None,
                                min_adopters: int = 500,
                                num_topics: Optional[int] = 100,
                                seed: int = 0) -> AdopterEvaluation:
    """Precision@k of the embedding ranker and the baselines on held-out topics.

    Each test sequence is reduced to first adoptions; the first ``n``
    adopters form the query and the remaining ones the ground truth. All
    methods exclude the seeds from their predictions.
    """
    topics = select_test_topics(test_sequences, min_adopters, num_topics, seed)
    counts = adoption_counts(train_sequences.values())
    vector_label = "vectors-" + scorer
    result = AdopterEvaluation()
    for topic in topics:
        adopters = test_sequences[topic].first_adopters()
        for n in n_values:
            if n >= len(adopters):
                logger.warning("topic %s: n=%d leaves no future adopters, skipped", topic, n)
                result.skipped.append(topic)
                continue
            seeds, future = adopters[:n], set(adopters[n:])
            unrankable = sum(1 for u in future if u not in index)
            result.unrankable_truth[(topic, n)] = unrankable
            if unrankable == len(future):
                result.no_embedded_truth.append((topic, n))
            query = PredictionQuery(topic, seeds, k=k, scorer=scorer, fanout=fanout)
            pred = rank(query, index)
            result.rows.append((topic, n, vector_label, precision_at_k(pred.users, future, k)))
            freq = [u for u, _ in frequency_rank(counts, k, exclude=seeds)]
            result.rows.append((topic, n, "frequency", precision_at_k(freq, future, k)))
            if network is not None:
                expo = [u for u, _ in exposure_rank(seeds, network, k)]
                result.rows.append((topic, n, "exposure", precision_at_k(expo, future, k)))
    if not result.rows:
        raise ValueError("every selected topic was skipped")
    return result
