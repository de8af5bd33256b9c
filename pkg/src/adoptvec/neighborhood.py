"""How vector-space neighbourhoods relate to follower-network neighbourhoods."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .embed_store import NeighborIndex, NormalizedEmbeddings
from .ingest import FollowerNetwork

logger = logging.getLogger(__name__)


def jaccard(a: Iterable, b: Iterable) -> float:
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


def vector_neighbors(user: str, index: NeighborIndex, k: int) -> List[str]:
    return [u for u, _ in index.knn(index.vector(user), k, exclude=[user])]


def jaccard_neighborhood_overlap(user: str, network: FollowerNetwork, index: NeighborIndex,
                                 kind: str = "followers") -> Optional[float]:
    """Jaccard index of a user's network neighbours and its equally many nearest vectors.

    Returns ``None`` when the user has no such neighbours or no vector.
    """
    nbrs = network.neighbors(user, kind)
    if not nbrs or user not in index:
        return None
    return jaccard(nbrs, vector_neighbors(user, index, len(nbrs)))


@dataclass
class CoAdoptionStats:
    user_id: str
    p_u: float
    neighbor_kind: str
    num_neighbors: int
    num_topics: int


def coadoption_likelihood(user: str, neighbors: Iterable[str], adoptions: Mapping[str, Set[str]],
                          neighbor_kind: str = "network") -> CoAdoptionStats:
    """Share of (neighbour, topic of user) pairs where the neighbour also adopted the topic.

    ``adoptions`` maps each user to the set of topics it adopted, so
    repeated tweets on one topic count once.
    """
    nbrs = set(neighbors)
    topics = adoptions.get(user, set())
    if not nbrs or not topics:
        raise ValueError(f"user {user}: empty neighbour or topic set")
    hits = sum(len(topics & adoptions.get(w, set())) for w in nbrs)
    return CoAdoptionStats(user, hits / (len(nbrs) * len(topics)), neighbor_kind, len(nbrs), len(topics))


@dataclass
class CoAdoptionComparison:
    pairs: List[Tuple[str, float, float]] = field(default_factory=list)

    @property
    def network_mean(self) -> float:
        return float(np.mean([p for _, p, _ in self.pairs])) if self.pairs else float("nan")

    @property
    def vector_mean(self) -> float:
        return float(np.mean([p for _, _, p in self.pairs])) if self.pairs else float("nan")

    def write_table(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("user_id\tp_network\tp_vector\n")
            for u, pn, pv in self.pairs:
                fh.write(f"{u}\t{pn:.6f}\t{pv:.6f}\n")

    def summary(self) -> str:
        return (f"users\t{len(self.pairs)}\n"
                f"mean_p_network\t{self.network_mean:.6f}\n"
                f"mean_p_vector\t{self.vector_mean:.6f}\n")


def _sample(users: Sequence[str], size: Optional[int], seed: int) -> List[str]:
    users = sorted(users)
    if size is None or size >= len(users):
        return users
    rng = np.random.default_rng(seed)
    return sorted(users[i] for i in rng.choice(len(users), size, replace=False))


def compare_neighborhood_coadoption(network: FollowerNetwork, index: NeighborIndex,
                                    adoptions: Mapping[str, Set[str]],
                                    sample_size: Optional[int] = 10000, seed: int = 0,
                                    kind: str = "both") -> CoAdoptionComparison:
    """Co-adoption likelihood per sampled user under network and vector neighbours.

    The vector neighbourhood has as many members as the network one.
    Users without a vector, neighbours or topics are not eligible.
    """
    eligible = [u for u in adoptions
                if u in index and adoptions[u] and network.neighbors(u, kind)]
    result = CoAdoptionComparison()
    for u in _sample(eligible, sample_size, seed):
        net = network.neighbors(u, kind)
        vec = vector_neighbors(u, index, len(net))
        if not vec:
            continue
        pn = coadoption_likelihood(u, net, adoptions, "network").p_u
        pv = coadoption_likelihood(u, vec, adoptions, "vector").p_u
        result.pairs.append((u, pn, pv))
    return result


def mean_jaccard_overlap(network: FollowerNetwork, index: NeighborIndex,
                         sample_size: Optional[int] = 1000, seed: int = 0,
                         kind: str = "followers") -> Tuple[float, int]:
    """Mean overlap over sampled eligible users, and how many were used."""
    eligible = [u for u in index.words if network.neighbors(u, kind)]
    vals = [jaccard_neighborhood_overlap(u, network, index, kind) for u in _sample(eligible, sample_size, seed)]
    vals = [v for v in vals if v is not None]
    return (float(np.mean(vals)) if vals else float("nan")), len(vals)


@dataclass
class Projection:
    words: List[str]
    coords: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    vectors: np.ndarray

    def write(self, path, metadata: Optional[Mapping[str, Mapping[str, str]]] = None) -> None:
        """Coordinates plus any metadata columns (``{column: {user: value}}``)."""
        metadata = metadata or {}
        cols = list(metadata)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\t".join(["user_id", "pc1", "pc2"] + cols) + "\n")
            for w, (x, y) in zip(self.words, self.coords):
                extra = [str(metadata[c].get(w, "")) for c in cols]
                fh.write("\t".join([w, f"{x:.8g}", f"{y:.8g}"] + extra) + "\n")

    def write_vectors(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for w, v in zip(self.words, self.vectors):
                fh.write(w + "\t" + "\t".join(f"{x:.8g}" for x in v) + "\n")


def pca(vectors: np.ndarray, n_components: int = 2):
    """Principal axes (rows, orthonormal) and the variance along each."""
    X = np.asarray(vectors, dtype=float)
    Xc = X - X.mean(axis=0)
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    var = s ** 2 / max(len(X) - 1, 1)
    return vt[:n_components], var[:n_components], Xc


def export_projection(embeddings: NormalizedEmbeddings, sample_size: Optional[int] = 1000,
                      seed: int = 0) -> Projection:
    """2-D PCA coordinates of a random sample of users, for plotting elsewhere."""
    if sample_size is not None and sample_size > len(embeddings):
        raise ValueError(f"sample of {sample_size} exceeds {len(embeddings)} users")
    words = _sample(embeddings.words, sample_size, seed)
    X = np.array([embeddings[w] for w in words])
    comps, var, Xc = pca(X, 2)
    return Projection(words, Xc @ comps.T, comps, var, X)
