"""Synthetic adoption logs with planted communities.

Every topic has a home community. Each tweet on it comes from a uniformly
chosen member of that community with probability ``1 - noise`` and from a
uniformly chosen user of another community otherwise. Tweet times follow
a Poisson process (exponential gaps). Users follow mostly members of their
own community; the geo label of a user is its community.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .ingest import (
    AdoptionEvent,
    AdoptionSequence,
    FollowerNetwork,
    GeoLabels,
    write_adoption_log,
    write_follower_network,
    write_geo_labels,
)

ADOPTIONS_FILE = "adoptions.tsv"
FOLLOWERS_FILE = "followers.tsv"
GEO_FILE = "geo.tsv"
COMMUNITIES_FILE = "communities.tsv"


@dataclass(frozen=True)
class SynthConfig:
    num_communities: int = 5
    users_per_community: int = 40
    topics_per_community: int = 80
    noise: float = 0.05
    tweets_per_topic: Tuple[int, int] = (30, 60)
    mean_gap: float = 600.0
    follows_per_user: int = 10
    cross_follow_fraction: float = 0.1
    start_time: int = 1396000000
    time_span: int = 30 * 86400
    seed: int = 0

    def __post_init__(self):
        if self.num_communities < 2:
            raise ValueError("need at least 2 communities")
        if not 0.0 <= self.noise < 0.5:
            raise ValueError("noise must lie in [0, 0.5)")
        if self.mean_gap <= 0:
            raise ValueError("mean_gap must be positive")
        lo, hi = self.tweets_per_topic
        if not 1 <= lo <= hi:
            raise ValueError("tweets_per_topic must be a range 1 <= lo <= hi")
        if not 0.0 <= self.cross_follow_fraction <= 1.0:
            raise ValueError("cross_follow_fraction must lie in [0, 1]")
        if self.follows_per_user >= self.num_communities * self.users_per_community:
            raise ValueError("follows_per_user must be below the user count")

    @property
    def num_users(self) -> int:
        return self.num_communities * self.users_per_community

    @property
    def num_topics(self) -> int:
        return self.num_communities * self.topics_per_community


@dataclass
class SynthData:
    sequences: Dict[str, AdoptionSequence]
    network: FollowerNetwork
    geo: GeoLabels
    community: Dict[str, int]
    topic_home: Dict[str, int]

    def write(self, directory) -> Dict[str, str]:
        os.makedirs(directory, exist_ok=True)
        paths = {name: os.path.join(directory, f) for name, f in
                 [("adoptions", ADOPTIONS_FILE), ("followers", FOLLOWERS_FILE),
                  ("geo", GEO_FILE), ("communities", COMMUNITIES_FILE)]}
        write_adoption_log(self.sequences.values(), paths["adoptions"])
        write_follower_network(self.network, paths["followers"])
        write_geo_labels(self.geo, paths["geo"])
        with open(paths["communities"], "w", encoding="utf-8") as fh:
            for u in sorted(self.community):
                fh.write(f"{u}\t{self.community[u]}\n")
        return paths


def user_name(i: int) -> str:
    return f"u{i:05d}"


def _members(cfg: SynthConfig) -> List[List[int]]:
    m = cfg.users_per_community
    return [list(range(c * m, (c + 1) * m)) for c in range(cfg.num_communities)]


def _pick_user(rng, home: int, members, cross_prob: float, num_users: int, m: int) -> int:
    if rng.random() < cross_prob:
        # uniform over users outside the home community
        j = int(rng.integers(num_users - m))
        return j if j < home * m else j + m
    return members[home][int(rng.integers(m))]


def generate(cfg: SynthConfig = SynthConfig()) -> SynthData:
    rng = np.random.default_rng(cfg.seed)
    members = _members(cfg)
    m, n_users, C = cfg.users_per_community, cfg.num_users, cfg.num_communities

    sequences: Dict[str, AdoptionSequence] = {}
    topic_home: Dict[str, int] = {}
    lo, hi = cfg.tweets_per_topic
    for t in range(cfg.num_topics):
        topic = f"t{t:05d}"
        home = t % C
        topic_home[topic] = home
        n_tweets = int(rng.integers(lo, hi + 1))
        gaps = rng.exponential(cfg.mean_gap, size=n_tweets)
        gaps[0] = 0.0
        start = cfg.start_time + int(rng.integers(cfg.time_span))
        times = start + np.floor(np.cumsum(gaps)).astype(np.int64)
        events = [AdoptionEvent(topic, user_name(_pick_user(rng, home, members, cfg.noise, n_users, m)),
                                int(ts)) for ts in times]
        sequences[topic] = AdoptionSequence(topic, events)

    network = FollowerNetwork()
    for c in range(C):
        for u in members[c]:
            chosen = set()
            while len(chosen) < cfg.follows_per_user:
                v = _pick_user(rng, c, members, cfg.cross_follow_fraction, n_users, m)
                if v != u:
                    chosen.add(v)
            for v in sorted(chosen):
                network.add_edge(user_name(u), user_name(v))

    community = {user_name(u): c for c in range(C) for u in members[c]}
    geo = GeoLabels({u: f"zone{c}" for u, c in community.items()})
    return SynthData(sequences, network, geo, community, topic_home)
