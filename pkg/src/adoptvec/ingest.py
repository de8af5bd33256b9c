"""Reading and writing adoption logs, follower edges and geo labels.

All three inputs are tab-separated UTF-8 text without a header:

* adoption log: ``topic_id<TAB>user_id<TAB>unix_seconds``
* follower edges: ``follower_id<TAB>followee_id``
* geo labels: ``user_id<TAB>label``
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Set

import numpy as np

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """A malformed record in one of the input files."""

    def __init__(self, path, lineno, line, reason):
        self.path = path
        self.lineno = lineno
        self.line = line
        super().__init__(f"{path}:{lineno}: {reason}: {line!r}")


class AdoptionEvent(NamedTuple):
    topic_id: str
    user_id: str
    timestamp: int


@dataclass
class AdoptionSequence:
    """Time-ordered tweets on one topic. Users may repeat."""

    topic_id: str
    events: List[AdoptionEvent] = field(default_factory=list)

    def __len__(self):
        return len(self.events)

    @property
    def users(self) -> List[str]:
        return [e.user_id for e in self.events]

    @property
    def timestamps(self) -> np.ndarray:
        return np.fromiter((e.timestamp for e in self.events), dtype=np.int64, count=len(self.events))

    def first_adopters(self) -> List[str]:
        """Distinct users in order of their first adoption."""
        seen = set()
        out = []
        for e in self.events:
            if e.user_id not in seen:
                seen.add(e.user_id)
                out.append(e.user_id)
        return out


@dataclass
class FollowerNetwork:
    """Directed follow edges, ``follower -> followee``."""

    followees: Dict[str, Set[str]] = field(default_factory=dict)
    followers: Dict[str, Set[str]] = field(default_factory=dict)
    dropped_self_loops: int = 0

    def add_edge(self, follower: str, followee: str) -> bool:
        if follower == followee:
            self.dropped_self_loops += 1
            return False
        out = self.followees.setdefault(follower, set())
        if followee in out:
            return False
        out.add(followee)
        self.followers.setdefault(followee, set()).add(follower)
        return True

    def follows(self, follower: str, followee: str) -> bool:
        return followee in self.followees.get(follower, ())

    def followees_of(self, user: str) -> Set[str]:
        return self.followees.get(user, set())

    def followers_of(self, user: str) -> Set[str]:
        return self.followers.get(user, set())

    def neighbors(self, user: str, kind: str = "both") -> Set[str]:
        if kind == "followers":
            return set(self.followers_of(user))
        if kind == "followees":
            return set(self.followees_of(user))
        if kind == "both":
            return self.followers_of(user) | self.followees_of(user)
        raise ValueError(f"unknown neighbor kind {kind!r}")

    def edges(self) -> Iterator[tuple]:
        for u in sorted(self.followees):
            for v in sorted(self.followees[u]):
                yield u, v

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.followees.values())

    @property
    def users(self) -> Set[str]:
        return set(self.followees) | set(self.followers)


@dataclass
class GeoLabels:
    labels: Dict[str, str] = field(default_factory=dict)
    duplicates: int = 0

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, user):
        return self.labels[user]

    def __contains__(self, user):
        return user in self.labels

    def classes(self) -> List[str]:
        return sorted(set(self.labels.values()))


@dataclass
class TopicSplit:
    train_topics: Set[str]
    test_topics: Set[str]
    rng_seed: int


def _check_path(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")


def _fields(line: str, n: int) -> Optional[List[str]]:
    parts = line.rstrip("\r\n").split("\t")
    if len(parts) != n:
        return None
    if any(not p or any(ch.isspace() for ch in p) for p in parts):
        return None
    return parts


class AdoptionLog:
    """Iterable over the events of an adoption log file.

    In lenient mode malformed lines are skipped and tallied in ``skipped``;
    the tally is complete once iteration finishes.
    """

    def __init__(self, path, strict: bool = True):
        _check_path(path)
        self.path = path
        self.strict = strict
        self.skipped = 0

    def __iter__(self) -> Iterator[AdoptionEvent]:
        self.skipped = 0
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                parts = _fields(line, 3)
                reason = None
                if parts is None:
                    reason = "expected 3 non-empty tab-separated fields"
                else:
                    try:
                        ts = int(parts[2])
                    except ValueError:
                        reason = "non-integer timestamp"
                    else:
                        if ts < 0:
                            reason = "negative timestamp"
                if reason is not None:
                    if self.strict:
                        raise ParseError(self.path, lineno, line.rstrip("\n"), reason)
                    self.skipped += 1
                    continue
                yield AdoptionEvent(parts[0], parts[1], ts)
        if self.skipped:
            logger.warning("%s: skipped %d malformed lines", self.path, self.skipped)


def parse_adoption_log(path, strict: bool = True) -> AdoptionLog:
    return AdoptionLog(path, strict=strict)


def group_into_sequences(events: Iterable[AdoptionEvent]) -> Dict[str, AdoptionSequence]:
    """Group events by topic, keeping topics in order of first appearance.

    Each sequence is stably sorted by timestamp, so ties keep input order.
    """
    groups: Dict[str, List[AdoptionEvent]] = {}
    for e in events:
        groups.setdefault(e.topic_id, []).append(e)
    return {
        t: AdoptionSequence(t, sorted(evs, key=lambda e: e.timestamp))
        for t, evs in groups.items()
    }


def write_adoption_log(sequences: Iterable[AdoptionSequence], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in sequences:
            for e in seq.events:
                fh.write(f"{e.topic_id}\t{e.user_id}\t{e.timestamp}\n")


def split_topics(topics: Iterable[str], train_fraction: float, seed: int) -> TopicSplit:
    """Random train/test partition of topics, deterministic for a seed."""
    topics = sorted(set(topics))
    if len(topics) < 2:
        raise ValueError("need at least 2 topics to split")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    n_train = int(round(train_fraction * len(topics)))
    n_train = min(max(n_train, 1), len(topics) - 1)
    order = np.random.default_rng(seed).permutation(len(topics))
    train = {topics[i] for i in order[:n_train]}
    test = {topics[i] for i in order[n_train:]}
    return TopicSplit(train, test, seed)


def parse_follower_network(path, strict: bool = True) -> FollowerNetwork:
    _check_path(path)
    net = FollowerNetwork()
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = _fields(line, 2)
            if parts is None:
                if strict:
                    raise ParseError(path, lineno, line.rstrip("\n"),
                                     "expected 2 non-empty tab-separated fields")
                skipped += 1
                continue
            net.add_edge(parts[0], parts[1])
    if net.dropped_self_loops:
        logger.warning("%s: dropped %d self-loops", path, net.dropped_self_loops)
    if skipped:
        logger.warning("%s: skipped %d malformed lines", path, skipped)
    return net


def write_follower_network(net: FollowerNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in net.edges():
            fh.write(f"{u}\t{v}\n")


def parse_geo_labels(path, strict: bool = True) -> GeoLabels:
    """Read user labels; on duplicates the last line wins."""
    _check_path(path)
    geo = GeoLabels()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                if strict:
                    raise ParseError(path, lineno, line.rstrip("\n"),
                                     "expected user<TAB>label")
                continue
            if parts[0] in geo.labels:
                geo.duplicates += 1
            geo.labels[parts[0]] = parts[1]
    if geo.duplicates:
        logger.warning("%s: %d duplicate users, last label kept", path, geo.duplicates)
    return geo


def write_geo_labels(geo: GeoLabels, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u in sorted(geo.labels):
            fh.write(f"{u}\t{geo.labels[u]}\n")


def adoption_map(sequences: Iterable[AdoptionSequence]) -> Dict[str, Set[str]]:
    """user -> set of topics the user adopted (duplicate tweets collapse)."""
    out: Dict[str, Set[str]] = {}
    for seq in sequences:
        for e in seq.events:
            out.setdefault(e.user_id, set()).add(seq.topic_id)
    return out
