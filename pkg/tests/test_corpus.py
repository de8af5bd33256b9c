import numpy as np
import pytest

from adoptvec.corpus import (
    CorpusConfig,
    build_temporal_graph,
    generate_corpus,
    read_corpus,
    sample_path_indices,
    sample_paths,
    write_corpus,
)
from adoptvec.ingest import AdoptionEvent, AdoptionSequence, group_into_sequences


def seq_from(users, times, topic="h"):
    return AdoptionSequence(topic, [AdoptionEvent(topic, u, t) for u, t in zip(users, times)])


def brute_force_edges(users, times, tau):
    n = len(users)
    return {(a, b) for a in range(n) for b in range(n)
            if a < b and 0 <= times[b] - times[a] <= tau and users[a] != users[b]}


class TestTemporalGraph:
    def test_window(self):
        g = build_temporal_graph(seq_from(["a", "b", "c"], [0, 1800, 7200]), CorpusConfig(tau=3600))
        assert g.edge_set() == {(0, 1)}
        assert g.edge_set() == brute_force_edges(["a", "b", "c"], [0, 1800, 7200], 3600)

    def test_single_event(self):
        g = build_temporal_graph(seq_from(["a"], [0]), CorpusConfig())
        assert len(g) == 1 and g.num_edges == 0

    def test_same_user_no_edge(self):
        g = build_temporal_graph(seq_from(["a", "a"], [0, 60]), CorpusConfig(tau=3600))
        assert g.num_edges == 0 == len(brute_force_edges(["a", "a"], [0, 60], 3600))

    def test_empty(self):
        assert len(build_temporal_graph(AdoptionSequence("h", []), CorpusConfig())) == 0

    def test_equal_timestamps_forward_only(self):
        g = build_temporal_graph(seq_from(["a", "b", "c"], [5, 5, 5]), CorpusConfig(tau=1))
        assert g.edge_set() == {(0, 1), (0, 2), (1, 2)}

    def test_bad_config(self):
        with pytest.raises(ValueError):
            CorpusConfig(tau=0)
        with pytest.raises(ValueError):
            CorpusConfig(gamma=1)


class TestSampling:
    def test_dead_end(self):
        g = build_temporal_graph(seq_from(["a", "b"], [0, 10_000]), CorpusConfig(tau=60))
        assert sample_paths(g, CorpusConfig(tau=60)) == [["a"], ["b"]]

    def test_chain(self):
        users = [f"u{i}" for i in range(12)]
        times = [i * 100 for i in range(12)]
        cfg = CorpusConfig(tau=150, gamma=10)
        g = build_temporal_graph(seq_from(users, times), cfg)
        walks = sample_paths(g, cfg)
        assert walks[0] == users[:10]
        assert len(walks) == 12

    def test_star_uniform(self):
        # a -> {b, c}; b and c have no successors
        g = build_temporal_graph(seq_from(["a", "b", "c"], [0, 10, 10]), CorpusConfig(tau=20))
        g.successors[1] = []
        rng = np.random.default_rng(123)
        hits = 0
        for _ in range(10_000):
            walk = sample_path_indices(g, 10, rng)[0]
            hits += 1 in walk
        assert 0.48 <= hits / 10_000 <= 0.52


class TestCorpus:
    def test_counts(self):
        s1 = seq_from(["a", "b", "c"], [0, 1, 2], "t1")
        s2 = seq_from(["a", "d"], [0, 5], "t2")
        corpus = generate_corpus({"t1": s1, "t2": s2}, CorpusConfig())
        assert len(corpus) == 5

    def test_empty(self):
        assert generate_corpus({}, CorpusConfig()) == []

    def test_deterministic_file(self, tmp_path):
        rng = np.random.default_rng(0)
        events = [AdoptionEvent(f"t{rng.integers(5)}", f"u{rng.integers(30)}", int(rng.integers(20000)))
                  for _ in range(400)]
        seqs = group_into_sequences(events)
        cfg = CorpusConfig(tau=3600, gamma=10, rng_seed=9)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        write_corpus(generate_corpus(seqs, cfg), p1)
        write_corpus(generate_corpus(seqs, cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_corpus(p1) == generate_corpus(seqs, cfg)
