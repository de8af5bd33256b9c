import itertools
import math

import numpy as np
import pytest

from adoptvec.skipgram import (
    EmbeddingModel,
    TrainConfig,
    build_huffman_tree,
    build_vocabulary,
    corpus_log_likelihood,
    discard_probabilities,
    hs_leaf_probabilities,
    hs_pair_loss_and_gradients,
    init_model,
    load_word2vec_format,
    noise_distribution,
    ns_pair_loss_and_gradients,
    save_word2vec_format,
    softmax_distribution,
    softmax_probability,
    subsample,
    train,
    window_pairs,
)
from adoptvec.skipgram.vocab import Vocabulary


def random_model(rng, n, d, scale=1.0, hierarchical=True):
    words = [f"w{i}" for i in range(n)]
    return EmbeddingModel(words, rng.normal(scale=scale, size=(n, d)),
                          rng.normal(scale=scale, size=(n, d)),
                          rng.normal(scale=scale, size=(n - 1, d)) if hierarchical else None)


def zero_model(n, d, hierarchical=True):
    return EmbeddingModel([f"w{i}" for i in range(n)], np.zeros((n, d)), np.zeros((n, d)),
                          np.zeros((n - 1, d)) if hierarchical else None)


def clique_corpus(rng, groups, walks_per_group=300, length=10):
    corpus = []
    for g in groups:
        for _ in range(walks_per_group):
            corpus.append(list(rng.choice(g, size=length)))
    rng.shuffle(corpus)
    return corpus


class TestVocabulary:
    def test_counts(self):
        v = build_vocabulary([["a", "b", "a"]])
        assert v.words == ["a", "b"] and list(v.counts) == [2, 1]

    def test_min_count(self):
        assert build_vocabulary([["a", "b", "a"]], min_count=2).words == ["a"]

    def test_tie_order(self):
        assert build_vocabulary([["c", "b", "a"]]).words == ["a", "b", "c"]

    def test_empty(self):
        with pytest.raises(ValueError):
            build_vocabulary([])


class TestSubsample:
    def test_rare_never_dropped(self):
        v = Vocabulary(["a", "b"], [1, 9999])
        p = discard_probabilities(v, 1e-3)
        assert p[0] == 0.0

    def test_discard_half(self):
        # f(a) = 4 * threshold -> discard probability 1 - sqrt(1/4) = 0.5
        v = Vocabulary(["a", "b"], [4, 996])
        p = discard_probabilities(v, 1e-3)
        assert p[0] == pytest.approx(0.5)
        out = subsample([["a"] * 10_000], v, 1e-3, seed=5)
        rate = 1 - len(out[0]) / 10_000
        assert 0.48 <= rate <= 0.52

    def test_disabled(self):
        corpus = [["a", "b", "a"], ["b"]]
        v = build_vocabulary(corpus)
        assert subsample(corpus, v, math.inf, seed=1) == corpus


def optimal_code_cost(counts):
    """Exhaustive minimum of sum(count * depth) over all merge orders."""
    best = math.inf

    def rec(items, cost):
        nonlocal best
        if len(items) == 1:
            best = min(best, cost)
            return
        for i, j in itertools.combinations(range(len(items)), 2):
            merged = items[i] + items[j]
            rest = [x for k, x in enumerate(items) if k not in (i, j)]
            rec(rest + [merged], cost + merged)

    rec(list(counts), 0)
    return best


class TestHuffman:
    def test_two_leaves(self):
        assert list(build_huffman_tree([1, 1]).code_lengths()) == [1, 1]

    def test_three_leaves(self):
        assert list(build_huffman_tree([4, 1, 1]).code_lengths()) == [1, 2, 2]

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_huffman_tree([3])

    @pytest.mark.parametrize("seed", range(12))
    def test_optimal_vs_exhaustive(self, seed):
        rng = np.random.default_rng(seed)
        counts = sorted(rng.integers(1, 20, size=int(rng.integers(2, 6))).tolist(), reverse=True)
        tree = build_huffman_tree(counts)
        assert int(np.dot(counts, tree.code_lengths())) == optimal_code_cost(counts)

    def test_structure(self):
        counts = [50, 30, 20, 10, 5, 5, 1]
        tree = build_huffman_tree(counts)
        inner = {int(p) for pts in tree.points for p in pts}
        assert inner == set(range(len(counts) - 1))
        assert all(len(p) <= len(counts) - 1 for p in tree.points)
        lengths = tree.code_lengths()
        assert all(lengths[i] <= lengths[j] for i in range(7) for j in range(7) if counts[i] > counts[j])
        codes = {tuple(c) for c in tree.codes}
        assert len(codes) == len(counts)  # prefix-free leaves have distinct codes


class TestSoftmax:
    def test_uniform(self):
        m = zero_model(5, 3)
        assert all(softmax_probability(m, u, c) == pytest.approx(0.2) for u in range(5) for c in range(5))

    def test_two_words(self):
        m = EmbeddingModel(["a", "b"], np.array([[1.0, 0.0], [0.0, 0.0]]),
                           np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert softmax_probability(m, 0, 0) == pytest.approx(math.e / (math.e + 1), abs=1e-12)
        assert softmax_probability(m, 0, 0) == pytest.approx(0.731059, abs=1e-6)

    def test_overflow_guard(self):
        m = EmbeddingModel(["a", "b"], np.array([[1000.0], [0.0]]), np.array([[1.0], [0.0]]))
        assert softmax_probability(m, 0, 0) == pytest.approx(1.0)

    def test_sums_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            m = random_model(rng, int(rng.integers(2, 200)), int(rng.integers(1, 16)))
            assert softmax_distribution(m, 0).sum() == pytest.approx(1.0, abs=1e-9)


class TestLikelihood:
    def test_empty(self):
        assert corpus_log_likelihood(zero_model(4, 2), []) == 0.0

    def test_uniform(self):
        pairs = [(0, 1), (1, 2), (3, 0)]
        assert corpus_log_likelihood(zero_model(4, 2), pairs) == pytest.approx(3 * math.log(0.25))

    def test_window_pairs(self):
        pairs = list(window_pairs([[0, 1, 2]], 1))
        assert pairs == [(0, 1), (1, 0), (1, 2), (2, 1)]

    def test_training_improves(self):
        rng = np.random.default_rng(3)
        words = [f"u{i}" for i in range(12)]
        corpus = clique_corpus(rng, [words[:6], words[6:]], walks_per_group=60)
        cfg = TrainConfig(dim=8, window=3, epochs=20, subsample=None, seed=2)
        vocab = build_vocabulary(corpus)
        tree = build_huffman_tree(vocab)
        pairs = list(window_pairs(vocab.encode(corpus), cfg.window))
        before = corpus_log_likelihood(init_model(vocab.words, cfg.dim, seed=cfg.seed), pairs, tree)
        after = corpus_log_likelihood(train(corpus, cfg, vocab=vocab), pairs, tree)
        assert after > before


def finite_diff(f, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(x.size):
        old = x.flat[i]
        x.flat[i] = old + h
        fp = f()
        x.flat[i] = old - h
        fm = f()
        x.flat[i] = old
        g.flat[i] = (fp - fm) / (2 * h)
    return g


def rel_err(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-8)


class TestHierarchicalSoftmax:
    def test_zero_vectors(self):
        tree = build_huffman_tree([5, 3, 2, 1])
        m = zero_model(4, 3)
        for c in range(4):
            loss, _, _ = hs_pair_loss_and_gradients(m, tree, 0, c)
            assert loss == pytest.approx(len(tree.points[c]) * math.log(2))

    def test_leaf_probabilities_sum(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            n = int(rng.integers(2, 65))
            tree = build_huffman_tree(rng.integers(1, 100, size=n))
            m = random_model(rng, n, 4)
            assert hs_leaf_probabilities(m, tree, int(rng.integers(n))).sum() == pytest.approx(1.0, abs=1e-9)

    def test_gradients(self):
        rng = np.random.default_rng(2)
        n, d = 9, 5
        tree = build_huffman_tree(rng.integers(1, 30, size=n))
        m = random_model(rng, n, d, scale=0.5)
        u, c = 2, 7
        _, g_in, g_inner = hs_pair_loss_and_gradients(m, tree, u, c)
        loss = lambda: hs_pair_loss_and_gradients(m, tree, u, c)[0]
        num_in = finite_diff(loss, m.input_vectors[u:u + 1])[0]
        assert rel_err(g_in, num_in) < 1e-4
        num_inner = finite_diff(loss, m.inner_vectors)
        dense = np.zeros_like(m.inner_vectors)
        for p, g in g_inner.items():
            dense[p] = g
        assert rel_err(dense, num_inner) < 1e-4

    def test_descent(self):
        rng = np.random.default_rng(4)
        tree = build_huffman_tree(rng.integers(1, 30, size=6))
        m = random_model(rng, 6, 4)
        loss0, g_in, g_inner = hs_pair_loss_and_gradients(m, tree, 1, 4)
        m.input_vectors[1] -= 1e-3 * g_in
        for p, g in g_inner.items():
            m.inner_vectors[p] -= 1e-3 * g
        assert hs_pair_loss_and_gradients(m, tree, 1, 4)[0] < loss0


class TestNegativeSampling:
    def test_zero_vectors(self):
        m = zero_model(6, 3, hierarchical=False)
        noise = noise_distribution(np.arange(1, 7))
        loss, _, _ = ns_pair_loss_and_gradients(m, noise, 0, 1, k=5, seed=0)
        assert loss == pytest.approx(6 * math.log(2))

    def test_k0_is_logistic(self):
        rng = np.random.default_rng(0)
        m = random_model(rng, 4, 3, hierarchical=False)
        loss, _, _ = ns_pair_loss_and_gradients(m, noise_distribution(np.ones(4)), 1, 2, k=0)
        x = m.context_vectors[2] @ m.input_vectors[1]
        assert loss == pytest.approx(-math.log(1 / (1 + math.exp(-x))))

    def test_gradients(self):
        rng = np.random.default_rng(5)
        m = random_model(rng, 8, 4, scale=0.5, hierarchical=False)
        noise = noise_distribution(rng.integers(1, 50, size=8))
        loss = lambda: ns_pair_loss_and_gradients(m, noise, 3, 6, k=4, seed=11)[0]
        _, g_in, g_ctx = ns_pair_loss_and_gradients(m, noise, 3, 6, k=4, seed=11)
        assert rel_err(g_in, finite_diff(loss, m.input_vectors[3:4])[0]) < 1e-4
        dense = np.zeros_like(m.context_vectors)
        for r, g in g_ctx.items():
            dense[r] = g
        assert rel_err(dense, finite_diff(loss, m.context_vectors)) < 1e-4

    def test_noise_power(self):
        p = noise_distribution(np.array([16.0, 1.0]))
        assert p[0] / p[1] == pytest.approx(8.0)


def cluster_gap(model, groups):
    vecs = model.input_vectors / np.linalg.norm(model.input_vectors, axis=1, keepdims=True)
    idx = {w: i for i, w in enumerate(model.words)}
    intra, inter = [], []
    for gi, g in enumerate(groups):
        for h in groups[gi:]:
            for a in g:
                for b in h:
                    if a == b:
                        continue
                    sim = vecs[idx[a]] @ vecs[idx[b]]
                    (intra if h is g else inter).append(sim)
    return np.mean(intra), np.mean(inter)


class TestTrain:
    @pytest.mark.parametrize("mode", ["hs", "ns"])
    def test_cliques_separate(self, mode):
        rng = np.random.default_rng(0)
        words = [f"u{i:02d}" for i in range(20)]
        groups = [words[:10], words[10:]]
        corpus = clique_corpus(rng, groups)
        model = train(corpus, TrainConfig(dim=10, window=5, epochs=10, subsample=None, mode=mode, seed=3))
        intra, inter = cluster_gap(model, groups)
        assert intra > inter

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        corpus = clique_corpus(rng, [["a", "b", "c"], ["d", "e", "f"]], walks_per_group=50)
        cfg = TrainConfig(dim=6, window=4, epochs=3, seed=7, subsample=1e-2, mode="ns")
        assert np.array_equal(train(corpus, cfg).input_vectors, train(corpus, cfg).input_vectors)

    def test_init(self):
        m = init_model(["a", "b", "c"], 50, seed=0)
        assert np.all(np.abs(m.input_vectors) <= 0.5 / 50)
        assert not m.context_vectors.any() and not m.inner_vectors.any()

    def test_parallel_mode_runs(self):
        rng = np.random.default_rng(2)
        words = [f"u{i:02d}" for i in range(20)]
        groups = [words[:10], words[10:]]
        model = train(clique_corpus(rng, groups),
                      TrainConfig(dim=10, window=5, epochs=10, subsample=None, workers=3, seed=1))
        intra, inter = cluster_gap(model, groups)
        assert np.all(np.isfinite(model.input_vectors)) and intra > inter

    def test_shrink_window_runs(self):
        rng = np.random.default_rng(2)
        corpus = clique_corpus(rng, [["a", "b", "c"], ["d", "e", "f"]], walks_per_group=20)
        model = train(corpus, TrainConfig(dim=4, epochs=2, shrink_window=True))
        assert np.all(np.isfinite(model.input_vectors))

    def test_bad_config(self):
        with pytest.raises(ValueError):
            TrainConfig(mode="cbow")
        with pytest.raises(ValueError):
            TrainConfig(dim=0)


class TestModelFiles:
    @pytest.mark.parametrize("binary", [False, True])
    def test_roundtrip(self, tmp_path, binary):
        rng = np.random.default_rng(0)
        m = random_model(rng, 5, 3)
        path = tmp_path / "vec.bin"
        save_word2vec_format(m, path, binary=binary)
        back = load_word2vec_format(path, binary=binary)
        assert back.words == m.words
        np.testing.assert_allclose(back.input_vectors, m.input_vectors, rtol=1e-6, atol=1e-7)

    def test_text_header(self, tmp_path):
        m = zero_model(3, 2)
        save_word2vec_format(m, tmp_path / "v.txt")
        lines = (tmp_path / "v.txt").read_text().splitlines()
        assert lines[0] == "3 2" and lines[1].split()[0] == "w0" and len(lines) == 4

    def test_binary_layout(self, tmp_path):
        m = EmbeddingModel(["a"], np.array([[1.0, -2.0]]), np.zeros((1, 2)))
        save_word2vec_format(m, tmp_path / "v.bin", binary=True)
        raw = (tmp_path / "v.bin").read_bytes()
        assert raw == b"1 2\na " + np.array([1.0, -2.0], dtype="<f4").tobytes() + b"\n"
