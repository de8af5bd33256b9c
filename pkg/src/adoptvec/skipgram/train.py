from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernel
from .huffman import build_huffman_tree
from .objective import EmbeddingModel, init_model
from .vocab import Vocabulary, build_vocabulary, discard_probabilities, subsample_encoded

logger = logging.getLogger(__name__)

NOISE_TABLE_SIZE = 1_000_000


@dataclass(frozen=True)
class TrainConfig:
    """Skip-gram hyperparameters.

    ``mode`` is ``"hs"`` (hierarchical softmax) or ``"ns"`` (negative
    sampling with ``negative`` draws). ``subsample=None`` disables
    subsampling. ``workers=1`` is the bit-reproducible mode; more workers
    update shared parameters without locks.
    """

    dim: int = 100
    window: int = 10
    subsample: Optional[float] = 1e-4
    epochs: int = 20
    learning_rate: float = 0.025
    min_learning_rate_fraction: float = 1e-4
    min_count: int = 1
    mode: str = "hs"
    negative: int = 5
    seed: int = 1
    workers: int = 1
    shrink_window: bool = False

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.epochs < 1:
            raise ValueError("dim, window and epochs must be >= 1")
        if self.mode not in ("hs", "ns"):
            raise ValueError(f"mode must be 'hs' or 'ns', got {self.mode!r}")
        if self.mode == "ns" and self.negative < 1:
            raise ValueError("negative sampling needs at least one negative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def unigram_table(counts: np.ndarray, power: float = 0.75, size: int = NOISE_TABLE_SIZE) -> np.ndarray:
    cdf = np.cumsum(np.asarray(counts, dtype=float) ** power)
    cdf /= cdf[-1]
    points = (np.arange(size) + 0.5) / size
    return np.searchsorted(cdf, points).astype(np.int32)


def _flatten(walks, positions, walk_starts):
    lengths = np.array([len(w) for w in walks], dtype=np.int64)
    offsets = np.zeros(len(walks) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    if len(walks):
        tokens = np.concatenate(walks).astype(np.int32)
        progress = np.concatenate([p + s for p, s in zip(positions, walk_starts)]).astype(np.float64)
    else:
        tokens = np.empty(0, dtype=np.int32)
        progress = np.empty(0, dtype=np.float64)
    return tokens, offsets, progress


def train(corpus: Sequence[Sequence[str]], cfg: TrainConfig = TrainConfig(),
          vocab: Optional[Vocabulary] = None,
          callback: Optional[Callable[[int, EmbeddingModel], None]] = None) -> EmbeddingModel:
    """Fit Skip-gram vectors to a walk corpus with per-pair SGD.

    The learning rate decays linearly with the number of raw tokens
    processed across all epochs, down to ``min_learning_rate_fraction`` of
    its initial value. ``callback(epoch, model)`` runs after every epoch.
    """
    if vocab is None:
        vocab = build_vocabulary(corpus, cfg.min_count)
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    hs = cfg.mode == "hs"
    if hs and len(vocab) < 2:
        raise ValueError("hierarchical softmax needs at least 2 words")
    model = init_model(vocab.words, cfg.dim, seed=cfg.seed, hierarchical=hs)

    if hs:
        points, codes, codelens = build_huffman_tree(vocab).padded()
        syn1 = model.inner_vectors
    else:
        points = np.zeros((1, 1), dtype=np.int32)
        codes = np.zeros((1, 1), dtype=np.int8)
        codelens = np.zeros(1, dtype=np.int32)
        syn1 = np.zeros((1, cfg.dim))
    table = unigram_table(vocab.counts) if cfg.mode == "ns" else np.zeros(1, dtype=np.int32)
    negative = cfg.negative if cfg.mode == "ns" else 0

    encoded = vocab.encode(corpus)
    raw_lengths = np.array([len(w) for w in encoded], dtype=np.int64)
    walk_starts = np.concatenate([[0], np.cumsum(raw_lengths)[:-1]]) if len(encoded) else raw_lengths
    raw_total = int(raw_lengths.sum())
    total_progress = float(cfg.epochs * raw_total + 1)
    discard = (discard_probabilities(vocab, cfg.subsample) if cfg.subsample is not None
               else np.zeros(len(vocab)))
    all_positions = [np.arange(len(w)) for w in encoded]

    rand_state = np.uint64(cfg.seed)
    rand_states = np.array([cfg.seed + k for k in range(cfg.workers)], dtype=np.uint64)
    for epoch in range(cfg.epochs):
        if cfg.subsample is not None:
            rng = np.random.default_rng([cfg.seed, epoch])
            walks, positions = subsample_encoded(encoded, discard, rng)
        else:
            walks, positions = encoded, all_positions
        tokens, offsets, progress = _flatten(walks, positions, walk_starts)
        progress += epoch * raw_total
        args = (tokens, offsets, progress, total_progress, model.input_vectors, syn1,
                model.context_vectors, points, codes, codelens, table, cfg.window,
                cfg.shrink_window, hs, negative, cfg.learning_rate,
                cfg.min_learning_rate_fraction)
        if cfg.workers == 1:
            rand_state = np.uint64(_kernel.train_epoch_serial(*args, rand_state))
        else:
            n_walks = len(walks)
            bounds = np.linspace(0, n_walks, cfg.workers + 1).astype(np.int64)
            _kernel.train_epoch_parallel(*args, rand_states, bounds)
        logger.debug("epoch %d/%d: %d tokens", epoch + 1, cfg.epochs, len(tokens))
        if callback is not None:
            callback(epoch, model)
    if not np.all(np.isfinite(model.input_vectors)):
        raise FloatingPointError("training diverged: non-finite vectors")
    return model
