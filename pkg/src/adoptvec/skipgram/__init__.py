"""Skip-gram user embeddings (hierarchical softmax or negative sampling)."""

from .huffman import HuffmanTree, build_huffman_tree
from .io import load_word2vec_format, save_word2vec_format
from .objective import (
    EmbeddingModel,
    corpus_log_likelihood,
    hs_leaf_probabilities,
    hs_log_probability,
    hs_pair_loss_and_gradients,
    init_model,
    noise_distribution,
    ns_pair_loss_and_gradients,
    softmax_distribution,
    softmax_probability,
    window_pairs,
)
from .train import TrainConfig, train
from .vocab import Vocabulary, build_vocabulary, discard_probabilities, subsample

__all__ = [
    "EmbeddingModel",
    "HuffmanTree",
    "TrainConfig",
    "Vocabulary",
    "build_huffman_tree",
    "build_vocabulary",
    "corpus_log_likelihood",
    "discard_probabilities",
    "hs_leaf_probabilities",
    "hs_log_probability",
    "hs_pair_loss_and_gradients",
    "init_model",
    "load_word2vec_format",
    "noise_distribution",
    "ns_pair_loss_and_gradients",
    "save_word2vec_format",
    "softmax_distribution",
    "softmax_probability",
    "subsample",
    "train",
    "window_pairs",
]
