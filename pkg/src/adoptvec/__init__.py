"""User embeddings learned from the timing of topic adoptions."""

from .adopters import (
    PredictionQuery,
    RankedPrediction,
    evaluate_adopter_prediction,
    exposure_rank,
    frequency_rank,
    precision_at_k,
    rank,
)
from .corpus import CorpusConfig, build_temporal_graph, generate_corpus, sample_paths
from .embed_store import NeighborIndex, NormalizedEmbeddings, brute_force_knn, normalize
from .geo import evaluate_geo, train_ovr_logistic
from .ingest import (
    AdoptionEvent,
    AdoptionSequence,
    FollowerNetwork,
    GeoLabels,
    TopicSplit,
    group_into_sequences,
    parse_adoption_log,
    parse_follower_network,
    parse_geo_labels,
    split_topics,
)
from .neighborhood import coadoption_likelihood, compare_neighborhood_coadoption, export_projection
from .skipgram import EmbeddingModel, TrainConfig, train
from .synth import SynthConfig, generate

__version__ = "0.1.0"
