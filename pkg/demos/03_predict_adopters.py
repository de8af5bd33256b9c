"""
Predicting who adopts a topic next
==================================

Given the first ``n`` adopters of a held-out topic, rank the remaining users
by their distance to those seeds in vector space, and compare against two
baselines: overall adoption frequency and the number of seeds a user follows.
"""

from adoptvec import (
    CorpusConfig,
    NeighborIndex,
    PredictionQuery,
    SynthConfig,
    TrainConfig,
    evaluate_adopter_prediction,
    generate,
    generate_corpus,
    normalize,
    rank,
    split_topics,
    train,
)

data = generate(SynthConfig())
split = split_topics(data.sequences, 0.8, seed=0)
train_seqs = {t: s for t, s in data.sequences.items() if t in split.train_topics}
test_seqs = {t: s for t, s in data.sequences.items() if t in split.test_topics}

# Vectors are learned from the training topics only.
emb = normalize(train(generate_corpus(train_seqs, CorpusConfig()), TrainConfig(dim=16, epochs=10)))
index = NeighborIndex.from_embeddings(emb)

# A single query by hand.
topic = sorted(test_seqs)[0]
seeds = test_seqs[topic].first_adopters()[:10]
pred = rank(PredictionQuery(topic, seeds, k=10, scorer="average"), index)
actual = set(test_seqs[topic].users) - set(seeds)
print(topic, "hits:", sum(u in actual for u in pred.users), "/ 10")

# The full harness: Precision@10 for vectors and both baselines.
res = evaluate_adopter_prediction(test_seqs, index, train_seqs, network=data.network,
                                  n_values=[10], k=10, scorer="average",
                                  min_adopters=20, num_topics=40, seed=0)
print(res.summary())
