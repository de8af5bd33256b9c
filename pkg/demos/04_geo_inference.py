"""
Inferring location from user vectors
====================================

Label a small fraction of users with their zone, fit a one-vs-rest logistic
regression on their vectors, and predict the zone of everyone else. The
majority class and a friends' majority vote serve as baselines.
"""

from adoptvec import CorpusConfig, SynthConfig, TrainConfig, evaluate_geo, generate, generate_corpus, normalize, train

data = generate(SynthConfig())
emb = normalize(train(generate_corpus(data.sequences, CorpusConfig()), TrainConfig(dim=16, epochs=10)))

res = evaluate_geo(emb, data.geo, data.network, fractions=[0.01, 0.05, 0.1], seed=0)
print(res.format())
