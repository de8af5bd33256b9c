"""
Training user vectors on planted communities
============================================

The synthetic generator plants communities whose members mostly adopt
their own community's topics. After Skip-gram training on the walk corpus,
users of the same community should sit close together on the unit sphere.
"""

import numpy as np

from adoptvec import CorpusConfig, NeighborIndex, SynthConfig, TrainConfig, generate, generate_corpus, normalize, train

data = generate(SynthConfig(num_communities=4, users_per_community=25, topics_per_community=40))
corpus = generate_corpus(data.sequences, CorpusConfig(tau=3600, gamma=10))
print(f"{len(corpus)} walks, {sum(map(len, corpus))} tokens")

# workers=1 runs the serial kernel: identical seeds give identical vectors.
model = train(corpus, TrainConfig(dim=16, window=10, epochs=10, workers=1, seed=1))
emb = normalize(model)

comm = np.array([data.community[w] for w in emb.words])
sims = emb.vectors @ emb.vectors.T
same = comm[:, None] == comm[None, :]
np.fill_diagonal(same, False)
print(f"mean cosine within communities: {sims[same].mean():.3f}")
print(f"mean cosine across communities: {sims[comm[:, None] != comm[None, :]].mean():.3f}")

# Exact nearest neighbours come from a k-d tree over the normalized vectors.
index = NeighborIndex.from_embeddings(emb)
user = emb.words[0]
print(user, "community", data.community[user])
for other, dist in index.knn(emb[user], 5, exclude=[user]):
    print(f"  {other}  dist={dist:.3f}  community={data.community[other]}")
