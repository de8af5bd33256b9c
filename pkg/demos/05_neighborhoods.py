"""
Network neighbours versus vector neighbours
===========================================

When many follow edges cross community lines, a user's followers are a
poor guide to what they will adopt. Their nearest neighbours in vector
space do better: the co-adoption likelihood (how often a neighbour shares
one of the user's topics) is higher there. The 2-D PCA projection gives a
picture of the space.
"""

from adoptvec import CorpusConfig, NeighborIndex, SynthConfig, TrainConfig, generate, generate_corpus, normalize, train
from adoptvec.ingest import adoption_map
from adoptvec.neighborhood import compare_neighborhood_coadoption, export_projection, mean_jaccard_overlap

data = generate(SynthConfig(cross_follow_fraction=0.5))
emb = normalize(train(generate_corpus(data.sequences, CorpusConfig()), TrainConfig(dim=16, epochs=10)))
index = NeighborIndex.from_embeddings(emb)

comp = compare_neighborhood_coadoption(data.network, index, adoption_map(data.sequences.values()),
                                       sample_size=None, seed=0)
print(comp.summary())
overlap, n_users = mean_jaccard_overlap(data.network, index)
print(f"mean Jaccard(followers, vector neighbours) over {n_users} users: {overlap:.3f}")

proj = export_projection(emb, sample_size=100, seed=0)
print("first projected users:")
for user, (x, y) in list(zip(proj.words, proj.coords))[:5]:
    print(f"  {user}  ({x:+.3f}, {y:+.3f})  {data.geo.labels[user]}")
