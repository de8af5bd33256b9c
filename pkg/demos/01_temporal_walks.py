"""
From adoption logs to walk sentences
====================================

A topic's adoption sequence becomes a small time-forward graph: each tweet
links to every later tweet by a *different* user posted within ``tau``
seconds. Short uniform random walks over that graph are the "sentences"
the embedding model later reads.
"""

import numpy as np

from adoptvec import AdoptionEvent, AdoptionSequence, CorpusConfig, build_temporal_graph
from adoptvec.corpus import generate_corpus, sample_path_indices

# A toy hashtag: alice starts it, bob and carol pick it up quickly,
# dave only arrives two hours later.
events = [
    AdoptionEvent("#demo", "alice", 0),
    AdoptionEvent("#demo", "bob", 60),
    AdoptionEvent("#demo", "carol", 200),
    AdoptionEvent("#demo", "bob", 500),
    AdoptionEvent("#demo", "dave", 7700),
]
seq = AdoptionSequence("#demo", events)

# With a one hour window dave is disconnected from everyone before him.
cfg = CorpusConfig(tau=3600, gamma=4, rng_seed=0)
graph = build_temporal_graph(seq, cfg)
for i, succ in enumerate(graph.successors):
    print(f"{graph.users[i]:>6} @ {graph.timestamps[i]:>5}s -> {[graph.users[j] for j in succ]}")

# One walk per tweet; walks stop early at dead ends.
for walk in sample_path_indices(graph, cfg.gamma, np.random.default_rng(0)):
    print(" ".join(graph.users[j] for j in walk))

# The corpus generator does the same for every topic with its own RNG
# stream, so adding or removing a topic does not perturb the others.
corpus = generate_corpus({"#demo": seq}, cfg)
print(f"{len(corpus)} sentences")
