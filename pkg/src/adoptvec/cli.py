"""Command-line pipeline over a run directory.

Layout::

    RUN/manifest.json
    RUN/inputs/     adoption log, train/test split, follower edges, geo labels
    RUN/corpus/     walks.txt
    RUN/model/      vectors.txt
    RUN/results/    evaluation tables

Each command records its configuration and the digests of the files it
read in the manifest. Re-running a stage with the same configuration and
inputs does nothing unless ``--force`` is given.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import shutil
import sys
from contextlib import contextmanager
from typing import Dict, List, Optional

from . import adopters, corpus, geo, ingest, neighborhood, synth
from .embed_store import NeighborIndex, normalize
from .skipgram import TrainConfig, load_word2vec_format, save_word2vec_format, train

logger = logging.getLogger("adoptvec")

MANIFEST = "manifest.json"
LOCK = ".lock"

PATHS = {
    "adoptions": "inputs/adoptions.tsv",
    "followers": "inputs/followers.tsv",
    "geo": "inputs/geo.tsv",
    "communities": "inputs/communities.tsv",
    "train_log": "inputs/train.tsv",
    "test_log": "inputs/test.tsv",
    "split": "inputs/split.json",
    "corpus": "corpus/walks.txt",
    "model": "model/vectors.txt",
    "adopters_table": "results/adopters.tsv",
    "adopters_summary": "results/adopters_summary.tsv",
    "adopters_hist": "results/adopters_histogram.tsv",
    "geo_table": "results/geo.tsv",
    "coadoption": "results/coadoption.tsv",
    "neighborhood_summary": "results/neighborhood_summary.tsv",
    "projection": "results/projection.tsv",
    "projection_vectors": "results/projection_vectors.tsv",
}

REQUIRES = {
    "synth": [],
    "ingest": [],
    "corpus": ["ingest"],
    "train": ["corpus"],
    "eval-adopters": ["ingest", "train"],
    "eval-geo": ["ingest", "train"],
    "analyze": ["ingest", "train"],
    "export-projection": ["train"],
}


class StageError(RuntimeError):
    pass


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Run:
    def __init__(self, root):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self.manifest_path = os.path.join(root, MANIFEST)
        if os.path.exists(self.manifest_path):
            with open(self.manifest_path, encoding="utf-8") as fh:
                self.manifest = json.load(fh)
        else:
            self.manifest = {"stages": {}}

    def path(self, key) -> str:
        p = os.path.join(self.root, PATHS[key])
        os.makedirs(os.path.dirname(p), exist_ok=True)
        return p

    def exists(self, key) -> bool:
        return os.path.exists(os.path.join(self.root, PATHS[key]))

    def done(self, stage) -> bool:
        return self.manifest["stages"].get(stage, {}).get("completed", False)

    def require(self, stage):
        for dep in REQUIRES[stage]:
            if not self.done(dep):
                raise StageError(f"'{stage}' needs the '{dep}' stage: run `adoptvec {dep} --run {self.root}` first")

    def up_to_date(self, stage, config, inputs) -> bool:
        entry = self.manifest["stages"].get(stage)
        if not entry or not entry.get("completed"):
            return False
        if entry.get("config") != config or entry.get("inputs") != self._digests(inputs):
            return False
        return all(os.path.exists(os.path.join(self.root, o)) for o in entry.get("outputs", []))

    def _digests(self, paths) -> Dict[str, str]:
        return {os.path.relpath(p, self.root) if os.path.abspath(p).startswith(os.path.abspath(self.root))
                else os.path.abspath(p): sha256_file(p) for p in paths}

    def record(self, stage, config, inputs, outputs):
        self.manifest["stages"][stage] = {
            "completed": True,
            "config": config,
            "inputs": self._digests(inputs),
            "outputs": [os.path.relpath(o, self.root) for o in outputs],
            "output_digests": {os.path.relpath(o, self.root): sha256_file(o) for o in outputs},
        }
        tmp = self.manifest_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self.manifest_path)

    @contextmanager
    def lock(self):
        path = os.path.join(self.root, LOCK)
        try:
            fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StageError(f"run directory {self.root} is locked by another command ({path})")
        try:
            os.write(fd, str(os.getpid()).encode())
            yield
        finally:
            os.close(fd)
            os.remove(path)


def _load_sequences(path):
    return ingest.group_into_sequences(ingest.parse_adoption_log(path))


def _load_embeddings(run: Run):
    emb = normalize(load_word2vec_format(run.path("model")))
    return emb, NeighborIndex.from_embeddings(emb)


def _optional_network(run: Run) -> Optional[ingest.FollowerNetwork]:
    return ingest.parse_follower_network(run.path("followers")) if run.exists("followers") else None


# each command returns the files it wrote

def cmd_synth(run: Run, args) -> List[str]:
    cfg = synth.SynthConfig(
        num_communities=args.communities, users_per_community=args.users_per_community,
        topics_per_community=args.topics_per_community, noise=args.noise,
        tweets_per_topic=(args.min_tweets, args.max_tweets), mean_gap=args.mean_gap,
        follows_per_user=args.follows_per_user, cross_follow_fraction=args.cross_follow,
        seed=args.seed)
    data = synth.generate(cfg)
    written = data.write(os.path.join(run.root, "inputs"))
    print(f"synthetic data: {cfg.num_users} users, {cfg.num_topics} topics, "
          f"{data.network.num_edges} follow edges")
    return [written["adoptions"], written["followers"], written["geo"], written["communities"]]


def cmd_ingest(run: Run, args) -> List[str]:
    log = ingest.parse_adoption_log(args.adoptions_path, strict=not args.lenient)
    seqs = ingest.group_into_sequences(log)
    if log.skipped:
        print(f"skipped {log.skipped} malformed lines", file=sys.stderr)
    split = ingest.split_topics(seqs.keys(), args.train_fraction, args.seed)
    outputs = []
    for key, src in (("adoptions", args.adoptions_path), ("followers", args.followers),
                     ("geo", args.geo)):
        if src and os.path.abspath(src) != os.path.abspath(run.path(key)):
            shutil.copyfile(src, run.path(key))
        if src:
            outputs.append(run.path(key))
    ingest.write_adoption_log([s for t, s in seqs.items() if t in split.train_topics], run.path("train_log"))
    ingest.write_adoption_log([s for t, s in seqs.items() if t in split.test_topics], run.path("test_log"))
    with open(run.path("split"), "w", encoding="utf-8") as fh:
        json.dump({"seed": split.rng_seed, "train_fraction": args.train_fraction,
                   "train": sorted(split.train_topics), "test": sorted(split.test_topics)}, fh, indent=1)
        fh.write("\n")
    print(f"{len(seqs)} topics: {len(split.train_topics)} train, {len(split.test_topics)} test")
    return outputs + [run.path("train_log"), run.path("test_log"), run.path("split")]


def cmd_corpus(run: Run, args) -> List[str]:
    cfg = corpus.CorpusConfig(tau=args.tau, gamma=args.gamma, rng_seed=args.seed)
    walks = corpus.generate_corpus(_load_sequences(run.path("train_log")), cfg)
    corpus.write_corpus(walks, run.path("corpus"))
    print(f"{len(walks)} walks, {sum(map(len, walks))} tokens")
    return [run.path("corpus")]


def train_config(args) -> TrainConfig:
    return TrainConfig(dim=args.dim, window=args.window,
                       subsample=None if args.subsample <= 0 else args.subsample,
                       epochs=args.epochs, learning_rate=args.alpha, min_count=args.min_count,
                       mode=args.mode, negative=args.negative, seed=args.seed, workers=args.workers,
                       shrink_window=args.shrink_window)


def cmd_train(run: Run, args) -> List[str]:
    walks = corpus.read_corpus(run.path("corpus"))
    model = train(walks, train_config(args))
    save_word2vec_format(model, run.path("model"))
    print(f"{len(model)} users, dimension {model.dim}")
    return [run.path("model")]


def cmd_eval_adopters(run: Run, args) -> List[str]:
    _, index = _load_embeddings(run)
    res = adopters.evaluate_adopter_prediction(
        _load_sequences(run.path("test_log")), index, _load_sequences(run.path("train_log")),
        network=_optional_network(run), n_values=args.n, k=args.k, scorer=args.scorer,
        fanout=args.fanout, min_adopters=args.min_adopters, num_topics=args.num_topics,
        seed=args.seed)
    res.write_table(run.path("adopters_table"))
    with open(run.path("adopters_summary"), "w", encoding="utf-8") as fh:
        fh.write(res.summary())
    with open(run.path("adopters_hist"), "w", encoding="utf-8") as fh:
        fh.write("method\tn\tbin_start\tcount\n")
        for method in res.methods():
            for n in res.n_values():
                for start, count in res.histogram(method, n):
                    fh.write(f"{method}\t{n}\t{start:g}\t{count}\n")
    print(res.summary(), end="")
    return [run.path("adopters_table"), run.path("adopters_summary"), run.path("adopters_hist")]


def cmd_eval_geo(run: Run, args) -> List[str]:
    if not run.exists("geo"):
        raise StageError("eval-geo needs geo labels: pass --geo to `adoptvec ingest`")
    emb, _ = _load_embeddings(run)
    res = geo.evaluate_geo(emb, ingest.parse_geo_labels(run.path("geo")), _optional_network(run),
                           fractions=args.fractions, sample_size=args.sample_size, seed=args.seed,
                           C=args.C)
    res.write_table(run.path("geo_table"))
    print(res.format(), end="")
    return [run.path("geo_table")]


def cmd_analyze(run: Run, args) -> List[str]:
    network = _optional_network(run)
    if network is None:
        raise StageError("analyze needs a follower network: pass --followers to `adoptvec ingest`")
    _, index = _load_embeddings(run)
    seqs = list(_load_sequences(run.path("train_log")).values())
    seqs += list(_load_sequences(run.path("test_log")).values())
    comp = neighborhood.compare_neighborhood_coadoption(
        network, index, ingest.adoption_map(seqs), sample_size=args.sample_size, seed=args.seed,
        kind=args.neighbors)
    jac, used = neighborhood.mean_jaccard_overlap(network, index, sample_size=args.jaccard_sample,
                                                  seed=args.seed)
    comp.write_table(run.path("coadoption"))
    with open(run.path("neighborhood_summary"), "w", encoding="utf-8") as fh:
        fh.write(comp.summary())
        fh.write(f"mean_jaccard_followers\t{jac:.6f}\njaccard_users\t{used}\n")
    with open(run.path("neighborhood_summary"), encoding="utf-8") as fh:
        print(fh.read(), end="")
    return [run.path("coadoption"), run.path("neighborhood_summary")]


def cmd_export_projection(run: Run, args) -> List[str]:
    emb, _ = _load_embeddings(run)
    proj = neighborhood.export_projection(emb, sample_size=min(args.sample_size, len(emb)), seed=args.seed)
    meta = {}
    if run.exists("geo"):
        meta["geo"] = ingest.parse_geo_labels(run.path("geo")).labels
    if run.exists("communities"):
        with open(run.path("communities"), encoding="utf-8") as fh:
            meta["community"] = dict(line.rstrip("\n").split("\t") for line in fh if line.strip())
    proj.write(run.path("projection"), meta)
    proj.write_vectors(run.path("projection_vectors"))
    print(f"projected {len(proj.words)} users")
    return [run.path("projection"), run.path("projection_vectors")]


def _stage_inputs(run: Run, stage, args) -> List[str]:
    if stage == "ingest":
        return [p for p in (args.adoptions_path, args.followers, args.geo) if p]
    keys = {"synth": [], "corpus": ["train_log"], "train": ["corpus"],
            "eval-adopters": ["model", "train_log", "test_log"],
            "eval-geo": ["model", "geo"], "analyze": ["model", "train_log", "test_log"],
            "export-projection": ["model"]}[stage]
    extra = []
    if stage in ("eval-adopters", "eval-geo", "analyze") and run.exists("followers"):
        extra.append(run.path("followers"))
    return [run.path(k) for k in keys if run.exists(k)] + extra


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "corpus": cmd_corpus,
    "train": cmd_train,
    "eval-adopters": cmd_eval_adopters,
    "eval-geo": cmd_eval_geo,
    "analyze": cmd_analyze,
    "export-projection": cmd_export_projection,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adoptvec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.add_argument("--run", required=True, help="run directory")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--force", action="store_true", help="re-run even if up to date")
        return p

    p = add("synth", "generate synthetic adoption log, follower network and geo labels")
    p.add_argument("--communities", type=int, default=5)
    p.add_argument("--users-per-community", type=int, default=40)
    p.add_argument("--topics-per-community", type=int, default=80)
    p.add_argument("--noise", type=float, default=0.05, help="cross-community adoption probability")
    p.add_argument("--min-tweets", type=int, default=30)
    p.add_argument("--max-tweets", type=int, default=60)
    p.add_argument("--mean-gap", type=float, default=600.0, help="mean seconds between tweets")
    p.add_argument("--follows-per-user", type=int, default=10)
    p.add_argument("--cross-follow", type=float, default=0.1,
                   help="fraction of follow edges leaving the community")

    p = add("ingest", "parse inputs and split topics into train/test")
    p.add_argument("--adoptions", dest="adoptions_path", help="adoption log (default: synth output)")
    p.add_argument("--followers", help="follower edge file")
    p.add_argument("--geo", help="geo label file")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")

    p = add("corpus", "build temporal graphs and sample walks from the train topics")
    p.add_argument("--tau", type=int, default=3600, help="max seconds between linked tweets")
    p.add_argument("--gamma", type=int, default=10, help="walk length")

    p = add("train", "train Skip-gram user vectors on the walk corpus")
    p.add_argument("--dim", type=int, default=100, help="vector dimension d")
    p.add_argument("--window", type=int, default=10, help="context window")
    p.add_argument("--subsample", type=float, default=1e-4, help="sub-sampling threshold (<=0 disables)")
    p.add_argument("--epochs", type=int, default=20, help="training iterations")
    p.add_argument("--mode", choices=("hs", "ns"), default="hs",
                   help="hierarchical softmax or negative sampling")
    p.add_argument("--negative", type=int, default=5, help="negatives per pair in ns mode")
    p.add_argument("--alpha", type=float, default=0.025, help="initial learning rate")
    p.add_argument("--min-count", type=int, default=1, help="drop users seen fewer times")
    p.add_argument("--workers", type=int, default=1, help="1 = deterministic")
    p.add_argument("--shrink-window", action="store_true", help="random window reduction")

    p = add("eval-adopters", "predict future adopters of held-out topics")
    p.add_argument("--n", type=int, nargs="+", default=[10], help="initial adopters")
    p.add_argument("--k", type=int, default=10, help="predictions per topic")
    p.add_argument("--scorer", choices=("min", "avg", "average"), default="avg")
    p.add_argument("--fanout", type=int, default=None, help="neighbours per seed (default 10*k)")
    p.add_argument("--min-adopters", type=int, default=500)
    p.add_argument("--num-topics", type=int, default=100)

    p = add("eval-geo", "geo-class inference from user vectors")
    p.add_argument("--fractions", type=float, nargs="+", default=[0.01, 0.05, 0.10])
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--C", type=float, default=1.0, help="inverse L2 regularisation strength")

    p = add("analyze", "compare vector-space and network neighbourhoods")
    p.add_argument("--sample-size", type=int, default=10000)
    p.add_argument("--jaccard-sample", type=int, default=1000)
    p.add_argument("--neighbors", choices=("followers", "followees", "both"), default="both")

    p = add("export-projection", "2-D PCA coordinates for plotting")
    p.add_argument("--sample-size", type=int, default=1000)
    return parser


def _config(args) -> dict:
    skip = {"run", "force", "verbose", "command"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    for k, v in cfg.items():
        if isinstance(v, tuple):
            cfg[k] = list(v)
    return cfg


def run_command(argv: List[str]) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    run = Run(args.run)
    stage = args.command
    if stage == "ingest" and not args.adoptions_path:
        if not run.done("synth"):
            raise StageError("ingest needs --adoptions, or run `adoptvec synth` first")
        args.adoptions_path = run.path("adoptions")
        args.followers = args.followers or (run.path("followers") if run.exists("followers") else None)
        args.geo = args.geo or (run.path("geo") if run.exists("geo") else None)
    if stage == "ingest":
        for p in (args.adoptions_path, args.followers, args.geo):
            if p and not os.path.exists(p):
                raise StageError(f"no such file: {p}")
    with run.lock():
        run.require(stage)
        config = _config(args)
        inputs = _stage_inputs(run, stage, args)
        if not args.force and run.up_to_date(stage, config, inputs):
            print(f"{stage}: up to date (use --force to re-run)")
            return 0
        outputs = COMMANDS[stage](run, args)
        run.record(stage, config, inputs, outputs)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        return run_command(sys.argv[1:] if argv is None else argv)
    except (StageError, ValueError, FileNotFoundError, ingest.ParseError) as exc:
        print(f"adoptvec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
