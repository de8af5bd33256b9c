"""Geo-class inference from user vectors.

One-vs-rest L2-regularised logistic regression, with the LibLinear
parameterisation of the per-class objective::

    0.5 * ||w||^2 + C * sum_i log(1 + exp(-y_i (w . x_i + b)))

The bias is not penalised. Each binary problem is solved by gradient
descent with Armijo backtracking.
"""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from .embed_store import NormalizedEmbeddings
from .ingest import FollowerNetwork, GeoLabels

logger = logging.getLogger(__name__)


def logistic_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float):
    """Value and gradient ``(f, grad_w, grad_b)`` of the binary objective, ``y`` in {-1, +1}."""
    margin = y * (X @ w + b)
    # log(1 + exp(-m)) computed stably
    loss = np.maximum(-margin, 0.0) + np.log1p(np.exp(-np.abs(margin)))
    f = 0.5 * float(w @ w) + C * float(loss.sum())
    coef = -C * y * expit(-margin)
    return f, w + X.T @ coef, float(coef.sum())


def _class_seed(seed: int, label: str) -> np.random.Generator:
    h = int.from_bytes(hashlib.sha256(label.encode("utf-8")).digest()[:8], "little")
    return np.random.default_rng([seed, h])


def fit_binary_logistic(X, y, C=1.0, tol=1e-5, max_iter=10000, w0=None, b0=0.0):
    """Gradient descent with backtracking; stops when the gradient norm drops below ``tol``."""
    w = np.zeros(X.shape[1]) if w0 is None else np.array(w0, dtype=float)
    b = float(b0)
    f, gw, gb = logistic_objective(w, b, X, y, C)
    step = 1.0
    it = 0
    while it < max_iter:
        gnorm2 = float(gw @ gw) + gb * gb
        if np.sqrt(gnorm2) < tol:
            break
        it += 1
        step = min(step * 2.0, 1e6)
        while True:
            w_new, b_new = w - step * gw, b - step * gb
            f_new, gw_new, gb_new = logistic_objective(w_new, b_new, X, y, C)
            if f_new <= f - 0.5 * step * gnorm2 or step < 1e-20:
                break
            step *= 0.5
        w, b, f, gw, gb = w_new, b_new, f_new, gw_new, gb_new
    return w, b, f, it


@dataclass
class ClassifierModel:
    classes: List[str]
    weights: np.ndarray
    biases: np.ndarray
    C: float = 1.0
    iterations: Dict[str, int] = field(default_factory=dict)
    objectives: Dict[str, float] = field(default_factory=dict)
    seed: int = 0

    def scores(self, X: np.ndarray) -> np.ndarray:
        return np.atleast_2d(X) @ self.weights.T + self.biases

    def predict(self, X: np.ndarray) -> List[str]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.weights.shape[1]:
            raise ValueError(f"expected {self.weights.shape[1]} features, got {X.shape[1]}")
        return [self.classes[i] for i in np.argmax(self.scores(X), axis=1)]


def train_ovr_logistic(features: np.ndarray, labels: Sequence[str], C: float = 1.0,
                       tol: float = 1e-5, max_iter: int = 10000, seed: int = 0,
                       random_init: bool = False,
                       class_order: Optional[Sequence[str]] = None) -> ClassifierModel:
    """One binary classifier per observed class.

    Every class's problem (including its optional random start) depends
    only on the data, ``seed`` and its own label, so the order in which
    classes are fitted cannot change the result.
    """
    X = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=object)
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise ValueError("training data must contain at least 2 classes")
    fit_order = list(class_order) if class_order is not None else classes
    W = np.zeros((len(classes), X.shape[1]))
    b = np.zeros(len(classes))
    iters, objs = {}, {}
    pos = {c: i for i, c in enumerate(classes)}
    for c in fit_order:
        y = np.where(labels == c, 1.0, -1.0)
        w0, b0 = None, 0.0
        if random_init:
            rng = _class_seed(seed, c)
            w0 = rng.normal(size=X.shape[1])
            b0 = float(rng.normal())
        w, bias, f, it = fit_binary_logistic(X, y, C, tol, max_iter, w0, b0)
        W[pos[c]], b[pos[c]] = w, bias
        iters[c], objs[c] = it, f
        if it >= max_iter:
            logger.warning("class %s: stopped at max_iter=%d", c, max_iter)
    return ClassifierModel(classes, W, b, C, iters, objs, seed)


def predict_class(model: ClassifierModel, vector: np.ndarray) -> str:
    return model.predict(np.asarray(vector, dtype=float)[None, :])[0]


def _modal(labels):
    counts = Counter(labels)
    top = max(counts.values())
    return min(c for c, n in counts.items() if n == top)


@dataclass
class MajorityBaseline:
    label: str

    def predict(self, users: Sequence[str]) -> List[str]:
        return [self.label] * len(users)


def majority_baseline(train_labels) -> MajorityBaseline:
    """Always predict the modal training class (ties: first in sorted class order)."""
    vals = list(train_labels.values()) if isinstance(train_labels, Mapping) else list(train_labels)
    if not vals:
        raise ValueError("no training labels")
    return MajorityBaseline(_modal(vals))


@dataclass
class FriendMajorityBaseline:
    network: FollowerNetwork
    train_labels: Mapping[str, str]
    fallback: str

    def predict_one(self, user: str) -> str:
        known = [self.train_labels[f] for f in self.network.followees_of(user) if f in self.train_labels]
        return _modal(known) if known else self.fallback

    def predict(self, users: Sequence[str]) -> List[str]:
        return [self.predict_one(u) for u in users]


def friend_majority_baseline(network: FollowerNetwork, train_labels: Mapping[str, str]) -> FriendMajorityBaseline:
    """Modal label among the accounts a user follows, else the modal training label."""
    return FriendMajorityBaseline(network, dict(train_labels), majority_baseline(train_labels).label)


def accuracy(predicted: Sequence[str], truth: Sequence[str]) -> float:
    if len(predicted) != len(truth):
        raise ValueError("length mismatch")
    if not truth:
        return float("nan")
    return sum(p == t for p, t in zip(predicted, truth)) / len(truth)


@dataclass
class GeoEvaluation:
    rows: List[Tuple[str, float, float]] = field(default_factory=list)

    def accuracy(self, method: str, fraction: float) -> float:
        for m, f, a in self.rows:
            if m == method and abs(f - fraction) < 1e-12:
                return a
        raise KeyError((method, fraction))

    def write_table(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.format())

    def format(self) -> str:
        lines = ["method\ttrain_fraction\taccuracy"]
        lines += [f"{m}\t{f:g}\t{a:.6f}" for m, f, a in self.rows]
        return "\n".join(lines) + "\n"


def evaluate_geo(embeddings: NormalizedEmbeddings, labels, network: Optional[FollowerNetwork] = None,
                 fractions: Sequence[float] = (0.01, 0.05, 0.10), sample_size: Optional[int] = None,
                 seed: int = 0, C: float = 1.0) -> GeoEvaluation:
    """Test accuracy of the vector classifier and the baselines per train fraction."""
    label_map = labels.labels if isinstance(labels, GeoLabels) else dict(labels)
    users = sorted(u for u in label_map if u in embeddings)
    rng = np.random.default_rng(seed)
    if sample_size is not None and sample_size < len(users):
        users = sorted(users[i] for i in rng.choice(len(users), sample_size, replace=False))
    result = GeoEvaluation()
    for frac in fractions:
        n_train = int(round(frac * len(users)))
        if n_train < 1 or n_train >= len(users):
            raise ValueError(f"train fraction {frac} gives {n_train} of {len(users)} users")
        order = np.random.default_rng([seed, int(round(frac * 1e6))]).permutation(len(users))
        train_u = [users[i] for i in order[:n_train]]
        test_u = [users[i] for i in order[n_train:]]
        train_lab = {u: label_map[u] for u in train_u}
        truth = [label_map[u] for u in test_u]

        maj = majority_baseline(train_lab)
        result.rows.append(("majority", frac, accuracy(maj.predict(test_u), truth)))
        if network is not None:
            friends = friend_majority_baseline(network, train_lab)
            result.rows.append(("friends", frac, accuracy(friends.predict(test_u), truth)))
        X_train = np.array([embeddings[u] for u in train_u])
        clf = train_ovr_logistic(X_train, [train_lab[u] for u in train_u], C=C, seed=seed)
        X_test = np.array([embeddings[u] for u in test_u])
        result.rows.append(("vectors", frac, accuracy(clf.predict(X_test), truth)))
    return result
