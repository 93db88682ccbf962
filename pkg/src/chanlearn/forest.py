"""Random-forest classifier: bootstrap resampling, Gini splits on sqrt(d) random
features per node, fully grown trees, hard majority vote."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import CATEGORICAL_TASKS, Dataset
from .nn.train import confusion_matrix
from .rng import TAG_FOREST, derive_rng

LEAF = -1


@dataclass
class Tree:
    """Array-backed binary tree. Node 0 is the root; ``feature[i] == LEAF`` marks a leaf.

    Samples with ``x[feature] <= threshold`` go left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, n_classes) class counts of the training samples reaching each node

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def leaves(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        active = self.feature[node] != LEAF
        while active.any():
            n = node[active]
            go_left = X[rows[active], self.feature[n]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.counts[self.leaves(X)].argmax(axis=1)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            np.array(d["feature"], dtype=np.int64),
            np.array(d["threshold"], dtype=np.float64),
            np.array(d["left"], dtype=np.int64),
            np.array(d["right"], dtype=np.int64),
            np.array(d["counts"], dtype=np.int64).reshape(len(d["feature"]), -1),
        )


def _best_split(x: np.ndarray, y_onehot: np.ndarray):
    """Lowest weighted Gini split along one feature: ``(score, threshold)`` or None."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    n = len(xs)
    left = np.cumsum(y_onehot[order], axis=0)[:-1]
    right = left[-1] + y_onehot[order[-1]] - left
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    # n * weighted Gini = n_l - sum(l^2)/n_l + n_r - sum(r^2)/n_r; the n_l + n_r = n part is constant
    score = -(left * left).sum(axis=1) / n_left - (right * right).sum(axis=1) / n_right
    score = np.where(valid, score, np.inf)
    i = int(np.argmin(score))
    lo, hi = xs[i], xs[i + 1]
    thr = lo + (hi - lo) / 2.0
    if thr >= hi:
        thr = lo
    return float(score[i]), thr


def grow_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_features: int, rng) -> Tree:
    onehot = np.eye(n_classes, dtype=np.float64)[y]
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(np.bincount(y[idx], minlength=n_classes))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)))]
    d = X.shape[1]
    while stack:
        node, idx = stack.pop()
        if len(idx) < 2 or np.count_nonzero(counts[node]) <= 1:
            continue
        best = None
        # draw max_features candidates; if none of them can split, keep drawing from the rest
        for rank, f in enumerate(rng.permutation(d)):
            if rank >= max_features and best is not None:
                break
            found = _best_split(X[idx, f], onehot[idx])
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], found[1], int(f))
        if best is None:
            continue
        _, thr, f = best
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri))
        stack.append((left[node], li))
    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(len(feature), n_classes),
    )


@dataclass
class Forest:
    trees: list
    n_estimators: int
    seed: int
    n_features: int
    n_classes: int
    meta: dict = field(default_factory=dict)

    def votes(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ValueError(f"forest was trained on {self.n_features} features, got {X.shape[1]}")
        out = np.zeros((len(X), self.n_classes), dtype=np.int64)
        rows = np.arange(len(X))
        for tree in self.trees:
            np.add.at(out, (rows, tree.predict(X)), 1)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        # argmax picks the first maximum: ties go to the lowest class index
        return self.votes(X).argmax(axis=1)

    def to_dict(self) -> dict:
        return {
            "format": "chanlearn-forest",
            "n_estimators": self.n_estimators,
            "seed": self.seed,
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Forest":
        return cls([Tree.from_dict(t) for t in d["trees"]], d["n_estimators"], d["seed"], d["n_features"], d["n_classes"])


def fit(ds: Dataset, n_estimators: int = 100, seed: int = 0, threads: int = 1) -> Forest:
    if ds.task not in CATEGORICAL_TASKS:
        raise ValueError("forest supports classification only")
    if n_estimators < 1:
        raise ValueError("n_estimators must be >= 1")
    X, y = ds.features, ds.targets
    n_classes = max(ds.n_classes, int(y.max()) + 1)
    max_features = max(1, math.ceil(math.sqrt(X.shape[1])))

    def one(t):
        rng = derive_rng(seed, TAG_FOREST, t)
        boot = rng.integers(0, len(y), size=len(y))
        return grow_tree(X[boot], y[boot], n_classes, max_features, rng)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            trees = list(pool.map(one, range(n_estimators)))
    else:
        trees = [one(t) for t in range(n_estimators)]
    return Forest(trees, n_estimators, seed, X.shape[1], n_classes)


def predict(forest: Forest, features) -> np.ndarray | int:
    """Majority vote; a single feature vector returns a single label."""
    features = np.asarray(features, dtype=np.float64)
    out = forest.predict(features)
    return int(out[0]) if features.ndim == 1 else out


def accuracy(forest: Forest, ds: Dataset) -> tuple[float, np.ndarray]:
    pred = forest.predict(ds.features)
    conf = confusion_matrix(ds.targets, pred, forest.n_classes)
    return float(np.trace(conf) / conf.sum()), conf
