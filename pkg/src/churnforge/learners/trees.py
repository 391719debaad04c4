"""Greedy Gini-splitting binary decision trees: depth-1 stumps and
depth/min-leaf limited CART-style trees. No pruning phase; the depth and
leaf-size limits are the capacity controls."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureMatrix
from .conditions import SplitCondition, TrainingData, best_split


@dataclass
class TreeNode:
    n: int
    p1: float  # class-1 fraction of training rows at this node
    condition: SplitCondition | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.condition is None


@dataclass
class TreeModel:
    root: TreeNode
    feature_names: list[str] = field(default_factory=list)

    def score_row(self, row: dict) -> float:
        node = self.root
        while not node.is_leaf:
            node = node.left if node.condition.route(row.get(node.condition.feature)) else node.right
        return node.p1

    def predict_row(self, row: dict) -> int:
        return int(self.score_row(row) > 0.5)

    def score_matrix(self, matrix: FeatureMatrix) -> np.ndarray:
        out = np.zeros(matrix.n_rows)
        self._assign(self.root, np.arange(matrix.n_rows), matrix, out)
        return out

    def _assign(self, node: TreeNode, idx: np.ndarray, matrix: FeatureMatrix, out: np.ndarray):
        if len(idx) == 0:
            return
        if node.is_leaf:
            out[idx] = node.p1
            return
        left = _route_mask(node.condition, matrix.columns[node.condition.feature][idx])
        self._assign(node.left, idx[left], matrix, out)
        self._assign(node.right, idx[~left], matrix, out)

    def depth(self) -> int:
        def d(node):
            return 0 if node.is_leaf else 1 + max(d(node.left), d(node.right))
        return d(self.root)

    def n_splits(self) -> int:
        def c(node):
            return 0 if node.is_leaf else 1 + c(node.left) + c(node.right)
        return c(self.root)


def _route_mask(cond: SplitCondition, values: np.ndarray) -> np.ndarray:
    if cond.kind == "numeric_lt":
        missing = np.isnan(values)
        left = values < cond.threshold
    else:
        missing = np.array([v is None for v in values], dtype=bool)
        left = np.array([v == cond.category for v in values], dtype=bool)
    if cond.missing_goes == "left":
        left = left | missing
    else:
        left = left & ~missing
    return left


def _leaf(td: TrainingData, idx, weights) -> TreeNode:
    y = td.y[idx]
    if weights is None:
        p1 = float(y.sum()) / len(y)
    else:
        w = weights[idx]
        p1 = float(w[y == 1].sum() / w.sum())
    return TreeNode(n=len(idx), p1=p1)


def _grow(td: TrainingData, idx: np.ndarray, depth: int, max_depth: int, min_leaf: int,
          weights, features_per_split, rng) -> TreeNode:
    y = td.y[idx]
    if depth >= max_depth or len(idx) < 2 * min_leaf or y.min() == y.max():
        return _leaf(td, idx, weights)
    if features_per_split is not None and features_per_split < len(td.features):
        features = list(rng.choice(td.features, size=features_per_split, replace=False))
    else:
        features = td.features
    choice = best_split(td, idx, features, weights=weights, min_leaf=min_leaf)
    if choice is None:
        return _leaf(td, idx, weights)
    node = _leaf(td, idx, weights)
    node.condition = choice.condition
    node.left = _grow(td, choice.left, depth + 1, max_depth, min_leaf,
                      weights, features_per_split, rng)
    node.right = _grow(td, choice.right, depth + 1, max_depth, min_leaf,
                       weights, features_per_split, rng)
    return node


def train_cart(matrix: FeatureMatrix, max_depth: int = 6, min_leaf: int = 1,
               weights: np.ndarray | None = None,
               features_per_split: int | None = None,
               rng: np.random.Generator | None = None) -> TreeModel:
    """Gini-greedy binary tree. A single-class matrix yields a constant
    classifier (one leaf), not an error."""
    if max_depth < 1 or min_leaf < 1:
        raise ValueError("max_depth and min_leaf must be positive")
    td = TrainingData(matrix)
    if td.n == 0:
        raise ValueError("cannot train on an empty matrix")
    root = _grow(td, np.arange(td.n), 0, max_depth, min_leaf, weights,
                 features_per_split, rng)
    return TreeModel(root, list(matrix.feature_names))


def train_stump(matrix: FeatureMatrix, weights: np.ndarray | None = None) -> TreeModel:
    """Depth-1 tree: the single best Gini split."""
    return train_cart(matrix, max_depth=1, min_leaf=1, weights=weights)
