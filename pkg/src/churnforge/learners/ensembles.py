"""Bagging, random forest, and AdaBoost over the base tree learners.

Each ensemble member draws from its own RNG stream keyed by
(seed, member index), so training is reproducible and independent of how
members might be scheduled. Bagging and forests vote uniformly (score =
fraction of members voting class 1, ties to class 0); AdaBoost scores are
the signed weighted margin (class 1 iff score > 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureMatrix
from .trees import TreeModel, TreeNode, train_cart

VOTE = "vote"
MARGIN = "margin"


@dataclass
class EnsembleModel:
    combine: str  # VOTE | MARGIN
    members: list = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)  # MARGIN only

    def __post_init__(self):
        if self.combine not in (VOTE, MARGIN):
            raise ValueError(f"unknown combine rule {self.combine!r}")

    def score_row(self, row: dict) -> float:
        if self.combine == VOTE:
            votes = sum(m.predict_row(row) for m in self.members)
            return votes / len(self.members)
        return math.fsum(a * (1.0 if m.predict_row(row) == 1 else -1.0)
                         for a, m in zip(self.alphas, self.members))

    def predict_row(self, row: dict) -> int:
        if self.combine == VOTE:
            return int(self.score_row(row) > 0.5)
        return int(self.score_row(row) > 0)

    def score_matrix(self, matrix: FeatureMatrix) -> np.ndarray:
        if self.combine == VOTE:
            votes = np.zeros(matrix.n_rows)
            for m in self.members:
                votes += (m.score_matrix(matrix) > 0.5)
            return votes / len(self.members)
        out = np.zeros(matrix.n_rows)
        for a, m in zip(self.alphas, self.members):
            out += a * np.where(m.score_matrix(matrix) > 0.5, 1.0, -1.0)
        return out


def _member_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng((seed, index))


def _bootstrap_members(matrix: FeatureMatrix, n_trees: int, seed: int, bootstrap: bool,
                       max_depth: int, min_leaf: int,
                       features_per_split: int | None) -> list[TreeModel]:
    members = []
    for i in range(n_trees):
        members.append(_train_member(matrix, seed, i, bootstrap, max_depth,
                                     min_leaf, features_per_split))
    return members


def _train_member(matrix: FeatureMatrix, seed: int, index: int, bootstrap: bool,
                  max_depth: int, min_leaf: int,
                  features_per_split: int | None) -> TreeModel:
    """One bagged tree; pure function of (matrix, seed, index) so member
    training order cannot matter."""
    rng = _member_rng(seed, index)
    if bootstrap:
        idx = np.sort(rng.integers(0, matrix.n_rows, size=matrix.n_rows))
        sample = matrix.subset(idx)
    else:
        sample = matrix
    return train_cart(sample, max_depth=max_depth, min_leaf=min_leaf,
                      features_per_split=features_per_split, rng=rng)


def train_bagging(matrix: FeatureMatrix, n_trees: int = 25, seed: int = 0,
                  bootstrap: bool = True, max_depth: int = 6,
                  min_leaf: int = 1) -> EnsembleModel:
    if n_trees < 1:
        raise ValueError("n_trees must be positive")
    members = _bootstrap_members(matrix, n_trees, seed, bootstrap, max_depth, min_leaf, None)
    return EnsembleModel(VOTE, members)


def train_forest(matrix: FeatureMatrix, n_trees: int = 25, seed: int = 0,
                 features_per_split: int | None = None, bootstrap: bool = True,
                 max_depth: int = 8, min_leaf: int = 1) -> EnsembleModel:
    if n_trees < 1:
        raise ValueError("n_trees must be positive")
    if features_per_split is None:
        features_per_split = max(1, int(round(math.sqrt(len(matrix.feature_names)))))
    members = _bootstrap_members(matrix, n_trees, seed, bootstrap, max_depth,
                                 min_leaf, features_per_split)
    return EnsembleModel(VOTE, members)


def _constant_member(matrix: FeatureMatrix) -> TreeModel:
    p1 = float((matrix.labels == 1).mean())
    return TreeModel(TreeNode(n=matrix.n_rows, p1=p1), list(matrix.feature_names))


def train_adaboost(matrix: FeatureMatrix, n_boost_rounds: int = 20,
                   base_algorithm: str = "stump", max_depth: int = 3,
                   min_leaf: int = 1) -> EnsembleModel:
    """Weighted-error boosting with member weight 0.5*ln((1-e)/e).

    Stops when a round's weighted error reaches 0 (the perfect member is
    kept) or 0.5 or worse (the member is dropped). If no member survives,
    the result is a constant majority-class classifier.
    """
    if n_boost_rounds < 1:
        raise ValueError("n_boost_rounds must be positive")
    if matrix.labels is None:
        raise ValueError("training needs a labeled matrix")
    n = matrix.n_rows
    y = matrix.labels.astype(np.float64)
    ypm = np.where(y == 1, 1.0, -1.0)
    w = np.ones(n)
    members: list[TreeModel] = []
    alphas: list[float] = []

    for _ in range(n_boost_rounds):
        if base_algorithm == "stump":
            member = train_cart(matrix, max_depth=1, min_leaf=1, weights=w)
        elif base_algorithm == "cart":
            member = train_cart(matrix, max_depth=max_depth, min_leaf=min_leaf, weights=w)
        else:
            raise ValueError(f"unsupported AdaBoost base learner {base_algorithm!r}")
        pred = (member.score_matrix(matrix) > 0.5).astype(np.float64)
        wrong = pred != y
        eps = float(w[wrong].sum() / w.sum())
        if eps >= 0.5:
            break
        alpha = 0.5 * math.log((1.0 - eps) / max(eps, 1e-10))
        members.append(member)
        alphas.append(alpha)
        if eps == 0.0:
            break
        hpm = np.where(pred == 1, 1.0, -1.0)
        w = w * np.exp(-alpha * ypm * hpm)
        w *= n / w.sum()

    if not members:
        members = [_constant_member(matrix)]
        alphas = [1.0]
    return EnsembleModel(MARGIN, members, alphas)
