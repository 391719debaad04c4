"""Alternating decision trees.

The model alternates splitter nodes (a condition plus two prediction
values) and prediction nodes (a value plus any number of child splitters).
An instance's score is the root value plus every prediction value along
every root-to-node path whose conditions it satisfies; a splitter whose
feature is missing from the instance contributes nothing and its subtree
is not entered. Positive score means class 1.

Training is boosting: each round picks the (prediction node, condition)
pair minimizing

    Z = 2*(sqrt(W1(p & c) * W0(p & c)) + sqrt(W1(p & ~c) * W0(p & ~c)))
        + (W_total - W(p & c) - W(p & ~c))

over candidate conditions, where W1/W0 are class weight sums. The two new
prediction values are 0.5*ln((W1 + 1) / (W0 + 1)) of their branch, and the
weights of instances reaching a branch are multiplied by exp(-y * value).
Ties prefer the earliest-created prediction node, then the
lexicographically smaller feature, then the smaller threshold/category.

Determinism note: candidate statistics accumulate in value-sorted,
stable-index row order, and each false-branch sum is the complement of the
true-branch cumulative sum. That accumulation order is part of the
contract: it makes tie comparisons reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..features import CATEGORICAL, FeatureMatrix
from .conditions import CATEGORICAL_EQ, NUMERIC_LT, SplitCondition, TrainingData


@dataclass
class Splitter:
    index: int  # insertion order, 1-based
    condition: SplitCondition
    yes: "PredictionNode"
    no: "PredictionNode"


@dataclass
class PredictionNode:
    value: float
    splitters: list[Splitter] = field(default_factory=list)


@dataclass
class ADTreeModel:
    root: PredictionNode
    # training exp-loss trace, one entry per boosting round; not part of
    # the model's identity (excluded from equality, never serialized)
    weight_totals: list[float] = field(default_factory=list, compare=False, repr=False)

    def score_row(self, row: dict) -> float:
        parts: list[float] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            parts.append(node.value)
            for sp in node.splitters:
                h = sp.condition.holds(row.get(sp.condition.feature))
                if h is None:
                    continue
                stack.append(sp.yes if h else sp.no)
        return math.fsum(parts)

    def predict_row(self, row: dict) -> int:
        return int(self.score_row(row) > 0)

    def score_matrix(self, matrix: FeatureMatrix) -> np.ndarray:
        out = np.zeros(matrix.n_rows)
        self._accumulate(self.root, np.arange(matrix.n_rows), matrix, out)
        return out

    def _accumulate(self, node: PredictionNode, idx, matrix, out):
        if len(idx) == 0:
            return
        out[idx] += node.value
        for sp in node.splitters:
            values = matrix.columns[sp.condition.feature][idx]
            if sp.condition.kind == NUMERIC_LT:
                present = ~np.isnan(values)
                yes = (values < sp.condition.threshold) & present
            else:
                present = np.array([v is not None for v in values], dtype=bool)
                yes = np.array([v == sp.condition.category for v in values], dtype=bool)
            self._accumulate(sp.yes, idx[yes], matrix, out)
            self._accumulate(sp.no, idx[present & ~yes], matrix, out)

    def splitter_count(self) -> int:
        return len(list(self.iter_splitters()))

    def iter_splitters(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            for sp in node.splitters:
                yield sp
                stack.append(sp.yes)
                stack.append(sp.no)


def _value(w1: float, w0: float) -> float:
    return 0.5 * math.log((w1 + 1.0) / (w0 + 1.0))


@dataclass
class _Candidate:
    z: float
    node_pos: int
    feature: str
    kind: str
    operand: object
    yes_mask: np.ndarray
    no_mask: np.ndarray


def train_adtree(matrix: FeatureMatrix, n_boost_rounds: int = 10) -> ADTreeModel:
    """Boost an alternating decision tree for n_boost_rounds rounds.

    With 0 rounds the model is the root prediction value alone (the class
    prior; exactly 0 on a balanced matrix). Training stops early if no
    candidate condition remains.
    """
    if n_boost_rounds < 0:
        raise ValueError("n_boost_rounds must be >= 0")
    td = TrainingData(matrix)
    if td.n == 0:
        raise ValueError("cannot train on an empty matrix")
    ypm = np.where(td.y == 1, 1.0, -1.0)
    w = np.ones(td.n)

    root_value = _value(float(w[td.y == 1].sum()), float(w[td.y == 0].sum()))
    w *= np.exp(-ypm * root_value)

    root = PredictionNode(root_value)
    model = ADTreeModel(root)
    model.weight_totals.append(float(w.sum()))
    # reach masks parallel to the prediction-node list; creation order = tie order
    nodes: list[PredictionNode] = [root]
    masks: list[np.ndarray] = [np.ones(td.n, dtype=bool)]

    # presort numeric columns once; per-node scans reuse the global order
    order = {
        f: np.argsort(td.columns[f], kind="stable")
        for f in td.features if td.kinds[f] != CATEGORICAL
    }

    for round_no in range(1, n_boost_rounds + 1):
        total_w = float(w.sum())
        best: _Candidate | None = None
        for pos, mask in enumerate(masks):
            for feature in td.features:
                if td.kinds[feature] == CATEGORICAL:
                    cand = _scan_categorical(td, feature, mask, w, ypm, total_w)
                else:
                    cand = _scan_numeric(td, feature, order[feature], mask, w, ypm, total_w)
                if cand is None:
                    continue
                z, operand, yes_mask, no_mask = cand
                if best is None or z < best.z:
                    best = _Candidate(z, pos, feature, td.kinds[feature],
                                      operand, yes_mask, no_mask)
        if best is None:
            break

        w1_yes = float(w[best.yes_mask & (td.y == 1)].sum())
        w0_yes = float(w[best.yes_mask & (td.y == 0)].sum())
        w1_no = float(w[best.no_mask & (td.y == 1)].sum())
        w0_no = float(w[best.no_mask & (td.y == 0)].sum())
        a_yes = _value(w1_yes, w0_yes)
        a_no = _value(w1_no, w0_no)

        if best.kind == CATEGORICAL:
            cond = SplitCondition(best.feature, CATEGORICAL_EQ, category=str(best.operand))
        else:
            cond = SplitCondition(best.feature, NUMERIC_LT, threshold=float(best.operand))
        yes_node = PredictionNode(a_yes)
        no_node = PredictionNode(a_no)
        nodes[best.node_pos].splitters.append(Splitter(round_no, cond, yes_node, no_node))

        w[best.yes_mask] *= np.exp(-ypm[best.yes_mask] * a_yes)
        w[best.no_mask] *= np.exp(-ypm[best.no_mask] * a_no)
        nodes += [yes_node, no_node]
        masks += [best.yes_mask, best.no_mask]
        model.weight_totals.append(float(w.sum()))

    return model


def _scan_numeric(td, feature, global_order, mask, w, ypm, total_w):
    col = td.columns[feature]
    sel = global_order[mask[global_order]]
    sv = col[sel]
    present = ~np.isnan(sv)
    sel = sel[present]
    sv = sv[present]
    if len(sv) < 2:
        return None
    cuts = np.nonzero(sv[:-1] != sv[1:])[0]
    if len(cuts) == 0:
        return None
    ws = w[sel]
    pos = ypm[sel] > 0
    cum1 = np.cumsum(np.where(pos, ws, 0.0))
    cum0 = np.cumsum(np.where(pos, 0.0, ws))
    w1_yes = cum1[cuts]
    w0_yes = cum0[cuts]
    w1_no = cum1[-1] - w1_yes
    w0_no = cum0[-1] - w0_yes
    rem = total_w - (cum1[-1] + cum0[-1])
    z = 2.0 * (np.sqrt(w1_yes * w0_yes) + np.sqrt(w1_no * w0_no)) + rem
    k = int(np.argmin(z))
    threshold = (sv[cuts[k]] + sv[cuts[k] + 1]) / 2.0
    yes_mask = mask & ~np.isnan(col) & (col < threshold)
    no_mask = mask & ~np.isnan(col) & ~(col < threshold)
    return float(z[k]), float(threshold), yes_mask, no_mask


def _scan_categorical(td, feature, mask, w, ypm, total_w):
    codes = td.codes[feature]
    present = (codes >= 0) & mask
    if not present.any():
        return None
    w1_all = float(w[present & (ypm > 0)].sum())
    w0_all = float(w[present & (ypm < 0)].sum())
    rem = total_w - (w1_all + w0_all)
    best = None
    for code, cat in enumerate(td.categories[feature]):
        eq = (codes == code) & present
        if not eq.any() or eq.sum() == present.sum():
            continue
        w1_yes = float(w[eq & (ypm > 0)].sum())
        w0_yes = float(w[eq & (ypm < 0)].sum())
        z = 2.0 * (math.sqrt(w1_yes * w0_yes)
                   + math.sqrt((w1_all - w1_yes) * (w0_all - w0_yes))) + rem
        if best is None or z < best[0]:
            best = (z, cat, eq, present & ~eq)
    return best
