"""Split conditions and the shared split-search machinery.

Numeric candidates are midpoints between consecutive distinct sorted
values; categorical candidates are equality tests against each observed
category. Rows with a missing value are routed to the branch that held
more training rows ("left" means the condition holds).

Unweighted Gini search is done in exact integer arithmetic (converted to
float by one correctly-rounded division per candidate), so equal-valued
candidates compare exactly equal and the deterministic tie rule applies:
lexicographically smaller feature name first, then smaller threshold or
category.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features import CATEGORICAL, NUMERIC, FeatureMatrix

LEFT = "left"    # condition holds
RIGHT = "right"  # condition fails

NUMERIC_LT = "numeric_lt"
CATEGORICAL_EQ = "categorical_eq"


@dataclass(frozen=True)
class SplitCondition:
    feature: str
    kind: str  # NUMERIC_LT | CATEGORICAL_EQ
    threshold: float | None = None
    category: str | None = None
    missing_goes: str = RIGHT

    def holds(self, value) -> bool | None:
        """True/False for a present value, None when the value is missing."""
        if value is None:
            return None
        if self.kind == NUMERIC_LT:
            if isinstance(value, float) and value != value:
                return None
            return bool(value < self.threshold)
        return bool(value == self.category)

    def route(self, value) -> bool:
        """Tree routing: True = left branch; missing follows missing_goes."""
        h = self.holds(value)
        if h is None:
            return self.missing_goes == LEFT
        return h

    def describe(self, negate: bool = False) -> str:
        if self.kind == NUMERIC_LT:
            op = ">=" if negate else "<"
            return f"{self.feature} {op} {_fmt_threshold(self.threshold)}"
        op = "!=" if negate else "="
        return f"{self.feature} {op} {self.category}"


def _fmt_threshold(t: float) -> str:
    return repr(float(t))


class TrainingData:
    """Columnar view of a FeatureMatrix for training.

    Numeric columns stay float64 (NaN = missing); categorical columns are
    kept as object arrays with a sorted category vocabulary. Features are
    listed in lexicographic order, which is the tie-break scan order.
    """

    def __init__(self, matrix: FeatureMatrix):
        if matrix.labels is None:
            raise ValueError("training needs a labeled matrix")
        self.matrix = matrix
        self.y = matrix.labels.astype(np.int64)
        self.n = matrix.n_rows
        self.features = sorted(matrix.feature_names)
        self.kinds = matrix.kinds
        self.columns = matrix.columns
        self.categories: dict[str, list] = {}
        self.codes: dict[str, np.ndarray] = {}  # categorical value codes, -1 = missing
        for name in self.features:
            if matrix.kinds[name] != CATEGORICAL:
                continue
            vocab = sorted(v for v in set(matrix.columns[name]) if v is not None)
            lookup = {v: i for i, v in enumerate(vocab)}
            self.categories[name] = vocab
            self.codes[name] = np.array(
                [lookup.get(v, -1) if v is not None else -1 for v in matrix.columns[name]],
                dtype=np.int64)


@dataclass
class SplitChoice:
    condition: SplitCondition
    score: float          # higher is purer (see best_split)
    left: np.ndarray      # row indices routed left (missing included)
    right: np.ndarray


def _score_candidates(aL, bL, aR, bR):
    """Vector of sum-of-squares purity scores (maximize).

    For candidate counts (aL, bL | aR, bR), the weighted child Gini is
    1 - score/n with score = (aL^2+bL^2)/nL + (aR^2+bR^2)/nR. Computed as a
    single division of exact int64 products so equal candidates tie exactly.
    """
    nL = aL + bL
    nR = aR + bR
    PL = aL * aL + bL * bL
    PR = aR * aR + bR * bR
    num = (PL * nR + PR * nL).astype(np.float64)
    den = (nL * nR).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = num / den
    score[(nL == 0) | (nR == 0)] = -np.inf
    return score


def _score_candidates_weighted(waL, wbL, waR, wbR):
    WL = waL + wbL
    WR = waR + wbR
    with np.errstate(divide="ignore", invalid="ignore"):
        score = (waL * waL + wbL * wbL) / WL + (waR * waR + wbR * wbR) / WR
    score[(WL <= 0) | (WR <= 0)] = -np.inf
    return score


def best_split(td: TrainingData, idx: np.ndarray, features,
               weights: np.ndarray | None = None,
               min_leaf: int = 1) -> SplitChoice | None:
    """Best single split over `features` for the rows in `idx`.

    Any valid candidate is taken (weighted child Gini never exceeds the
    parent's, and zero-gain splits are what let a deeper tree solve
    XOR-like interactions); None only when no candidate separates the rows
    within the min_leaf limit. Missing rows count toward the branch holding
    more present rows (ties go right), which is also the recorded
    missing_goes direction.
    """
    y = td.y[idx]
    w = weights[idx] if weights is not None else None
    best: tuple[float, str, float | str] | None = None
    best_payload = None

    for feature in sorted(features):
        if td.kinds[feature] == NUMERIC:
            found = _scan_numeric(y, w, td.columns[feature][idx], min_leaf)
        else:
            found = _scan_categorical(y, w, td.codes[feature][idx], td.categories[feature], min_leaf)
        if found is None:
            continue
        score, operand, left_mask, miss_left = found
        if best is None or score > best[0]:
            best = (score, feature, operand)
            best_payload = (left_mask, miss_left)

    if best is None:
        return None
    score, feature, operand = best
    left_mask, miss_left = best_payload
    if td.kinds[feature] == NUMERIC:
        cond = SplitCondition(feature, NUMERIC_LT, threshold=float(operand),
                              missing_goes=LEFT if miss_left else RIGHT)
    else:
        cond = SplitCondition(feature, CATEGORICAL_EQ, category=str(operand),
                              missing_goes=LEFT if miss_left else RIGHT)
    return SplitChoice(cond, score, idx[left_mask], idx[~left_mask])


def _scan_numeric(y, w, col, min_leaf):
    present = ~np.isnan(col)
    pv = col[present]
    if len(pv) < 2:
        return None
    order = np.argsort(pv, kind="stable")
    sv = pv[order]
    cuts = np.nonzero(sv[:-1] != sv[1:])[0]
    if len(cuts) == 0:
        return None
    py = y[present][order]
    n_miss = int((~present).sum())
    a_miss = int(y[~present].sum())
    b_miss = n_miss - a_miss

    nL_present = cuts + 1
    nR_present = len(pv) - nL_present
    miss_left = nL_present > nR_present  # per-candidate routing of missing rows

    if w is None:
        cum1 = np.cumsum(py)
        aL = cum1[cuts]
        bL = nL_present - aL
        aR = int(py.sum()) - aL
        bR = nR_present - aR
        aL2 = aL + np.where(miss_left, a_miss, 0)
        bL2 = bL + np.where(miss_left, b_miss, 0)
        aR2 = aR + np.where(miss_left, 0, a_miss)
        bR2 = bR + np.where(miss_left, 0, b_miss)
        score = _score_candidates(aL2, bL2, aR2, bR2)
        nL_total = nL_present + np.where(miss_left, n_miss, 0)
    else:
        pw = w[present][order]
        wa_miss = float(w[~present][y[~present] == 1].sum())
        wb_miss = float(w[~present][y[~present] == 0].sum())
        cum_a = np.cumsum(pw * py)
        cum_w = np.cumsum(pw)
        waL = cum_a[cuts]
        wbL = cum_w[cuts] - waL
        waR = float((pw * py).sum()) - waL
        wbR = float(pw.sum()) - cum_w[cuts] - waR
        score = _score_candidates_weighted(
            waL + np.where(miss_left, wa_miss, 0.0),
            wbL + np.where(miss_left, wb_miss, 0.0),
            waR + np.where(miss_left, 0.0, wa_miss),
            wbR + np.where(miss_left, 0.0, wb_miss))
        nL_total = nL_present + np.where(miss_left, n_miss, 0)

    nR_total = len(col) - nL_total
    score[(nL_total < min_leaf) | (nR_total < min_leaf)] = -np.inf
    k = int(np.argmax(score))
    if not np.isfinite(score[k]):
        return None
    threshold = (sv[cuts[k]] + sv[cuts[k] + 1]) / 2.0
    left_mask = col < threshold
    if miss_left[k]:
        left_mask |= ~present
    return float(score[k]), float(threshold), left_mask, bool(miss_left[k])


def _scan_categorical(y, w, codes, categories, min_leaf):
    present = codes >= 0
    best = None
    for code, cat in enumerate(categories):
        eq = codes == code
        nL_present = int(eq.sum())
        nR_present = int(present.sum()) - nL_present
        if nL_present == 0 or nR_present == 0:
            continue
        miss_left = nL_present > nR_present
        left_mask = eq | ~present if miss_left else eq
        nL = int(left_mask.sum())
        nR = len(codes) - nL
        if nL < min_leaf or nR < min_leaf:
            continue
        yl = y[left_mask]
        if w is None:
            aL = int(yl.sum()); bL = nL - aL
            aR = int(y.sum()) - aL; bR = nR - aR
            score = float(_score_candidates(
                np.array([aL]), np.array([bL]), np.array([aR]), np.array([bR]))[0])
        else:
            wl = w[left_mask]
            waL = float(wl[yl == 1].sum()); wbL = float(wl[yl == 0].sum())
            waT = float(w[y == 1].sum()); wbT = float(w[y == 0].sum())
            score = float(_score_candidates_weighted(
                np.array([waL]), np.array([wbL]),
                np.array([waT - waL]), np.array([wbT - wbL]))[0])
        if best is None or score > best[0]:
            best = (score, cat, left_mask, miss_left)
    return best
