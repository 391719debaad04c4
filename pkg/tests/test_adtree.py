import itertools
import math

import numpy as np
import pytest

from churnforge import extract_churn, rank_features, standard_windows, train_adtree, undersample
from conftest import make_matrix, random_adtree, random_adtree_row


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def _evaluate(cond, value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    if cond.kind == "numeric_lt":
        return value < cond.threshold
    return value == cond.category


def path_enumeration_score(model, row):
    """Collect the value of every prediction node whose path the row
    satisfies (missing feature = path stops), then fsum."""
    values = []

    def visit(pred):
        values.append(pred.value)
        for sp in pred.splitters:
            verdict = _evaluate(sp.condition, row.get(sp.condition.feature))
            if verdict is None:
                continue
            visit(sp.yes if verdict else sp.no)

    visit(model.root)
    return math.fsum(values)


def z_oracle_round1(matrix):
    """Brute-force first-round splitter: enumerate every candidate, apply
    the Z criterion, strict-min with the documented tie order (feature
    name, then threshold). Statistics accumulate in value-sorted stable row
    order, the module's documented canonical accumulation order."""
    y = np.asarray(matrix.labels, dtype=np.int64)
    ypm = np.where(y == 1, 1.0, -1.0)
    n1, n0 = int(y.sum()), int(len(y) - y.sum())
    a0 = 0.5 * math.log((n1 + 1) / (n0 + 1))
    w = np.exp(-ypm * a0)
    total = float(w.sum())
    best = None
    for feature in sorted(matrix.feature_names):
        col = np.asarray(matrix.columns[feature], dtype=np.float64)
        order = np.argsort(col, kind="stable")
        sv, sy, sw = col[order], y[order], w[order]
        cum1 = np.cumsum(np.where(sy == 1, sw, 0.0))
        cum0 = np.cumsum(np.where(sy == 0, sw, 0.0))
        for i in range(len(sv) - 1):
            if sv[i] == sv[i + 1]:
                continue
            w1y, w0y = cum1[i], cum0[i]
            w1n, w0n = cum1[-1] - w1y, cum0[-1] - w0y
            z = 2.0 * (np.sqrt(w1y * w0y) + np.sqrt(w1n * w0n)) + (total - (cum1[-1] + cum0[-1]))
            threshold = (sv[i] + sv[i + 1]) / 2.0
            if best is None or z < best[0]:
                best = (z, feature, threshold)
    return None if best is None else (best[1], best[2])


def z_oracle_round1_counts(matrix):
    """Fully order-independent variant for balanced labels, where every
    weight is exactly 1.0 and sums are exact integer-valued floats."""
    y = np.asarray(matrix.labels, dtype=np.int64)
    best = None
    for feature in sorted(matrix.feature_names):
        col = np.asarray(matrix.columns[feature], dtype=np.float64)
        for threshold in sorted({(a + b) / 2.0 for a, b in
                                 zip(sorted(set(col)), sorted(set(col))[1:])}):
            yes = col < threshold
            w1y = float(((y == 1) & yes).sum())
            w0y = float(((y == 0) & yes).sum())
            w1n = float((y == 1).sum()) - w1y
            w0n = float((y == 0).sum()) - w0y
            z = 2.0 * (np.sqrt(w1y * w0y) + np.sqrt(w1n * w0n))
            if best is None or z < best[0]:
                best = (z, feature, threshold)
    return None if best is None else (best[1], best[2])


def _first_splitter(model):
    for sp in model.root.splitters:
        if sp.index == 1:
            return sp
    for sp in model.iter_splitters():
        if sp.index == 1:
            return sp
    return None


# ---------------------------------------------------------------------------
# training behaviour
# ---------------------------------------------------------------------------

def test_zero_rounds_balanced_gives_zero_scores():
    m = make_matrix({"x": [1.0, 2.0, 3.0, 4.0]}, labels=[0, 0, 1, 1])
    model = train_adtree(m, n_boost_rounds=0)
    assert model.root.value == 0.0
    assert model.root.splitters == []
    assert all(model.score_row(m.row(i)) == 0.0 for i in range(4))


def test_zero_rounds_imbalanced_scores_prior():
    m = make_matrix({"x": [1.0, 2.0, 3.0, 4.0]}, labels=[1, 1, 1, 0])
    model = train_adtree(m, n_boost_rounds=0)
    assert model.root.value == pytest.approx(0.5 * math.log(4 / 2))


def test_single_round_separable_hand_bookkeeping():
    m = make_matrix({"x": [1.0, 2.0, 3.0, 4.0]}, labels=[0, 0, 1, 1])
    model = train_adtree(m, n_boost_rounds=1)
    sp = model.root.splitters[0]
    assert sp.condition.feature == "x"
    assert sp.condition.threshold == 2.5
    # balanced start: all weights 1; yes side = {two class-0 rows}
    # a_yes = 0.5*ln((0+1)/(2+1)), a_no = 0.5*ln((2+1)/(0+1))
    assert sp.yes.value == pytest.approx(0.5 * math.log(1 / 3))
    assert sp.no.value == pytest.approx(0.5 * math.log(3))
    assert sp.yes.value < 0 < sp.no.value
    assert model.predict_row({"x": 1.0}) == 0
    assert model.predict_row({"x": 4.0}) == 1


def test_round1_matches_z_oracle_exhaustively():
    rows = list(itertools.product([0.0, 1.0], repeat=3))
    columns = {"f0": [r[0] for r in rows], "f1": [r[1] for r in rows],
               "f2": [r[2] for r in rows]}
    checked = balanced_checked = 0
    for labels in itertools.product([0, 1], repeat=8):
        if sum(labels) in (0, 8):
            continue
        m = make_matrix(dict(columns), labels=list(labels))
        model = train_adtree(m, n_boost_rounds=1)
        sp = _first_splitter(model)
        expected = z_oracle_round1(m)
        assert (sp.condition.feature, sp.condition.threshold) == expected
        checked += 1
        if sum(labels) == 4:
            assert (sp.condition.feature,
                    sp.condition.threshold) == z_oracle_round1_counts(m)
            balanced_checked += 1
    assert checked == 254 and balanced_checked == 70


def test_round1_matches_z_oracle_on_random_12row_data():
    rng = np.random.default_rng(21)
    for _ in range(120):
        n = int(rng.integers(4, 13))
        labels = rng.integers(0, 2, n).tolist()
        if sum(labels) in (0, n):
            continue
        m = make_matrix(
            {"a": rng.integers(0, 4, n).astype(float).tolist(),
             "b": rng.integers(0, 2, n).astype(float).tolist()},
            labels=labels)
        model = train_adtree(m, n_boost_rounds=1)
        sp = _first_splitter(model)
        if sp is None:
            assert z_oracle_round1(m) is None
            continue
        assert (sp.condition.feature, sp.condition.threshold) == z_oracle_round1(m)


def test_scores_finite_and_exp_loss_monotone(planted_dataset):
    m = undersample(extract_churn(planted_dataset, standard_windows("churn", "train")), 3)
    model = train_adtree(m, n_boost_rounds=12)
    scores = model.score_matrix(m)
    assert np.isfinite(scores).all()
    totals = model.weight_totals
    assert len(totals) == 13
    for prev, cur in zip(totals, totals[1:]):
        assert cur <= prev * (1 + 1e-12)
    # the boosting objective (total weight = exponential loss) must actually shrink
    assert totals[-1] < totals[0]


def test_exp_loss_monotone_on_random_noise():
    rng = np.random.default_rng(9)
    m = make_matrix(
        {"a": rng.normal(size=80).tolist(), "b": rng.normal(size=80).tolist()},
        labels=rng.integers(0, 2, 80).tolist())
    model = train_adtree(m, n_boost_rounds=8)
    for prev, cur in zip(model.weight_totals, model.weight_totals[1:]):
        assert cur <= prev * (1 + 1e-12)


def test_missing_feature_contributes_nothing():
    m = make_matrix({"x": [1.0, 2.0, 3.0, 4.0], "z": [0.0, 1.0, 0.0, 1.0]},
                    labels=[0, 0, 1, 1])
    model = train_adtree(m, n_boost_rounds=2)
    full = model.score_row({"x": 4.0, "z": 1.0})
    # removing a feature only removes contributions along its paths
    no_x = model.score_row({"z": 1.0})
    assert no_x != full
    assert model.score_row({}) == model.root.value


def test_constant_features_stop_training_early():
    m = make_matrix({"x": [1.0, 1.0, 1.0, 1.0]}, labels=[0, 1, 0, 1])
    model = train_adtree(m, n_boost_rounds=4)
    assert model.splitter_count() == 0


def test_score_matches_path_enumeration_oracle_exactly():
    rng = np.random.default_rng(10)
    pairs = 0
    for _ in range(40):
        model = random_adtree(rng, n_splitters=int(rng.integers(1, 25)))
        for _ in range(25):
            row = random_adtree_row(rng)
            assert model.score_row(row) == path_enumeration_score(model, row)
            pairs += 1
    assert pairs == 1000


def test_matrix_and_row_scoring_agree():
    rng = np.random.default_rng(11)
    m = make_matrix(
        {"a": rng.normal(size=60).round(2).tolist(),
         "b": rng.normal(size=60).round(2).tolist()},
        labels=rng.integers(0, 2, 60).tolist())
    model = train_adtree(m, n_boost_rounds=6)
    batch = model.score_matrix(m)
    for i in range(m.n_rows):
        assert batch[i] == pytest.approx(model.score_row(m.row(i)), abs=1e-9)


def test_training_deterministic(planted_dataset):
    from churnforge.model_io import model_to_dict
    m = undersample(extract_churn(planted_dataset, standard_windows("churn", "train")), 3)
    assert model_to_dict(train_adtree(m, 6)) == model_to_dict(train_adtree(m, 6))


def test_scale_robustness_structure_equivalent():
    """Scaling a numeric feature by a power of two (exact in binary floats)
    rescales thresholds but leaves the boosted structure and prediction
    values identical."""
    rng = np.random.default_rng(13)
    base = {"a": rng.integers(0, 30, 60).astype(float).tolist(),
            "b": rng.integers(0, 10, 60).astype(float).tolist()}
    labels = rng.integers(0, 2, 60).tolist()
    model = train_adtree(make_matrix(dict(base), labels=labels), n_boost_rounds=6)
    for factor in (0.5, 4.0, 1024.0):
        scaled = make_matrix({"a": [v * factor for v in base["a"]], "b": list(base["b"])},
                             labels=labels)
        other = train_adtree(scaled, n_boost_rounds=6)
        for sp, sp2 in zip(model.iter_splitters(), other.iter_splitters()):
            assert sp.index == sp2.index
            assert sp.condition.feature == sp2.condition.feature
            expected = sp.condition.threshold * (factor if sp.condition.feature == "a" else 1.0)
            assert sp2.condition.threshold == expected
            assert sp2.yes.value == sp.yes.value and sp2.no.value == sp.no.value


def test_splitter_features_rank_highly(planted_dataset):
    """Boosted splitters should pick from the same features an independent
    single-split information-gain ranking puts near the top."""
    m = undersample(extract_churn(planted_dataset, standard_windows("churn", "train")), 3)
    model = train_adtree(m, n_boost_rounds=10)
    ranked = [name for name, _ in rank_features(m, 12)]
    top_level = {sp.condition.feature for sp in model.root.splitters}
    assert top_level, "expected at least one top-level splitter"
    assert top_level <= set(ranked)
