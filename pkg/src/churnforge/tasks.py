"""The seven prediction problems and the file-based pipeline steps.

Problems 1-3 cover consumers (churn, loyalty, win-back); 4-7 cover SMEs
split by service mix. "Loyal" problems reuse the churn extraction and
model of their sibling problem but rank ascending (least likely to churn).
Each step reads and writes files under the configured directories, so
steps can run as separate processes.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

from .data import TelcoDataset, read_tables, write_tables
from .evaluation import compare_learners, confusion, rank_features, select_best
from .features import (FeatureMatrix, extract_churn, extract_winback,
                       read_matrix, standard_windows, write_matrix)
from .generator import GeneratorConfig, generate
from .learners import ALGORITHMS, LearnerSpec, predict_matrix, train
from .model_io import load_model, save_model
from .months import Month
from .rebalance import oversample, undersample


@dataclass(frozen=True)
class TaskSpec:
    problem_id: int
    segment: str                 # consumer | sme
    service_type: str | None     # None = any
    task: str                    # churn | winback
    direction: str               # descending = most likely, ascending = most loyal

    @property
    def is_loyal(self) -> bool:
        return self.direction == "ascending"


TASKS = {
    1: TaskSpec(1, "consumer", None, "churn", "descending"),
    2: TaskSpec(2, "consumer", None, "churn", "ascending"),
    3: TaskSpec(3, "consumer", None, "winback", "descending"),
    4: TaskSpec(4, "sme", "voice", "churn", "descending"),
    5: TaskSpec(5, "sme", "voice", "churn", "ascending"),
    6: TaskSpec(6, "sme", "voice_broadband", "churn", "descending"),
    7: TaskSpec(7, "sme", "voice_broadband", "churn", "ascending"),
}


def filter_dataset(dataset: TelcoDataset, task: TaskSpec) -> TelcoDataset:
    """Restrict to billing accounts in the task's segment that own at least
    one service of the required type; qualifying accounts keep all their
    services so labels still see every termination."""
    qualifying = {
        s.billing_id for s in dataset.subscribers
        if s.segment == task.segment
        and (task.service_type is None or s.service_type == task.service_type)
    }
    subscribers = [s for s in dataset.subscribers if s.billing_id in qualifying]
    customers = {s.customer_id for s in subscribers}
    return TelcoDataset(
        subscribers=subscribers,
        billing=[r for r in dataset.billing if r.billing_id in qualifying],
        usage=[r for r in dataset.usage if r.billing_id in qualifying],
        service_requests=[r for r in dataset.service_requests if r.customer_id in customers],
    )


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_DEFAULT_LEARNERS = "stump,cart,adtree,bayes,bagging,forest,adaboost"

_LEARNER_DEFAULTS = {
    "stump": {},
    "cart": {"max_depth": 6},
    "adtree": {"n_boost_rounds": 10},
    "bayes": {},
    "bagging": {"n_trees": 15, "max_depth": 6},
    "forest": {"n_trees": 25, "max_depth": 8},
    "adaboost": {"n_boost_rounds": 20, "base_algorithm": "stump"},
}

_INT_SPEC_KEYS = {"max_depth", "min_leaf", "n_trees", "n_boost_rounds",
                  "features_per_split", "seed"}


@dataclass
class PipelineConfig:
    data_dir: str = "data"
    out_dir: str = "out"
    task_id: int = 1
    seed: int = 42
    k_folds: int = 10
    top_n: int | None = None
    learners: list[str] = field(default_factory=lambda: _DEFAULT_LEARNERS.split(","))
    learner_overrides: dict[str, dict] = field(default_factory=dict)
    final_learner: str | None = None
    n_consumers: int = 6000
    n_smes: int = 400  # 15:1 default ratio
    churn_rate: float = 0.08
    winback_rate: float = 0.15
    signal_strength: float = 0.8
    months_start: str = "2011-01"
    months_end: str = "2011-12"

    @property
    def task(self) -> TaskSpec:
        if self.task_id not in TASKS:
            raise ValueError(f"task must be 1..7, got {self.task_id}")
        return TASKS[self.task_id]

    def learner_specs(self) -> list[LearnerSpec]:
        specs = []
        for name in self.learners:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown learner {name!r} (choose from {', '.join(ALGORITHMS)})")
            kwargs = dict(_LEARNER_DEFAULTS[name])
            kwargs.update(self.learner_overrides.get(name, {}))
            specs.append(LearnerSpec(algorithm=name, seed=self.seed, **kwargs))
        return specs

    def spec_for(self, name: str) -> LearnerSpec:
        for spec in self.learner_specs():
            if spec.display_name == name:
                return spec
        raise ValueError(f"learner {name!r} is not in the configured list")

    def generator_config(self) -> GeneratorConfig:
        return GeneratorConfig(
            seed=self.seed, n_consumers=self.n_consumers, n_smes=self.n_smes,
            churn_rate=self.churn_rate, winback_rate=self.winback_rate,
            months_start=Month.parse(self.months_start),
            months_end=Month.parse(self.months_end),
            signal_strength=self.signal_strength)

    def path(self, suffix: str) -> str:
        return os.path.join(self.out_dir, f"task{self.task_id}_{suffix}")


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key=value format; '#' starts a comment, blank lines ignored."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def build_config(file_values: dict[str, str], **overrides) -> PipelineConfig:
    cfg = PipelineConfig()
    scalar = {
        "data_dir": str, "out_dir": str, "task": int, "seed": int, "k_folds": int,
        "top_n": int, "final_learner": str, "n_consumers": int, "n_smes": int,
        "churn_rate": float, "winback_rate": float, "signal_strength": float,
        "months_start": str, "months_end": str,
    }
    renames = {"task": "task_id"}
    for key, raw in file_values.items():
        if key == "learners":
            cfg.learners = [part.strip() for part in raw.split(",") if part.strip()]
        elif key in scalar:
            setattr(cfg, renames.get(key, key), scalar[key](raw))
        elif "." in key:
            algo, param = key.split(".", 1)
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown learner in config key {key!r}")
            value: object = raw
            if param in _INT_SPEC_KEYS:
                value = int(raw)
            elif param == "bootstrap":
                value = raw.lower() in ("1", "true", "yes")
            cfg.learner_overrides.setdefault(algo, {})[param] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg


# ---------------------------------------------------------------------------
# pipeline steps
# ---------------------------------------------------------------------------

def cmd_generate(cfg: PipelineConfig) -> str:
    dataset = generate(cfg.generator_config())
    write_tables(dataset, cfg.data_dir)
    churners = sum(1 for s in dataset.subscribers if s.termination_date is not None)
    return (f"wrote {len(dataset.subscribers)} subscribers "
            f"({churners} churners) to {cfg.data_dir}")


def _windows(task: TaskSpec, role: str):
    return standard_windows(task.task, role)


def _extract(dataset: TelcoDataset, task: TaskSpec, role: str) -> FeatureMatrix:
    window = _windows(task, role)
    if task.task == "churn":
        # test matrices reuse the training window's column names so the
        # trained model applies position-for-position
        naming = standard_windows(task.task, "train").feature_months
        return extract_churn(dataset, window, naming_months=naming)
    return extract_winback(dataset, window.termination_range, window.label_months)


def cmd_extract(cfg: PipelineConfig) -> str:
    dataset = filter_dataset(read_tables(cfg.data_dir), cfg.task)
    os.makedirs(cfg.out_dir, exist_ok=True)
    shapes = []
    for role in ("train", "test"):
        matrix = _extract(dataset, cfg.task, role)
        write_matrix(matrix, cfg.path(f"{role}.csv"))
        shapes.append(f"{role}: {matrix.n_rows} rows")
    return f"task {cfg.task_id} extracted ({'; '.join(shapes)})"


def cmd_compare(cfg: PipelineConfig) -> str:
    matrix = read_matrix(cfg.path("train.csv"))
    balanced = undersample(matrix, cfg.seed + 1)
    report = compare_learners(balanced, cfg.learner_specs(), cfg.k_folds, cfg.seed + 3)
    with open(cfg.path("comparison.csv"), "w", encoding="utf-8", newline="") as f:
        csv.writer(f, lineterminator="\n").writerows(report.to_csv_rows())
    with open(cfg.path("comparison.txt"), "w", encoding="utf-8", newline="") as f:
        f.write(report.render_text())
    best = select_best(report)
    with open(cfg.path("best.txt"), "w", encoding="utf-8", newline="") as f:
        f.write(best + "\n")
    return f"task {cfg.task_id} best learner: {best}"


def _final_model_path(cfg: PipelineConfig, algorithm: str) -> str:
    return cfg.path("model.adt" if algorithm == "adtree" else "model.cfm")


def _read_best(cfg: PipelineConfig) -> str:
    path = cfg.path("best.txt")
    if cfg.final_learner:
        return cfg.final_learner
    if not os.path.exists(path):
        raise ValueError(f"no final_learner configured and {path} not found; run compare first")
    with open(path, encoding="utf-8") as f:
        return f.read().strip()


def cmd_train_final(cfg: PipelineConfig) -> str:
    matrix = read_matrix(cfg.path("train.csv"))
    balanced = oversample(matrix, cfg.seed + 2)
    name = _read_best(cfg)
    model = train(balanced, cfg.spec_for(name))
    path = _final_model_path(cfg, name)
    save_model(model, path)
    return f"task {cfg.task_id} retrained {name} on {balanced.n_rows} rows -> {path}"


def _load_final_model(cfg: PipelineConfig):
    for suffix in ("model.adt", "model.cfm"):
        path = cfg.path(suffix)
        if os.path.exists(path):
            return load_model(path)
    raise ValueError(f"no model file for task {cfg.task_id} under {cfg.out_dir}; "
                     "run train-final first")


def rank_predictions(billing_ids: list[str], scores, direction: str,
                     top_n: int | None) -> list[tuple[str, float]]:
    """Order candidates by churn score (ties by billing id); ascending order
    serves the "most loyal" problems."""
    sign = 1.0 if direction == "ascending" else -1.0
    order = sorted(range(len(billing_ids)), key=lambda i: (sign * scores[i], billing_ids[i]))
    if top_n is not None:
        order = order[:top_n]
    return [(billing_ids[i], float(scores[i])) for i in order]


def cmd_predict(cfg: PipelineConfig, holdout: bool = False) -> str:
    model = _load_final_model(cfg)
    matrix = read_matrix(cfg.path("test.csv"))
    scores, predicted = predict_matrix(model, matrix)
    top_n = cfg.top_n if cfg.top_n is not None else 100
    ranked = rank_predictions(matrix.billing_ids, scores, cfg.task.direction, top_n)
    with open(cfg.path("predictions.csv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["billing_id", "score", "rank"])
        for rank, (billing_id, score) in enumerate(ranked, start=1):
            w.writerow([billing_id, repr(score), rank])
    message = f"task {cfg.task_id} wrote {len(ranked)} predictions"
    if holdout:
        if matrix.labels is None:
            raise ValueError("--holdout requires a labeled test matrix")
        cm = confusion(matrix.labels, predicted)
        with open(cfg.path("holdout.txt"), "w", encoding="utf-8", newline="") as f:
            f.write(f"tp={cm.tp} fp={cm.fp} tn={cm.tn} fn={cm.fn}\n")
            for metric in ("prec_1", "prec_0", "accuracy"):
                v = getattr(cm, metric)
                f.write(f"{metric}={'n/a' if v is None else f'{v:.2f}'}\n")
        message += " (holdout metrics written)"
    return message


def cmd_rank_features(cfg: PipelineConfig) -> str:
    matrix = read_matrix(cfg.path("train.csv"))
    top_n = cfg.top_n if cfg.top_n is not None else 15
    ranking = rank_features(matrix, top_n)
    with open(cfg.path("feature_ranking.csv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["rank", "feature", "info_gain"])
        for rank, (name, gain) in enumerate(ranking, start=1):
            w.writerow([rank, name, repr(gain)])
    return f"task {cfg.task_id} ranked top {len(ranking)} features"
