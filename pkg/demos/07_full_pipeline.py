"""The seven prediction problems, end to end through the file-based steps.

Equivalent CLI session:

    churnforge generate      --config pipeline.cfg
    churnforge extract       --config pipeline.cfg --task 1
    churnforge compare       --config pipeline.cfg --task 1
    churnforge train-final   --config pipeline.cfg --task 1
    churnforge predict       --config pipeline.cfg --task 1 --top-n 20
    churnforge rank-features --config pipeline.cfg --task 1
"""

import tempfile

from churnforge.tasks import (TASKS, build_config, cmd_compare, cmd_extract,
                              cmd_generate, cmd_predict, cmd_rank_features,
                              cmd_train_final)

print("the seven prediction problems:")
for n, task in TASKS.items():
    flavor = "most loyal" if task.is_loyal else ("win-back" if task.task == "winback"
                                                 else "likely churners")
    service = task.service_type or "any service"
    print(f"  {n}. {task.segment:8s} {service:15s} -> {flavor}")

with tempfile.TemporaryDirectory() as tmp:
    cfg = build_config({
        "data_dir": f"{tmp}/data",
        "out_dir": f"{tmp}/out",
        "seed": "42",
        "k_folds": "5",
        "learners": "stump,cart,bayes,forest",
        "n_consumers": "1500",
        "n_smes": "150",
        "churn_rate": "0.2",
        "top_n": "20",
        "forest.n_trees": "10",
    })
    import os
    os.makedirs(cfg.out_dir, exist_ok=True)

    print(f"\n* {cmd_generate(cfg)}")
    for task_id in (1, 2):
        cfg.task_id = task_id
        print(f"* {cmd_extract(cfg)}")
        print(f"* {cmd_compare(cfg)}")
        print(f"* {cmd_train_final(cfg)}")
        print(f"* {cmd_predict(cfg, holdout=True)}")
        print(f"* {cmd_rank_features(cfg)}")

    churn = open(f"{tmp}/out/task1_predictions.csv").read().splitlines()
    loyal = open(f"{tmp}/out/task2_predictions.csv").read().splitlines()
    print("\nmost likely churners (task 1):      most loyal consumers (task 2):")
    for a, b in zip(churn[1:6], loyal[1:6]):
        print(f"  {a:34s}  {b}")
