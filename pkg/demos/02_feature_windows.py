"""Windowed feature extraction.

Churn: one fixed 3-month feature window, labels from the following months.
Win-back: each churner gets its own window, the 3 months before its
termination month. Test matrices reuse the training window's column names
so one model applies across windows.
"""

from churnforge import (GeneratorConfig, extract_churn, extract_winback, generate,
                        standard_windows)

ds = generate(GeneratorConfig(seed=11, n_consumers=1500, n_smes=100,
                              churn_rate=0.12, winback_rate=0.3))

for task in ("churn", "winback"):
    for role in ("train", "test"):
        w = standard_windows(task, role)
        if task == "churn":
            span = f"features {w.feature_months[0]}..{w.feature_months[-1]}"
        else:
            span = f"terminations {w.termination_range[0]}..{w.termination_range[1]}"
        print(f"{task:8s} {role:5s}: {span}, labels {w.label_months[0]}..{w.label_months[-1]}")

w_train = standard_windows("churn", "train")
train = extract_churn(ds, w_train)
test = extract_churn(ds, standard_windows("churn", "test"),
                     naming_months=w_train.feature_months)
print(f"\nchurn train: {train.n_rows} rows, positives {int(train.labels.sum())}")
print(f"churn test:  {test.n_rows} rows, positives {int(test.labels.sum())}")
print(f"schemas match across roles: {train.feature_names == test.feature_names}")
print("feature columns:")
for name in train.feature_names:
    print(f"  {name} ({train.kinds[name]})")

w = standard_windows("winback", "train")
wb = extract_winback(ds, w.termination_range, w.label_months)
print(f"\nwin-back train: {wb.n_rows} churners, comebacks {int(wb.labels.sum())}")
print("monthly columns are positional (DL_M1..DL_M3) because windows are per-subscriber")
