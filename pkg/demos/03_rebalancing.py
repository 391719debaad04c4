"""Imbalance correction by sampling.

Undersampling keeps all minority rows and a random majority subset of the
same size: small and fast, used for model comparison. Repeating
oversampling copies minority rows up to the majority count: keeps all
information, used to retrain the chosen model.
"""

import numpy as np

from churnforge import (GeneratorConfig, extract_churn, generate, oversample,
                        standard_windows, undersample)

ds = generate(GeneratorConfig(seed=11, n_consumers=1500, n_smes=100, churn_rate=0.12))
matrix = extract_churn(ds, standard_windows("churn", "train"))

n1 = int(matrix.labels.sum())
print(f"extracted: {matrix.n_rows} rows, {n1} churners "
      f"(imbalance 1:{(matrix.n_rows - n1) / n1:.0f})")

under = undersample(matrix, seed=5)
print(f"undersampled: {under.n_rows} rows, "
      f"{int(under.labels.sum())} churners + {int((under.labels == 0).sum())} stayers")

over = oversample(matrix, seed=5)
counts = {}
for i in np.nonzero(over.labels == 1)[0]:
    counts[over.billing_ids[i]] = counts.get(over.billing_ids[i], 0) + 1
print(f"oversampled: {over.n_rows} rows; each churner row repeated "
      f"{min(counts.values())} or {max(counts.values())} times")
print(f"determinism: {undersample(matrix, 5) == under}")
