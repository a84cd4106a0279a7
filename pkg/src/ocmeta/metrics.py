"""Detection quality metrics.

AUC is the probability that a uniformly random out-of-distribution (-1)
sample scores strictly higher than a uniformly random in-distribution (+1)
sample, with ties counted 0.5 — the Mann-Whitney statistic. Higher score =
more anomalous; the out-of-distribution class is detection-positive.
"""

import numpy as np

from .errors import DataError, DimensionError


def average_ranks(values):
    """1-based ranks with ties sharing their average rank."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        # ranks i+1..j+1 collapse to their average
        avg = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def auc(scores, labels):
    """Rank-based AUC; equals the O(n^2) pairwise definition exactly because
    ranks are half-integers whose sums are exact in float64."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape[0] != labels.shape[0]:
        raise DimensionError(
            f"auc: {scores.shape[0]} scores vs {labels.shape[0]} labels"
        )
    if not np.all(np.isin(labels, (1, -1))):
        raise DataError("auc: labels must be +1 or -1")
    out_mask = labels == -1
    n_out = int(np.count_nonzero(out_mask))
    n_in = scores.shape[0] - n_out
    if n_out == 0 or n_in == 0:
        raise DataError("auc: need at least one sample of each class")
    ranks = average_ranks(scores)
    r_out = float(np.sum(ranks[out_mask]))
    u = r_out - n_out * (n_out + 1) / 2.0
    return u / (n_out * n_in)
