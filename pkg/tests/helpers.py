"""Shared test fixtures and independent oracles."""

import numpy as np

from ocmeta.data import TaskDataset
from ocmeta.rng import Rng


def auc_brute_force(scores, labels):
    """O(n^2) pairwise AUC: P(out-of-distribution sample outscores an
    in-distribution one), ties 0.5. Independent of the rank implementation."""
    out = [float(s) for s, y in zip(scores, labels) if y == -1]
    ins = [float(s) for s, y in zip(scores, labels) if y == 1]
    total = 0.0
    for o in out:
        for i in ins:
            if o > i:
                total += 1.0
            elif o == i:
                total += 0.5
    return total / (len(out) * len(ins))


def toy_tasks(n_tasks=3, dim=4, per_class=24, spread=6.0, seed=11):
    """Small, well-separated in-memory task pool for fast training tests."""
    rng = Rng(seed)
    tasks = []
    for t in range(n_tasks):
        mean = np.zeros(dim)
        mean[t % dim] = spread * (1 + t // dim)
        own = mean + rng.gaussian_matrix(per_class, dim)
        other = -mean + rng.gaussian_matrix(per_class, dim)
        tasks.append(
            TaskDataset(
                task_id=f"toy{t}",
                features=np.concatenate([own, other]),
                labels=np.concatenate(
                    [np.ones(per_class, dtype=np.int64), -np.ones(per_class, dtype=np.int64)]
                ),
            )
        )
    return tasks


def identity_encoder(dim):
    """Encoder with no hidden layers and an identity final map: encode(x) = x."""
    from ocmeta.mlp import EncoderConfig, EncoderParams

    params = EncoderParams(hidden=[], final_w=np.eye(dim), final_b=None)
    config = EncoderConfig(input_dim=dim, hidden_dims=(), latent_dim=dim)
    return params, config
