"""Deterministic k-means with k-means++ seeding.

Small and self-contained so that clustering is bit-reproducible under a
fixed seed across library versions; corpora here are a few hundred vectors.
"""

from __future__ import annotations

import numpy as np


def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]), dtype=np.float64)
    centers[0] = X[rng.integers(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[i] = X[rng.integers(n)]
        else:
            centers[i] = X[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((X - centers[i]) ** 2, axis=1))
    return centers


def kmeans(
    X: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = 300,
    rel_tol: float = 1e-6,
) -> np.ndarray:
    """Cluster rows of X into k groups; returns the label vector."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k={k} must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_init(X, k, rng)
    prev_inertia = np.inf
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        inertia = d2[np.arange(n), labels].sum()
        for j in range(k):
            mask = labels == j
            if mask.any():
                centers[j] = X[mask].mean(axis=0)
            else:
                # re-seed an empty cluster on the point farthest from its center
                centers[j] = X[d2[np.arange(n), labels].argmax()]
        if prev_inertia - inertia <= rel_tol * max(prev_inertia, 1e-12):
            break
        prev_inertia = inertia
    return labels
