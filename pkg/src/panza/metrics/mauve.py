"""MAUVE-style similarity between two sets of embeddings.

Both sets are jointly quantized with k-means; the score is the area under
the monotone envelope of the divergence frontier, the curve of
(exp(-c*KL(Q||R)), exp(-c*KL(P||R))) over mixtures R = lam*P + (1-lam)*Q.
Higher means more similar; identical inputs score exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kmeans import kmeans

SMOOTHING_EPS = 1e-9
DEFAULT_SCALE = 5.0
DEFAULT_GRID_SIZE = 25
MAX_CLUSTERS = 500


@dataclass
class DivergenceCurve:
    points: list  # (x, y) pairs over the lambda grid, augmented for area
    c: float
    lambda_grid: list

    def to_json(self) -> dict:
        return {
            "points": [[float(x), float(y)] for x, y in self.points],
            "c": self.c,
            "lambda_grid": [float(l) for l in self.lambda_grid],
        }


def default_cluster_count(n_p: int, n_q: int) -> int:
    return min(max(2, (n_p + n_q) // 10), MAX_CLUSTERS)


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) in nats for strictly positive histograms."""
    return float(np.sum(p * np.log(p / q)))


def _histograms(labels: np.ndarray, n_p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    p_hist = np.bincount(labels[:n_p], minlength=k).astype(np.float64)
    q_hist = np.bincount(labels[n_p:], minlength=k).astype(np.float64)
    p_hist = p_hist / p_hist.sum() + SMOOTHING_EPS
    q_hist = q_hist / q_hist.sum() + SMOOTHING_EPS
    return p_hist / p_hist.sum(), q_hist / q_hist.sum()


def _frontier_area(points: list) -> float:
    """Area under the monotone (non-increasing) envelope via trapezoid rule."""
    pts = sorted(points)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    ys = np.maximum.accumulate(ys[::-1])[::-1]  # suffix max: y non-increasing in x
    trapezoid = getattr(np, "trapezoid", np.trapz)
    return float(trapezoid(ys, xs))


def mauve(
    p_vecs: np.ndarray,
    q_vecs: np.ndarray,
    k: int | None = None,
    c: float = DEFAULT_SCALE,
    grid_size: int = DEFAULT_GRID_SIZE,
    seed: int = 0,
) -> tuple[float, DivergenceCurve]:
    p_vecs = np.asarray(p_vecs, dtype=np.float64)
    q_vecs = np.asarray(q_vecs, dtype=np.float64)
    if p_vecs.ndim != 2 or q_vecs.ndim != 2 or p_vecs.shape[1] != q_vecs.shape[1]:
        raise ValueError("p_vecs and q_vecs must be 2-D with a shared dimension")
    n_p, n_q = len(p_vecs), len(q_vecs)
    if k is None:
        k = default_cluster_count(n_p, n_q)
    if n_p < k or n_q < k:
        raise ValueError(
            f"need at least k={k} samples on each side (got {n_p} and {n_q}); "
            "pass a smaller k"
        )
    X = np.vstack([p_vecs, q_vecs])
    # canonicalize row order so the score is invariant to input permutation
    order = np.lexsort(X.T)
    labels = np.empty(len(X), dtype=np.int64)
    labels[order] = kmeans(X[order], k, seed)
    p_hist, q_hist = _histograms(labels, n_p, k)

    lambdas = np.arange(1, grid_size + 1) / (grid_size + 1)
    if np.array_equal(p_hist, q_hist):
        # zero divergence everywhere; avoid rounding drift in the mixture
        points = [(1.0, 1.0)] * grid_size
    else:
        points = []
        for lam in lambdas:
            r = lam * p_hist + (1 - lam) * q_hist
            x = np.exp(-c * kl_divergence(q_hist, r))
            y = np.exp(-c * kl_divergence(p_hist, r))
            points.append((float(x), float(y)))
    augmented = [(0.0, 1.0)] + points + [(1.0, 0.0)]
    score = min(1.0, max(0.0, _frontier_area(augmented)))
    curve = DivergenceCurve(points=augmented, c=c, lambda_grid=list(lambdas))
    return score, curve
