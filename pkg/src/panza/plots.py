"""Figure rendering for evaluation reports (written next to the data files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics.mauve import DivergenceCurve


def plot_divergence_curve(curve: DivergenceCurve, score: float, out_path: str) -> None:
    pts = sorted(curve.points)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(xs, ys, marker="o", markersize=3, lw=1.5)
    ax.fill_between(xs, ys, alpha=0.15)
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("exp(-c KL(Q || R))")
    ax.set_ylabel("exp(-c KL(P || R))")
    ax.set_title(f"Divergence frontier (MAUVE = {score:.3f})")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_style_matrix(users: list[str], matrix: np.ndarray, out_path: str) -> None:
    fig, ax = plt.subplots(figsize=(1.2 * len(users) + 2, 1.0 * len(users) + 2))
    im = ax.imshow(matrix, vmin=0, vmax=1, cmap="viridis")
    ax.set_xticks(range(len(users)), users, rotation=45, ha="right")
    ax.set_yticks(range(len(users)), users)
    ax.set_xlabel("reference user")
    ax.set_ylabel("model user")
    for i in range(len(users)):
        for j in range(len(users)):
            val = matrix[i, j]
            ax.text(j, i, f"{val:.2f}", ha="center", va="center",
                    color="white" if val < 0.5 else "black", fontsize=9)
    fig.colorbar(im, ax=ax, label="MAUVE")
    ax.set_title("Cross-user style matrix")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
