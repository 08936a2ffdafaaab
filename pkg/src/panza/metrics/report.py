"""Corpus-level evaluation: per-email BLEU / ROUGE-L, corpus MAUVE, and the
cross-user style matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .mauve import DEFAULT_GRID_SIZE, DEFAULT_SCALE, DivergenceCurve, mauve
from .text import bleu, rouge_l_f1, tokenize

# score interpretation band: emails above these were judged plausible by humans
PLAUSIBLE_BLEU = 0.2
PLAUSIBLE_MAUVE = 0.75

EmbedFn = Callable[[str], np.ndarray]


@dataclass
class MetricReport:
    per_email: list  # (email_id, bleu, rouge_l_f1)
    mean_bleu: float
    mean_rouge: float
    mauve: float
    curve: DivergenceCurve
    mauve_params: dict

    @property
    def plausible(self) -> bool:
        return self.mean_bleu > PLAUSIBLE_BLEU and self.mauve > PLAUSIBLE_MAUVE

    def to_json(self) -> dict:
        return {
            "per_email": [
                {"email_id": eid, "bleu": b, "rouge_l_f1": r}
                for eid, b, r in self.per_email
            ],
            "mean_bleu": self.mean_bleu,
            "mean_rouge_l_f1": self.mean_rouge,
            "mauve": self.mauve,
            "plausible": self.plausible,
            "mauve_params": self.mauve_params,
            "curve": self.curve.to_json(),
        }


def evaluate(
    candidates: Sequence[tuple[str, str]],
    references: Sequence,
    embed_fn: EmbedFn,
    k: int | None = None,
    c: float = DEFAULT_SCALE,
    grid_size: int = DEFAULT_GRID_SIZE,
    seed: int = 0,
) -> MetricReport:
    """Score (email_id, text) candidates against their reference emails.

    BLEU/ROUGE-L are per email against the matching reference body; MAUVE is
    computed once over the embeddings of all candidates vs all references.
    """
    if not candidates:
        raise ValueError("empty candidate set")
    ref_by_id = {e.id: e.body for e in references}
    missing = [eid for eid, _ in candidates if eid not in ref_by_id]
    if missing:
        raise ValueError(f"candidates reference unknown email ids: {missing[:5]}")

    per_email = []
    for eid, text in candidates:
        cand = tokenize(text)
        ref = tokenize(ref_by_id[eid])
        per_email.append((eid, bleu(cand, ref), rouge_l_f1(cand, ref)))

    cand_vecs = np.stack([embed_fn(text) for _, text in candidates])
    ref_vecs = np.stack([embed_fn(ref_by_id[eid]) for eid, _ in candidates])
    score, curve = mauve(ref_vecs, cand_vecs, k=k, c=c, grid_size=grid_size, seed=seed)

    return MetricReport(
        per_email=per_email,
        mean_bleu=sum(b for _, b, _ in per_email) / len(per_email),
        mean_rouge=sum(r for _, _, r in per_email) / len(per_email),
        mauve=score,
        curve=curve,
        mauve_params={"k": k, "c": c, "grid_size": grid_size, "seed": seed},
    )


def style_matrix(
    generations: Mapping[str, Sequence[str]],
    references: Mapping[str, Sequence[str]],
    embed_fn: EmbedFn,
    k: int | None = None,
    c: float = DEFAULT_SCALE,
    grid_size: int = DEFAULT_GRID_SIZE,
    seed: int = 0,
) -> dict:
    """MAUVE of every persona's generations against every persona's references.

    Entry (i, j) scores generations from model i against user j's reference
    emails; diagonal dominance indicates successful personalization.
    """
    users = sorted(references)
    missing = [u for u in users if u not in generations]
    missing += [u for u in generations if u not in references]
    if missing:
        raise ValueError(f"user missing on one side of the matrix: {sorted(set(missing))}")

    gen_vecs = {u: np.stack([embed_fn(t) for t in generations[u]]) for u in users}
    ref_vecs = {u: np.stack([embed_fn(t) for t in references[u]]) for u in users}
    n = len(users)
    matrix = np.zeros((n, n))
    for i, model_user in enumerate(users):
        for j, target_user in enumerate(users):
            score, _ = mauve(gen_vecs[model_user], ref_vecs[target_user],
                             k=k, c=c, grid_size=grid_size, seed=seed)
            matrix[i, j] = score
    diag = np.diag(matrix)
    off = matrix[~np.eye(n, dtype=bool)] if n > 1 else np.array([])
    return {
        "users": users,
        "matrix": matrix,
        "diagonal_dominant": bool(off.size == 0 or diag.min() > off.max()),
    }
