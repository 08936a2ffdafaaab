"""Word-overlap metrics: canonical tokenizer, BLEU, and ROUGE-L F1.

Scores are computed over whole email texts (not per sentence) after
dropping punctuation and lowercasing. BLEU uses equal 0.25 weights over
1-4-grams with no smoothing: any zero precision gives a score of 0, which
keeps low absolute scores honest instead of silently inflating them.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter


def tokenize(text: str) -> list[str]:
    """Lowercase, strip Unicode punctuation (category P*), split on whitespace."""
    stripped = "".join(
        ch for ch in text if not unicodedata.category(ch).startswith("P")
    )
    return stripped.lower().split()


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: list[str], reference: list[str]) -> float:
    """BLEU with clipped 1-4-gram precisions, equal weights, brevity penalty."""
    c, r = len(candidate), len(reference)
    if c == 0 or r == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        cand_counts = _ngram_counts(candidate, n)
        total = sum(cand_counts.values())
        if total == 0:
            return 0.0  # candidate shorter than n tokens
        ref_counts = _ngram_counts(reference, n)
        matched = sum(min(cnt, ref_counts[g]) for g, cnt in cand_counts.items())
        if matched == 0:
            return 0.0  # no smoothing
        log_sum += 0.25 * math.log(matched / total)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * math.exp(log_sum)


def _lcs_length(a: list[str], b: list[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l_f1(candidate: list[str], reference: list[str]) -> float:
    """F1 over the longest common subsequence of the two token sequences."""
    if not candidate or not reference:
        return 0.0
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2 * precision * recall / (precision + recall)
