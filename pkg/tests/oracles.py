"""Independent brute-force oracles for the text metrics.

Kept deliberately naive (explicit n-gram enumeration, recursive-style LCS
table) and separate from the library implementations they check.
"""

from __future__ import annotations

import math


def ngram_list(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def oracle_bleu(candidate, reference):
    if not candidate or not reference:
        return 0.0
    precisions = []
    for n in (1, 2, 3, 4):
        cand = ngram_list(candidate, n)
        ref = ngram_list(reference, n)
        if not cand:
            return 0.0
        matched = 0
        for gram in set(cand):
            matched += min(cand.count(gram), ref.count(gram))
        precisions.append(matched / len(cand))
    if any(p == 0 for p in precisions):
        return 0.0
    geo = math.exp(sum(0.25 * math.log(p) for p in precisions))
    if len(candidate) < len(reference):
        geo *= math.exp(1 - len(reference) / len(candidate))
    return geo


def oracle_lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def oracle_rouge_l_f1(candidate, reference):
    if not candidate or not reference:
        return 0.0
    lcs = oracle_lcs(candidate, reference)
    if lcs == 0:
        return 0.0
    p = lcs / len(candidate)
    r = lcs / len(reference)
    return 2 * p * r / (p + r)
