import math
import random

import pytest

from oracles import oracle_bleu, oracle_rouge_l_f1
from panza.metrics.text import bleu, rouge_l_f1, tokenize


class TestTokenize:
    def test_punctuation_dropped(self):
        assert tokenize("Hi, Bob!") == ["hi", "bob"]

    def test_empty(self):
        assert tokenize("") == []

    def test_apostrophe_is_punctuation(self):
        assert tokenize("Don't stop") == ["dont", "stop"]

    def test_unicode_punctuation(self):
        assert tokenize("“Hello” — world…") == ["hello", "world"]

    def test_deterministic(self):
        text = "A messy, e-mail; with 3 numbers!"
        assert tokenize(text) == tokenize(text)


class TestBleu:
    def test_identity(self):
        toks = "the quick brown fox jumps".split()
        assert bleu(toks, toks) == pytest.approx(1.0)

    def test_clipping(self):
        # p1 clipped to 1/4, higher n-grams 0 -> score 0
        assert bleu("the the the the".split(), "the cat sat down".split()) == 0.0

    def test_twelve_token_fixture_matches_oracle(self):
        cand = "i will send the final report to you by friday this week".split()
        ref = "i will send you the final report by the end of friday".split()
        assert bleu(cand, ref) == pytest.approx(oracle_bleu(cand, ref), abs=1e-9)

    def test_short_candidate_scores_zero(self):
        assert bleu(["a", "b", "c"], ["a", "b", "c"]) == 0.0

    def test_empty_inputs(self):
        assert bleu([], []) == 0.0
        assert bleu(["a"], []) == 0.0
        assert bleu([], ["a"]) == 0.0

    def test_brevity_penalty(self):
        cand = "a b c d".split()
        ref = "a b c d e f g h".split()
        # all precisions 1 (4/4, 3/3, 2/2, 1/1); bp = exp(1 - 8/4)
        assert bleu(cand, ref) == pytest.approx(math.exp(-1.0))

    def test_precision_pattern_hand_computed(self):
        # permutation pair with clipped precisions exactly (1, 1, 1/2, 1/3)
        cand = list("abaccb")
        ref = list("accbab")
        assert bleu(cand, ref) == pytest.approx((1 * 1 * 0.5 * (1 / 3)) ** 0.25, abs=1e-9)

    def test_range(self):
        rnd = random.Random(7)
        vocab = "a b c d e".split()
        for _ in range(50):
            cand = [rnd.choice(vocab) for _ in range(rnd.randint(1, 12))]
            ref = [rnd.choice(vocab) for _ in range(rnd.randint(1, 12))]
            assert 0.0 <= bleu(cand, ref) <= 1.0


class TestRougeL:
    def test_identity(self):
        toks = "hello world again".split()
        assert rouge_l_f1(toks, toks) == pytest.approx(1.0)

    def test_disjoint(self):
        assert rouge_l_f1("a b c".split(), "x y z".split()) == 0.0

    def test_hand_lcs(self):
        # LCS(a b c d, a c b d) = 3 -> P = R = F1 = 0.75
        assert rouge_l_f1(list("abcd"), list("acbd")) == pytest.approx(0.75)

    def test_empty(self):
        assert rouge_l_f1([], ["a"]) == 0.0
        assert rouge_l_f1(["a"], []) == 0.0

    def test_symmetry(self):
        rnd = random.Random(3)
        vocab = "a b c d".split()
        for _ in range(30):
            x = [rnd.choice(vocab) for _ in range(rnd.randint(1, 10))]
            y = [rnd.choice(vocab) for _ in range(rnd.randint(1, 10))]
            assert rouge_l_f1(x, y) == pytest.approx(rouge_l_f1(y, x))


class TestOracleParity:
    def test_100_random_pairs_exact(self):
        rnd = random.Random(1234)
        vocab = "a b c d e f g h".split()
        for _ in range(100):
            cand = [rnd.choice(vocab) for _ in range(rnd.randint(1, 30))]
            ref = [rnd.choice(vocab) for _ in range(rnd.randint(1, 30))]
            assert bleu(cand, ref) == oracle_bleu(cand, ref)
            assert rouge_l_f1(cand, ref) == oracle_rouge_l_f1(cand, ref)
