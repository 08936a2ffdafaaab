import numpy as np
import pytest

from panza.ingest import Email
from panza.metrics.report import MetricReport, evaluate, style_matrix
from stub_backend import stub_embed


def make_refs(texts):
    return [Email(id=f"e{i}", subject="s", body=t) for i, t in enumerate(texts)]


def disjoint_texts(prefix, n):
    # private per-user vocabulary dominates each text so one user's embeddings
    # form a tight cluster, disjoint from every other user's
    base = " ".join(f"{prefix}word{w}" for w in range(8))
    return [f"{base} {prefix}extra{j}" for j in range(n)]


class TestEvaluate:
    def test_identity_scores(self):
        texts = [f"hello friend number {i} see you soon" for i in range(20)]
        refs = make_refs(texts)
        cands = [(e.id, e.body) for e in refs]
        report = evaluate(cands, refs, stub_embed, k=2, seed=0)
        assert report.mean_bleu == pytest.approx(1.0)
        assert report.mean_rouge == pytest.approx(1.0)
        assert report.mauve == pytest.approx(1.0, abs=1e-9)

    def test_hand_oracle_three_emails(self):
        from oracles import oracle_bleu, oracle_rouge_l_f1
        from panza.metrics.text import tokenize

        refs = make_refs([
            "please send me the report by friday morning thanks",
            "the meeting moved to tuesday at three in room four",
            "happy birthday hope you have a wonderful day ahead",
        ])
        cands = [
            ("e0", "please send the report by friday thanks a lot"),
            ("e1", "our meeting moved to tuesday at three in room four"),
            ("e2", "happy birthday hope you have a wonderful day ahead"),
        ]
        report = evaluate(cands, refs, stub_embed, k=2, seed=0)
        for (eid, b, r), (cid, text) in zip(report.per_email, cands):
            assert eid == cid
            ref_toks = tokenize(next(e.body for e in refs if e.id == eid))
            assert b == pytest.approx(oracle_bleu(tokenize(text), ref_toks))
            assert r == pytest.approx(oracle_rouge_l_f1(tokenize(text), ref_toks))
        assert report.mean_bleu == pytest.approx(
            sum(b for _, b, _ in report.per_email) / 3)

    def test_empty_candidates_error(self):
        with pytest.raises(ValueError, match="empty"):
            evaluate([], make_refs(["a"]), stub_embed)

    def test_unknown_id_error(self):
        with pytest.raises(ValueError, match="unknown"):
            evaluate([("ghost", "hi")], make_refs(["a"]), stub_embed, k=2)

    def test_plausible_band(self):
        report = MetricReport([], mean_bleu=0.25, mean_rouge=0.3, mauve=0.8,
                              curve=None, mauve_params={})
        assert report.plausible
        report.mean_bleu = 0.2
        assert not report.plausible
        report.mean_bleu = 0.25
        report.mauve = 0.75
        assert not report.plausible

    def test_report_json_shape(self):
        refs = make_refs([f"note {i} about project alpha" for i in range(10)])
        cands = [(e.id, e.body) for e in refs]
        obj = evaluate(cands, refs, stub_embed, k=2, seed=0).to_json()
        assert set(obj) == {"per_email", "mean_bleu", "mean_rouge_l_f1", "mauve",
                            "plausible", "mauve_params", "curve"}
        assert len(obj["per_email"]) == 10


class TestStyleMatrix:
    def test_disjoint_users_diagonal_dominant(self):
        refs = {u: disjoint_texts(u, 12) for u in ("alice", "bob", "carol")}
        gens = {u: disjoint_texts(u, 12) for u in ("alice", "bob", "carol")}
        out = style_matrix(gens, refs, stub_embed, k=2, seed=0)
        assert out["users"] == ["alice", "bob", "carol"]
        m = out["matrix"]
        assert np.diag(m).min() > 0.9
        assert m[~np.eye(3, dtype=bool)].max() < 0.1
        assert out["diagonal_dominant"]

    def test_missing_user_error(self):
        refs = {"alice": disjoint_texts("a", 4)}
        gens = {"alice": disjoint_texts("a", 4), "bob": disjoint_texts("b", 4)}
        with pytest.raises(ValueError, match="bob"):
            style_matrix(gens, refs, stub_embed, k=2)

    def test_single_user(self):
        texts = disjoint_texts("a", 6)
        out = style_matrix({"a": texts}, {"a": list(texts)}, stub_embed, k=2)
        assert out["matrix"].shape == (1, 1)
        assert out["diagonal_dominant"]
