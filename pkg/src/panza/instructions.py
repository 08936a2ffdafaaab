"""Reverse Instructions: turn each training email into a synthetic instruction.

An external chat-completions backend summarizes every train-split email into
an imperative instruction; the (instruction, email) pairs become the
fine-tuning dataset.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .ingest import Email
from .llm_client import BackendError, GenerationParams, LlmClient, LlmEndpointConfig
from .prompts import build_summarization_prompt

INSTRUCTION_MARKER = "Instruction:"

# sampling settings for summarization calls; same values the gateway uses
SUMMARIZATION_PARAMS = GenerationParams(temperature=0.7, top_p=0.7, top_k=50)


@dataclass
class InstructionPair:
    email_id: str
    instruction: str
    email_body: str

    def to_json(self) -> dict:
        return {
            "email_id": self.email_id,
            "instruction": self.instruction,
            "email_body": self.email_body,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InstructionPair":
        return cls(obj["email_id"], obj["instruction"], obj["email_body"])


def extract_instruction(response: str) -> str:
    """Strip everything up to and including the first "Instruction:" marker.

    If the marker is absent the whole trimmed response is the instruction.
    """
    idx = response.find(INSTRUCTION_MARKER)
    if idx != -1:
        response = response[idx + len(INSTRUCTION_MARKER) :]
    return response.strip()


def generate_instruction(email: Email, client: LlmClient) -> str:
    """Summarize one email into an instruction. Raises BackendError on failure."""
    prompt = build_summarization_prompt(email.body)
    response = client.chat(prompt, SUMMARIZATION_PARAMS)
    instruction = extract_instruction(response)
    if not instruction:
        raise BackendError("backend returned an empty instruction")
    if email.body in instruction:
        raise BackendError("degenerate summarization: instruction contains the email verbatim")
    return instruction


def build_pairs(
    corpus: list[Email], cfg: LlmEndpointConfig
) -> tuple[list[InstructionPair], list[dict]]:
    """Summarize every email in input order with bounded parallelism.

    Failures are soft: |pairs| + |failures| == |corpus|.
    """
    client = LlmClient(cfg)
    if corpus:
        client.check_reachable()

    def worker(email: Email):
        try:
            return generate_instruction(email, client), None
        except (BackendError, ValueError) as exc:
            return None, str(exc)

    pairs: list[InstructionPair] = []
    failures: list[dict] = []
    with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
        results = list(pool.map(worker, corpus))
    for email, (instruction, reason) in zip(corpus, results):
        if instruction is not None:
            pairs.append(InstructionPair(email.id, instruction, email.body))
        else:
            failures.append({"email_id": email.id, "reason": reason})
    return pairs, failures


def evaluate_summaries(
    golden: list[tuple[str, str]], generated: list[InstructionPair]
) -> dict:
    """Score generated instructions against golden ones with BLEU / ROUGE-L F1."""
    from .metrics.text import bleu, rouge_l_f1, tokenize

    golden_by_id = dict(golden)
    generated_by_id = {p.email_id: p.instruction for p in generated}
    shared = [i for i in generated_by_id if i in golden_by_id]
    if not shared:
        raise ValueError("golden and generated share no email ids")
    per_pair = []
    for eid in shared:
        cand = tokenize(generated_by_id[eid])
        ref = tokenize(golden_by_id[eid])
        per_pair.append({
            "email_id": eid,
            "bleu": bleu(cand, ref),
            "rouge_l_f1": rouge_l_f1(cand, ref),
        })
    return {
        "per_pair": per_pair,
        "mean_bleu": sum(p["bleu"] for p in per_pair) / len(per_pair),
        "mean_rouge_l_f1": sum(p["rouge_l_f1"] for p in per_pair) / len(per_pair),
    }


def write_pairs(pairs: list[InstructionPair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_json(), ensure_ascii=False) + "\n")


def read_pairs(path) -> list[InstructionPair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(InstructionPair.from_json(json.loads(line)))
    return out
