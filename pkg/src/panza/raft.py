"""Retrieval-augmented fine-tuning (RAFT) emission.

Assembles full training prompts (preambles + probabilistic RAG block +
instruction) and writes trainer-ready JSONL plus a flat key=value trainer
config. Fine-tuning itself is an external trainer's job.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .instructions import InstructionPair
from .prompts import PromptAssembly, assemble_prompt, build_rag_preamble
from .ragstore import RagStore


class RaftError(Exception):
    pass


@dataclass
class RaftParams:
    """RAG-during-training knobs. Training defaults; inference uses n_rag=3."""

    p_rag: float = 0.55
    n_rag: int = 2
    t_rag: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_rag <= 1.0:
            raise RaftError("p_rag must be in [0, 1]")
        if self.n_rag < 1:
            raise RaftError("n_rag must be >= 1")


@dataclass
class TrainerConfig:
    method: str = "rosa"  # fft | rosa | lora
    learning_rate: float = 1e-5
    batch_size: int = 8
    epochs: Optional[int] = None  # None -> method default (5, or 3 for fft)

    def __post_init__(self):
        if self.method not in ("fft", "rosa", "lora"):
            raise RaftError(f"unknown method {self.method!r}")
        if self.epochs is None:
            self.epochs = 3 if self.method == "fft" else 5
        if self.epochs <= 0:
            raise RaftError("epochs must be > 0")
        if self.learning_rate <= 0:
            raise RaftError("learning_rate must be > 0")
        if self.batch_size <= 0:
            raise RaftError("batch_size must be > 0")


@dataclass
class TrainingExample:
    email_id: str
    prompt: str
    completion: str
    rag_included: bool
    rag_ids: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "email_id": self.email_id,
            "prompt": self.prompt,
            "completion": self.completion,
            "rag_included": self.rag_included,
            "rag_ids": self.rag_ids,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainingExample":
        return cls(obj["email_id"], obj["prompt"], obj["completion"],
                   obj["rag_included"], obj["rag_ids"])


def inclusion_draw(seed: int, email_id: str) -> float:
    """Uniform[0,1) draw for one example, seeded by (seed, hash(email_id)).

    Per-example seeding keeps draws stable when pairs are added or removed.
    """
    digest = hashlib.sha256(email_id.encode("utf-8")).digest()
    id_hash = int.from_bytes(digest[:8], "little")
    return float(np.random.default_rng([seed, id_hash]).random())


def emit_training_set(
    pairs: list[InstructionPair],
    store: RagStore,
    params: RaftParams,
    system_preamble: str,
    user_preamble: str,
    embed_fn: Callable[[str], np.ndarray],
) -> tuple[list[TrainingExample], dict]:
    """Build one training example per pair, with a p_rag chance of RAG context.

    Retrieval always excludes the pair's own email; any hit equal to the
    target is a leak and aborts the run.
    """
    examples = []
    with_rag = 0
    for pair in pairs:
        rag_block: Optional[str] = None
        rag_ids: list[str] = []
        if len(store) and inclusion_draw(params.seed, pair.email_id) < params.p_rag:
            hits = store.retrieve_by_vector(
                embed_fn(pair.instruction),
                params.n_rag,
                params.t_rag,
                exclude_id=pair.email_id,
            )
            if any(h.email_id == pair.email_id for h in hits):
                raise RaftError(f"retrieval leaked the target email {pair.email_id}")
            if hits:
                rag_block = build_rag_preamble([h.body for h in hits])
                rag_ids = [h.email_id for h in hits]
        prompt = assemble_prompt(PromptAssembly(
            system_preamble=system_preamble,
            user_preamble=user_preamble,
            instruction=pair.instruction,
            rag_block=rag_block,
        ))
        included = rag_block is not None
        with_rag += included
        examples.append(TrainingExample(
            email_id=pair.email_id,
            prompt=prompt,
            completion=pair.email_body,
            rag_included=included,
            rag_ids=rag_ids,
        ))
    manifest = {
        "total": len(examples),
        "with_rag": with_rag,
        "without_rag": len(examples) - with_rag,
        "params": {
            "p_rag": params.p_rag,
            "n_rag": params.n_rag,
            "t_rag": params.t_rag,
            "seed": params.seed,
        },
    }
    return examples, manifest


def write_training_set(examples: list[TrainingExample], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")


def read_training_set(path) -> list[TrainingExample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(TrainingExample.from_json(json.loads(line)))
    return out


def emit_trainer_config(cfg: TrainerConfig, path) -> None:
    """Write the external trainer's flat key=value config file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f'method = "{cfg.method}"\n')
        fh.write(f"learning_rate = {cfg.learning_rate}\n")
        fh.write(f"batch_size = {cfg.batch_size}\n")
        fh.write(f"epochs = {cfg.epochs}\n")
