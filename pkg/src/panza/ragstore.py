"""Vector store over training emails with exact cosine retrieval.

The store is a flat binary file (little-endian: magic, dimension, count,
then fixed-width float32 records) plus a JSONL sidecar mapping email ids to
record indices and carrying the email bodies. Corpora are small (<= ~1000
emails), so retrieval is an exact scan, not an approximate index.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .ingest import SPLIT_TEST, SPLIT_TRAIN, Email
from .llm_client import LlmClient, LlmEndpointConfig

_MAGIC = b"PRAG"
_HEADER = struct.Struct("<4sII")


class StoreError(Exception):
    pass


@dataclass
class RagHit:
    email_id: str
    similarity: float
    body: str


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise StoreError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise StoreError("cosine of zero-norm vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


class RagStore:
    def __init__(self, dim: int | None = None):
        self.dim = dim
        self.ids: list[str] = []
        self.bodies: list[str] = []
        self._vectors: list[np.ndarray] = []

    def __len__(self) -> int:
        return len(self.ids)

    def insert(self, email_id: str, vector: np.ndarray, body: str) -> None:
        vec = np.asarray(vector, dtype=np.float32)
        if vec.ndim != 1:
            raise StoreError("vector must be one-dimensional")
        if self.dim is None:
            self.dim = vec.shape[0]
        elif vec.shape[0] != self.dim:
            raise StoreError(f"vector dimension {vec.shape[0]} != store dimension {self.dim}")
        if np.linalg.norm(vec) == 0:
            raise StoreError(f"zero vector rejected for email {email_id}")
        if email_id in self.ids:
            raise StoreError(f"duplicate email id {email_id}")
        self.ids.append(email_id)
        self.bodies.append(body)
        self._vectors.append(vec)

    def retrieve_by_vector(
        self,
        query: np.ndarray,
        n_rag: int,
        t_rag: float,
        exclude_id: str | None = None,
    ) -> list[RagHit]:
        """Exact top-n_rag by cosine, filtered by similarity >= t_rag.

        Ties break by email id ascending; exclude_id is removed before ranking.
        """
        if not self.ids:
            raise StoreError("store is empty")
        if n_rag < 1:
            raise StoreError("n_rag must be >= 1")
        scored = []
        for eid, body, vec in zip(self.ids, self.bodies, self._vectors):
            if eid == exclude_id:
                continue
            scored.append((cosine(query, vec), eid, body))
        scored.sort(key=lambda t: (-t[0], t[1]))
        hits = [RagHit(eid, sim, body) for sim, eid, body in scored[:n_rag] if sim >= t_rag]
        return hits

    def save(self, path: str) -> None:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, self.dim or 0, len(self.ids)))
            for vec in self._vectors:
                fh.write(vec.astype("<f4").tobytes())
        with open(sidecar_path(path), "w", encoding="utf-8") as fh:
            for i, (eid, body) in enumerate(zip(self.ids, self.bodies)):
                fh.write(json.dumps({"email_id": eid, "index": i, "body": body},
                                    ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str) -> "RagStore":
        with open(path, "rb") as fh:
            magic, dim, count = _HEADER.unpack(fh.read(_HEADER.size))
            if magic != _MAGIC:
                raise StoreError(f"{path} is not a rag store file")
            raw = fh.read(count * dim * 4)
        vectors = np.frombuffer(raw, dtype="<f4").reshape(count, dim) if count else np.zeros((0, dim))
        store = cls(dim=dim)
        with open(sidecar_path(path), encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                store.ids.append(rec["email_id"])
                store.bodies.append(rec["body"])
                store._vectors.append(np.array(vectors[rec["index"]]))
        if len(store.ids) != count:
            raise StoreError(f"sidecar lists {len(store.ids)} records, header says {count}")
        return store


def sidecar_path(path: str) -> str:
    return str(path) + ".meta.jsonl"


def embed(text: str, client: LlmClient, expected_dim: int | None = None) -> np.ndarray:
    if not text:
        raise ValueError("cannot embed empty text")
    vec = client.embed(text)
    if expected_dim is not None and vec.shape[0] != expected_dim:
        raise StoreError(f"backend embedding dimension {vec.shape[0]} != store dimension {expected_dim}")
    return vec


def index_corpus(corpus: list[Email], cfg: LlmEndpointConfig) -> RagStore:
    """Embed the train split into a fresh store. Test emails never enter it."""
    train = [e for e in corpus if e.split == SPLIT_TRAIN]
    if not train:
        raise StoreError("no train-split emails to index")
    client = LlmClient(cfg)
    store = RagStore()
    for email in train:
        store.insert(email.id, embed(email.body, client, store.dim), email.body)
    test_ids = {e.id for e in corpus if e.split == SPLIT_TEST}
    assert not test_ids & set(store.ids), "test-split email leaked into the RAG store"
    return store


def retrieve(
    query: str,
    store: RagStore,
    cfg: LlmEndpointConfig,
    n_rag: int,
    t_rag: float,
    exclude_id: str | None = None,
) -> list[RagHit]:
    client = LlmClient(cfg)
    return store.retrieve_by_vector(embed(query, client, store.dim), n_rag, t_rag, exclude_id)
