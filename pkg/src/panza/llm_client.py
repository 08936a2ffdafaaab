"""HTTP client for the model backend (chat completions + embeddings).

The backend speaks the common wire format:
  POST {base_url}/v1/chat/completions  -> choices[0].message.content
  POST {base_url}/v1/embeddings        -> data[0].embedding
"""

from __future__ import annotations

import socket
import time
from dataclasses import dataclass
from urllib.parse import urlparse

import numpy as np
import requests


class BackendError(Exception):
    pass


class BackendUnreachable(BackendError):
    pass


@dataclass
class GenerationParams:
    temperature: float = 0.7
    top_p: float = 0.7
    top_k: int = 50
    max_tokens: int = 1024


@dataclass
class LlmEndpointConfig:
    base_url: str
    model_name: str = "default"
    timeout: float = 60.0
    max_parallel: int = 4
    retry_limit: int = 2
    backoff_base: float = 0.5  # seconds; doubles per retry

    def __post_init__(self):
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be >= 0")
        self.base_url = self.base_url.rstrip("/")


class LlmClient:
    def __init__(self, cfg: LlmEndpointConfig):
        self.cfg = cfg
        self._session = requests.Session()

    def check_reachable(self) -> None:
        """Raise BackendUnreachable if a TCP connection cannot be opened."""
        parsed = urlparse(self.cfg.base_url)
        host = parsed.hostname or "localhost"
        port = parsed.port or (443 if parsed.scheme == "https" else 80)
        try:
            with socket.create_connection((host, port), timeout=self.cfg.timeout):
                pass
        except OSError as exc:
            raise BackendUnreachable(f"cannot connect to {self.cfg.base_url}: {exc}") from exc

    def _post(self, path: str, payload: dict) -> dict:
        url = self.cfg.base_url + path
        last_exc = None
        for attempt in range(self.cfg.retry_limit + 1):
            try:
                resp = self._session.post(url, json=payload, timeout=self.cfg.timeout)
                if resp.status_code >= 500:
                    raise BackendError(f"backend returned {resp.status_code}: {resp.text[:200]}")
                resp.raise_for_status()
                return resp.json()
            except (requests.RequestException, BackendError) as exc:
                last_exc = exc
                if attempt < self.cfg.retry_limit:
                    time.sleep(self.cfg.backoff_base * (2**attempt))
        raise BackendError(f"request to {url} failed after {self.cfg.retry_limit} retries: {last_exc}")

    def chat(self, content: str, params: GenerationParams | None = None) -> str:
        params = params or GenerationParams()
        payload = {
            "model": self.cfg.model_name,
            "messages": [{"role": "user", "content": content}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "top_k": params.top_k,
            "max_tokens": params.max_tokens,
        }
        data = self._post("/v1/chat/completions", payload)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed chat response: {data!r}") from exc

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed empty text")
        payload = {"model": self.cfg.model_name, "input": text}
        data = self._post("/v1/embeddings", payload)
        try:
            vec = data["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed embeddings response: {data!r}") from exc
        return np.asarray(vec, dtype=np.float32)
