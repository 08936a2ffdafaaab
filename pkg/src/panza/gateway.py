"""HTTP gateway: instruction in, generated email out.

One gateway instance serves one persona (one user preamble, one RAG store).
It assembles the full prompt, forwards it to the chat-completions backend
with the fixed sampling parameters, and returns the model text untouched.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import requests
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .llm_client import GenerationParams, LlmClient, LlmEndpointConfig
from .prompts import SYSTEM_PREAMBLE, PromptAssembly, assemble_prompt, build_rag_preamble
from .ragstore import RagStore

log = logging.getLogger("panza.gateway")

INFERENCE_N_RAG = 3


@dataclass
class GatewayConfig:
    backend: LlmEndpointConfig
    user_preamble: str = ""
    rag_store_path: Optional[str] = None
    n_rag: int = INFERENCE_N_RAG
    t_rag: float = 0.2
    generation: GenerationParams = field(default_factory=GenerationParams)
    listen_address: str = "127.0.0.1:5000"
    cors_origins: list = field(default_factory=lambda: ["*"])

    def apply_env_overrides(self) -> "GatewayConfig":
        backend_url = os.environ.get("PANZA_BACKEND_URL")
        if backend_url:
            self.backend.base_url = backend_url.rstrip("/")
        listen = os.environ.get("PANZA_LISTEN_ADDR")
        if listen:
            self.listen_address = listen
        return self


class GenerateRequest(BaseModel):
    instruction: str
    use_rag: Optional[bool] = None


def create_app(config: GatewayConfig) -> FastAPI:
    config.apply_env_overrides()
    client = LlmClient(config.backend)
    store = RagStore.load(config.rag_store_path) if config.rag_store_path else None

    app = FastAPI(title="panza-gateway")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/api/generate")
    def generate(req: GenerateRequest):
        if not req.instruction.strip():
            return JSONResponse(status_code=400, content={"error": "empty instruction"})
        use_rag = req.use_rag if req.use_rag is not None else store is not None
        started = time.monotonic()
        rag_block = None
        rag_ids: list[str] = []
        try:
            if use_rag and store is not None:
                hits = store.retrieve_by_vector(
                    client.embed(req.instruction), config.n_rag, config.t_rag
                )
                if hits:
                    rag_block = build_rag_preamble([h.body for h in hits])
                    rag_ids = [h.email_id for h in hits]
            prompt = assemble_prompt(PromptAssembly(
                system_preamble=SYSTEM_PREAMBLE,
                user_preamble=config.user_preamble,
                instruction=req.instruction,
                rag_block=rag_block,
            ))
            email = _call_backend(client, prompt, config.generation)
        except requests.Timeout:
            return JSONResponse(status_code=504, content={"error": "backend_timeout"})
        except BackendHttpError as exc:
            log.error("backend error %s: %s", exc.status, exc.body[:500])
            return JSONResponse(status_code=502, content={"error": "backend_error",
                                                          "backend_status": exc.status})
        except requests.RequestException as exc:
            log.error("backend unreachable: %s", exc)
            return JSONResponse(status_code=502, content={"error": "backend_unreachable"})
        latency_ms = int((time.monotonic() - started) * 1000)
        return {"email": email, "rag_ids": rag_ids, "latency_ms": latency_ms}

    @app.get("/api/health")
    def health():
        backend_ok = True
        try:
            _call_backend(client, "ping", GenerationParams(max_tokens=1))
        except Exception:
            backend_ok = False
        return {
            "status": "ok" if backend_ok else "degraded",
            "store_size": len(store) if store is not None else 0,
            "backend_ok": backend_ok,
        }

    return app


class BackendHttpError(Exception):
    def __init__(self, status: int, body: str):
        super().__init__(f"backend returned {status}")
        self.status = status
        self.body = body


def _call_backend(client: LlmClient, prompt: str, params: GenerationParams) -> str:
    """Single chat call without client-side retries; HTTP errors surface as-is."""
    resp = requests.post(
        client.cfg.base_url + "/v1/chat/completions",
        json={
            "model": client.cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "top_k": params.top_k,
            "max_tokens": params.max_tokens,
        },
        timeout=client.cfg.timeout,
    )
    if resp.status_code >= 500:
        raise BackendHttpError(resp.status_code, resp.text)
    resp.raise_for_status()
    return resp.json()["choices"][0]["message"]["content"]


def run(config: GatewayConfig) -> None:
    import uvicorn

    host, _, port = config.listen_address.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or 5000))
