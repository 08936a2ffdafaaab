"""Run manifests: a small JSON record written next to every command's output."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone


def config_hash(params: dict) -> str:
    canonical = json.dumps(params, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


class RunManifest:
    def __init__(self, command: str, params: dict,
                 input_paths: list, output_paths: list):
        self.command = command
        self.params = params
        self.input_paths = [str(p) for p in input_paths]
        self.output_paths = [str(p) for p in output_paths]
        self.started_at = datetime.now(timezone.utc)
        self.counts: dict = {}

    def write(self, path: str) -> None:
        """Atomic write: rename a temp file into place."""
        payload = {
            "command": self.command,
            "config_hash": config_hash(self.params),
            "params": self.params,
            "input_paths": self.input_paths,
            "output_paths": self.output_paths,
            "started_at": self.started_at.isoformat(),
            "finished_at": datetime.now(timezone.utc).isoformat(),
            "counts": self.counts,
        }
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, default=str)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def manifest_path(out_path: str) -> str:
    return str(out_path) + ".manifest.json"
