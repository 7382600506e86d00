"""Content-addressed artifact persistence for the CLI and service.

Artifacts are immutable JSON documents named by the hash of their canonical
serialization, so storing the same payload twice is a no-op and ids are
stable across processes.  An index file maps ids to kind and payload path;
all writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from .common import canonical_json_bytes, content_id
from .errors import ValidationError

KINDS = ("instance", "solution", "scenario")


@dataclass(frozen=True)
class StoredArtifact:
    id: str
    kind: str
    created_at: float
    path: str  # relative to the store root


class ArtifactStore:
    def __init__(self, root) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.json"
        self._lock = threading.Lock()
        self._index: Dict[str, dict] = {}
        if self._index_path.exists():
            with open(self._index_path, "r", encoding="utf-8") as fh:
                self._index = json.load(fh).get("artifacts", {})

    def _write_atomic(self, path: Path, data: bytes) -> None:
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def _flush_index(self) -> None:
        payload = json.dumps({"artifacts": self._index}, indent=1, sort_keys=True)
        self._write_atomic(self._index_path, payload.encode("utf-8"))

    def put(self, kind: str, payload: dict) -> str:
        if kind not in KINDS:
            raise ValidationError(f"unknown artifact kind {kind!r}")
        data = canonical_json_bytes(payload)
        artifact_id = content_id(payload)
        with self._lock:
            entry = self._index.get(artifact_id)
            if entry is not None:
                if entry["kind"] != kind:
                    raise ValidationError(
                        f"artifact {artifact_id} already stored as {entry['kind']!r}"
                    )
                return artifact_id
            rel = f"{kind}/{artifact_id}.json"
            full = self.root / rel
            full.parent.mkdir(parents=True, exist_ok=True)
            self._write_atomic(full, data)
            self._index[artifact_id] = {
                "kind": kind,
                "created_at": time.time(),
                "path": rel,
            }
            self._flush_index()
        return artifact_id

    def meta(self, artifact_id: str) -> Optional[StoredArtifact]:
        entry = self._index.get(artifact_id)
        if entry is None:
            return None
        return StoredArtifact(artifact_id, entry["kind"], entry["created_at"], entry["path"])

    def kind_of(self, artifact_id: str) -> Optional[str]:
        entry = self._index.get(artifact_id)
        return None if entry is None else entry["kind"]

    def get(self, artifact_id: str) -> Optional[dict]:
        entry = self._index.get(artifact_id)
        if entry is None:
            return None
        with open(self.root / entry["path"], "r", encoding="utf-8") as fh:
            return json.load(fh)

    def ids(self, kind: Optional[str] = None) -> List[str]:
        with self._lock:
            items = sorted(
                (entry["created_at"], aid)
                for aid, entry in self._index.items()
                if kind is None or entry["kind"] == kind
            )
        return [aid for _, aid in items]
