"""Single-file JSON document store with atomic, durable writes.

Both the accounts store and the position-checker store are instances of
this, always on distinct paths. Writers are serialized by a re-entrant
lock; every mutation is flushed and fsynced before the call returns.
"""

from __future__ import annotations

import copy
import json
import os
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, TypeVar

from .errors import ConfigError

T = TypeVar("T")


class JsonFileStore:
    def __init__(self, path: str | Path, schema_version: int = 1) -> None:
        self._path = Path(path)
        self._lock = threading.RLock()
        self._version = schema_version
        self._data = self._load_or_init()

    @property
    def path(self) -> Path:
        return self._path

    def _load_or_init(self) -> dict:
        if self._path.exists():
            with self._path.open("r", encoding="utf-8") as fh:
                data = json.load(fh)
            found = data.get("schema_version")
            if found != self._version:
                raise ConfigError(
                    f"{self._path}: schema_version {found} != expected {self._version}"
                )
            return data
        self._path.parent.mkdir(parents=True, exist_ok=True)
        return {"schema_version": self._version}

    def read(self, fn: Callable[[dict], T]) -> T:
        """Run a read-only function against the document."""
        with self._lock:
            return fn(self._data)

    def snapshot(self) -> dict:
        with self._lock:
            return copy.deepcopy(self._data)

    def update(self, fn: Callable[[dict], T]) -> T:
        """Mutate the document and persist before returning fn's result."""
        with self._lock:
            result = fn(self._data)
            self._flush()
            return result

    def _flush(self) -> None:
        tmp = self._path.with_suffix(self._path.suffix + ".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            json.dump(self._data, fh, indent=2, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._path)

    def serialized(self) -> str:
        """The exact on-disk text (used by separation-invariant checks)."""
        with self._lock:
            return self._path.read_text(encoding="utf-8") if self._path.exists() else ""


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()
