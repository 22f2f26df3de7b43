"""Cache for standard bases: an in-memory map plus an optional directory.

Disk entries are JSON files named by the hash of the canonical ideal key and
hold the canonical serialized basis.  Writes go through a temp file and an
atomic rename, so concurrent duplicate computation is harmless.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Optional


class BasisCache:
    def __init__(self, directory: Optional[str] = None, enabled: bool = True):
        self.enabled = enabled
        self.directory = directory
        self._mem: dict[str, list[str]] = {}
        if enabled and directory:
            os.makedirs(directory, exist_ok=True)

    @staticmethod
    def digest(key: str) -> str:
        return hashlib.sha256(key.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, self.digest(key) + ".json")

    def get(self, key: str) -> Optional[list[str]]:
        if not self.enabled:
            return None
        if key in self._mem:
            return self._mem[key]
        if self.directory:
            path = self._path(key)
            if os.path.exists(path):
                try:
                    with open(path, "r", encoding="utf-8") as fh:
                        obj = json.load(fh)
                except (OSError, json.JSONDecodeError):
                    return None
                if obj.get("key") != key:
                    return None  # hash collision or foreign file
                value = list(obj["basis"])
                self._mem[key] = value
                return value
        return None

    def put(self, key: str, value: list[str]) -> None:
        if not self.enabled:
            return
        self._mem[key] = list(value)
        if self.directory:
            payload = json.dumps({"key": key, "basis": list(value)}, indent=1)
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(payload)
                os.replace(tmp, self._path(key))
            except OSError:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass


def cache_from_environment(no_cache: bool = False) -> BasisCache:
    """Cache configured from GERMLAB_CACHE_DIR; memory-only when unset."""
    if no_cache:
        return BasisCache(enabled=False)
    return BasisCache(directory=os.environ.get("GERMLAB_CACHE_DIR") or None)
