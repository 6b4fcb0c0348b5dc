"""Write-once object store for video chunks.

Keys follow ``{stream_id}/{start_ts}.svf`` so lexicographic ordering equals
temporal ordering within a stream. Put-then-get returns byte-identical
content; a key is written at most once, ever.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Optional

from .errors import ChunkNotFoundError, DuplicateKeyError


class ChunkStore:
    """Storage contract: write-once put, byte-identical get."""

    def put(self, key: str, data: bytes, metadata: Optional[dict] = None) -> str:
        raise NotImplementedError

    def get(self, key: str) -> bytes:
        raise NotImplementedError

    def get_metadata(self, key: str) -> dict:
        raise NotImplementedError

    def exists(self, key: str) -> bool:
        raise NotImplementedError

    def keys(self, prefix: str = "") -> list[str]:
        raise NotImplementedError


def _check_key(key: str) -> None:
    if not key or key.startswith("/") or ".." in key.split("/"):
        raise ValueError(f"invalid storage key: {key!r}")


class MemoryChunkStore(ChunkStore):
    """Dict-backed store for tests and single-process runs."""

    def __init__(self) -> None:
        self._entries: dict[str, tuple[bytes, dict]] = {}
        self._lock = threading.Lock()

    def put(self, key: str, data: bytes, metadata: Optional[dict] = None) -> str:
        _check_key(key)
        with self._lock:
            if key in self._entries:
                raise DuplicateKeyError(f"key already written: {key}")
            self._entries[key] = (bytes(data), dict(metadata or {}))
        return key

    def get(self, key: str) -> bytes:
        try:
            return self._entries[key][0]
        except KeyError:
            raise ChunkNotFoundError(f"not found: {key}") from None

    def get_metadata(self, key: str) -> dict:
        try:
            return dict(self._entries[key][1])
        except KeyError:
            raise ChunkNotFoundError(f"not found: {key}") from None

    def exists(self, key: str) -> bool:
        return key in self._entries

    def keys(self, prefix: str = "") -> list[str]:
        return sorted(k for k in self._entries if k.startswith(prefix))


class FileChunkStore(ChunkStore):
    """Filesystem store rooted at a directory; keys map to relative paths.

    Write-once is enforced by O_EXCL file creation, so concurrent writers to
    distinct keys never contend and a duplicate key loses deterministically.
    """

    _META_SUFFIX = ".meta.json"

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        _check_key(key)
        return self.root / key

    def put(self, key: str, data: bytes, metadata: Optional[dict] = None) -> str:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(path, "xb") as fh:
                fh.write(data)
        except FileExistsError:
            raise DuplicateKeyError(f"key already written: {key}") from None
        if metadata:
            meta_path = path.with_name(path.name + self._META_SUFFIX)
            meta_path.write_text(json.dumps(metadata, sort_keys=True), "utf-8")
        return key

    def get(self, key: str) -> bytes:
        path = self._path(key)
        try:
            return path.read_bytes()
        except FileNotFoundError:
            raise ChunkNotFoundError(f"not found: {key}") from None

    def get_metadata(self, key: str) -> dict:
        path = self._path(key)
        if not path.exists():
            raise ChunkNotFoundError(f"not found: {key}")
        meta_path = path.with_name(path.name + self._META_SUFFIX)
        if not meta_path.exists():
            return {}
        return json.loads(meta_path.read_text("utf-8"))

    def exists(self, key: str) -> bool:
        return self._path(key).exists()

    def keys(self, prefix: str = "") -> list[str]:
        found = []
        for path in self.root.rglob("*"):
            if path.is_dir() or path.name.endswith(self._META_SUFFIX):
                continue
            key = path.relative_to(self.root).as_posix()
            if key.startswith(prefix):
                found.append(key)
        return sorted(found)
