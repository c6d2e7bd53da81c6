"""Canonical JSON serialization and tracked artifact output.

All manifests are written through :func:`canonical_dumps` so that two runs
with the same configuration produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


def canonical_dumps(obj) -> str:
    """Serialize to JSON with sorted keys and a trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_dumps(obj), encoding="ascii")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="ascii"))


class ArtifactWriter:
    """Records every file it writes so a failed run can be cleaned up.

    Stage commands write all outputs through one writer; on error the caller
    invokes :meth:`cleanup` to remove the partial outputs (directories that
    become empty are removed too, pre-existing files are never touched).
    """

    def __init__(self):
        self.paths: list[Path] = []
        self._dirs: list[Path] = []

    def ensure_dir(self, path) -> Path:
        path = Path(path)
        if not path.exists():
            path.mkdir(parents=True, exist_ok=True)
            self._dirs.append(path)
        return path

    def write_bytes(self, path, data: bytes) -> Path:
        path = Path(path)
        self.ensure_dir(path.parent)
        path.write_bytes(data)
        self.paths.append(path)
        return path

    def write_text(self, path, text: str) -> Path:
        path = Path(path)
        self.ensure_dir(path.parent)
        path.write_text(text, encoding="ascii")
        self.paths.append(path)
        return path

    def write_json(self, path, obj) -> Path:
        return self.write_text(path, canonical_dumps(obj))

    def cleanup(self) -> None:
        for p in self.paths:
            try:
                p.unlink()
            except OSError:
                pass
        for d in reversed(self._dirs):
            try:
                os.rmdir(d)
            except OSError:
                pass
        self.paths.clear()
        self._dirs.clear()
