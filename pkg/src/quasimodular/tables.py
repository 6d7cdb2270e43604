"""Append-only iterate tables (d*D)^n(g) with a checksummed on-disk cache.

One text file per (level, generator)::

    quasimodular-iterates v1
    level N=2 m=4 d=8
    generator x
    0: x
    1: x^2 - y
    ...
    checksum sha256 <hex digest of every line above>

A version bump, changed level constants, or a bad checksum discards the file
and the table is recomputed.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from quasimodular import kernels
from quasimodular.derivation import Level, check_generator, generator_poly, get_level
from quasimodular.exactalg import LaurentPoly, format_poly, parse_poly

log = logging.getLogger(__name__)

CACHE_VERSION = 1
CACHE_ENV = "QML_CACHE_DIR"
_HEADER = f"quasimodular-iterates v{CACHE_VERSION}"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "quasimodular"


def resolve_cache_dir(cache_dir=None) -> Path:
    return Path(cache_dir) if cache_dir else default_cache_dir()


def cache_path(cache_dir: Path, level: Level, generator: str) -> Path:
    return cache_dir / f"iterates_N{level.N}_{generator}.txt"


def _checksum(body: str) -> str:
    return hashlib.sha256(body.encode()).hexdigest()


class CacheError(Exception):
    pass


class IterateTable:
    """entries[n] = (d*D)^n(generator), extended on demand and persisted."""

    def __init__(self, level: Level, generator: str, cache_dir: Optional[Path] = None):
        self.level = get_level(level)
        self.generator = check_generator(generator)
        self.path = cache_path(cache_dir, self.level, generator) if cache_dir is not None else None
        self._entries: List[LaurentPoly] = [generator_poly(generator)]
        self._lock = threading.Lock()
        self.warnings: List[str] = []
        self.loaded_from_disk = 0
        if self.path is not None:
            self._load()

    def __len__(self):
        return len(self._entries)

    def __getitem__(self, n: int) -> LaurentPoly:
        if n < 0:
            raise IndexError("negative iteration order")
        entries = self._entries
        if n < len(entries):
            return entries[n]
        self.extend_to(n)
        return self._entries[n]

    def entries(self) -> Tuple[LaurentPoly, ...]:
        return tuple(self._entries)

    def extend_to(self, n: int) -> None:
        with self._lock:
            if n < len(self._entries):
                return
            A, B = self.level.A, self.level.B
            last = self._entries[-1]
            while len(self._entries) <= n:
                last = LaurentPoly.from_kernel(kernels.derive_terms(last.terms, A, B))
                self._entries.append(last)
            if self.path is not None:
                self._save()

    # persistence -----------------------------------------------------------
    def _header_lines(self) -> List[str]:
        lv = self.level
        return [_HEADER, f"level N={lv.N} m={lv.m} d={lv.d}", f"generator {self.generator}"]

    def serialize(self) -> str:
        lines = self._header_lines()
        lines += [f"{i}: {format_poly(p)}" for i, p in enumerate(self._entries)]
        body = "\n".join(lines) + "\n"
        return body + f"checksum sha256 {_checksum(body)}\n"

    def _save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(self.serialize())
        os.replace(tmp, self.path)

    def _warn(self, msg: str) -> None:
        self.warnings.append(msg)
        log.warning(msg)

    def _load(self) -> None:
        if not self.path.exists():
            return
        try:
            entries = parse_cache_text(self.path.read_text(), self.level, self.generator)
        except CacheError as exc:
            self._warn(f"discarding cache {self.path}: {exc}")
            return
        self._entries = entries
        self.loaded_from_disk = len(entries)

    def verify_checksum(self) -> bool:
        if self.path is None or not self.path.exists():
            return True
        try:
            parse_cache_text(self.path.read_text(), self.level, self.generator)
        except CacheError:
            return False
        return True


def parse_cache_text(text: str, level: Level, generator: str) -> List[LaurentPoly]:
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise CacheError("unknown cache format version")
    if len(lines) < 4 or not lines[-1].startswith("checksum sha256 "):
        raise CacheError("missing checksum line")
    body = "\n".join(lines[:-1]) + "\n"
    if lines[-1].split()[-1] != _checksum(body):
        raise CacheError("checksum mismatch")
    lv = level
    if lines[1] != f"level N={lv.N} m={lv.m} d={lv.d}" or lines[2] != f"generator {generator}":
        raise CacheError("level constants or generator do not match")
    entries = []
    for i, line in enumerate(lines[3:-1]):
        idx, sep, poly = line.partition(":")
        if not sep or idx.strip() != str(i):
            raise CacheError(f"bad entry line {i}")
        try:
            entries.append(parse_poly(poly))
        except ValueError as exc:
            raise CacheError(f"entry {i}: {exc}") from None
    if not entries or entries[0] != generator_poly(generator):
        raise CacheError("entry 0 is not the generator")
    return entries


_REGISTRY: Dict[Tuple[int, str, str], IterateTable] = {}
_REGISTRY_LOCK = threading.Lock()


def get_table(level, generator: str, cache_dir=None) -> IterateTable:
    lv = get_level(level)
    directory = resolve_cache_dir(cache_dir)
    key = (lv.N, generator, str(directory.resolve()))
    table = _REGISTRY.get(key)
    if table is None:
        with _REGISTRY_LOCK:
            table = _REGISTRY.get(key)
            if table is None:
                table = IterateTable(lv, generator, directory)
                _REGISTRY[key] = table
    return table


def forget_tables() -> None:
    """Drop in-memory tables (the files stay)."""
    with _REGISTRY_LOCK:
        _REGISTRY.clear()


def clear_cache(cache_dir=None) -> List[Path]:
    directory = resolve_cache_dir(cache_dir)
    removed = []
    if directory.exists():
        for path in sorted(directory.glob("iterates_N*_*.txt")):
            path.unlink()
            removed.append(path)
    forget_tables()
    return removed


def cache_status(cache_dir=None) -> List[dict]:
    directory = resolve_cache_dir(cache_dir)
    out = []
    for N in (1, 2, 3):
        for g in ("x", "y", "z"):
            lv = get_level(N)
            path = cache_path(directory, lv, g)
            if not path.exists():
                continue
            try:
                entries = parse_cache_text(path.read_text(), lv, g)
                out.append({"level": N, "generator": g, "path": str(path),
                            "entries": len(entries), "checksum_ok": True})
            except CacheError as exc:
                out.append({"level": N, "generator": g, "path": str(path),
                            "entries": 0, "checksum_ok": False, "error": str(exc)})
    return out
