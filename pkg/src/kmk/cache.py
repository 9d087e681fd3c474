"""On-disk cache of phi tables, content-addressed and convention-checked.

Entries live in ``$KMK_CACHE_DIR`` (default ``~/.cache/kmk``) as
``<sha256>.kmk`` JSON files.  The key hashes the GCM, the length cap, the
engine convention fingerprint and the schema version, and the payload repeats
the fingerprint so a stale file is never trusted.  Any I/O or decoding
problem is a cache miss with a warning, never an error.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
import warnings
from pathlib import Path

from .engine import ENGINE_VERSION, LocalizationEngine, convention_fingerprint
from .ring import RTElement
from .rootdatum import GCM

__all__ = ["CACHE_SCHEMA", "cache_dir", "cache_key", "cache_get", "cache_put",
           "export_phi", "import_phi", "load_engine_cache", "store_engine_cache"]

CACHE_SCHEMA = 1


def cache_dir() -> Path:
    env = os.environ.get("KMK_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "kmk"


def cache_key(gcm: GCM, L: int, fingerprint: str | None = None) -> str:
    blob = json.dumps({
        "gcm": [list(r) for r in gcm.entries],
        "labels": list(gcm.labels),
        "L": L,
        "fingerprint": fingerprint or convention_fingerprint(),
        "schema": CACHE_SCHEMA,
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _path(key: str, directory: Path | None) -> Path:
    return (directory or cache_dir()) / f"{key}.kmk"


def cache_put(key: str, payload: dict, directory: Path | None = None) -> bool:
    """Atomically write ``payload``; returns False (with a warning) on I/O failure."""
    directory = directory or cache_dir()
    record = {
        "version": CACHE_SCHEMA,
        "engine": ENGINE_VERSION,
        "fingerprint": convention_fingerprint(),
        "created": time.time(),
        "payload": payload,
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(record, fh, sort_keys=True)
        os.replace(tmp, _path(key, directory))
        return True
    except OSError as exc:
        warnings.warn(f"kmk cache write failed: {exc}", RuntimeWarning, stacklevel=2)
        return False


def cache_get(key: str, directory: Path | None = None) -> dict | None:
    """The stored payload, or None on a miss, a stale fingerprint or a corrupt file."""
    path = _path(key, directory)
    try:
        with open(path) as fh:
            record = json.load(fh)
    except FileNotFoundError:
        return None
    except (OSError, ValueError) as exc:
        warnings.warn(f"evicting unreadable cache entry {path.name}: {exc}", RuntimeWarning, stacklevel=2)
        path.unlink(missing_ok=True)
        return None
    if not isinstance(record, dict) or "payload" not in record:
        warnings.warn(f"evicting malformed cache entry {path.name}", RuntimeWarning, stacklevel=2)
        path.unlink(missing_ok=True)
        return None
    if (record.get("version") != CACHE_SCHEMA or record.get("engine") != ENGINE_VERSION
            or record.get("fingerprint") != convention_fingerprint()):
        return None
    return record["payload"]


def export_phi(engine: LocalizationEngine) -> dict:
    """Serializable form of every phi column the engine has computed."""
    W = engine.W
    cols = []
    for x in sorted(engine._phi, key=lambda w: w.sort_key()):
        col = engine._phi[x]
        cols.append([list(x.word), [[list(w.word), col[w].to_json()["terms"]]
                                    for w in sorted(col, key=lambda w: w.sort_key())]])
    return {"rank": W.n, "elements": len(cols), "columns": cols}


def import_phi(engine: LocalizationEngine, payload: dict) -> int:
    """Load columns into ``engine``; returns how many were loaded."""
    W = engine.W
    if payload.get("rank") != W.n:
        raise ValueError("cached table has the wrong rank")
    count = 0
    for xword, entries in payload["columns"]:
        x = W.canonicalize(xword)
        if list(x.word) != list(xword):
            raise ValueError("cached word is not in normal form")
        col = {}
        for wword, terms in entries:
            col[W.canonicalize(wword)] = RTElement.from_json({"version": 1, "rank": W.n, "terms": terms})
        engine._phi[x] = col
        count += 1
    return count


def load_engine_cache(engine: LocalizationEngine, L: int, directory: Path | None = None) -> bool:
    key = cache_key(engine.W.gcm, L)
    payload = cache_get(key, directory)
    if payload is None:
        return False
    try:
        import_phi(engine, payload)
    except (KeyError, TypeError, ValueError) as exc:
        warnings.warn(f"evicting inconsistent cache entry: {exc}", RuntimeWarning, stacklevel=2)
        _path(key, directory).unlink(missing_ok=True)
        engine._phi.clear()
        return False
    return True


def store_engine_cache(engine: LocalizationEngine, L: int, directory: Path | None = None) -> bool:
    return cache_put(cache_key(engine.W.gcm, L), export_phi(engine), directory)
