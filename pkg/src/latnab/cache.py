from __future__ import annotations

import gzip
import json
import logging

from fractions import Fraction
from pathlib import Path
from threading import Lock
from typing import TypedDict

from latnab.exact import format_rational

class ThetaEntry(TypedDict):
    max_norm: str
    coefficients: dict[str, int]

def _load_cache(path: Path) -> dict[str, ThetaEntry]:
    with gzip.open(path, 'rt', encoding='utf-8') as f:
        data = json.load(f)
        return dict(data.get('theta', {}))

def _save_cache(path: Path, entries: dict[str, ThetaEntry]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    # Compressed, large dimension-16 series have many coefficients
    with gzip.open(path, 'wt', encoding='utf-8') as f:
        json.dump({'theta': entries}, f)

class ThetaCache():
    # Theta coefficients of lattices already enumerated, keyed by lattice digest.
    # On disk the cache is a gzip-compressed JSON file:
    #       {"theta": {digest: {"max_norm": "p/q", "coefficients": {"p/q": count}}}}
    # An entry answers every query up to its max_norm. Without a path the cache lives in memory only.
    def __init__(self, cache_path: Path | None):
        self.cache_path = cache_path
        self._lock = Lock()
        self._dirty: bool | None = None
        self._entries: dict[str, ThetaEntry] = {}

    def load(self) -> None:
        log = logging.getLogger("latnab")
        with self._lock:
            if self._dirty is not None:
                raise RuntimeError("Theta cache is already loaded.")
            self._dirty = False
            self._entries = {}
            if self.cache_path is None:
                return
            try:
                self._entries = _load_cache(self.cache_path)
            except FileNotFoundError:
                log.debug(f"No theta cache at {self.cache_path}, starting empty")
            except (OSError, ValueError) as e:
                log.warning(f"Ignoring unreadable theta cache {self.cache_path}: {e}")
            log.debug(f"Loaded {len(self._entries)} theta cache entries")

    def save(self) -> None:
        with self._lock:
            if self._dirty is None:
                raise RuntimeError("Theta cache is not loaded.")
            if not self._dirty or self.cache_path is None:
                return
            _save_cache(self.cache_path, self._entries)
            self._dirty = False

    def get(self, digest: str, max_norm: Fraction) -> dict[Fraction, int] | None:
        # Coefficients up to max_norm, or None when the entry is missing or too short
        with self._lock:
            if self._dirty is None:
                raise RuntimeError("Theta cache is not loaded.")
            entry = self._entries.get(digest)
            if entry is None or Fraction(entry['max_norm']) < max_norm:
                return None
            coefficients = {Fraction(k): v for k, v in entry['coefficients'].items()}
            return {k: v for k, v in coefficients.items() if k <= max_norm}

    def put(self, digest: str, max_norm: Fraction, coefficients: dict[Fraction, int]) -> None:
        with self._lock:
            if self._dirty is None:
                raise RuntimeError("Theta cache is not loaded.")
            entry = self._entries.get(digest)
            if entry is not None and Fraction(entry['max_norm']) >= max_norm:
                return
            self._entries[digest] = ThetaEntry(
                max_norm=format_rational(max_norm),
                coefficients={format_rational(k): v for k, v in sorted(coefficients.items())},
            )
            self._dirty = True

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
