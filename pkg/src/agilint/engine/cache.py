"""Result cache keyed by (metric, revision, team, sprint, data version).

A hit requires an exact key match and a fresh entry (age below the
configured ttl). Metric updates invalidate by metric id; re-ingesting
data changes the data version, which makes every old key unreachable
by construction. Safe under concurrent readers and writers.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


CacheKey = tuple  # (metric_id, revision, team, sprint_title, data_version)


@dataclass
class CacheEntry:
    key: CacheKey
    value: object
    stored_at: datetime


class ResultCache:
    def __init__(self, ttl_seconds: float = 900.0, clock=None):
        self.ttl_seconds = float(ttl_seconds)
        self._clock = clock or _utcnow
        self._entries: dict[CacheKey, CacheEntry] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: CacheKey):
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                self.misses += 1
                return None
            age = (self._clock() - entry.stored_at).total_seconds()
            if age >= self.ttl_seconds:
                del self._entries[key]
                self.misses += 1
                return None
            self.hits += 1
            return entry.value

    def put(self, key: CacheKey, value) -> None:
        with self._lock:
            self._entries[key] = CacheEntry(key, value, self._clock())

    def invalidate_metric(self, metric_id: str) -> int:
        with self._lock:
            stale = [key for key in self._entries if key[0] == metric_id]
            for key in stale:
                del self._entries[key]
            return len(stale)

    def invalidate_data_version(self, current_version: str) -> int:
        """Drop entries for any other data version (they are unreachable
        anyway; this reclaims the memory)."""
        with self._lock:
            stale = [key for key in self._entries if key[4] != current_version]
            for key in stale:
                del self._entries[key]
            return len(stale)

    def invalidate_all(self) -> int:
        with self._lock:
            count = len(self._entries)
            self._entries.clear()
            return count

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
