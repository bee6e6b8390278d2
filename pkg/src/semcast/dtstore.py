"""Pose/time-keyed persistence of generated scene code.

A single-file append log plus an in-memory index. Entries are never
mutated or deleted during a run; queries walk an immutable snapshot, so
one writer and any number of readers coexist without coordination beyond
the write lock.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from pathlib import Path


class DTStoreError(Exception):
    pass


class DuplicateKeyError(DTStoreError):
    pass


class StorageFailureError(DTStoreError):
    pass


class EmptyStoreError(DTStoreError):
    pass


METERS_PER_DEG_LAT = 110574.0
METERS_PER_DEG_LON_EQUATOR = 111320.0


@dataclass(frozen=True)
class DistanceWeights:
    """Unit equivalences for the pose+time metric: defaults make
    1 m altitude = 1 m horizontal = 100 ms."""

    altitude_per_meter: float = 1.0
    ms_per_meter: float = 100.0


@dataclass(frozen=True)
class DTEntry:
    scene_code: str
    latitude_deg: float
    longitude_deg: float
    altitude_m: float
    timestamp_us: int
    description_hash: str
    stream_id: str = "stream-0"

    def __post_init__(self) -> None:
        if abs(self.latitude_deg) > 90 or abs(self.longitude_deg) > 180:
            raise ValueError("entry pose outside telemetry bounds")
        if not self.scene_code:
            raise ValueError("entry must carry scene code")

    def to_dict(self) -> dict:
        return {
            "scene_code": self.scene_code,
            "latitude_deg": self.latitude_deg,
            "longitude_deg": self.longitude_deg,
            "altitude_m": self.altitude_m,
            "timestamp_us": self.timestamp_us,
            "description_hash": self.description_hash,
            "stream_id": self.stream_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DTEntry":
        return cls(**data)


def pose_time_distance_sq(
    entry: DTEntry,
    latitude_deg: float,
    longitude_deg: float,
    altitude_m: float,
    time_us: int,
    weights: DistanceWeights = DistanceWeights(),
) -> float:
    """Squared weighted distance in meter-equivalents."""
    mean_lat = math.radians((entry.latitude_deg + latitude_deg) / 2)
    dx = (entry.longitude_deg - longitude_deg) * METERS_PER_DEG_LON_EQUATOR * math.cos(mean_lat)
    dy = (entry.latitude_deg - latitude_deg) * METERS_PER_DEG_LAT
    dalt = (entry.altitude_m - altitude_m) * weights.altitude_per_meter
    dt_m = abs(entry.timestamp_us - time_us) / 1000.0 / weights.ms_per_meter
    return dx * dx + dy * dy + dalt * dalt + dt_m * dt_m


class DigitalTwinStore:
    """Append-only scene log; keys are 1-based insertion indices."""

    def __init__(self, log_path: str | Path | None = None):
        self._entries: tuple[DTEntry, ...] = ()
        self._keys: dict[tuple[int, str], int] = {}
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path is not None else None

    @classmethod
    def open(cls, log_path: str | Path) -> "DigitalTwinStore":
        store = cls(log_path)
        path = Path(log_path)
        if path.exists():
            try:
                lines = path.read_text(encoding="utf-8").splitlines()
            except OSError as exc:
                raise StorageFailureError(f"cannot read log {path}: {exc}") from exc
            entries = []
            for line in lines:
                if not line.strip():
                    continue
                record = json.loads(line)
                record.pop("key", None)
                entries.append(DTEntry.from_dict(record))
            store._entries = tuple(entries)
            store._keys = {
                (e.timestamp_us, e.stream_id): i + 1 for i, e in enumerate(entries)
            }
        return store

    def store_scene(self, entry: DTEntry) -> int:
        with self._lock:
            key_tuple = (entry.timestamp_us, entry.stream_id)
            if key_tuple in self._keys:
                raise DuplicateKeyError(
                    f"entry for stream {entry.stream_id!r} at t={entry.timestamp_us} already stored"
                )
            key = len(self._entries) + 1
            if self._log_path is not None:
                line = json.dumps({"key": key, **entry.to_dict()}, sort_keys=True)
                try:
                    with open(self._log_path, "a", encoding="utf-8") as fh:
                        fh.write(line + "\n")
                except OSError as exc:
                    raise StorageFailureError(f"cannot append to {self._log_path}: {exc}") from exc
            self._entries = self._entries + (entry,)
            self._keys[key_tuple] = key
            return key

    def fetch(self, key: int) -> DTEntry:
        snapshot = self._entries
        if not 1 <= key <= len(snapshot):
            raise KeyError(key)
        return snapshot[key - 1]

    def __len__(self) -> int:
        return len(self._entries)

    def snapshot(self) -> tuple[DTEntry, ...]:
        return self._entries

    def query_nearest(
        self,
        latitude_deg: float,
        longitude_deg: float,
        altitude_m: float,
        time_us: int,
        weights: DistanceWeights = DistanceWeights(),
    ) -> DTEntry:
        """Entry minimizing the weighted pose+time distance.

        Equidistant candidates resolve to the earlier timestamp.
        """
        snapshot = self._entries
        if not snapshot:
            raise EmptyStoreError("digital-twin store is empty")
        best: DTEntry | None = None
        best_d2 = math.inf
        for entry in snapshot:
            d2 = pose_time_distance_sq(
                entry, latitude_deg, longitude_deg, altitude_m, time_us, weights
            )
            if (
                best is None
                or d2 < best_d2
                or (d2 == best_d2 and entry.timestamp_us < best.timestamp_us)
            ):
                best = entry
                best_d2 = d2
        assert best is not None
        return best
