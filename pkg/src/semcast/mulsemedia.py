"""Environmental estimates and per-actuator value maps.

Temperature follows a standard-atmosphere lapse from a configured sea-level
base, nudged by keywords found in the scene description. Wind is a
residual heuristic over the IMU: sustained horizontal acceleration that the
ground speed does not explain is read as gust buffeting. Vibration is
linear in ground speed, clamped, and shaped across zones by a cosine
weighting against the airflow direction.

Frames carry the timestamp of the scene update they accompany, so haptics
and visuals stay paired on the wire.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

from .uplink import TelemetryPacket

LAPSE_C_PER_KM = 6.5
DEFAULT_BASE_TEMPERATURE_C = 15.0
DEFAULT_V_MAX_MPS = 5.0
DEFAULT_KEYWORD_OFFSETS_C: dict[str, float] = {"snow": -10.0, "desert": 15.0}


class MulsemediaError(Exception):
    pass


class EmptyLayoutError(MulsemediaError):
    pass


@dataclass(frozen=True)
class ActuatorZone:
    zone_id: str
    bearing_deg: float  # 0 = front, clockwise


DEFAULT_LAYOUT: tuple[ActuatorZone, ...] = (
    ActuatorZone("front", 0.0),
    ActuatorZone("right", 90.0),
    ActuatorZone("back", 180.0),
    ActuatorZone("left", 270.0),
)


@dataclass(frozen=True)
class EnvEstimate:
    temperature_c: float
    wind_speed_mps: float
    wind_direction_deg: float  # degrees from north, [0, 360)
    confidence: float

    def __post_init__(self) -> None:
        if self.wind_speed_mps < 0:
            raise ValueError("wind speed must be non-negative")
        if not 0.0 <= self.wind_direction_deg < 360.0:
            raise ValueError("wind direction must lie in [0, 360)")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


@dataclass(frozen=True)
class MulsemediaFrame:
    timestamp_us: int
    thermal_zones: tuple[tuple[str, float], ...]
    vibration_zones: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        for _, intensity in self.vibration_zones:
            if not 0.0 <= intensity <= 1.0:
                raise ValueError(f"vibration intensity {intensity} outside [0, 1]")

    def to_json(self) -> str:
        body = {
            "ts": self.timestamp_us,
            "thermal": dict(self.thermal_zones),
            "vibro": dict(self.vibration_zones),
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, raw: str | bytes) -> "MulsemediaFrame":
        data = json.loads(raw)
        return cls(
            timestamp_us=data["ts"],
            thermal_zones=tuple(sorted(data["thermal"].items())),
            vibration_zones=tuple(sorted(data["vibro"].items())),
        )


def estimate_environment(
    telemetry: TelemetryPacket,
    description_text: str = "",
    base_temperature_c: float = DEFAULT_BASE_TEMPERATURE_C,
    keyword_offsets_c: Mapping[str, float] = DEFAULT_KEYWORD_OFFSETS_C,
) -> EnvEstimate:
    """Temperature from altitude lapse plus description keywords; wind from IMU."""
    temperature = base_temperature_c - LAPSE_C_PER_KM * telemetry.altitude_m / 1000.0
    lowered = description_text.lower()
    keyword_hit = False
    for keyword, offset in sorted(keyword_offsets_c.items()):
        if keyword in lowered:
            temperature += offset
            keyword_hit = True
    ax, ay, _ = telemetry.accel_mps2
    residual = math.hypot(ax, ay)
    wind_speed = residual  # 1-second gust equivalence
    wind_direction = (math.degrees(math.atan2(-ax, -ay))) % 360.0 if residual > 0 else 0.0
    return EnvEstimate(
        temperature_c=round(temperature, 2),
        wind_speed_mps=round(wind_speed, 3),
        wind_direction_deg=round(wind_direction, 2) % 360.0,
        confidence=0.9 if keyword_hit else 0.6,
    )


def build_mulsemedia_map(
    estimate: EnvEstimate,
    telemetry: TelemetryPacket,
    layout: tuple[ActuatorZone, ...] = DEFAULT_LAYOUT,
    scene_timestamp_us: int | None = None,
    v_max_mps: float = DEFAULT_V_MAX_MPS,
) -> MulsemediaFrame:
    """Zone map: thermal = estimate everywhere, vibration = speed x airflow shape.

    With no measurable wind the airflow is taken head-on (bearing 0), so
    forward zones carry the motion-induced vibration.
    """
    if not layout:
        raise EmptyLayoutError("actuator layout has no zones")
    base = min(max(telemetry.ground_speed_mps / v_max_mps, 0.0), 1.0)
    flow_from = estimate.wind_direction_deg if estimate.wind_speed_mps > 0.05 else 0.0
    thermal = []
    vibration = []
    for zone in layout:
        weight = max(0.0, math.cos(math.radians(zone.bearing_deg - flow_from)))
        thermal.append((zone.zone_id, round(estimate.temperature_c, 2)))
        vibration.append((zone.zone_id, round(base * weight, 4)))
    ts = scene_timestamp_us if scene_timestamp_us is not None else telemetry.timestamp_us
    return MulsemediaFrame(
        timestamp_us=ts,
        thermal_zones=tuple(thermal),
        vibration_zones=tuple(vibration),
    )
