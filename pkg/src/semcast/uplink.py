"""Vehicle-side encoder: periodic frame sampling, detection/caption adapters,
telemetry normalization, and canonical JSON annotation packets.

Detection and captioning never run in-process; they are adapters. The
replay adapter reads authored per-video trace files so the whole uplink is
reproducible on any machine, the constant adapter serves tests, and the
remote adapter posts frames to an external service.

Byte counts are the headline metric, so packet encoding is canonical:
sorted keys, no whitespace, and fixed decimal quantization (6 places for
degrees, 2 for meters and speeds, 3 for IMU axes, 4 for detector outputs).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import requests


class UplinkError(Exception):
    pass


class InvalidPeriodError(UplinkError):
    pass


class ZeroDurationError(UplinkError):
    pass


class AdapterUnavailableError(UplinkError):
    pass


class TraceMissError(UplinkError):
    pass


class OutOfRangeError(UplinkError):
    pass


@dataclass(frozen=True)
class FrameTicket:
    frame_index: int
    capture_ts_us: int
    source_id: str

    def __post_init__(self) -> None:
        if self.frame_index < 0:
            raise ValueError("frame_index must be non-negative")


@dataclass(frozen=True)
class Detection:
    label: str
    confidence: float
    box: tuple[float, float, float, float]  # normalized x, y, w, h

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("detection label must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        x, y, w, h = self.box
        if min(x, y, w, h) < 0 or x + w > 1.0 + 1e-9 or y + h > 1.0 + 1e-9:
            raise ValueError(f"box {self.box} outside the unit square")


DetectionSet = tuple[Detection, ...]


@dataclass(frozen=True)
class Caption:
    text: str
    model_id: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("caption text must be non-empty")


@dataclass(frozen=True)
class TelemetryPacket:
    """Pose/motion sample in normalized units with a synchronized timestamp."""

    altitude_m: float
    latitude_deg: float
    longitude_deg: float
    ground_speed_mps: float
    accel_mps2: tuple[float, float, float]
    gyro_radps: tuple[float, float, float]
    timestamp_us: int

    def to_dict(self) -> dict:
        return {
            "altitude_m": self.altitude_m,
            "latitude_deg": self.latitude_deg,
            "longitude_deg": self.longitude_deg,
            "ground_speed_mps": self.ground_speed_mps,
            "accel_mps2": list(self.accel_mps2),
            "gyro_radps": list(self.gyro_radps),
            "timestamp_us": self.timestamp_us,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TelemetryPacket":
        return cls(
            altitude_m=data["altitude_m"],
            latitude_deg=data["latitude_deg"],
            longitude_deg=data["longitude_deg"],
            ground_speed_mps=data["ground_speed_mps"],
            accel_mps2=tuple(data["accel_mps2"]),
            gyro_radps=tuple(data["gyro_radps"]),
            timestamp_us=data["timestamp_us"],
        )


@dataclass(frozen=True)
class AnnotationPacket:
    frame: FrameTicket
    detections: DetectionSet
    caption: Caption
    telemetry: TelemetryPacket
    encoded_bytes: int

    @property
    def packet_id(self) -> str:
        return f"{self.frame.source_id}:{self.frame.frame_index}"

    def to_dict(self) -> dict:
        return {
            "frame": {
                "frame_index": self.frame.frame_index,
                "capture_ts_us": self.frame.capture_ts_us,
                "source_id": self.frame.source_id,
            },
            "detections": [
                {"label": d.label, "confidence": d.confidence, "box": list(d.box)}
                for d in self.detections
            ],
            "caption": {"text": self.caption.text, "model_id": self.caption.model_id},
            "telemetry": self.telemetry.to_dict(),
        }

    def encode(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def decode(cls, raw: bytes) -> "AnnotationPacket":
        data = json.loads(raw.decode("utf-8"))
        frame = FrameTicket(
            frame_index=data["frame"]["frame_index"],
            capture_ts_us=data["frame"]["capture_ts_us"],
            source_id=data["frame"]["source_id"],
        )
        detections = tuple(
            Detection(d["label"], d["confidence"], tuple(d["box"])) for d in data["detections"]
        )
        caption = Caption(data["caption"]["text"], data["caption"]["model_id"])
        telemetry = TelemetryPacket.from_dict(data["telemetry"])
        return cls(frame, detections, caption, telemetry, encoded_bytes=len(raw))


def sample_frames(
    frame_rate: float,
    sampling_period: int,
    duration_s: float,
    source_id: str = "stream-0",
) -> list[FrameTicket]:
    """Tickets for frame indices 0, P, 2P, ... below duration*frame_rate."""
    if frame_rate <= 0:
        raise ValueError("frame_rate must be positive")
    if sampling_period < 1:
        raise InvalidPeriodError(f"sampling period {sampling_period} < 1")
    if duration_s <= 0:
        raise ZeroDurationError("duration must be positive")
    total_frames = int(duration_s * frame_rate)
    tickets = []
    for index in range(0, total_frames, sampling_period):
        capture_ts_us = round(index / frame_rate * 1_000_000)
        tickets.append(FrameTicket(index, capture_ts_us, source_id))
    return tickets


class DetectionAdapter(Protocol):
    def detect(self, frame: FrameTicket) -> DetectionSet: ...


class CaptionAdapter(Protocol):
    def caption(self, frame: FrameTicket) -> Caption: ...


class AnnotationTrace:
    """Per-video authored annotations keyed by frame index."""

    def __init__(self, video_id: int, entries: Mapping[int, Mapping]):
        self.video_id = video_id
        self._entries = dict(entries)

    def frame_indices(self) -> list[int]:
        return sorted(self._entries)

    def entry(self, frame_index: int) -> Mapping:
        try:
            return self._entries[frame_index]
        except KeyError:
            raise TraceMissError(
                f"video {self.video_id} has no trace entry for frame {frame_index}"
            ) from None

    @classmethod
    def from_jsonl(cls, video_id: int, lines: Sequence[str]) -> "AnnotationTrace":
        entries = {}
        for line in lines:
            if not line.strip():
                continue
            record = json.loads(line)
            entries[record["frame_index"]] = record
        return cls(video_id, entries)


class ReplayDetectionAdapter:
    def __init__(self, trace: AnnotationTrace, model_id: str = "detector-replay"):
        self._trace = trace
        self.model_id = model_id

    def detect(self, frame: FrameTicket) -> DetectionSet:
        entry = self._trace.entry(frame.frame_index)
        return tuple(
            Detection(d["label"], d["confidence"], tuple(d["box"])) for d in entry["detections"]
        )


class ReplayCaptionAdapter:
    def __init__(self, trace: AnnotationTrace, model_id: str = "captioner-replay"):
        self._trace = trace
        self.model_id = model_id

    def caption(self, frame: FrameTicket) -> Caption:
        entry = self._trace.entry(frame.frame_index)
        return Caption(entry["caption"], self.model_id)


class ConstantDetectionAdapter:
    def __init__(self, detections: DetectionSet = ()):
        self._detections = tuple(detections)

    def detect(self, frame: FrameTicket) -> DetectionSet:
        return self._detections


class ConstantCaptionAdapter:
    def __init__(self, text: str, model_id: str = "captioner-constant"):
        self._caption = Caption(text, model_id)

    def caption(self, frame: FrameTicket) -> Caption:
        return self._caption


class RemoteDetectionAdapter:
    """POSTs the frame reference to a detection service; 2 s default timeout."""

    def __init__(self, url: str, timeout_s: float = 2.0):
        self.url = url
        self.timeout_s = timeout_s

    def detect(self, frame: FrameTicket) -> DetectionSet:
        body = {"frame_index": frame.frame_index, "source_id": frame.source_id}
        try:
            response = requests.post(self.url, json=body, timeout=self.timeout_s)
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise AdapterUnavailableError(f"detection service failed: {exc}") from exc
        return tuple(
            Detection(d["label"], d["confidence"], tuple(d["box"]))
            for d in payload.get("detections", [])
        )


class RemoteCaptionAdapter:
    def __init__(self, url: str, timeout_s: float = 2.0, model_id: str = "captioner-remote"):
        self.url = url
        self.timeout_s = timeout_s
        self.model_id = model_id

    def caption(self, frame: FrameTicket) -> Caption:
        body = {"frame_index": frame.frame_index, "source_id": frame.source_id}
        try:
            response = requests.post(self.url, json=body, timeout=self.timeout_s)
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise AdapterUnavailableError(f"caption service failed: {exc}") from exc
        return Caption(payload["caption"], payload.get("model_id", self.model_id))


def detect_objects(frame: FrameTicket, adapter: DetectionAdapter) -> DetectionSet:
    detections = adapter.detect(frame)
    for d in detections:
        if not isinstance(d, Detection):
            raise ValueError("adapter returned a non-Detection entry")
    return tuple(detections)


def caption_frame(frame: FrameTicket, adapter: CaptionAdapter) -> Caption:
    return adapter.caption(frame)


def _quantize(value: float, places: int) -> float:
    return round(float(value), places)


def encode_telemetry(
    state: Mapping,
    timestamp_us: int | None = None,
    altitude_floor_m: float = -430.0,
) -> TelemetryPacket:
    """Normalize a raw sensor sample into a quantized TelemetryPacket.

    The timestamp comes from the sample itself or, when absent, from the
    caller's synchronized clock via ``timestamp_us``.
    """
    lat = _quantize(state["latitude_deg"], 6)
    lon = _quantize(state["longitude_deg"], 6)
    alt = _quantize(state["altitude_m"], 2)
    if abs(lat) > 90.0:
        raise OutOfRangeError(f"latitude {lat} outside [-90, 90]")
    if abs(lon) > 180.0:
        raise OutOfRangeError(f"longitude {lon} outside [-180, 180]")
    if alt < altitude_floor_m:
        raise OutOfRangeError(f"altitude {alt} below floor {altitude_floor_m}")
    speed = _quantize(state.get("ground_speed_mps", 0.0), 2)
    if speed < 0:
        raise OutOfRangeError(f"ground speed {speed} is negative")
    accel = tuple(_quantize(v, 3) for v in state.get("accel_mps2", (0.0, 0.0, 0.0)))
    gyro = tuple(_quantize(v, 3) for v in state.get("gyro_radps", (0.0, 0.0, 0.0)))
    ts = state.get("timestamp_us", timestamp_us)
    if ts is None:
        raise ValueError("no timestamp in sample and none supplied")
    return TelemetryPacket(
        altitude_m=alt,
        latitude_deg=lat,
        longitude_deg=lon,
        ground_speed_mps=speed,
        accel_mps2=accel,
        gyro_radps=gyro,
        timestamp_us=int(ts),
    )


def build_annotation_packet(
    detections: DetectionSet,
    caption: Caption,
    telemetry: TelemetryPacket,
    frame: FrameTicket,
) -> AnnotationPacket:
    """Assemble and measure the canonical JSON uplink payload."""
    quantized = tuple(
        Detection(
            d.label,
            _quantize(d.confidence, 4),
            tuple(_quantize(v, 4) for v in d.box),
        )
        for d in detections
    )
    packet = AnnotationPacket(frame, quantized, caption, telemetry, encoded_bytes=0)
    encoded = packet.encode()
    return AnnotationPacket(frame, quantized, caption, telemetry, encoded_bytes=len(encoded))
