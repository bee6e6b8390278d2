"""Trace-driven model of the conventional streaming path.

No codecs run here: authored per-second bitrate series stand in for the
camera-to-server ingest and the server-to-viewer egress. Replay emits
synthetic channel receipts whose metered bitrate reproduces the series, so
the comparison harness can treat both pipelines uniformly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from .transport import DOWNLINK, UPLINK, ChannelReceipt


class BaselineError(Exception):
    pass


class EmptyTraceError(BaselineError):
    pass


class NegativeComponentError(BaselineError):
    pass


@dataclass(frozen=True)
class VideoTrace:
    video_id: int
    duration_s: float
    uplink_bps: tuple[int, ...]
    downlink_bps: tuple[int, ...]
    resolution: str = "4K"

    def __post_init__(self) -> None:
        expected = math.ceil(self.duration_s)
        if len(self.uplink_bps) != expected or len(self.downlink_bps) != expected:
            raise ValueError(
                f"series length must be ceil(duration) = {expected}; "
                f"got {len(self.uplink_bps)}/{len(self.downlink_bps)}"
            )
        for up, down in zip(self.uplink_bps, self.downlink_bps):
            if up < 0 or down < 0:
                raise ValueError("bitrates must be non-negative")
            if down > up:
                raise ValueError("downlink may not exceed uplink in any second")

    @classmethod
    def from_dict(cls, data: dict) -> "VideoTrace":
        return cls(
            video_id=data["video_id"],
            duration_s=data["duration_s"],
            uplink_bps=tuple(data["uplink_bps"]),
            downlink_bps=tuple(data["downlink_bps"]),
            resolution=data.get("resolution", "4K"),
        )

    @classmethod
    def from_json(cls, raw: str | bytes) -> "VideoTrace":
        return cls.from_dict(json.loads(raw))

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "duration_s": self.duration_s,
            "uplink_bps": list(self.uplink_bps),
            "downlink_bps": list(self.downlink_bps),
            "resolution": self.resolution,
        }


@dataclass(frozen=True)
class LatencyBreakdownTraditional:
    rtsp_ms: float
    webrtc_ms: float
    rendering_ms: float

    def __post_init__(self) -> None:
        for value in (self.rtsp_ms, self.webrtc_ms, self.rendering_ms):
            if value < 0:
                raise NegativeComponentError(f"latency component {value} is negative")

    def to_dict(self) -> dict:
        return {
            "rtsp_ms": self.rtsp_ms,
            "webrtc_ms": self.webrtc_ms,
            "rendering_ms": self.rendering_ms,
            "total_ms": e2e_latency_traditional(self),
        }


def e2e_latency_traditional(breakdown: LatencyBreakdownTraditional) -> float:
    """Ingest + egress + render, exactly additive (fsum, order-free)."""
    return math.fsum((breakdown.rtsp_ms, breakdown.webrtc_ms, breakdown.rendering_ms))


def replay_trace(
    trace: VideoTrace,
    speed: float = 1.0,
    t0_us: int = 0,
    packets_per_second: int = 10,
) -> list[ChannelReceipt]:
    """Expand a bitrate series into per-packet receipts.

    Each trace second is split into ``packets_per_second`` packets whose
    sizes sum to exactly round(bps / 8) bytes; zero-rate seconds emit
    nothing. ``speed`` > 1 compresses the synthetic timeline.
    """
    if not trace.uplink_bps:
        raise EmptyTraceError(f"video {trace.video_id} has an empty series")
    if speed <= 0:
        raise ValueError("speed must be positive")
    receipts: list[ChannelReceipt] = []
    for second, (up, down) in enumerate(zip(trace.uplink_bps, trace.downlink_bps)):
        for bps, direction, channel in (
            (up, UPLINK, f"rtsp/video-{trace.video_id:02d}"),
            (down, DOWNLINK, f"webrtc/video-{trace.video_id:02d}"),
        ):
            total_bytes = round(bps / 8)
            if total_bytes <= 0:
                continue
            base, extra = divmod(total_bytes, packets_per_second)
            for i in range(packets_per_second):
                payload = base + (1 if i < extra else 0)
                if payload <= 0:
                    continue
                t = t0_us + round((second + i / packets_per_second) * 1_000_000 / speed)
                receipts.append(
                    ChannelReceipt(
                        channel=channel,
                        payload_bytes=payload,
                        t_send_us=t,
                        t_recv_us=t,
                        direction=direction,
                    )
                )
    return receipts


def aggregate_mean_bps(traces: Iterable[VideoTrace], direction: str) -> float:
    """Unweighted mean of per-video mean bitrates."""
    means = []
    for trace in traces:
        series = trace.uplink_bps if direction == UPLINK else trace.downlink_bps
        means.append(math.fsum(series) / len(series))
    if not means:
        raise EmptyTraceError("no traces supplied")
    return math.fsum(means) / len(means)
