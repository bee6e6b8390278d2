"""Wire layer: clocks, pub/sub channels, latency sync, and bit-exact metering.

Two broker bindings share one session API: an in-process loopback broker
(deterministic, with injectable per-client link delays, used by the test
suite and the benchmark harness) and a minimal MQTT 3.1.1 TCP client for
live runs against a real broker.

Timestamps are 64-bit microseconds. Virtual clocks let the harness replay
multi-minute sessions in milliseconds while keeping every receipt's
timing arithmetic intact.
"""

from __future__ import annotations

import math
import socket
import struct
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

UPLINK = "uplink"
DOWNLINK = "downlink"


class TransportError(Exception):
    pass


class NoSamplesError(TransportError):
    pass


class NonMonotoneSampleError(TransportError):
    pass


class NegativeRttError(TransportError):
    pass


class BrokerUnavailableError(TransportError):
    pass


class PayloadTooLargeError(TransportError):
    pass


class EmptyWindowError(TransportError):
    pass


class SystemClock:
    """Monotonic wall clock in microseconds."""

    def __init__(self) -> None:
        self._origin_ns = time.monotonic_ns()

    def now_us(self) -> int:
        return (time.monotonic_ns() - self._origin_ns) // 1000


class VirtualClock:
    """Manually driven clock for deterministic replay.

    ``seek_us`` may move backwards; the harness uses that to evaluate
    logically-concurrent pipelines one after another. Receipt invariants
    (t_recv >= t_send) hold per message regardless.
    """

    def __init__(self, start_us: int = 0) -> None:
        self._now_us = start_us

    def now_us(self) -> int:
        return self._now_us

    def advance_us(self, delta_us: int) -> int:
        if delta_us < 0:
            raise ValueError("advance_us takes a non-negative delta")
        self._now_us += delta_us
        return self._now_us

    def seek_us(self, t_us: int) -> int:
        self._now_us = t_us
        return self._now_us


@dataclass(frozen=True)
class ChannelReceipt:
    """Per-message delivery record used for metering and latency terms."""

    channel: str
    payload_bytes: int
    t_send_us: int
    t_recv_us: int
    direction: str

    def __post_init__(self) -> None:
        if self.payload_bytes <= 0:
            raise ValueError("payload_bytes must be positive")
        if self.t_recv_us < self.t_send_us:
            raise ValueError("t_recv precedes t_send after sync correction")
        if self.direction not in (UPLINK, DOWNLINK):
            raise ValueError(f"unknown direction {self.direction!r}")

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "payload_bytes": self.payload_bytes,
            "t_send_us": self.t_send_us,
            "t_recv_us": self.t_recv_us,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class ClockOffset:
    """Estimated remote-minus-local clock offset from timestamp quadruples."""

    offset_ms: float
    dispersion_ms: float
    sample_count: int

    def to_local_us(self, remote_us: int) -> int:
        return remote_us - round(self.offset_ms * 1000)


@dataclass(frozen=True)
class BitrateStats:
    window_s: float
    mean_bps: float
    max_bps: float
    stddev_bps: float
    byte_total: int

    def to_dict(self) -> dict:
        return {
            "window_s": self.window_s,
            "mean_bps": self.mean_bps,
            "max_bps": self.max_bps,
            "stddev_bps": self.stddev_bps,
            "byte_total": self.byte_total,
        }


def sync_clocks(samples: Sequence[tuple[int, int, int, int]]) -> ClockOffset:
    """NTP-style offset: mean of ((t2-t1)+(t3-t4))/2 over exchange samples.

    t1: local send, t2: remote receive, t3: remote send, t4: local receive,
    all in microseconds on their respective clocks.
    """
    if not samples:
        raise NoSamplesError("need at least one timestamp quadruple")
    offsets_us: list[float] = []
    for t1, t2, t3, t4 in samples:
        if t4 < t1 or t3 < t2:
            raise NonMonotoneSampleError(f"non-monotone sample {(t1, t2, t3, t4)}")
        offsets_us.append(((t2 - t1) + (t3 - t4)) / 2)
    mean_us = math.fsum(offsets_us) / len(offsets_us)
    variance = math.fsum((o - mean_us) ** 2 for o in offsets_us) / len(offsets_us)
    return ClockOffset(
        offset_ms=mean_us / 1000.0,
        dispersion_ms=math.sqrt(variance) / 1000.0,
        sample_count=len(offsets_us),
    )


def one_way_latency(rtt_ms: float) -> float:
    """Halve a measured round trip; the paths are assumed symmetric."""
    if rtt_ms < 0:
        raise NegativeRttError(f"negative round trip {rtt_ms}")
    return rtt_ms / 2


def meter_bandwidth(
    receipts: Iterable[ChannelReceipt], direction: str, window_s: float
) -> BitrateStats:
    """Aggregate receipts of one direction into byte-exact bitrate stats.

    All receipts must fall within one window of the earliest arrival; the
    per-second series is bucketed on arrival time relative to that origin.
    """
    if window_s <= 0:
        raise ValueError("window must be positive")
    selected = [r for r in receipts if r.direction == direction]
    if not selected:
        raise EmptyWindowError(f"no {direction} receipts in window")
    t0 = min(r.t_recv_us for r in selected)
    span_us = max(r.t_recv_us for r in selected) - t0
    window_us = round(window_s * 1_000_000)
    if span_us >= window_us + 1_000_000:
        raise ValueError("receipts span more than the stated window")
    bucket_count = max(1, math.ceil(window_s))
    buckets = [0] * bucket_count
    byte_total = 0
    for r in selected:
        index = min((r.t_recv_us - t0) // 1_000_000, bucket_count - 1)
        buckets[index] += r.payload_bytes
        byte_total += r.payload_bytes
    bucket_bps = [b * 8 for b in buckets]
    mean_bps = byte_total * 8 / window_s
    bucket_mean = math.fsum(bucket_bps) / len(bucket_bps)
    variance = math.fsum((b - bucket_mean) ** 2 for b in bucket_bps) / len(bucket_bps)
    return BitrateStats(
        window_s=window_s,
        mean_bps=mean_bps,
        max_bps=float(max(bucket_bps)),
        stddev_bps=math.sqrt(variance),
        byte_total=byte_total,
    )


class _Subscription:
    """Single-consumer FIFO stream of (payload, receipt) deliveries."""

    def __init__(self, topic: str):
        self.topic = topic
        self._queue: deque[tuple[bytes, ChannelReceipt]] = deque()
        self._cond = threading.Condition()

    def _deliver(self, payload: bytes, receipt: ChannelReceipt) -> None:
        with self._cond:
            self._queue.append((payload, receipt))
            self._cond.notify()

    def get(self, timeout: float | None = 0.0) -> tuple[bytes, ChannelReceipt] | None:
        with self._cond:
            if not self._queue and timeout:
                self._cond.wait(timeout)
            if not self._queue:
                return None
            return self._queue.popleft()

    def drain(self) -> list[tuple[bytes, ChannelReceipt]]:
        with self._cond:
            items = list(self._queue)
            self._queue.clear()
            return items

    def __len__(self) -> int:
        with self._cond:
            return len(self._queue)


class LoopbackSession:
    """One client attached to the loopback broker, with a link delay."""

    def __init__(self, broker: "LoopbackBroker", client_id: str, link_delay_us: int):
        self._broker = broker
        self.client_id = client_id
        self.link_delay_us = link_delay_us

    def publish(
        self, topic: str, payload: bytes, qos: int = 1, direction: str = DOWNLINK
    ) -> ChannelReceipt:
        return self._broker._publish(self, topic, payload, qos, direction)

    def subscribe(self, topic: str) -> _Subscription:
        return self._broker._subscribe(self, topic)


class LoopbackBroker:
    """In-process broker with deterministic per-client link delays.

    A published message reaches the broker after the publisher's link
    delay (that arrival is the publisher's receipt at qos >= 1) and each
    subscriber after the subscriber's own link delay on top.
    """

    def __init__(
        self,
        clock,
        link_delays_us: Mapping[str, int] | None = None,
        payload_cap_bytes: int = 262144,
    ):
        self._clock = clock
        self._link_delays_us = dict(link_delays_us or {})
        self._payload_cap = payload_cap_bytes
        self._subs: dict[str, list[tuple[LoopbackSession, _Subscription]]] = {}
        self._lock = threading.Lock()
        self._closed = False

    def attach(self, client_id: str, link_delay_us: int | None = None) -> LoopbackSession:
        if self._closed:
            raise BrokerUnavailableError("broker is closed")
        delay = link_delay_us if link_delay_us is not None else self._link_delays_us.get(client_id, 0)
        return LoopbackSession(self, client_id, delay)

    def close(self) -> None:
        self._closed = True

    def _subscribe(self, session: LoopbackSession, topic: str) -> _Subscription:
        if self._closed:
            raise BrokerUnavailableError("broker is closed")
        sub = _Subscription(topic)
        with self._lock:
            self._subs.setdefault(topic, []).append((session, sub))
        return sub

    def _publish(
        self,
        session: LoopbackSession,
        topic: str,
        payload: bytes,
        qos: int,
        direction: str,
    ) -> ChannelReceipt:
        if self._closed:
            raise BrokerUnavailableError("broker is closed")
        if len(payload) > self._payload_cap:
            raise PayloadTooLargeError(
                f"payload of {len(payload)} bytes exceeds cap {self._payload_cap}"
            )
        t_send = self._clock.now_us()
        t_broker = t_send + session.link_delay_us
        with self._lock:
            targets = list(self._subs.get(topic, ()))
        for sub_session, sub in targets:
            receipt = ChannelReceipt(
                channel=topic,
                payload_bytes=len(payload),
                t_send_us=t_send,
                t_recv_us=t_broker + sub_session.link_delay_us,
                direction=direction,
            )
            sub._deliver(payload, receipt)
        # Publisher-side receipt: broker arrival (the qos-1 acknowledgement point).
        return ChannelReceipt(
            channel=topic,
            payload_bytes=len(payload),
            t_send_us=t_send,
            t_recv_us=t_broker,
            direction=direction,
        )


class LoopbackRoute:
    """Request-path stand-in for an HTTP route, with one-way link delay."""

    def __init__(self, name: str, clock, delay_us: int = 0):
        self.name = name
        self._clock = clock
        self.delay_us = delay_us

    def send(self, payload: bytes, direction: str = UPLINK) -> ChannelReceipt:
        t_send = self._clock.now_us()
        return ChannelReceipt(
            channel=self.name,
            payload_bytes=len(payload),
            t_send_us=t_send,
            t_recv_us=t_send + self.delay_us,
            direction=direction,
        )


# --- Minimal MQTT 3.1.1 client (live binding) -------------------------------

_CONNECT = 0x10
_CONNACK = 0x20
_PUBLISH = 0x30
_PUBACK = 0x40
_SUBSCRIBE = 0x82
_SUBACK = 0x90
_PINGREQ = 0xC0
_PINGRESP = 0xD0
_DISCONNECT = 0xE0


def _encode_length(n: int) -> bytes:
    out = bytearray()
    while True:
        digit = n % 128
        n //= 128
        out.append(digit | 0x80 if n else digit)
        if not n:
            return bytes(out)


def _encode_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("!H", len(raw)) + raw


class Mqtt311Client:
    """Small MQTT 3.1.1 client: connect, publish (qos 0/1), subscribe.

    Covers exactly what the live topics need; not a general client.
    Incoming publishes are handed to the callback passed to subscribe().
    """

    def __init__(self, host: str, port: int = 1883, client_id: str = "semcast", timeout: float = 5.0):
        self.host = host
        self.port = port
        self.client_id = client_id
        self.timeout = timeout
        self._sock: socket.socket | None = None
        self._packet_id = 0
        self._acks: dict[int, threading.Event] = {}
        self._handlers: dict[str, Callable[[str, bytes], None]] = {}
        self._suback: dict[int, threading.Event] = {}
        self._lock = threading.Lock()
        self._reader: threading.Thread | None = None

    def connect(self) -> None:
        try:
            self._sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        except OSError as exc:
            raise BrokerUnavailableError(f"cannot reach broker at {self.host}:{self.port}: {exc}") from exc
        var = _encode_str("MQTT") + bytes([4, 0x02]) + struct.pack("!H", 60) + _encode_str(self.client_id)
        self._send_packet(_CONNECT, var)
        packet_type, payload = self._read_packet()
        if packet_type != _CONNACK or len(payload) < 2 or payload[1] != 0:
            self.close()
            raise BrokerUnavailableError("broker rejected the connection")
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._sock.sendall(bytes([_DISCONNECT, 0]))
            except OSError:
                pass
            try:
                self._sock.close()
            except OSError:
                pass
            self._sock = None

    def publish(self, topic: str, payload: bytes, qos: int = 0) -> None:
        if self._sock is None:
            raise BrokerUnavailableError("not connected")
        header = _PUBLISH | (qos << 1)
        var = _encode_str(topic)
        event = None
        if qos == 1:
            with self._lock:
                self._packet_id = self._packet_id % 65535 + 1
                pid = self._packet_id
                event = threading.Event()
                self._acks[pid] = event
            var += struct.pack("!H", pid)
        self._send_packet(header, var + payload)
        if event is not None and not event.wait(self.timeout):
            raise BrokerUnavailableError("no PUBACK from broker")

    def subscribe(self, topic: str, callback: Callable[[str, bytes], None], qos: int = 1) -> None:
        if self._sock is None:
            raise BrokerUnavailableError("not connected")
        with self._lock:
            self._packet_id = self._packet_id % 65535 + 1
            pid = self._packet_id
            event = threading.Event()
            self._suback[pid] = event
            self._handlers[topic] = callback
        var = struct.pack("!H", pid) + _encode_str(topic) + bytes([qos])
        self._send_packet(_SUBSCRIBE, var)
        if not event.wait(self.timeout):
            raise BrokerUnavailableError("no SUBACK from broker")

    def _send_packet(self, header: int, body: bytes) -> None:
        assert self._sock is not None
        try:
            self._sock.sendall(bytes([header]) + _encode_length(len(body)) + body)
        except OSError as exc:
            raise BrokerUnavailableError(f"send failed: {exc}") from exc

    def _read_exact(self, n: int) -> bytes:
        assert self._sock is not None
        buf = b""
        while len(buf) < n:
            chunk = self._sock.recv(n - len(buf))
            if not chunk:
                raise BrokerUnavailableError("broker closed the connection")
            buf += chunk
        return buf

    def _read_packet(self) -> tuple[int, bytes]:
        first = self._read_exact(1)[0]
        length = 0
        shift = 0
        while True:
            digit = self._read_exact(1)[0]
            length |= (digit & 0x7F) << shift
            if not digit & 0x80:
                break
            shift += 7
        return first, self._read_exact(length) if length else b""

    def _read_loop(self) -> None:
        try:
            while self._sock is not None:
                first, payload = self._read_packet()
                packet_type = first & 0xF0
                if packet_type == _PUBACK and len(payload) >= 2:
                    (pid,) = struct.unpack("!H", payload[:2])
                    event = self._acks.pop(pid, None)
                    if event:
                        event.set()
                elif packet_type == _SUBACK and len(payload) >= 2:
                    (pid,) = struct.unpack("!H", payload[:2])
                    event = self._suback.pop(pid, None)
                    if event:
                        event.set()
                elif packet_type == _PUBLISH:
                    qos = (first >> 1) & 0x03
                    (tlen,) = struct.unpack("!H", payload[:2])
                    topic = payload[2 : 2 + tlen].decode("utf-8")
                    rest = payload[2 + tlen :]
                    if qos >= 1 and len(rest) >= 2:
                        (pid,) = struct.unpack("!H", rest[:2])
                        rest = rest[2:]
                        self._send_packet(_PUBACK, struct.pack("!H", pid))
                    handler = self._handlers.get(topic)
                    if handler:
                        handler(topic, rest)
                elif packet_type == _PINGRESP:
                    pass
        except (BrokerUnavailableError, OSError):
            return


def topic_code(stream: str) -> str:
    return f"semcast/{stream}/code"


def topic_mulsemedia(stream: str) -> str:
    return f"semcast/{stream}/mulse"


def topic_telemetry(stream: str) -> str:
    return f"semcast/{stream}/telemetry"


def topic_command(stream: str) -> str:
    return f"semcast/{stream}/cmd"
