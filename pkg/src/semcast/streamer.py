"""Live semantic pipeline: trace replay onto real topics in real time.

Drives one video's annotation trace through the agents at wall-clock
pace, publishes code/mulsemedia/telemetry onto broker topics, mirrors
them over the websocket bridge for the operator console, stores scenes
in the digital-twin log, and logs pilot commands and render reports
coming back from the console. Mulsemedia frames also go to a logging
sink standing in for the haptic-suit consumer.
"""

from __future__ import annotations

import hashlib
import http.server
import json
import logging
import threading
import time
from functools import partial
from pathlib import Path

from .agents import AgentPipeline, ExchangeStore, MockCompletionBackend
from .bench import make_completion_backend
from .config import RunConfig
from .dataset import TraceDataset
from .dtstore import DigitalTwinStore, DTEntry
from .mulsemedia import ActuatorZone, build_mulsemedia_map, estimate_environment
from .transport import (
    LoopbackBroker,
    SystemClock,
    topic_code,
    topic_command,
    topic_mulsemedia,
    topic_telemetry,
)
from .uplink import (
    ReplayCaptionAdapter,
    ReplayDetectionAdapter,
    build_annotation_packet,
    encode_telemetry,
    sample_frames,
)

log = logging.getLogger("semcast.stream")


def _metrics_topic(stream: str) -> str:
    return f"semcast/{stream}/metrics"


class _AnnotationsHandler(http.server.SimpleHTTPRequestHandler):
    """Static console assets plus POST /v1/annotations ingestion."""

    def __init__(self, *args, inbox=None, **kwargs):
        self._inbox = inbox
        super().__init__(*args, **kwargs)

    def do_POST(self):  # noqa: N802 - http.server API
        if self.path != "/v1/annotations":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        try:
            json.loads(body)
        except json.JSONDecodeError:
            self.send_error(400, "body must be JSON")
            return
        if self._inbox is not None:
            self._inbox.append(body)
        self.send_response(202)
        self.end_headers()

    def log_message(self, fmt, *args):  # quieten the default stderr spam
        log.debug("http: " + fmt, *args)


def run_stream(
    config: RunConfig,
    dataset: TraceDataset,
    video_id: int = 10,
    ws_port: int = 8765,
    http_port: int = 8088,
    assets_dir: str | None = None,
    speed: float = 1.0,
    duration_s: float | None = None,
    dt_log_path: str | Path | None = None,
) -> None:
    meta = dataset.video(video_id)
    stream = f"video-{video_id:02d}"
    clock = SystemClock()
    broker = LoopbackBroker(clock)
    publisher = broker.attach("edge-publisher")

    command_sub = broker.attach("command-logger").subscribe(topic_command(stream))
    metrics_sub = broker.attach("metrics-logger").subscribe(_metrics_topic(stream))
    mulse_sink = broker.attach("actuator-sink").subscribe(topic_mulsemedia(stream))

    if config.fusion.mode == "mock":
        fusion = MockCompletionBackend(
            dataset.fixture_map("fusion"), config.fusion.model_id or "fusion-mock",
            config.fusion.token_cap,
        )
    else:
        fusion = make_completion_backend(config.fusion, clock, dataset, "fusion")
    if config.codegen.mode == "mock":
        codegen = MockCompletionBackend(
            dataset.fixture_map("codegen"), config.codegen.model_id or "codegen-mock",
            config.codegen.token_cap,
        )
    else:
        codegen = make_completion_backend(config.codegen, clock, dataset, "codegen")

    pipeline = AgentPipeline(
        fusion, codegen, clock, store=ExchangeStore(),
        memory_turns=config.memory_turns, retries=config.retries,
        fusion_system_prompt=config.fusion_system_prompt,
    )
    dt_store = DigitalTwinStore(dt_log_path)
    layout = tuple(ActuatorZone(z.zone_id, z.bearing_deg) for z in config.actuators.zones)
    offsets = dict(config.environment.keyword_offsets_c)

    from .wsbridge import WebsocketBridge

    bridge = WebsocketBridge(broker, port=ws_port)
    threading.Thread(target=bridge.run, daemon=True).start()

    inbox: list[bytes] = []
    directory = assets_dir or "."
    handler = partial(_AnnotationsHandler, inbox=inbox, directory=directory)
    httpd = http.server.ThreadingHTTPServer(("127.0.0.1", http_port), handler)
    threading.Thread(target=httpd.serve_forever, daemon=True).start()
    log.info("stream %s: ws://127.0.0.1:%d http://127.0.0.1:%d", stream, ws_port, http_port)

    trace = dataset.annotation_trace(video_id)
    detector = ReplayDetectionAdapter(trace)
    captioner = ReplayCaptionAdapter(trace)
    run_duration = min(duration_s or meta.duration_s, meta.duration_s)
    tickets = sample_frames(
        config.uplink.frame_rate, config.uplink.sampling_period, run_duration, stream
    )

    telemetry_period_s = 1.0 / config.uplink.telemetry_hz
    stop = threading.Event()

    def telemetry_loop() -> None:
        last_ts = -1
        start = time.monotonic()
        while not stop.is_set():
            elapsed = (time.monotonic() - start) * speed
            if elapsed >= run_duration:
                return
            frame_index = int(elapsed * config.uplink.frame_rate)
            base = trace.entry(min(frame_index // config.uplink.sampling_period
                                   * config.uplink.sampling_period,
                                   tickets[-1].frame_index))
            ts = clock.now_us()
            if ts <= last_ts:
                ts = last_ts + 1
            last_ts = ts
            packet = encode_telemetry(dict(base["telemetry"]), timestamp_us=ts)
            publisher.publish(
                topic_telemetry(stream),
                json.dumps(packet.to_dict(), sort_keys=True).encode("utf-8"),
                qos=0,
            )
            stop.wait(telemetry_period_s / speed)

    telemetry_thread = threading.Thread(target=telemetry_loop, daemon=True)
    telemetry_thread.start()

    start = time.monotonic()
    try:
        for ticket in tickets:
            due = ticket.capture_ts_us / 1e6 / speed
            delay = due - (time.monotonic() - start)
            if delay > 0:
                time.sleep(delay)
            entry = trace.entry(ticket.frame_index)
            telemetry = encode_telemetry(entry["telemetry"], timestamp_us=clock.now_us())
            packet = build_annotation_packet(
                detector.detect(ticket), captioner.caption(ticket), telemetry, ticket
            )
            update = pipeline.handle_packet(packet)
            publisher.publish(topic_code(stream), update.scene_code.encode("utf-8"), qos=1)
            estimate = estimate_environment(
                telemetry, update.description.text,
                base_temperature_c=config.environment.base_temperature_c,
                keyword_offsets_c=offsets,
            )
            frame = build_mulsemedia_map(
                estimate, telemetry, layout,
                scene_timestamp_us=telemetry.timestamp_us,
                v_max_mps=config.environment.v_max_mps,
            )
            publisher.publish(topic_mulsemedia(stream), frame.to_json().encode("utf-8"), qos=1)
            if update.generated:
                dt_store.store_scene(
                    DTEntry(
                        scene_code=update.scene_code,
                        latitude_deg=telemetry.latitude_deg,
                        longitude_deg=telemetry.longitude_deg,
                        altitude_m=telemetry.altitude_m,
                        timestamp_us=telemetry.timestamp_us,
                        description_hash=hashlib.sha256(
                            update.description.text.encode()
                        ).hexdigest(),
                        stream_id=stream,
                    )
                )
            metrics = {
                "uplink_bps": packet.encoded_bytes * 8,
                "downlink_bps": len(update.scene_code.encode("utf-8")) * 8,
                "text_to_code_ms": update.text_to_code_ms,
                "mqtt_ms": None,
                "code_rendering_ms": None,
                "mulse": json.loads(frame.to_json()),
            }
            publisher.publish(
                _metrics_topic(stream), json.dumps(metrics, sort_keys=True).encode("utf-8"), qos=1
            )
            for payload, _receipt in command_sub.drain():
                log.info("pilot command: %s", payload.decode("utf-8"))
            for payload, _receipt in metrics_sub.drain():
                log.debug("metrics echo: %s", payload.decode("utf-8"))
            for payload, _receipt in mulse_sink.drain():
                log.debug("actuator sink: %s", payload.decode("utf-8"))
    except KeyboardInterrupt:
        log.info("stream interrupted")
    finally:
        stop.set()
        telemetry_thread.join(timeout=2.0)
        httpd.shutdown()
        broker.close()
