"""Run configuration: strict TOML schema, round-trippable, fingerprintable.

Unknown keys are rejected at load time so a typo in a profile never
silently falls back to a default. All defaults reproduce the benchmark's
reference setup: mock backends, loopback broker, bundled dataset.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import tomlkit

from .agents import DEFAULT_FUSION_SYSTEM_PROMPT


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class BackendConfig:
    mode: str = "mock"  # mock | remote
    model_id: str = ""
    endpoint: str = ""
    token_env: str = "SEMCAST_API_TOKEN"
    token_cap: int = 2048
    injected_latency_ms: float = 0.0
    fixture_path: str = ""  # empty = bundled fixture for this role


@dataclass(frozen=True)
class EmbeddingConfig:
    mode: str = "mock"  # mock | remote
    endpoint: str = ""
    token_env: str = "SEMCAST_EMBED_TOKEN"
    model_id: str = "embed-mock"
    dimensions: int = 64


@dataclass(frozen=True)
class LinkProfile:
    """One-way injected link delays, milliseconds."""

    uav_cloud_ms: float = 48.0
    uav_edge_ms: float = 20.0
    hmd_edge_ms: float = 10.0
    edge_cloud_ms: float = 2.0


@dataclass(frozen=True)
class LatencyConfig:
    code_rendering_ms: float = 10.0
    baseline_rtsp_ms: float = 300.0
    baseline_webrtc_ms: float = 580.0
    baseline_rendering_ms: float = 100.0


@dataclass(frozen=True)
class UplinkConfig:
    frame_rate: float = 30.0
    sampling_period: int = 30
    telemetry_hz: float = 25.0


@dataclass(frozen=True)
class ZoneConfig:
    zone_id: str
    bearing_deg: float


@dataclass(frozen=True)
class ActuatorConfig:
    zones: tuple[ZoneConfig, ...] = (
        ZoneConfig("front", 0.0),
        ZoneConfig("right", 90.0),
        ZoneConfig("back", 180.0),
        ZoneConfig("left", 270.0),
    )


@dataclass(frozen=True)
class EnvironmentConfig:
    base_temperature_c: float = 15.0
    v_max_mps: float = 5.0
    keyword_offsets_c: tuple[tuple[str, float], ...] = (("desert", 15.0), ("snow", -10.0))


@dataclass(frozen=True)
class RunConfig:
    fusion: BackendConfig = BackendConfig(model_id="fusion-mock", token_cap=256, injected_latency_ms=4600.0)
    codegen: BackendConfig = BackendConfig(model_id="codegen-mock", token_cap=128, injected_latency_ms=9000.0)
    embedding: EmbeddingConfig = EmbeddingConfig()
    uplink: UplinkConfig = UplinkConfig()
    links: LinkProfile = LinkProfile()
    latency: LatencyConfig = LatencyConfig()
    actuators: ActuatorConfig = ActuatorConfig()
    environment: EnvironmentConfig = EnvironmentConfig()
    broker_address: str = "loopback"
    dataset_path: str = ""  # empty = bundled dataset
    memory_turns: int = 8
    retries: int = 3
    # No canonical upstream text exists for the fusion system prompt; this
    # project default is part of the config so deployments can replace it.
    fusion_system_prompt: str = DEFAULT_FUSION_SYSTEM_PROMPT

    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_config(self).encode("utf-8")).hexdigest()


def _backend_table(cfg: BackendConfig) -> dict:
    return {
        "mode": cfg.mode,
        "model_id": cfg.model_id,
        "endpoint": cfg.endpoint,
        "token_env": cfg.token_env,
        "token_cap": cfg.token_cap,
        "injected_latency_ms": cfg.injected_latency_ms,
        "fixture_path": cfg.fixture_path,
    }


def serialize_config(config: RunConfig) -> str:
    doc = tomlkit.document()
    doc["broker_address"] = config.broker_address
    doc["dataset_path"] = config.dataset_path
    doc["memory_turns"] = config.memory_turns
    doc["retries"] = config.retries
    doc["fusion_system_prompt"] = config.fusion_system_prompt

    backends = tomlkit.table()
    backends["fusion"] = _backend_table(config.fusion)
    backends["codegen"] = _backend_table(config.codegen)
    backends["embedding"] = {
        "mode": config.embedding.mode,
        "endpoint": config.embedding.endpoint,
        "token_env": config.embedding.token_env,
        "model_id": config.embedding.model_id,
        "dimensions": config.embedding.dimensions,
    }
    doc["backends"] = backends

    doc["uplink"] = {
        "frame_rate": config.uplink.frame_rate,
        "sampling_period": config.uplink.sampling_period,
        "telemetry_hz": config.uplink.telemetry_hz,
    }
    doc["links"] = {
        "uav_cloud_ms": config.links.uav_cloud_ms,
        "uav_edge_ms": config.links.uav_edge_ms,
        "hmd_edge_ms": config.links.hmd_edge_ms,
        "edge_cloud_ms": config.links.edge_cloud_ms,
    }
    doc["latency"] = {
        "code_rendering_ms": config.latency.code_rendering_ms,
        "baseline_rtsp_ms": config.latency.baseline_rtsp_ms,
        "baseline_webrtc_ms": config.latency.baseline_webrtc_ms,
        "baseline_rendering_ms": config.latency.baseline_rendering_ms,
    }
    doc["environment"] = {
        "base_temperature_c": config.environment.base_temperature_c,
        "v_max_mps": config.environment.v_max_mps,
        "keyword_offsets_c": dict(config.environment.keyword_offsets_c),
    }
    zones = tomlkit.aot()
    for zone in config.actuators.zones:
        item = tomlkit.table()
        item["zone_id"] = zone.zone_id
        item["bearing_deg"] = zone.bearing_deg
        zones.append(item)
    actuators = tomlkit.table()
    actuators["zones"] = zones
    doc["actuators"] = actuators
    return tomlkit.dumps(doc)


def _take(table: dict, key: str, default, caster=None):
    if key not in table:
        return default
    value = table.pop(key)
    return caster(value) if caster is not None else value


def _reject_unknown(table: dict, context: str) -> None:
    if table:
        raise ConfigError(f"unknown key(s) in {context}: {', '.join(sorted(table))}")


def _load_backend(table: dict, context: str, defaults: BackendConfig) -> BackendConfig:
    cfg = BackendConfig(
        mode=_take(table, "mode", defaults.mode, str),
        model_id=_take(table, "model_id", defaults.model_id, str),
        endpoint=_take(table, "endpoint", defaults.endpoint, str),
        token_env=_take(table, "token_env", defaults.token_env, str),
        token_cap=_take(table, "token_cap", defaults.token_cap, int),
        injected_latency_ms=_take(table, "injected_latency_ms", defaults.injected_latency_ms, float),
        fixture_path=_take(table, "fixture_path", defaults.fixture_path, str),
    )
    _reject_unknown(table, context)
    if cfg.mode not in ("mock", "remote"):
        raise ConfigError(f"{context}.mode must be 'mock' or 'remote', got {cfg.mode!r}")
    return cfg


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomlkit.parse(text)
    except Exception as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    data = {k: v for k, v in raw.items()}
    data = _plainify(data)
    defaults = RunConfig()

    backends = data.pop("backends", {})
    fusion = _load_backend(dict(backends.pop("fusion", {})), "backends.fusion", defaults.fusion)
    codegen = _load_backend(dict(backends.pop("codegen", {})), "backends.codegen", defaults.codegen)
    embed_table = dict(backends.pop("embedding", {}))
    embedding = EmbeddingConfig(
        mode=_take(embed_table, "mode", defaults.embedding.mode, str),
        endpoint=_take(embed_table, "endpoint", defaults.embedding.endpoint, str),
        token_env=_take(embed_table, "token_env", defaults.embedding.token_env, str),
        model_id=_take(embed_table, "model_id", defaults.embedding.model_id, str),
        dimensions=_take(embed_table, "dimensions", defaults.embedding.dimensions, int),
    )
    _reject_unknown(embed_table, "backends.embedding")
    _reject_unknown(dict(backends), "backends")

    uplink_table = dict(data.pop("uplink", {}))
    uplink = UplinkConfig(
        frame_rate=_take(uplink_table, "frame_rate", defaults.uplink.frame_rate, float),
        sampling_period=_take(uplink_table, "sampling_period", defaults.uplink.sampling_period, int),
        telemetry_hz=_take(uplink_table, "telemetry_hz", defaults.uplink.telemetry_hz, float),
    )
    _reject_unknown(uplink_table, "uplink")
    if uplink.sampling_period < 1:
        raise ConfigError("uplink.sampling_period must be >= 1")

    links_table = dict(data.pop("links", {}))
    links = LinkProfile(
        uav_cloud_ms=_take(links_table, "uav_cloud_ms", defaults.links.uav_cloud_ms, float),
        uav_edge_ms=_take(links_table, "uav_edge_ms", defaults.links.uav_edge_ms, float),
        hmd_edge_ms=_take(links_table, "hmd_edge_ms", defaults.links.hmd_edge_ms, float),
        edge_cloud_ms=_take(links_table, "edge_cloud_ms", defaults.links.edge_cloud_ms, float),
    )
    _reject_unknown(links_table, "links")

    latency_table = dict(data.pop("latency", {}))
    latency = LatencyConfig(
        code_rendering_ms=_take(latency_table, "code_rendering_ms", defaults.latency.code_rendering_ms, float),
        baseline_rtsp_ms=_take(latency_table, "baseline_rtsp_ms", defaults.latency.baseline_rtsp_ms, float),
        baseline_webrtc_ms=_take(latency_table, "baseline_webrtc_ms", defaults.latency.baseline_webrtc_ms, float),
        baseline_rendering_ms=_take(
            latency_table, "baseline_rendering_ms", defaults.latency.baseline_rendering_ms, float
        ),
    )
    _reject_unknown(latency_table, "latency")

    env_table = dict(data.pop("environment", {}))
    offsets = _take(env_table, "keyword_offsets_c", dict(defaults.environment.keyword_offsets_c))
    environment = EnvironmentConfig(
        base_temperature_c=_take(env_table, "base_temperature_c", defaults.environment.base_temperature_c, float),
        v_max_mps=_take(env_table, "v_max_mps", defaults.environment.v_max_mps, float),
        keyword_offsets_c=tuple(sorted((str(k), float(v)) for k, v in dict(offsets).items())),
    )
    _reject_unknown(env_table, "environment")

    actuators_table = dict(data.pop("actuators", {}))
    zone_rows = _take(actuators_table, "zones", None)
    _reject_unknown(actuators_table, "actuators")
    if zone_rows is None:
        actuators = defaults.actuators
    else:
        zones = []
        for row in zone_rows:
            row = dict(row)
            zones.append(
                ZoneConfig(
                    zone_id=str(_take(row, "zone_id", "")),
                    bearing_deg=_take(row, "bearing_deg", 0.0, float),
                )
            )
            _reject_unknown(row, "actuators.zones[]")
        if not zones:
            raise ConfigError("actuators.zones must not be empty")
        actuators = ActuatorConfig(zones=tuple(zones))

    config = RunConfig(
        fusion=fusion,
        codegen=codegen,
        embedding=embedding,
        uplink=uplink,
        links=links,
        latency=latency,
        actuators=actuators,
        environment=environment,
        broker_address=_take(data, "broker_address", defaults.broker_address, str),
        dataset_path=_take(data, "dataset_path", defaults.dataset_path, str),
        memory_turns=_take(data, "memory_turns", defaults.memory_turns, int),
        retries=_take(data, "retries", defaults.retries, int),
        fusion_system_prompt=_take(data, "fusion_system_prompt", defaults.fusion_system_prompt, str),
    )
    _reject_unknown(data, "config root")
    if config.memory_turns < 0:
        raise ConfigError("memory_turns must be >= 0")
    if config.retries < 1:
        raise ConfigError("retries must be >= 1")
    return config


def _plainify(value):
    """Unwrap tomlkit containers into plain dicts/lists/scalars."""
    if hasattr(value, "items"):
        return {str(k): _plainify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plainify(v) for v in value]
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, float):
        return float(value)
    if isinstance(value, str):
        return str(value)
    return value


def load_config(path: str | Path | None = None) -> RunConfig:
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)
