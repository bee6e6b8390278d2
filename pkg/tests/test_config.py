from __future__ import annotations

import pytest

from semcast.config import (
    ConfigError,
    RunConfig,
    load_config,
    parse_config,
    serialize_config,
)


class TestRoundTrip:
    def test_default_round_trip(self):
        config = RunConfig()
        assert parse_config(serialize_config(config)) == config

    def test_modified_round_trip(self):
        config = RunConfig(memory_turns=4, retries=2, broker_address="mqtt://host:1883")
        assert parse_config(serialize_config(config)) == config

    def test_fingerprint_stable(self):
        assert RunConfig().fingerprint() == RunConfig().fingerprint()

    def test_fingerprint_changes_with_content(self):
        assert RunConfig().fingerprint() != RunConfig(retries=2).fingerprint()


class TestStrictness:
    def test_unknown_root_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("bogus_key = 1\n")

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigError, match="links"):
            parse_config("[links]\nwarp_drive_ms = 1.0\n")

    def test_unknown_backend_key(self):
        with pytest.raises(ConfigError, match="backends.fusion"):
            parse_config("[backends.fusion]\ntemperature = 0.5\n")

    def test_bad_mode(self):
        with pytest.raises(ConfigError, match="mode"):
            parse_config('[backends.codegen]\nmode = "telepathy"\n')

    def test_bad_retries(self):
        with pytest.raises(ConfigError, match="retries"):
            parse_config("retries = 0\n")

    def test_invalid_toml(self):
        with pytest.raises(ConfigError, match="invalid TOML"):
            parse_config("= nonsense")

    def test_empty_zone_list(self):
        with pytest.raises(ConfigError, match="zones"):
            parse_config("[actuators]\nzones = []\n")


class TestPartialOverrides:
    def test_links_override(self):
        config = parse_config("[links]\nuav_cloud_ms = 99.0\n")
        assert config.links.uav_cloud_ms == 99.0
        assert config.links.edge_cloud_ms == 2.0  # untouched default

    def test_zone_table(self):
        text = """
[actuators]
[[actuators.zones]]
zone_id = "chest"
bearing_deg = 0.0
[[actuators.zones]]
zone_id = "spine"
bearing_deg = 180.0
"""
        config = parse_config(text)
        assert [z.zone_id for z in config.actuators.zones] == ["chest", "spine"]

    def test_keyword_offsets(self):
        config = parse_config("[environment]\nkeyword_offsets_c = {snow = -7.5}\n")
        assert config.environment.keyword_offsets_c == (("snow", -7.5),)

    def test_defaults_reference_setup(self):
        config = RunConfig()
        assert config.fusion.injected_latency_ms + config.codegen.injected_latency_ms == 13_600.0
        assert config.links.uav_cloud_ms == 48.0
        assert config.links.edge_cloud_ms == 2.0
        assert config.latency.code_rendering_ms == 10.0
        assert config.uplink.sampling_period == 30
        assert config.uplink.telemetry_hz == 25.0
        assert config.memory_turns == 8
        assert config.retries == 3


def test_load_config_default_when_none():
    assert load_config(None) == RunConfig()


def test_load_config_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(serialize_config(RunConfig(retries=2)), encoding="utf-8")
    assert load_config(path).retries == 2
