from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from semcast.mulsemedia import (
    ActuatorZone,
    DEFAULT_LAYOUT,
    EmptyLayoutError,
    MulsemediaFrame,
    build_mulsemedia_map,
    estimate_environment,
)
from semcast.uplink import encode_telemetry


def _telemetry(alt=0.0, speed=0.0, accel=(0.0, 0.0, 0.0), ts=0):
    return encode_telemetry(
        {
            "altitude_m": alt,
            "latitude_deg": 60.0,
            "longitude_deg": 24.0,
            "ground_speed_mps": speed,
            "accel_mps2": list(accel),
            "gyro_radps": [0.0, 0.0, 0.0],
        },
        timestamp_us=ts,
    )


class TestEstimateEnvironment:
    def test_sea_level_identity(self):
        estimate = estimate_environment(_telemetry(alt=0.0), "")
        assert estimate.temperature_c == 15.0

    def test_standard_lapse_at_1000m(self):
        # Hand calculation: 15 - 6.5 * 1 = 8.5.
        estimate = estimate_environment(_telemetry(alt=1000.0), "")
        assert estimate.temperature_c == pytest.approx(8.5)

    def test_snow_keyword_offset(self):
        base = estimate_environment(_telemetry(alt=0.0), "")
        snowy = estimate_environment(_telemetry(alt=0.0), "snow-covered trees everywhere")
        assert snowy.temperature_c == pytest.approx(base.temperature_c - 10.0)
        assert snowy.confidence > base.confidence

    def test_wind_from_imu_residual(self):
        calm = estimate_environment(_telemetry(), "")
        assert calm.wind_speed_mps == 0.0
        gusty = estimate_environment(_telemetry(accel=(0.6, 0.8, 0.0)), "")
        assert gusty.wind_speed_mps == pytest.approx(1.0, abs=1e-3)
        assert 0.0 <= gusty.wind_direction_deg < 360.0


class TestMulsemediaMap:
    def test_zero_speed_all_zero(self):
        estimate = estimate_environment(_telemetry(), "")
        frame = build_mulsemedia_map(estimate, _telemetry(), DEFAULT_LAYOUT)
        assert all(v == 0.0 for _, v in frame.vibration_zones)

    def test_vmax_front_saturates(self):
        telemetry = _telemetry(speed=5.0)
        estimate = estimate_environment(telemetry, "")
        frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT, v_max_mps=5.0)
        zones = dict(frame.vibration_zones)
        assert zones["front"] == 1.0

    def test_wind_from_90_cosine_weighting(self):
        # Oracle: hand-computed cos(bearing - 90) per zone, clamped at zero.
        telemetry = _telemetry(speed=2.5, accel=(-1.0, 0.0, 0.0))  # push east->wind from 90
        estimate = estimate_environment(telemetry, "")
        assert estimate.wind_direction_deg == pytest.approx(90.0)
        frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT, v_max_mps=5.0)
        zones = dict(frame.vibration_zones)
        base = 0.5
        for zone in DEFAULT_LAYOUT:
            expected = base * max(0.0, math.cos(math.radians(zone.bearing_deg - 90.0)))
            assert zones[zone.zone_id] == pytest.approx(expected, abs=1e-4), zone.zone_id

    def test_thermal_zones_carry_estimate(self):
        telemetry = _telemetry(alt=1000.0)
        estimate = estimate_environment(telemetry, "")
        frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT)
        assert all(v == pytest.approx(8.5) for _, v in frame.thermal_zones)

    def test_empty_layout(self):
        estimate = estimate_environment(_telemetry(), "")
        with pytest.raises(EmptyLayoutError):
            build_mulsemedia_map(estimate, _telemetry(), ())

    def test_timestamp_pairs_with_scene_update(self):
        telemetry = _telemetry(ts=123_456)
        estimate = estimate_environment(telemetry, "")
        frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT, scene_timestamp_us=999)
        assert frame.timestamp_us == 999

    def test_neutral_frame_for_zero_telemetry(self):
        telemetry = _telemetry()
        estimate = estimate_environment(telemetry, "")
        frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT)
        assert all(v == 0.0 for _, v in frame.vibration_zones)
        assert all(v == 15.0 for _, v in frame.thermal_zones)

    @given(st.lists(st.floats(0, 20, allow_nan=False), min_size=2, max_size=8))
    def test_monotone_in_ground_speed(self, speeds):
        speeds = sorted(speeds)
        telemetry0 = _telemetry(accel=(-0.4, 0.3, 0.0))
        estimate = estimate_environment(telemetry0, "")
        last = {zone.zone_id: -1.0 for zone in DEFAULT_LAYOUT}
        for speed in speeds:
            telemetry = _telemetry(speed=min(speed, 999), accel=(-0.4, 0.3, 0.0))
            frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT)
            for zone_id, value in frame.vibration_zones:
                assert value >= last[zone_id] - 1e-12
                last[zone_id] = value

    def test_wire_format_round_trip(self):
        telemetry = _telemetry(speed=3.0, ts=42)
        estimate = estimate_environment(telemetry, "snowfall")
        frame = build_mulsemedia_map(estimate, telemetry, DEFAULT_LAYOUT)
        raw = frame.to_json()
        again = MulsemediaFrame.from_json(raw)
        assert again.to_json() == raw
        assert raw.startswith('{"thermal":')

    def test_intensity_range_enforced(self):
        with pytest.raises(ValueError):
            MulsemediaFrame(0, (("front", 10.0),), (("front", 1.5),))

    def test_custom_layout(self):
        layout = (ActuatorZone("chest", 0.0), ActuatorZone("spine", 180.0))
        telemetry = _telemetry(speed=2.0)
        estimate = estimate_environment(telemetry, "")
        frame = build_mulsemedia_map(estimate, telemetry, layout)
        assert {z for z, _ in frame.vibration_zones} == {"chest", "spine"}
