from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from semcast.baseline import (
    EmptyTraceError,
    LatencyBreakdownTraditional,
    NegativeComponentError,
    VideoTrace,
    aggregate_mean_bps,
    e2e_latency_traditional,
    replay_trace,
)
from semcast.transport import DOWNLINK, UPLINK, meter_bandwidth


def _flat_trace(up_bps: int, down_bps: int, seconds: int, video_id=99) -> VideoTrace:
    return VideoTrace(
        video_id=video_id,
        duration_s=seconds,
        uplink_bps=tuple([up_bps] * seconds),
        downlink_bps=tuple([down_bps] * seconds),
    )


class TestVideoTrace:
    def test_length_must_match_duration(self):
        with pytest.raises(ValueError):
            VideoTrace(1, 10, (100,) * 9, (100,) * 9)

    def test_downlink_capped_by_uplink(self):
        with pytest.raises(ValueError):
            VideoTrace(1, 1, (100,), (200,))

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            VideoTrace(1, 1, (-8,), (-8,))

    def test_json_round_trip(self):
        trace = _flat_trace(800, 640, 3)
        assert VideoTrace.from_dict(trace.to_dict()) == trace


class TestReplay:
    def test_flat_uplink_within_one_percent(self):
        trace = _flat_trace(5_900_000, 5_800_000, 10)
        receipts = replay_trace(trace)
        stats = meter_bandwidth(receipts, UPLINK, 10.0)
        assert abs(stats.mean_bps - 5_900_000) / 5_900_000 < 0.01

    def test_flat_downlink_within_one_percent(self):
        trace = _flat_trace(5_900_000, 5_800_000, 10)
        receipts = replay_trace(trace)
        stats = meter_bandwidth(receipts, DOWNLINK, 10.0)
        assert abs(stats.mean_bps - 5_800_000) / 5_800_000 < 0.01

    def test_zero_trace_zero_receipts(self):
        trace = _flat_trace(0, 0, 4)
        assert replay_trace(trace) == []

    def test_empty_trace_error(self):
        trace = _flat_trace(100, 100, 1)
        object.__setattr__(trace, "uplink_bps", ())
        with pytest.raises(EmptyTraceError):
            replay_trace(trace)

    def test_per_second_fidelity_on_bundled_trace(self, dataset):
        # Every per-second bucket must match the authored series within 1%.
        trace = dataset.baseline_trace(1)
        receipts = [r for r in replay_trace(trace) if r.direction == UPLINK]
        buckets = [0] * len(trace.uplink_bps)
        for receipt in receipts:
            buckets[receipt.t_recv_us // 1_000_000] += receipt.payload_bytes
        for second, authored in enumerate(trace.uplink_bps):
            assert abs(buckets[second] * 8 - authored) <= max(8, authored * 0.01), second

    def test_speed_compresses_timeline(self):
        trace = _flat_trace(8000, 8000, 4)
        normal = replay_trace(trace)
        fast = replay_trace(trace, speed=2.0)
        assert fast[-1].t_recv_us * 2 == normal[-1].t_recv_us

    def test_bundled_aggregate_means(self, dataset):
        traces = [dataset.baseline_trace(v) for v in range(1, 10)]
        up = aggregate_mean_bps(traces, UPLINK)
        down = aggregate_mean_bps(traces, DOWNLINK)
        assert abs(up - 5.9e6) / 5.9e6 < 0.01
        assert abs(down - 5.8e6) / 5.8e6 < 0.01


class TestLatency:
    def test_zero(self):
        assert e2e_latency_traditional(LatencyBreakdownTraditional(0, 0, 0)) == 0

    def test_reference_total(self):
        assert e2e_latency_traditional(LatencyBreakdownTraditional(300, 580, 100)) == 980

    def test_permutation_invariance(self):
        a = e2e_latency_traditional(LatencyBreakdownTraditional(0.1, 0.2, 0.7))
        b = e2e_latency_traditional(LatencyBreakdownTraditional(0.7, 0.2, 0.1))
        assert a == b

    def test_negative_component(self):
        with pytest.raises(NegativeComponentError):
            LatencyBreakdownTraditional(-1, 0, 0)

    @given(
        st.floats(0, 1e6, allow_nan=False),
        st.floats(0, 1e6, allow_nan=False),
        st.floats(0, 1e6, allow_nan=False),
    )
    def test_exact_additivity(self, a, b, c):
        total = e2e_latency_traditional(LatencyBreakdownTraditional(a, b, c))
        assert total == math.fsum((a, b, c))
