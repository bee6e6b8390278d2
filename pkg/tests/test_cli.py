from __future__ import annotations

import json

import pytest

from semcast.agents import ExchangeRecord, PromptText
from semcast.cli import EXIT_OK, EXIT_PARTIAL, EXIT_VALIDATION, main
from semcast.dataset import BUNDLED_DATA_DIR
from semcast.dtstore import DigitalTwinStore, DTEntry


def test_validate_passes_on_compliant_corpus(capsys):
    files = [str(BUNDLED_DATA_DIR / "corpus" / "compliant" / f"scene_{i:02d}.html") for i in range(3)]
    assert main(["validate", *files]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 3


def test_validate_fails_on_adversarial(capsys):
    bad = str(BUNDLED_DATA_DIR / "corpus" / "adversarial" / "forbidden_tag_assets_00.html")
    assert main(["validate", bad]) == EXIT_VALIDATION
    out = capsys.readouterr().out
    assert "forbidden-tag" in out


def test_validate_advisory_on_tiny_scene(tmp_path, capsys):
    path = tmp_path / "tiny.html"
    path.write_text('<a-sky color="#000000" animation="property: rotation; to: 0 360 0"></a-sky>')
    assert main(["validate", str(path)]) == EXIT_OK
    assert "advisory" in capsys.readouterr().out


def test_run_subset_writes_artifacts(tmp_path, capsys):
    code = main(["run", "--videos", "1,7", "--out", str(tmp_path / "artifacts"), "--quiet"])
    assert code == EXIT_OK
    report = json.loads((tmp_path / "artifacts" / "report.json").read_text())
    assert len(report["videos"]) == 2


def test_run_partial_exit_code(tmp_path):
    assert main(["run", "--videos", "1,999", "--quiet"]) == EXIT_PARTIAL


def test_eval_captions(capsys):
    assert main(["eval-captions"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["per_video"]) == 10


def test_baseline_command(capsys):
    assert main(["baseline", "--videos", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["1"]["uplink"]["mean_bps"] > 1e6


def test_export_dataset_command(tmp_path, capsys):
    records = [
        ExchangeRecord(1, PromptText("s", "p1"), "c1", 1.0, None),
        ExchangeRecord(2, PromptText("", "p2"), "c2", 1.0, "pass"),
        ExchangeRecord(2, PromptText("", "p3"), "c3", 1.0, "fail"),
    ]
    exchanges = tmp_path / "exchanges.jsonl"
    exchanges.write_text(
        "\n".join(json.dumps(r.to_dict(), sort_keys=True) for r in records) + "\n"
    )
    out = tmp_path / "pairs.jsonl"
    assert main(["export-dataset", "--exchanges", str(exchanges), "--out", str(out)]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 2
    assert "exported 2 pair(s)" in capsys.readouterr().out


def test_export_dataset_empty_after_filter(tmp_path):
    record = ExchangeRecord(2, PromptText("", "p"), "c", 1.0, "fail")
    exchanges = tmp_path / "exchanges.jsonl"
    exchanges.write_text(json.dumps(record.to_dict()) + "\n")
    out = tmp_path / "pairs.jsonl"
    assert main(["export-dataset", "--exchanges", str(exchanges), "--out", str(out)]) == EXIT_VALIDATION


def test_dt_query_command(tmp_path, capsys):
    log = tmp_path / "dt.jsonl"
    store = DigitalTwinStore(log)
    store.store_scene(
        DTEntry(
            scene_code="<a-sky></a-sky>",
            latitude_deg=60.0,
            longitude_deg=24.0,
            altitude_m=30.0,
            timestamp_us=1000,
            description_hash="h",
            stream_id="video-10",
        )
    )
    code = main(
        ["dt", "query", "--store", str(log), "--lat", "60.0", "--lon", "24.0", "--alt", "30", "--time-us", "900"]
    )
    assert code == EXIT_OK
    entry = json.loads(capsys.readouterr().out)
    assert entry["timestamp_us"] == 1000


def test_show_config_round_trips(capsys):
    assert main(["show-config"]) == EXIT_OK
    from semcast.config import RunConfig, parse_config

    printed = capsys.readouterr().out
    assert parse_config(printed) == RunConfig()


def test_bad_dataset_path_is_reported(capsys):
    assert main(["run", "--dataset", "/nonexistent/place", "--quiet"]) == EXIT_VALIDATION
    assert "error:" in capsys.readouterr().err


def test_set_overrides_config_fields(capsys):
    assert main(["show-config", "--set", "links.uav_cloud_ms=30", "--set", "retries=2"]) == EXIT_OK
    from semcast.config import parse_config

    config = parse_config(capsys.readouterr().out)
    assert config.links.uav_cloud_ms == 30.0
    assert config.retries == 2


def test_set_rejects_unknown_key(capsys):
    assert main(["show-config", "--set", "links.warp=1"]) == EXIT_VALIDATION
    assert "unknown config key" in capsys.readouterr().err


def test_run_with_latency_override_changes_report(tmp_path):
    out = tmp_path / "a"
    assert (
        main(
            [
                "run",
                "--videos",
                "7",
                "--quiet",
                "--out",
                str(out),
                "--set",
                "latency.baseline_rtsp_ms=400",
            ]
        )
        == EXIT_OK
    )
    report = json.loads((out / "report.json").read_text())
    assert report["videos"][0]["latency"]["traditional"]["rtsp_ms"] == 400.0
    assert report["videos"][0]["latency"]["traditional"]["total_ms"] == 1080.0


def test_remote_backend_outage_exits_3(tmp_path, capsys):
    from semcast.cli import EXIT_BACKEND

    config = tmp_path / "remote.toml"
    config.write_text(
        '[backends.fusion]\nmode = "remote"\nendpoint = "http://127.0.0.1:1/v1"\n'
        'model_id = "m1"\n'
        '[backends.codegen]\nmode = "remote"\nendpoint = "http://127.0.0.1:1/v1"\n'
        'model_id = "m2"\n'
    )
    code = main(["run", "--config", str(config), "--videos", "7", "--quiet"])
    assert code == EXIT_BACKEND
    assert "backend unavailable" in capsys.readouterr().err
