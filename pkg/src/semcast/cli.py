"""Command-line entry points.

Subcommands map one-to-one onto the experiment surfaces: ``run`` (full
comparison), ``stream`` (live pipeline with the websocket bridge),
``baseline`` (trace replay), ``validate`` (markup files), ``export-dataset``
(fine-tuning pairs), and ``dt`` (scene store queries).

Exit codes: 0 success, 2 validation failure, 3 backend unavailable,
4 partial run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .agents import AgentError, BackendUnavailableError, ExchangeRecord, export_finetune_dataset
from .baseline import replay_trace
from .bench import (
    EmbeddingUnavailableError,
    evaluate_caption_pairs,
    make_embedding_backend,
    run_comparison,
)
from .config import ConfigError, RunConfig, load_config, serialize_config
from .dataset import DatasetMissingError, TraceDataset
from .dtstore import DigitalTwinStore, EmptyStoreError
from .scene_markup import (
    DEFAULT_PROFILE,
    SceneMarkupError,
    parse_scene_markup,
    validate_constraints,
)
from .transport import DOWNLINK, UPLINK, meter_bandwidth

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BACKEND = 3
EXIT_PARTIAL = 4

ADVISORY_MIN_NODES = 3  # below this, warn that the scene is probably too plain


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML run configuration")
    parser.add_argument("--dataset", help="dataset directory (default: bundled)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config field, e.g. --set links.uav_cloud_ms=30 "
        "or --set backends.fusion.mode=remote (repeatable)",
    )


def _coerce(value: str):
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for caster in (int, float):
        try:
            return caster(value)
        except ValueError:
            continue
    return value


def apply_overrides(config: RunConfig, overrides: list[str]) -> RunConfig:
    """Re-serialize, patch dotted keys, and re-validate through the parser."""
    if not overrides:
        return config
    import tomlkit

    doc = tomlkit.parse(serialize_config(config))
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        node = doc
        parts = key.strip().split(".")
        for part in parts[:-1]:
            if part not in node:
                raise ConfigError(f"unknown config table {part!r} in override {item!r}")
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key {key!r}")
        node[parts[-1]] = _coerce(raw)
    from .config import parse_config

    return parse_config(tomlkit.dumps(doc))


def _load(args) -> tuple[RunConfig, TraceDataset]:
    config = apply_overrides(load_config(args.config), getattr(args, "overrides", []))
    dataset_path = args.dataset or config.dataset_path or None
    return config, TraceDataset.resolve(dataset_path)


def cmd_run(args) -> int:
    config, dataset = _load(args)
    videos = [int(v) for v in args.videos.split(",")] if args.videos else None
    try:
        report = run_comparison(dataset, config, videos, artifacts_dir=args.out)
    except BackendUnavailableError as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    if not args.quiet:
        print(report.to_markdown())
        print(f"report hash: {report.sha256()}")
        if args.out:
            print(f"artifacts written to {args.out}")
    if report.partial:
        print("partial run; see report failures", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_eval_captions(args) -> int:
    config, dataset = _load(args)
    embed = make_embedding_backend(config)
    try:
        scores = evaluate_caption_pairs(dataset, embed)
    except EmbeddingUnavailableError as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    mean = sum(scores.values()) / len(scores)
    print(json.dumps({"per_video": scores, "mean": mean}, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_baseline(args) -> int:
    config, dataset = _load(args)
    video_ids = [int(v) for v in args.videos.split(",")] if args.videos else dataset.benchmark_video_ids()
    rows = {}
    for video_id in video_ids:
        trace = dataset.baseline_trace(video_id)
        receipts = replay_trace(trace, speed=args.speed)
        meta = dataset.video(video_id)
        rows[video_id] = {
            "uplink": meter_bandwidth(receipts, UPLINK, meta.duration_s / args.speed).to_dict(),
            "downlink": meter_bandwidth(receipts, DOWNLINK, meta.duration_s / args.speed).to_dict(),
        }
    print(json.dumps(rows, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    failed = False
    for name in args.files:
        text = Path(name).read_text(encoding="utf-8")
        try:
            graph = parse_scene_markup(text)
        except SceneMarkupError as exc:
            print(f"{name}: PARSE ERROR {type(exc).__name__}: {exc}")
            failed = True
            continue
        report = validate_constraints(graph, DEFAULT_PROFILE)
        status = "PASS" if report.passed else "FAIL"
        print(f"{name}: {status} ({report.stats.node_count} nodes, {report.stats.payload_bytes} bytes)")
        if report.stats.node_count < ADVISORY_MIN_NODES:
            print(f"{name}: advisory: only {report.stats.node_count} node(s); scene may lack detail")
        for violation in report.violations:
            print(f"  - {violation.rule} at {violation.node_path}: {violation.message}")
        if args.json:
            print(report.to_json())
        if not report.passed:
            failed = True
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_export_dataset(args) -> int:
    records = []
    with open(args.exchanges, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(ExchangeRecord.from_dict(json.loads(line)))
    try:
        count = export_finetune_dataset(records, args.out)
    except AgentError as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"exported {count} pair(s) to {args.out}")
    return EXIT_OK


def cmd_dt_query(args) -> int:
    store = DigitalTwinStore.open(args.store)
    try:
        entry = store.query_nearest(args.lat, args.lon, args.alt, args.time_us)
    except EmptyStoreError as exc:
        print(f"query failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(json.dumps(entry.to_dict(), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_show_config(args) -> int:
    config = apply_overrides(load_config(args.config), getattr(args, "overrides", []))
    print(serialize_config(config), end="")
    return EXIT_OK


def cmd_stream(args) -> int:
    from .streamer import run_stream

    config, dataset = _load(args)
    try:
        run_stream(
            config,
            dataset,
            video_id=args.video,
            ws_port=args.ws_port,
            http_port=args.http_port,
            assets_dir=args.assets,
            speed=args.speed,
            duration_s=args.duration,
        )
    except BackendUnavailableError as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semcast", description=__doc__)
    parser.add_argument("--version", action="version", version=f"semcast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="full mock or remote comparison over the trace set")
    _add_common(run_parser)
    run_parser.add_argument("--videos", help="comma-separated video ids (default: benchmark set)")
    run_parser.add_argument("--out", help="artifacts directory for report + exchange logs")
    run_parser.add_argument("--quiet", action="store_true")
    run_parser.set_defaults(func=cmd_run)

    captions_parser = sub.add_parser(
        "eval-captions", help="similarity of bundled generated descriptions vs references"
    )
    _add_common(captions_parser)
    captions_parser.set_defaults(func=cmd_eval_captions)

    baseline_parser = sub.add_parser("baseline", help="replay baseline traces and meter them")
    _add_common(baseline_parser)
    baseline_parser.add_argument("--videos", help="comma-separated video ids")
    baseline_parser.add_argument("--speed", type=float, default=1.0)
    baseline_parser.set_defaults(func=cmd_baseline)

    validate_parser = sub.add_parser("validate", help="parse and validate scene markup files")
    validate_parser.add_argument("files", nargs="+")
    validate_parser.add_argument("--json", action="store_true", help="print full JSON reports")
    validate_parser.set_defaults(func=cmd_validate)

    export_parser = sub.add_parser("export-dataset", help="fine-tuning pairs from an exchange log")
    export_parser.add_argument("--exchanges", required=True, help="exchange JSONL from a run")
    export_parser.add_argument("--out", required=True)
    export_parser.set_defaults(func=cmd_export_dataset)

    dt_parser = sub.add_parser("dt", help="digital-twin store operations")
    dt_sub = dt_parser.add_subparsers(dest="dt_command", required=True)
    query_parser = dt_sub.add_parser("query", help="nearest entry by pose and time")
    query_parser.add_argument("--store", required=True)
    query_parser.add_argument("--lat", type=float, required=True)
    query_parser.add_argument("--lon", type=float, required=True)
    query_parser.add_argument("--alt", type=float, required=True)
    query_parser.add_argument("--time-us", type=int, required=True)
    query_parser.set_defaults(func=cmd_dt_query)

    config_parser = sub.add_parser("show-config", help="print the effective configuration")
    config_parser.add_argument("--config")
    config_parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    config_parser.set_defaults(func=cmd_show_config)

    stream_parser = sub.add_parser("stream", help="live semantic pipeline with websocket bridge")
    _add_common(stream_parser)
    stream_parser.add_argument("--video", type=int, default=10)
    stream_parser.add_argument("--ws-port", type=int, default=8765)
    stream_parser.add_argument("--http-port", type=int, default=8088)
    stream_parser.add_argument("--assets", help="static console assets directory")
    stream_parser.add_argument("--speed", type=float, default=1.0)
    stream_parser.add_argument("--duration", type=float, help="stop after this many seconds")
    stream_parser.set_defaults(func=cmd_stream)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DatasetMissingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
