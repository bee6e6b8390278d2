"""Access to the bundled trace dataset.

The dataset ships with the package: per-video annotation traces (JSON
lines), baseline bitrate traces, scene fixtures, prompt-keyed backend
fixtures, reference captions, generated descriptions, and the markup
corpus used by the constraint tests. ``tools/make_dataset.py`` at the
repository root regenerates everything deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .baseline import VideoTrace
from .uplink import AnnotationTrace

BUNDLED_DATA_DIR = Path(__file__).resolve().parent / "data"


class DatasetMissingError(Exception):
    pass


@dataclass(frozen=True)
class VideoMeta:
    video_id: int
    name: str
    duration_s: float
    fps: float = 30.0


class TraceDataset:
    """Filesystem-backed view over one dataset directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        if not (self.root / "videos.json").exists():
            raise DatasetMissingError(f"no dataset at {self.root} (missing videos.json)")

    @classmethod
    def bundled(cls) -> "TraceDataset":
        return cls(BUNDLED_DATA_DIR)

    @classmethod
    def resolve(cls, path: str | Path | None) -> "TraceDataset":
        if path in (None, ""):
            return cls.bundled()
        return cls(path)

    def _read_json(self, relative: str):
        path = self.root / relative
        if not path.exists():
            raise DatasetMissingError(f"dataset file missing: {path}")
        return json.loads(path.read_text(encoding="utf-8"))

    def _read_text(self, relative: str) -> str:
        path = self.root / relative
        if not path.exists():
            raise DatasetMissingError(f"dataset file missing: {path}")
        return path.read_text(encoding="utf-8")

    def videos(self) -> list[VideoMeta]:
        return [VideoMeta(**row) for row in self._read_json("videos.json")]

    def video(self, video_id: int) -> VideoMeta:
        for meta in self.videos():
            if meta.video_id == video_id:
                return meta
        raise DatasetMissingError(f"video {video_id} not in dataset")

    def benchmark_video_ids(self) -> list[int]:
        """Videos used for bandwidth/latency comparison (the evaluation-only
        capture video is excluded)."""
        return [m.video_id for m in self.videos() if m.video_id != 10]

    def annotation_trace(self, video_id: int) -> AnnotationTrace:
        text = self._read_text(f"traces/video_{video_id:02d}.jsonl")
        return AnnotationTrace.from_jsonl(video_id, text.splitlines())

    def baseline_trace(self, video_id: int) -> VideoTrace:
        return VideoTrace.from_dict(self._read_json(f"baseline/video_{video_id:02d}.json"))

    def scene_fixture(self, video_id: int) -> str:
        return self._read_text(f"scenes/video_{video_id:02d}.html")

    def reference_captions(self) -> dict[int, str]:
        return {int(k): v for k, v in self._read_json("references.json").items()}

    def generated_descriptions(self) -> dict[int, str]:
        return {int(k): v for k, v in self._read_json("descriptions.json").items()}

    def fixture_map(self, role: str) -> dict[str, str]:
        """Prompt-hash keyed completions for 'fusion', 'codegen' or 'describer'."""
        return self._read_json(f"fixtures/{role}.json")

    def corpus_manifest(self) -> dict:
        return self._read_json("corpus/manifest.json")

    def corpus_text(self, relative: str) -> str:
        return self._read_text(f"corpus/{relative}")
