#!/usr/bin/env python3
"""Regenerate the bundled dataset under src/semcast/data/.

Everything is derived deterministically from the constants below: video
metadata, per-frame annotation traces (detection counts are tuned against
the real packet encoder to hit per-video bitrate targets), baseline
bitrate traces, scene fixtures (each exactly SCENE_BYTES canonical bytes),
reference captions, generated descriptions, prompt-hash backend fixtures,
and the markup corpus for the constraint tests.

Run from the repository root:  python tools/make_dataset.py
"""

from __future__ import annotations

import json
import math
import random
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from semcast.agents import (  # noqa: E402
    AgentMemory,
    DEFAULT_FUSION_SYSTEM_PROMPT,
    build_codegen_prompt,
    build_fusion_prompt,
)
from semcast.bench import build_describe_prompt, iter_video_packets  # noqa: E402
from semcast.dataset import TraceDataset  # noqa: E402
from semcast.scene_markup import (  # noqa: E402
    DEFAULT_PROFILE,
    parse_scene_markup,
    serialize_scene,
    validate_constraints,
)

DATA_DIR = ROOT / "src" / "semcast" / "data"
SCENE_BYTES = 500  # canonical payload per generated scene: 4 kbps at 1 scene/s
MAX_PACKET_BYTES = 1735  # 13.88 kbps at 1 packet/s, under the 13.9 kbps line

VIDEOS = [
    (1, "Thailand Stitched 360 Footage", 25),
    (2, "Pebbly Beach", 120),
    (3, "Bavarian Alps", 125),
    (4, "Crystal Shower Falls", 120),
    (5, "London on Tower Bridge", 30),
    (6, "London Park Ducks and Swans", 65),
    (7, "View on Low Waterfall with Nice City", 10),
    (8, "Doi Suthep Temple", 25),
    (9, "Ayutthaya UAV Footage", 35),
    (10, "UAV Video of Aalto University Finland", 120),
]

CAPTIONS = {
    1: "a beach with palm trees and boats on the water",
    2: "a rocky beach with waves and people walking",
    3: "a green valley with mountains and small houses",
    4: "a waterfall falling into a pool of water",
    5: "a bridge over a river with cars and buses",
    6: "a group of ducks swimming in a pond in a park",
    7: "a waterfall with a city in the background",
    8: "a golden temple with people walking around it",
    9: "old brick towers standing in a grassy field",
    10: "a group of people standing in the snow in front of a building",
}

DESCRIPTIONS = {
    1: "The image shows a tropical beach seen from above, with pale sand, turquoise "
       "water, palm trees along the shoreline, and several longtail boats; a few "
       "people are walking near the waterline.",
    2: "The image shows a pebbly beach under a grey sky, with rounded stones in the "
       "foreground, waves breaking on the shore, and a couple of people walking a "
       "dog near the water.",
    3: "The image shows a green alpine valley in the Bavarian Alps, with steep "
       "forested slopes, scattered wooden huts, grazing cows, and snow-capped peaks "
       "in the distance.",
    4: "The image shows Crystal Shower Falls, a thin waterfall dropping from a rock "
       "overhang into a clear pool surrounded by ferns and wet stone, with a "
       "walking path passing behind the falls.",
    5: "The image shows Tower Bridge in London from the river, with its two stone "
       "towers and blue suspension chains, heavy traffic of buses and cars "
       "crossing, and boats passing underneath.",
    6: "The image shows a London park pond where ducks and swans are swimming, with "
       "people feeding the birds from a bench on the grassy bank and tall trees "
       "around the water.",
    7: "The image shows a small waterfall tumbling over low rocks in the "
       "foreground, with a pleasant city skyline of towers and rooftops rising "
       "behind it.",
    8: "The image shows the golden Doi Suthep temple on a mountain terrace, with "
       "its gilded chedi shining in the sun, ornamental umbrellas, and visitors "
       "walking around the courtyard.",
    9: "The image shows the ancient city of Ayutthaya from a drone, with brick "
       "prang towers and temple ruins standing in a grassy field beside a river.",
    10: "The image depicts a large red building with a flat roof, surrounded by "
        "snow-covered trees and a snow-covered ground. There are two people in the "
        "foreground, one of them is holding a camera, and the other appears to be "
        "flying a drone.",
}

REFERENCES = {
    1: "Aerial 360 view of a Thai beach with palm trees, longtail boats on "
       "turquoise water, and tourists on the sand.",
    2: "A pebble beach with grey stones, breaking waves, and people walking a dog "
       "along the shoreline.",
    3: "A green valley in the Bavarian Alps with wooden huts, cows on the meadows, "
       "and snowy peaks behind.",
    4: "Crystal Shower Falls pouring from an overhang into a pool ringed by ferns, "
       "with a path passing behind the waterfall.",
    5: "Tower Bridge in London with buses and cars crossing between its two towers "
       "while boats pass on the Thames.",
    6: "A park pond in London full of ducks and swans, with visitors feeding the "
       "birds from the grassy bank.",
    7: "A low waterfall in the foreground with a city skyline of towers and "
       "rooftops behind it.",
    8: "The gilded chedi and courtyard of Doi Suthep temple with visitors walking "
       "around the golden spire.",
    9: "Brick prang towers and temple ruins of the ancient city of Ayutthaya seen "
       "from the air over grassy fields.",
    10: "A large red flat-roofed building among snow-covered trees and snowy "
        "ground, with two people, one filming with a camera and one piloting a "
        "drone.",
}

LABEL_POOLS = {
    1: ["person", "boat", "umbrella", "backpack", "surfboard"],
    2: ["person", "dog", "surfboard", "kite", "boat"],
    3: ["person", "cow", "backpack", "bench", "sheep"],
    4: ["person", "backpack", "bird", "bench"],
    5: ["person", "car", "bus", "boat", "traffic light", "bicycle", "truck"],
    6: ["bird", "bird", "person", "dog", "bench", "boat"],
    7: ["person", "car", "bench", "bird", "bicycle"],
    8: ["person", "bench", "umbrella", "potted plant", "backpack"],
    9: ["person", "elephant", "bench", "bird", "cow"],
    10: ["person", "person", "backpack", "cell phone"],
}

# (mean kbps, max kbps) targets for the annotation uplink at 1 packet/s.
UPLINK_KBPS = {
    1: (11.5, 12.6),
    2: (8.2, 9.4),
    3: (9.0, 10.1),
    4: (8.6, 9.8),
    5: (12.3, 13.4),
    6: (12.8, 13.88),
    7: (9.8, 10.6),
    8: (10.4, 11.5),
    9: (11.0, 12.2),
    10: (10.0, 11.0),
}

# Per-video baseline uplink means (Mbps); unweighted mean is exactly 5.9.
BASELINE_UP_MBPS = {1: 6.4, 2: 5.1, 3: 5.5, 4: 6.8, 5: 5.6, 6: 6.1, 7: 5.3, 8: 6.3, 9: 6.0}
BASELINE_DOWN_FACTOR = 5.8 / 5.9

FLIGHT = {
    # video: (lat, lon, alt_base, alt_amp, alt_period, speed_base, speed_amp, speed_period)
    1: (7.886000, 98.296000, 40.0, 15.0, 40, 2.5, 2.0, 30),
    2: (50.573000, -2.455000, 35.0, 10.0, 60, 2.0, 1.8, 45),
    3: (47.565000, 11.100000, 80.0, 25.0, 70, 3.0, 1.8, 50),
    4: (-33.737000, 150.311000, 25.0, 8.0, 45, 1.8, 1.5, 35),
    5: (51.505500, -0.075400, 45.0, 12.0, 25, 2.8, 2.0, 20),
    6: (51.507400, -0.165700, 30.0, 10.0, 40, 2.2, 1.6, 30),
    7: (59.913000, 10.752000, 20.0, 5.0, 10, 1.5, 1.2, 8),
    8: (18.805000, 98.921700, 50.0, 15.0, 25, 2.4, 1.8, 22),
    9: (14.355900, 100.564500, 60.0, 20.0, 30, 3.2, 1.6, 28),
    10: (60.186600, 24.829500, 30.0, 12.0, 50, 2.0, 1.9, 40),
}

SPIN = 'animation="property: rotation; to: 0 360 0; loop: true; dur: 9000"'
BOB = 'animation="property: position; dir: alternate; loop: true; dur: 4000; to: {to}"'

SCENES = {
    1: [
        '<a-sky color="#7ec8e3"></a-sky>',
        '<a-plane rotation="-90 0 0" width="60" height="60" color="#e8d8a0"></a-plane>',
        '<a-cylinder position="-3 1.5 -6" radius="0.2" height="3" color="#8a5a2b"></a-cylinder>',
        '<a-cone position="-3 3.4 -6" radius-bottom="1.2" height="1" color="#2e8b57"></a-cone>',
        f'<a-box position="2 0.3 -7" width="2" height="0.5" depth="0.8" color="#7a4a21" {BOB.format(to="2 0.6 -7")}></a-box>',
    ],
    2: [
        '<a-sky color="#9fb4c7"></a-sky>',
        '<a-plane rotation="-90 0 0" width="50" height="50" color="#9a9a94"></a-plane>',
        '<a-sphere position="-1 0.3 -4" radius="0.35" color="#6f6f6a"></a-sphere>',
        '<a-sphere position="0.4 0.25 -5" radius="0.28" color="#7d7d76"></a-sphere>',
        f'<a-plane position="0 0.4 -9" rotation="-80 0 0" width="30" height="6" color="#5f8aa8" {BOB.format(to="0 0.7 -9")}></a-plane>',
    ],
    3: [
        '<a-sky color="#9cc6e8"></a-sky>',
        '<a-plane rotation="-90 0 0" width="80" height="80" color="#6da86b"></a-plane>',
        '<a-cone position="-6 4 -18" radius-bottom="6" height="8" color="#8f9aa3"></a-cone>',
        '<a-cone position="6 5 -22" radius-bottom="7" height="10" color="#aab7bf"></a-cone>',
        f'<a-box position="1 0.6 -8" width="1.6" height="1.2" depth="1.2" color="#8a6a48" {SPIN}></a-box>',
    ],
    4: [
        '<a-sky color="#a8c6c2"></a-sky>',
        '<a-plane rotation="-90 0 0" width="40" height="40" color="#5c6b5e"></a-plane>',
        f'<a-cylinder position="0 3 -10" radius="0.6" height="6" color="#eef6f8" {BOB.format(to="0 2.6 -10")}></a-cylinder>',
        '<a-circle position="0 0.05 -10" rotation="-90 0 0" radius="3" color="#71a6b5"></a-circle>',
        '<a-sphere position="2.5 0.4 -8" radius="0.5" color="#545c54"></a-sphere>',
    ],
    5: [
        '<a-sky color="#b9c6d4"></a-sky>',
        '<a-plane rotation="-90 0 0" width="60" height="60" color="#5f7d99"></a-plane>',
        '<a-box position="-4 4 -14" width="3" height="8" depth="3" color="#cfd4cf"></a-box>',
        '<a-box position="4 4 -14" width="3" height="8" depth="3" color="#cfd4cf"></a-box>',
        f'<a-box position="-6 1 -12" width="2.4" height="1.4" depth="1" color="#c03a2b" {BOB.format(to="6 1 -12")}></a-box>',
    ],
    6: [
        '<a-sky color="#a9d3f2"></a-sky>',
        '<a-plane rotation="-90 0 0" width="50" height="50" color="#76a96f"></a-plane>',
        '<a-circle position="0 0.05 -9" rotation="-90 0 0" radius="5" color="#6f9fc0"></a-circle>',
        f'<a-sphere position="-1 0.35 -8" radius="0.3" color="#8c6b4f" {BOB.format(to="1.5 0.35 -8")}></a-sphere>',
        '<a-cone position="1.5 0.5 -10" radius-bottom="0.3" height="0.8" color="#f4f4f0"></a-cone>',
    ],
    7: [
        '<a-sky color="#cde3f2"></a-sky>',
        '<a-plane rotation="-90 0 0" width="40" height="40" color="#7b8a7d"></a-plane>',
        f'<a-cylinder position="-2 1 -6" radius="0.8" height="2" color="#e9f3f6" {BOB.format(to="-2 0.7 -6")}></a-cylinder>',
        '<a-box position="3 2.5 -16" width="2" height="5" depth="2" color="#9aa5ae"></a-box>',
        '<a-box position="6 1.8 -18" width="1.6" height="3.6" depth="1.6" color="#b3bcc4"></a-box>',
    ],
    8: [
        '<a-sky color="#f3d9a6"></a-sky>',
        '<a-plane rotation="-90 0 0" width="40" height="40" color="#c9b690"></a-plane>',
        '<a-cone position="0 3.2 -9" radius-bottom="1.6" height="3.5" color="#d9a92c"></a-cone>',
        '<a-cylinder position="0 1 -9" radius="1.8" height="2" color="#e3c159"></a-cylinder>',
        f'<a-ring position="0 5.2 -9" radius-inner="0.3" radius-outer="0.6" color="#f2cf5b" {SPIN}></a-ring>',
    ],
    9: [
        '<a-sky color="#d8c9ae"></a-sky>',
        '<a-plane rotation="-90 0 0" width="70" height="70" color="#8fa56e"></a-plane>',
        '<a-cone position="-4 3 -14" radius-bottom="2" height="6" color="#9c5a3c"></a-cone>',
        '<a-cone position="3 2.5 -12" radius-bottom="1.7" height="5" color="#a86546"></a-cone>',
        f'<a-sphere position="0 4 -10" radius="0.25" color="#4d4d4d" {BOB.format(to="2 4.5 -10")}></a-sphere>',
    ],
    10: [
        '<a-sky color="#cfd8e6"></a-sky>',
        '<a-plane rotation="-90 0 0" width="60" height="60" color="#eef1f5"></a-plane>',
        '<a-box position="0 2 -12" width="10" height="4" depth="6" color="#a22b2b"></a-box>',
        '<a-cylinder position="2 0.9 -6" radius="0.25" height="1.8" color="#2d4f6b"></a-cylinder>',
        f'<a-ring position="3.2 2.6 -7" radius-inner="0.15" radius-outer="0.35" color="#333333" {SPIN}></a-ring>',
    ],
}

SCENE_THEMES = {
    1: "a sandy beach with a palm tree and a boat rocking on the water",
    2: "a grey pebble shore with round stones and a moving sheet of water",
    3: "a green alpine valley with two rocky peaks and a wooden hut",
    4: "a waterfall column dropping into a round pool among dark rocks",
    5: "a river crossing with two pale towers and a red bus moving between them",
    6: "a park pond with a duck gliding across the water and a white swan",
    7: "a low waterfall in front of a small skyline of grey towers",
    8: "a golden temple spire with a gilded base and a spinning ornament",
    9: "brick tower ruins on a grassy plain with a bird circling above",
    10: "a large flat-roofed red building on snowy white ground with a person "
        "figure and a spinning rotor hovering beside it",
}


def quant(value: float, places: int) -> float:
    return round(value, places)


def telemetry_for(video_id: int, second: int) -> dict:
    lat0, lon0, alt_b, alt_a, alt_p, sp_b, sp_a, sp_p = FLIGHT[video_id]
    k = second
    lat = quant(lat0 + 0.000012 * k + 0.000009 * math.sin(2 * math.pi * k / 47), 6)
    lon = quant(lon0 + 0.000017 * k + 0.000011 * math.cos(2 * math.pi * k / 53), 6)
    alt = quant(alt_b + alt_a * math.sin(2 * math.pi * k / alt_p), 2)
    speed = quant(max(0.0, min(4.9, sp_b + sp_a * math.sin(2 * math.pi * k / sp_p))), 2)
    accel = [
        quant(0.6 * math.sin(2 * math.pi * k / 15 + video_id), 3),
        quant(0.5 * math.cos(2 * math.pi * k / 18 + video_id), 3),
        quant(0.05 * math.sin(2 * math.pi * k / 50), 3),
    ]
    gyro = [
        quant(0.2 * math.sin(2 * math.pi * k / 21), 3),
        quant(0.15 * math.cos(2 * math.pi * k / 26), 3),
        quant(0.1 * math.sin(2 * math.pi * k / 33), 3),
    ]
    return {
        "altitude_m": alt,
        "latitude_deg": lat,
        "longitude_deg": lon,
        "ground_speed_mps": speed,
        "accel_mps2": accel,
        "gyro_radps": gyro,
    }


def packet_bytes(frame_index: int, detections: list, caption: str, telemetry: dict, stream: str) -> int:
    body = {
        "frame": {"frame_index": frame_index, "capture_ts_us": round(frame_index / 30 * 1e6), "source_id": stream},
        "detections": detections,
        "caption": {"text": caption, "model_id": "captioner-replay"},
        "telemetry": {**telemetry, "timestamp_us": round(frame_index / 30 * 1e6)},
    }
    return len(json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8"))


def make_detection(rng: random.Random, label: str) -> dict:
    w = quant(rng.uniform(0.05, 0.30), 4)
    h = quant(rng.uniform(0.05, 0.30), 4)
    x = quant(rng.uniform(0.0, 0.68), 4)
    y = quant(rng.uniform(0.0, 0.68), 4)
    return {
        "label": label,
        "confidence": quant(rng.uniform(0.55, 0.97), 4),
        "box": [x, y, w, h],
    }


def build_annotation_trace(video_id: int, duration_s: int) -> list[str]:
    stream = f"video-{video_id:02d}"
    mean_kbps, max_kbps = UPLINK_KBPS[video_id]
    mean_bytes = mean_kbps * 125.0
    cap_bytes = min(max_kbps * 125.0, MAX_PACKET_BYTES)
    amp = cap_bytes - mean_bytes
    pool = LABEL_POOLS[video_id]
    caption = CAPTIONS[video_id]
    lines = []
    for second in range(duration_s):
        frame_index = second * 30
        rng = random.Random(video_id * 100003 + second)
        target = mean_bytes + amp * math.sin(2 * math.pi * second / 20 + video_id)
        target = max(mean_bytes - amp, min(target, cap_bytes))
        telemetry = telemetry_for(video_id, second)
        detections: list[dict] = []
        while True:
            candidate = make_detection(rng, pool[len(detections) % len(pool)])
            size = packet_bytes(frame_index, detections + [candidate], caption, telemetry, stream)
            if size > min(target, cap_bytes):
                break
            detections.append(candidate)
            if len(detections) >= 24:
                break
        record = {
            "frame_index": frame_index,
            "detections": detections,
            "caption": caption,
            "telemetry": telemetry,
        }
        lines.append(json.dumps(record, sort_keys=True, separators=(",", ":")))
    return lines


def round80(value: float) -> int:
    return max(0, int(round(value / 80.0)) * 80)


def build_baseline_trace(video_id: int, duration_s: int) -> dict:
    mean_bps = BASELINE_UP_MBPS[video_id] * 1e6
    up = []
    for t in range(duration_s):
        shape = 1.0 + 0.08 * math.sin(2 * math.pi * t / 17 + video_id * 0.7)
        up.append(mean_bps * shape)
    scale = mean_bps * duration_s / sum(up)
    up = [round80(v * scale) for v in up]
    down = [round80(v * BASELINE_DOWN_FACTOR * 0.9995) for v in up]
    down = [min(d, u) for d, u in zip(down, up)]
    return {
        "video_id": video_id,
        "duration_s": duration_s,
        "uplink_bps": up,
        "downlink_bps": down,
        "resolution": "4K",
    }


def build_scene(video_id: int) -> tuple[str, str]:
    """Returns (pretty fixture text, canonical text of exactly SCENE_BYTES)."""
    body = "\n".join(f"  {line}" for line in SCENES[video_id])
    skeleton = f'<a-scene>\n{body}\n</a-scene>'
    canonical = serialize_scene(parse_scene_markup(skeleton))
    base_len = len(canonical.encode("utf-8"))
    pad_len = SCENE_BYTES - base_len - len(' id=""')
    prefix = f"v{video_id:02d}-"
    if pad_len < len(prefix) + 1:
        raise SystemExit(f"scene {video_id} too large to pad: base {base_len}")
    scene_id = prefix + "0" * (pad_len - len(prefix))
    pretty = f'<a-scene id="{scene_id}">\n{body}\n</a-scene>'
    canonical = serialize_scene(parse_scene_markup(pretty))
    if len(canonical.encode("utf-8")) != SCENE_BYTES:
        raise SystemExit(f"scene {video_id}: {len(canonical.encode('utf-8'))} bytes != {SCENE_BYTES}")
    report = validate_constraints(parse_scene_markup(pretty), DEFAULT_PROFILE)
    if not report.passed:
        raise SystemExit(f"scene {video_id} fails validation: {report.violations}")
    return pretty, canonical


# --- corpus ------------------------------------------------------------------

PALETTE = ["#87CEEB", "#ffb86b", "#8fd3a1", "#d6a2e8", "#f4f4f0", "#b3bcc4", "#e06a4e", "#6f9fc0"]
PRIMS = ["a-box", "a-sphere", "a-cylinder", "a-cone", "a-torus", "a-ring", "a-octahedron", "a-dodecahedron"]
ANIMS = [
    'animation="property: rotation; to: 0 360 0; loop: true; dur: {d}"',
    'animation="property: position; dir: alternate; loop: true; dur: {d}; to: 0 2 -5"',
    'animation__s="property: scale; to: 1.2 1.2 1.2; dir: alternate; loop: true; dur: {d}"',
]


def _compliant_body(rng: random.Random, animated: bool = True) -> list[str]:
    lines = [f'<a-sky color="{rng.choice(PALETTE)}"></a-sky>']
    lines.append(
        f'<a-plane rotation="-90 0 0" width="{rng.randint(20, 80)}" '
        f'height="{rng.randint(20, 80)}" color="{rng.choice(PALETTE)}"></a-plane>'
    )
    count = rng.randint(2, 4)
    anim_at = rng.randrange(count) if animated else -1
    for i in range(count):
        tag = rng.choice(PRIMS)
        pos = f'{rng.randint(-8, 8)} {rng.randint(0, 5)} {rng.randint(-14, -3)}'
        anim = " " + rng.choice(ANIMS).format(d=rng.randint(2, 12) * 1000) if i == anim_at else ""
        lines.append(f'<{tag} position="{pos}" color="{rng.choice(PALETTE)}"{anim}></{tag}>')
    return lines


def _wrap(lines: list[str]) -> str:
    body = "\n".join(f"  {line}" for line in lines)
    return f"<a-scene>\n{body}\n</a-scene>\n"


def build_corpus() -> tuple[dict, dict[str, str]]:
    files: dict[str, str] = {}
    adversarial = []
    compliant = []

    for i in range(24):
        rng = random.Random(9000 + i)
        name = f"compliant/scene_{i:02d}.html"
        files[name] = _wrap(_compliant_body(rng))
        compliant.append(name)

    def add_adversarial(name: str, rule: str, text: str) -> None:
        files[f"adversarial/{name}"] = text
        adversarial.append({"file": f"adversarial/{name}", "rule": rule})

    for i in range(7):
        rng = random.Random(10_000 + i)
        body = _compliant_body(rng)
        body.insert(1, "<a-assets></a-assets>")
        add_adversarial(f"forbidden_tag_assets_{i:02d}.html", "forbidden-tag", _wrap(body))

        rng = random.Random(11_000 + i)
        body = _compliant_body(rng)
        body.append('<a-light type="point" intensity="1.5"></a-light>')
        add_adversarial(f"forbidden_tag_light_{i:02d}.html", "forbidden-tag", _wrap(body))

        rng = random.Random(12_000 + i)
        body = _compliant_body(rng)
        body.append('<a-box position="0 1 -4" color="#aa3333"><a-animation attribute="rotation" to="0 360 0" repeat="indefinite"></a-animation></a-box>')
        add_adversarial(
            f"deprecated_animation_{i:02d}.html", "deprecated-animation-element", _wrap(body)
        )

        rng = random.Random(13_000 + i)
        body = _compliant_body(rng)
        body.append(f'<a-entity gltf-model="models/tree_{i}.gltf" position="0 0 -6"></a-entity>')
        add_adversarial(f"forbidden_attr_gltf_{i:02d}.html", "forbidden-attribute", _wrap(body))

        rng = random.Random(14_000 + i)
        body = _compliant_body(rng)
        body.append(f'<a-entity glb-model="models/rock_{i}.glb" position="1 0 -5"></a-entity>')
        add_adversarial(f"forbidden_attr_glb_{i:02d}.html", "forbidden-attribute", _wrap(body))

        rng = random.Random(15_000 + i)
        body = _compliant_body(rng)
        body.append(
            f'<a-plane position="0 2 -7" src="https://assets.example.com/tex_{i}.png" width="2" height="2"></a-plane>'
        )
        add_adversarial(f"external_link_{i:02d}.html", "external-link", _wrap(body))

        rng = random.Random(16_000 + i)
        add_adversarial(
            f"missing_animation_{i:02d}.html",
            "missing-animation",
            _wrap(_compliant_body(rng, animated=False)),
        )

        rng = random.Random(17_000 + i)
        body = _compliant_body(rng)
        for j in range(110):
            body.append(
                f'<a-box position="{j % 10} 0.5 -{10 + j // 10}" width="0.9" height="0.9" '
                f'depth="0.9" color="{PALETTE[j % len(PALETTE)]}"></a-box>'
            )
        add_adversarial(f"payload_too_large_{i:02d}.html", "payload-too-large", _wrap(body))

    manifest = {"adversarial": adversarial, "compliant": compliant}
    return manifest, files


# --- fixtures ----------------------------------------------------------------

def build_fixtures(dataset: TraceDataset, canonical_scenes: dict[int, str]) -> tuple[dict, dict, dict]:
    fusion: dict[str, str] = {}
    codegen: dict[str, str] = {}
    describer: dict[str, str] = {}
    for video_id, _name, _dur in VIDEOS:
        description = DESCRIPTIONS[video_id]
        memory = AgentMemory(8)
        for _ticket, packet in iter_video_packets(dataset, video_id):
            prompt = build_fusion_prompt(packet, memory, DEFAULT_FUSION_SYSTEM_PROMPT, memory.max_turns)
            fusion[prompt.sha256()] = description
            memory.append(prompt.instruction, description)
        pretty = dataset.scene_fixture(video_id)
        codegen[build_codegen_prompt(description).sha256()] = f"```html\n{pretty}\n```"
        canonical = canonical_scenes[video_id]
        describe_prompt = build_describe_prompt(canonical)
        describer[describe_prompt.sha256()] = (
            f"A generated 3D scene showing {SCENE_THEMES[video_id]}, rendered with "
            "simple animated shapes under a colored sky."
        )
    return fusion, codegen, describer


def verify(dataset: TraceDataset) -> None:
    for video_id, _name, duration in VIDEOS:
        sizes = [p.encoded_bytes for _t, p in iter_video_packets(dataset, video_id)]
        assert len(sizes) == duration, (video_id, len(sizes))
        assert max(sizes) <= MAX_PACKET_BYTES, (video_id, max(sizes))
    up_means = []
    down_means = []
    for video_id in range(1, 10):
        trace = dataset.baseline_trace(video_id)
        up_means.append(sum(trace.uplink_bps) / len(trace.uplink_bps))
        down_means.append(sum(trace.downlink_bps) / len(trace.downlink_bps))
    up_mean = sum(up_means) / 9
    down_mean = sum(down_means) / 9
    assert abs(up_mean - 5.9e6) / 5.9e6 < 0.01, up_mean
    assert abs(down_mean - 5.8e6) / 5.8e6 < 0.01, down_mean
    manifest = dataset.corpus_manifest()
    for row in manifest["adversarial"]:
        graph = parse_scene_markup(dataset.corpus_text(row["file"]))
        report = validate_constraints(graph, DEFAULT_PROFILE)
        rules = {v.rule for v in report.violations}
        assert report.verdict == "fail" and rules == {row["rule"]}, (row, rules)
    for name in manifest["compliant"]:
        graph = parse_scene_markup(dataset.corpus_text(name))
        assert validate_constraints(graph, DEFAULT_PROFILE).passed, name
    print(
        f"verified: uplink packets <= {MAX_PACKET_BYTES} B, baseline means "
        f"{up_mean / 1e6:.3f}/{down_mean / 1e6:.3f} Mbps, corpus "
        f"{len(manifest['adversarial'])} adversarial + {len(manifest['compliant'])} compliant"
    )


def main() -> None:
    if DATA_DIR.exists():
        shutil.rmtree(DATA_DIR)
    (DATA_DIR / "traces").mkdir(parents=True)
    (DATA_DIR / "baseline").mkdir()
    (DATA_DIR / "scenes").mkdir()
    (DATA_DIR / "fixtures").mkdir()
    (DATA_DIR / "corpus" / "adversarial").mkdir(parents=True)
    (DATA_DIR / "corpus" / "compliant").mkdir(parents=True)

    videos = [
        {"video_id": vid, "name": name, "duration_s": dur, "fps": 30.0}
        for vid, name, dur in VIDEOS
    ]
    (DATA_DIR / "videos.json").write_text(json.dumps(videos, indent=2) + "\n", encoding="utf-8")
    (DATA_DIR / "references.json").write_text(
        json.dumps({str(k): v for k, v in REFERENCES.items()}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (DATA_DIR / "descriptions.json").write_text(
        json.dumps({str(k): v for k, v in DESCRIPTIONS.items()}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    canonical_scenes = {}
    for video_id, _name, duration in VIDEOS:
        lines = build_annotation_trace(video_id, duration)
        (DATA_DIR / "traces" / f"video_{video_id:02d}.jsonl").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
        pretty, canonical = build_scene(video_id)
        (DATA_DIR / "scenes" / f"video_{video_id:02d}.html").write_text(pretty + "\n", encoding="utf-8")
        canonical_scenes[video_id] = canonical
    for video_id in range(1, 10):
        duration = next(d for vid, _n, d in VIDEOS if vid == video_id)
        (DATA_DIR / "baseline" / f"video_{video_id:02d}.json").write_text(
            json.dumps(build_baseline_trace(video_id, duration)) + "\n", encoding="utf-8"
        )

    manifest, corpus_files = build_corpus()
    for name, text in corpus_files.items():
        (DATA_DIR / "corpus" / name).write_text(text, encoding="utf-8")
    (DATA_DIR / "corpus" / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    dataset = TraceDataset(DATA_DIR)
    fusion, codegen, describer = build_fixtures(dataset, canonical_scenes)
    for role, table in (("fusion", fusion), ("codegen", codegen), ("describer", describer)):
        (DATA_DIR / "fixtures" / f"{role}.json").write_text(
            json.dumps(table, indent=0, sort_keys=True) + "\n", encoding="utf-8"
        )

    verify(dataset)
    total = sum(f.stat().st_size for f in DATA_DIR.rglob("*") if f.is_file())
    print(f"dataset written to {DATA_DIR} ({total / 1024:.0f} KiB)")


if __name__ == "__main__":
    main()
