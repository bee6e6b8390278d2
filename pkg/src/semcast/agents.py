"""Cloud-side two-agent pipeline.

Agent 1 fuses each annotation packet (caption, detections, telemetry) into
an enhanced scene description and keeps a bounded in-context memory of its
own prior turns. Agent 2 turns a description into constrained scene markup
under a fixed condition list, with validation feedback and bounded retries.
Agent 2 never touches agent 1's memory.

Every backend call is recorded as an ExchangeRecord; the record store is
append-only and feeds the fine-tuning dataset export.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol

import requests

from .scene_markup import (
    ConstraintProfile,
    DEFAULT_PROFILE,
    SceneGraph,
    SceneMarkupError,
    ValidationReport,
    parse_scene_markup,
    serialize_scene,
    validate_constraints,
)
from .uplink import AnnotationPacket


class AgentError(Exception):
    pass


class BackendUnavailableError(AgentError):
    pass


class EmptyCompletionError(AgentError):
    pass


class EmptyDescriptionError(AgentError):
    pass


class FixtureMissError(AgentError):
    pass


class ValidationExhaustedError(AgentError):
    def __init__(self, message: str, report: ValidationReport):
        super().__init__(message)
        self.report = report


class ParseFailureError(AgentError):
    pass


class EmptyAfterFilterError(AgentError):
    pass


CODEGEN_HEADER = (
    "Generate A-Frame elements starting with 'a-' to accomplish the following "
    "instruction while meeting the conditions below."
)

CODEGEN_CONDITIONS = (
    "Do not use a-assets or a-light.",
    "Avoid using scripts.",
    "Do not use GLTF, GLB models.",
    "Do not use external model links.",
    "Provide animation.",
    "Use high-quality detailed models.",
    "If animation setting is requested, use the animation component instead of the <a-animation> element.",
    "If the background setting is requested, use the <a-sky> element instead of the background component.",
    "Provide the result in one code block.",
)

CODEGEN_INSTRUCTION_TEMPLATE = (
    "You are an assistant that teaches me Primitive Element tags for A-Frame "
    "version 1.4.0 and later. Create a '{description}'."
)

# Agent 1 has no published canonical system prompt; this default is local to
# this project and overridable through RunConfig.
DEFAULT_FUSION_SYSTEM_PROMPT = (
    "You combine a drone camera caption, its object detections, and flight "
    "telemetry into one detailed description of the current view. Mention the "
    "setting, the main objects, and what the vantage point implies. Reply "
    "with the description only."
)


@dataclass(frozen=True)
class PromptText:
    system: str
    instruction: str
    memory_turns: tuple[tuple[str, str], ...] = ()

    def render(self) -> str:
        """Canonical single-string form; also the mock fixture key input."""
        parts = []
        if self.system:
            parts.append(f"<<system>>\n{self.system}")
        for user, assistant in self.memory_turns:
            parts.append(f"<<user>>\n{user}\n<<assistant>>\n{assistant}")
        parts.append(f"<<user>>\n{self.instruction}")
        return "\n".join(parts)

    def sha256(self) -> str:
        return hashlib.sha256(self.render().encode("utf-8")).hexdigest()

    def to_messages(self) -> list[dict]:
        messages = []
        if self.system:
            messages.append({"role": "system", "content": self.system})
        for user, assistant in self.memory_turns:
            messages.append({"role": "user", "content": user})
            messages.append({"role": "assistant", "content": assistant})
        messages.append({"role": "user", "content": self.instruction})
        return messages

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "instruction": self.instruction,
            "memory_turns": [list(turn) for turn in self.memory_turns],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PromptText":
        return cls(
            system=data["system"],
            instruction=data["instruction"],
            memory_turns=tuple((u, a) for u, a in data.get("memory_turns", ())),
        )


@dataclass(frozen=True)
class SceneDescription:
    text: str
    source_packet_id: str
    agent1_model_id: str
    created_at_us: int

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("scene description must be non-empty")


@dataclass(frozen=True)
class ExchangeRecord:
    agent_id: int
    prompt: PromptText
    completion: str
    latency_ms: float
    validation_verdict: str | None = None

    def __post_init__(self) -> None:
        if self.latency_ms < 0:
            raise ValueError("latency must be non-negative")

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "prompt": self.prompt.to_dict(),
            "completion": self.completion,
            "latency_ms": self.latency_ms,
            "validation_verdict": self.validation_verdict,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExchangeRecord":
        return cls(
            agent_id=data["agent_id"],
            prompt=PromptText.from_dict(data["prompt"]),
            completion=data["completion"],
            latency_ms=data["latency_ms"],
            validation_verdict=data.get("validation_verdict"),
        )


class ExchangeStore:
    """Append-only, thread-safe record log with a total order."""

    def __init__(self) -> None:
        self._records: list[ExchangeRecord] = []
        self._lock = threading.Lock()

    def append(self, record: ExchangeRecord) -> None:
        with self._lock:
            self._records.append(record)

    def snapshot(self) -> tuple[ExchangeRecord, ...]:
        with self._lock:
            return tuple(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for record in self.snapshot():
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


class AgentMemory:
    """Bounded FIFO of (prompt, response) turns for in-context reuse."""

    def __init__(self, max_turns: int = 8):
        if max_turns < 0:
            raise ValueError("max_turns must be non-negative")
        self.max_turns = max_turns
        self._turns: list[tuple[str, str]] = []

    def append(self, prompt: str, response: str) -> None:
        self._turns.append((prompt, response))
        if len(self._turns) > self.max_turns:
            del self._turns[: len(self._turns) - self.max_turns]

    def turns(self) -> tuple[tuple[str, str], ...]:
        return tuple(self._turns)

    def content_hash(self) -> str:
        return hashlib.sha256(json.dumps(self._turns).encode("utf-8")).hexdigest()

    def __len__(self) -> int:
        return len(self._turns)


class CompletionBackend(Protocol):
    model_id: str
    token_cap: int
    mode: str

    def complete(self, prompt: PromptText) -> str: ...


class MockCompletionBackend:
    """Deterministic backend answering from a prompt-hash fixture map.

    An injected synthetic latency advances the supplied clock so latency
    decompositions stay measurable without live services.
    """

    mode = "mock"

    def __init__(
        self,
        fixtures: Mapping[str, str] | str | Path,
        model_id: str,
        token_cap: int = 2048,
        clock=None,
        injected_latency_ms: float = 0.0,
    ):
        if isinstance(fixtures, (str, Path)):
            with open(fixtures, encoding="utf-8") as fh:
                fixtures = json.load(fh)
        self._fixtures = dict(fixtures)
        self.model_id = model_id
        self.token_cap = token_cap
        self._clock = clock
        self.injected_latency_ms = injected_latency_ms

    def complete(self, prompt: PromptText) -> str:
        if self._clock is not None and self.injected_latency_ms:
            self._clock.advance_us(round(self.injected_latency_ms * 1000))
        key = prompt.sha256()
        if key not in self._fixtures:
            raise FixtureMissError(
                f"backend {self.model_id!r} has no fixture for prompt hash {key[:12]}..."
            )
        return self._fixtures[key]


class RemoteCompletionBackend:
    """HTTP chat-completion endpoint; bearer token read from an env var."""

    mode = "remote"

    def __init__(
        self,
        endpoint: str,
        model_id: str,
        token_cap: int = 2048,
        token_env: str = "SEMCAST_API_TOKEN",
        timeout_s: float = 60.0,
        clock=None,
    ):
        self.endpoint = endpoint
        self.model_id = model_id
        self.token_cap = token_cap
        self.token_env = token_env
        self.timeout_s = timeout_s
        self._clock = clock  # unused; remote latency is real

    def complete(self, prompt: PromptText) -> str:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = {
            "model": self.model_id,
            "messages": prompt.to_messages(),
            "max_tokens": self.token_cap,
        }
        try:
            response = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout_s)
            response.raise_for_status()
            data = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise BackendUnavailableError(f"backend {self.model_id} failed: {exc}") from exc
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            if isinstance(data.get("completion"), str):
                return data["completion"]
            raise BackendUnavailableError(
                f"backend {self.model_id} returned an unrecognized response shape"
            ) from None


def _format_detections(packet: AnnotationPacket) -> str:
    if not packet.detections:
        return "none"
    return ", ".join(f"{d.label} (confidence {d.confidence:.2f})" for d in packet.detections)


def build_fusion_prompt(
    packet: AnnotationPacket,
    memory: AgentMemory | None = None,
    system_prompt: str = DEFAULT_FUSION_SYSTEM_PROMPT,
    max_turns: int = 8,
) -> PromptText:
    """Agent-1 prompt: caption + labelled detections + telemetry summary."""
    t = packet.telemetry
    instruction = (
        f"Caption: {packet.caption.text}\n"
        f"Detected objects: {_format_detections(packet)}\n"
        f"Telemetry: altitude {t.altitude_m:.2f} m, latitude {t.latitude_deg:.6f}, "
        f"longitude {t.longitude_deg:.6f}, ground speed {t.ground_speed_mps:.2f} m/s\n"
        "Describe the current view in one detailed paragraph."
    )
    turns = memory.turns()[-max_turns:] if memory is not None else ()
    return PromptText(system=system_prompt, instruction=instruction, memory_turns=turns)


def fuse_description(
    packet: AnnotationPacket,
    backend: CompletionBackend,
    memory: AgentMemory,
    clock,
    store: ExchangeStore | None = None,
    system_prompt: str = DEFAULT_FUSION_SYSTEM_PROMPT,
    max_chars: int = 2000,
) -> SceneDescription:
    """Run agent 1 on a packet; appends to memory only on success."""
    prompt = build_fusion_prompt(packet, memory, system_prompt, memory.max_turns)
    t0 = clock.now_us()
    completion = backend.complete(prompt)
    latency_ms = (clock.now_us() - t0) / 1000.0
    if not completion.strip():
        raise EmptyCompletionError("agent 1 returned a blank completion")
    text = completion.strip()
    if len(text) > max_chars:
        text = text[:max_chars].rstrip()
    description = SceneDescription(
        text=text,
        source_packet_id=packet.packet_id,
        agent1_model_id=backend.model_id,
        created_at_us=clock.now_us(),
    )
    record = ExchangeRecord(1, prompt, completion, latency_ms, None)
    if store is not None:
        store.append(record)
    memory.append(prompt.instruction, completion)
    return description


def build_codegen_prompt(description: SceneDescription | str) -> PromptText:
    """Agent-2 prompt: fixed header, the nine conditions, the description."""
    text = description.text if isinstance(description, SceneDescription) else description
    if not text or not text.strip():
        raise EmptyDescriptionError("cannot build a code prompt from an empty description")
    condition_block = "\n".join(f"- {line}" for line in CODEGEN_CONDITIONS)
    instruction = (
        f"{CODEGEN_HEADER}\n\n"
        f"Conditions:\n{condition_block}\n\n"
        f"Instruction:\n{CODEGEN_INSTRUCTION_TEMPLATE.format(description=text.strip())}"
    )
    return PromptText(system="", instruction=instruction, memory_turns=())


def generate_scene_code(
    description: SceneDescription,
    backend: CompletionBackend,
    profile: ConstraintProfile = DEFAULT_PROFILE,
    clock=None,
    store: ExchangeStore | None = None,
    retries: int = 3,
) -> tuple[SceneGraph, ExchangeRecord]:
    """Run agent 2 with validation feedback, up to ``retries`` attempts.

    Returns the first graph that passes the profile. The exchange record
    carries the final verdict and the total latency across attempts.
    """
    if retries < 1:
        raise ValueError("retries must be at least 1")
    base = build_codegen_prompt(description)
    feedback: list[str] = []
    t0 = clock.now_us() if clock is not None else 0
    last_parse_error: SceneMarkupError | None = None
    last_report: ValidationReport | None = None
    prompt = base
    completion = ""
    for attempt in range(1, retries + 1):
        if feedback:
            prompt = PromptText(
                system=base.system,
                instruction=base.instruction + "\n\n" + "\n".join(feedback),
                memory_turns=(),
            )
        completion = backend.complete(prompt)
        try:
            graph = parse_scene_markup(completion)
        except SceneMarkupError as exc:
            last_parse_error = exc
            feedback.append(
                f"Attempt {attempt} did not parse: {exc}. Return only valid elements."
            )
            continue
        report = validate_constraints(graph, profile)
        if report.passed:
            latency_ms = (clock.now_us() - t0) / 1000.0 if clock is not None else 0.0
            record = ExchangeRecord(2, prompt, completion, latency_ms, "pass")
            if store is not None:
                store.append(record)
            return graph, record
        last_report = report
        last_parse_error = None
        lines = "; ".join(f"{v.rule} at {v.node_path}: {v.message}" for v in report.violations)
        feedback.append(f"Attempt {attempt} violated the conditions: {lines}")
    latency_ms = (clock.now_us() - t0) / 1000.0 if clock is not None else 0.0
    record = ExchangeRecord(2, prompt, completion, latency_ms, "fail")
    if store is not None:
        store.append(record)
    if last_parse_error is not None:
        raise ParseFailureError(f"no parseable output after {retries} attempts: {last_parse_error}")
    assert last_report is not None
    raise ValidationExhaustedError(f"no compliant output after {retries} attempts", last_report)


def export_finetune_dataset(
    records: Iterable[ExchangeRecord] | ExchangeStore,
    out_path: str | Path,
    extra_filter: Callable[[ExchangeRecord], bool] | None = None,
) -> int:
    """Write deduplicated (prompt, completion) pairs as JSON lines.

    Agent-2 records that failed validation are dropped; exact-duplicate
    prompts keep their first occurrence.
    """
    if isinstance(records, ExchangeStore):
        records = records.snapshot()
    seen: set[str] = set()
    pairs: list[tuple[str, str]] = []
    for record in records:
        if record.agent_id == 2 and record.validation_verdict != "pass":
            continue
        if extra_filter is not None and not extra_filter(record):
            continue
        rendered = record.prompt.render()
        if rendered in seen:
            continue
        seen.add(rendered)
        pairs.append((rendered, record.completion))
    if not pairs:
        raise EmptyAfterFilterError("no exportable records after filtering")
    with open(out_path, "w", encoding="utf-8") as fh:
        for prompt_text, completion in pairs:
            fh.write(
                json.dumps({"prompt": prompt_text, "completion": completion}, sort_keys=True)
                + "\n"
            )
    return len(pairs)


@dataclass(frozen=True)
class SceneUpdate:
    """Outcome of one annotation packet through both agents."""

    description: SceneDescription
    graph: SceneGraph
    scene_code: str
    generated: bool
    text_to_code_ms: float | None


class AgentPipeline:
    """Per-stream orchestration: agent-1 memory, change detection, caching.

    Agent 2 runs only when the description text changes; otherwise the
    cached validated code is reused and no text-to-code latency sample is
    produced (cache hits are not prompt-to-code events).
    """

    def __init__(
        self,
        fusion_backend: CompletionBackend,
        codegen_backend: CompletionBackend,
        clock,
        profile: ConstraintProfile = DEFAULT_PROFILE,
        store: ExchangeStore | None = None,
        memory_turns: int = 8,
        retries: int = 3,
        fusion_system_prompt: str = DEFAULT_FUSION_SYSTEM_PROMPT,
    ):
        self.fusion_backend = fusion_backend
        self.codegen_backend = codegen_backend
        self.clock = clock
        self.profile = profile
        self.store = store if store is not None else ExchangeStore()
        self.memory = AgentMemory(memory_turns)
        self.retries = retries
        self.fusion_system_prompt = fusion_system_prompt
        self._last_description_text: str | None = None
        self._cached_graph: SceneGraph | None = None
        self._cached_code: str | None = None

    def handle_packet(self, packet: AnnotationPacket) -> SceneUpdate:
        t_arrival = self.clock.now_us()
        description = fuse_description(
            packet,
            self.fusion_backend,
            self.memory,
            self.clock,
            self.store,
            self.fusion_system_prompt,
        )
        if description.text != self._last_description_text or self._cached_graph is None:
            graph, _record = generate_scene_code(
                description,
                self.codegen_backend,
                self.profile,
                self.clock,
                self.store,
                self.retries,
            )
            code = serialize_scene(graph)
            self._last_description_text = description.text
            self._cached_graph = graph
            self._cached_code = code
            text_to_code_ms = (self.clock.now_us() - t_arrival) / 1000.0
            return SceneUpdate(description, graph, code, True, text_to_code_ms)
        assert self._cached_code is not None
        return SceneUpdate(description, self._cached_graph, self._cached_code, False, None)
