"""Constrained 3D scene-markup dialect: parsing, validation, canonical form.

The code-generation agent must emit a narrow A-Frame-style dialect: a tree
of elements whose tag names start with ``a-``, quoted attribute values, no
comments, no processing instructions, no text content. The parser is
deliberately strict so generator defects surface as errors instead of being
silently repaired.

All byte accounting in the benchmark uses the canonical serialization
produced by :func:`serialize_scene`; it is deterministic and idempotent
after the first normalization pass.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field


class SceneMarkupError(ValueError):
    """Base class for parse-level failures of the scene dialect."""


class EmptyInputError(SceneMarkupError):
    pass


class MultipleCodeBlocksError(SceneMarkupError):
    pass


class UnbalancedTagError(SceneMarkupError):
    pass


class MalformedAttributeError(SceneMarkupError):
    pass


class NonPrefixedTagError(SceneMarkupError):
    pass


class StrayTextError(SceneMarkupError):
    """Non-whitespace content between elements (text, comments, PIs)."""


class EmptyGraphError(SceneMarkupError):
    pass


_TAG_NAME_RE = re.compile(r"[a-z][a-z0-9-]*")
_ATTR_NAME_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_:.-]*")
_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*[ \t]*\r?\n(.*?)```", re.DOTALL)
_ENTITY_MAP = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


@dataclass(frozen=True)
class SceneNode:
    """One element: tag, ordered attributes, and child elements."""

    tag: str
    attributes: tuple[tuple[str, str], ...]
    children: tuple["SceneNode", ...] = ()

    def attribute(self, name: str) -> str | None:
        for key, value in self.attributes:
            if key == name:
                return value
        return None

    @property
    def animation_components(self) -> tuple[tuple[tuple[str, str], ...], ...]:
        """Parsed payloads of ``animation`` / ``animation__*`` attributes.

        Each payload is an ordered tuple of (property, value) pairs from the
        component-style ``prop: value; prop: value`` attribute syntax.
        """
        payloads = []
        for key, value in self.attributes:
            if key == "animation" or key.startswith("animation__"):
                payloads.append(_parse_component_value(value))
        return tuple(payloads)

    @property
    def animated(self) -> bool:
        return any(
            key == "animation" or key.startswith("animation__")
            for key, _ in self.attributes
        )


@dataclass(frozen=True)
class SceneGraph:
    """Parse result: a forest of nodes plus source accounting.

    ``declared_sky`` and ``source_bytes`` are derived bookkeeping and do not
    participate in structural equality.
    """

    root: tuple[SceneNode, ...]
    declared_sky: SceneNode | None = field(default=None, compare=False)
    source_bytes: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SceneStats:
    node_count: int
    max_depth: int
    animated_node_count: int
    payload_bytes: int
    distinct_tag_histogram: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "max_depth": self.max_depth,
            "animated_node_count": self.animated_node_count,
            "payload_bytes": self.payload_bytes,
            "distinct_tag_histogram": dict(self.distinct_tag_histogram),
        }


@dataclass(frozen=True)
class ConstraintProfile:
    """Which constructs the generated markup must avoid or provide.

    The default profile mirrors the condition list embedded in the
    code-generation prompt; see :data:`DEFAULT_PROFILE`.
    """

    forbidden_tags: frozenset[str]
    forbidden_attribute_keys: frozenset[str]
    forbid_external_links: bool
    require_animation: bool
    require_sky_element: bool
    max_payload_bytes: int

    def __post_init__(self) -> None:
        if self.max_payload_bytes <= 0:
            raise ValueError("max_payload_bytes must be positive")


DEFAULT_PROFILE = ConstraintProfile(
    forbidden_tags=frozenset({"a-assets", "a-light", "a-animation"}),
    forbidden_attribute_keys=frozenset({"gltf-model", "glb-model"}),
    forbid_external_links=True,
    require_animation=True,
    require_sky_element=False,
    max_payload_bytes=8192,
)

# Rule identifiers used in validation reports.
RULE_FORBIDDEN_TAG = "forbidden-tag"
RULE_DEPRECATED_ANIMATION = "deprecated-animation-element"
RULE_FORBIDDEN_ATTRIBUTE = "forbidden-attribute"
RULE_EXTERNAL_LINK = "external-link"
RULE_MISSING_ANIMATION = "missing-animation"
RULE_MISSING_SKY = "missing-sky"
RULE_PAYLOAD_TOO_LARGE = "payload-too-large"


@dataclass(frozen=True)
class Violation:
    rule: str
    node_path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    verdict: str  # "pass" | "fail"
    violations: tuple[Violation, ...]
    stats: SceneStats

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "violations": [
                {"rule": v.rule, "path": v.node_path, "message": v.message}
                for v in self.violations
            ],
            "stats": self.stats.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _parse_component_value(value: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for segment in value.split(";"):
        segment = segment.strip()
        if not segment:
            continue
        if ":" in segment:
            prop, _, val = segment.partition(":")
            pairs.append((prop.strip(), val.strip()))
        else:
            pairs.append((segment, ""))
    return tuple(pairs)


def extract_code_block(text: str) -> str:
    """Return the contents of the single fenced code block, if any.

    Unfenced input passes through unchanged; two or more fences are an
    error because downstream consumers cannot pick one.
    """
    blocks = _FENCE_RE.findall(text)
    if len(blocks) > 1:
        raise MultipleCodeBlocksError(f"expected at most one code block, found {len(blocks)}")
    if blocks:
        return blocks[0]
    return text


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.length = len(text)

    def fail_context(self) -> str:
        return f"at offset {self.pos}"

    def parse(self) -> tuple[SceneNode, ...]:
        roots: list[SceneNode] = []
        stack: list[tuple[str, list[tuple[str, str]], list[SceneNode]]] = []
        while True:
            self._consume_inter_element_text(allow_eof=True)
            if self.pos >= self.length:
                break
            # self.text[self.pos] == "<"
            if self.text.startswith("</", self.pos):
                tag = self._parse_closing_tag()
                if not stack:
                    raise UnbalancedTagError(f"closing </{tag}> without an open element {self.fail_context()}")
                open_tag, attrs, children = stack.pop()
                if open_tag != tag:
                    raise UnbalancedTagError(
                        f"closing </{tag}> does not match open <{open_tag}> {self.fail_context()}"
                    )
                node = SceneNode(open_tag, tuple(attrs), tuple(children))
                if stack:
                    stack[-1][2].append(node)
                else:
                    roots.append(node)
                continue
            if self.text.startswith("<!", self.pos) or self.text.startswith("<?", self.pos):
                raise StrayTextError(
                    f"comments, doctypes and processing instructions are not allowed {self.fail_context()}"
                )
            tag, attrs, self_closed = self._parse_opening_tag()
            if self_closed:
                node = SceneNode(tag, tuple(attrs))
                if stack:
                    stack[-1][2].append(node)
                else:
                    roots.append(node)
            else:
                stack.append((tag, attrs, []))
        if stack:
            open_tags = ", ".join(frame[0] for frame in stack)
            raise UnbalancedTagError(f"unclosed element(s): {open_tags}")
        return tuple(roots)

    def _consume_inter_element_text(self, allow_eof: bool) -> None:
        start = self.pos
        while self.pos < self.length and self.text[self.pos] != "<":
            self.pos += 1
        between = self.text[start : self.pos]
        if between.strip():
            raise StrayTextError(f"unexpected text content {between.strip()[:40]!r}")
        if self.pos >= self.length and not allow_eof:
            raise UnbalancedTagError("unexpected end of input")

    def _parse_closing_tag(self) -> str:
        self.pos += 2  # "</"
        tag = self._read_tag_name()
        self._skip_ws()
        if self.pos >= self.length or self.text[self.pos] != ">":
            raise UnbalancedTagError(f"malformed closing tag for <{tag}> {self.fail_context()}")
        self.pos += 1
        return tag

    def _parse_opening_tag(self) -> tuple[str, list[tuple[str, str]], bool]:
        self.pos += 1  # "<"
        tag = self._read_tag_name()
        attrs: list[tuple[str, str]] = []
        seen: set[str] = set()
        while True:
            had_ws = self._skip_ws()
            if self.pos >= self.length:
                raise MalformedAttributeError(f"unexpected end of input inside <{tag}>")
            ch = self.text[self.pos]
            if ch == ">":
                self.pos += 1
                return tag, attrs, False
            if self.text.startswith("/>", self.pos):
                self.pos += 2
                return tag, attrs, True
            if not had_ws:
                raise MalformedAttributeError(f"expected whitespace before attribute in <{tag}> {self.fail_context()}")
            name, value = self._parse_attribute(tag)
            if name in seen:
                raise MalformedAttributeError(f"duplicate attribute {name!r} on <{tag}>")
            seen.add(name)
            attrs.append((name, value))

    def _read_tag_name(self) -> str:
        match = _TAG_NAME_RE.match(self.text, self.pos)
        if not match:
            raise NonPrefixedTagError(f"invalid tag name {self.fail_context()}")
        tag = match.group(0)
        self.pos = match.end()
        if not tag.startswith("a-") or len(tag) <= 2:
            raise NonPrefixedTagError(f"tag <{tag}> does not start with the 'a-' prefix")
        return tag

    def _parse_attribute(self, tag: str) -> tuple[str, str]:
        match = _ATTR_NAME_RE.match(self.text, self.pos)
        if not match:
            raise MalformedAttributeError(f"invalid attribute name in <{tag}> {self.fail_context()}")
        name = match.group(0)
        self.pos = match.end()
        self._skip_ws()
        if self.pos >= self.length or self.text[self.pos] != "=":
            raise MalformedAttributeError(f"attribute {name!r} on <{tag}> has no value")
        self.pos += 1
        self._skip_ws()
        if self.pos >= self.length or self.text[self.pos] not in "\"'":
            raise MalformedAttributeError(f"attribute {name!r} on <{tag}> must have a quoted value")
        quote = self.text[self.pos]
        self.pos += 1
        value_start = self.pos
        while self.pos < self.length and self.text[self.pos] != quote:
            if self.text[self.pos] == "<":
                raise MalformedAttributeError(f"raw '<' inside value of {name!r} on <{tag}>")
            self.pos += 1
        if self.pos >= self.length:
            raise MalformedAttributeError(f"unterminated value for {name!r} on <{tag}>")
        raw_value = self.text[value_start : self.pos]
        self.pos += 1
        return name, _decode_entities(raw_value)

    def _skip_ws(self) -> bool:
        start = self.pos
        while self.pos < self.length and self.text[self.pos] in " \t\r\n":
            self.pos += 1
        return self.pos > start


def _decode_entities(value: str) -> str:
    if "&" not in value:
        return value
    out: list[str] = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch != "&":
            out.append(ch)
            i += 1
            continue
        end = value.find(";", i + 1)
        if end == -1:
            raise MalformedAttributeError(f"unterminated entity in attribute value {value!r}")
        name = value[i + 1 : end]
        if name.startswith("#"):
            try:
                code = int(name[1:], 16) if name[1:2] in ("x", "X") else int(name[1:])
            except ValueError:
                raise MalformedAttributeError(f"invalid character reference &{name};") from None
            out.append(chr(code))
        elif name in _ENTITY_MAP:
            out.append(_ENTITY_MAP[name])
        else:
            raise MalformedAttributeError(f"unknown entity &{name};")
        i = end + 1
    return "".join(out)


def _encode_attribute_value(value: str) -> str:
    return (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _find_sky(roots: tuple[SceneNode, ...]) -> SceneNode | None:
    stack = list(reversed(roots))
    while stack:
        node = stack.pop()
        if node.tag == "a-sky":
            return node
        stack.extend(reversed(node.children))
    return None


def parse_scene_markup(text: str) -> SceneGraph:
    """Parse dialect markup (optionally wrapped in one fenced code block)."""
    if not text or not text.strip():
        raise EmptyInputError("no markup provided")
    body = extract_code_block(text)
    if not body.strip():
        raise EmptyInputError("code block is empty")
    roots = _Parser(body).parse()
    if not roots:
        raise EmptyInputError("no elements found")
    return SceneGraph(
        root=roots,
        declared_sky=_find_sky(roots),
        source_bytes=len(text.encode("utf-8")),
    )


def serialize_scene(graph: SceneGraph) -> str:
    """Canonical single-line form: original attribute order, explicit close tags."""
    if not graph.root:
        raise EmptyGraphError("cannot serialize an empty scene graph")
    return "".join(_serialize_node(node) for node in graph.root)


def _serialize_node(node: SceneNode) -> str:
    attrs = "".join(f' {name}="{_encode_attribute_value(value)}"' for name, value in node.attributes)
    inner = "".join(_serialize_node(child) for child in node.children)
    return f"<{node.tag}{attrs}>{inner}</{node.tag}>"


def scene_stats(graph: SceneGraph) -> SceneStats:
    node_count = 0
    animated = 0
    max_depth = 0
    histogram: dict[str, int] = {}

    def walk(node: SceneNode, depth: int) -> None:
        nonlocal node_count, animated, max_depth
        node_count += 1
        max_depth = max(max_depth, depth)
        histogram[node.tag] = histogram.get(node.tag, 0) + 1
        if node.animated:
            animated += 1
        for child in node.children:
            walk(child, depth + 1)

    for root in graph.root:
        walk(root, 1)
    payload = len(serialize_scene(graph).encode("utf-8")) if graph.root else 0
    return SceneStats(
        node_count=node_count,
        max_depth=max_depth,
        animated_node_count=animated,
        payload_bytes=payload,
        distinct_tag_histogram=tuple(sorted(histogram.items())),
    )


def _has_external_link(value: str) -> bool:
    lowered = value.lower()
    return "http://" in lowered or "https://" in lowered


def validate_constraints(graph: SceneGraph, profile: ConstraintProfile = DEFAULT_PROFILE) -> ValidationReport:
    """Check a parsed graph against a profile; breaches become report entries."""
    violations: list[Violation] = []

    def walk(node: SceneNode, path: str) -> None:
        if node.tag in profile.forbidden_tags:
            if node.tag == "a-animation":
                violations.append(
                    Violation(
                        RULE_DEPRECATED_ANIMATION,
                        path,
                        "use the animation component attribute, not an <a-animation> element",
                    )
                )
            else:
                violations.append(
                    Violation(RULE_FORBIDDEN_TAG, path, f"element <{node.tag}> is not allowed")
                )
        for name, value in node.attributes:
            if name in profile.forbidden_attribute_keys:
                violations.append(
                    Violation(RULE_FORBIDDEN_ATTRIBUTE, path, f"attribute {name!r} is not allowed")
                )
            if profile.forbid_external_links and _has_external_link(value):
                violations.append(
                    Violation(
                        RULE_EXTERNAL_LINK,
                        path,
                        f"attribute {name!r} references an external URL",
                    )
                )
        for index, child in enumerate(node.children):
            walk(child, f"{path}/{child.tag}[{index}]")

    for index, root in enumerate(graph.root):
        walk(root, f"/{root.tag}[{index}]")

    stats = scene_stats(graph)
    if profile.require_animation and stats.animated_node_count == 0:
        violations.append(
            Violation(RULE_MISSING_ANIMATION, "/", "scene contains no animation component")
        )
    if profile.require_sky_element and graph.declared_sky is None:
        violations.append(Violation(RULE_MISSING_SKY, "/", "scene declares no <a-sky> element"))
    if stats.payload_bytes > profile.max_payload_bytes:
        violations.append(
            Violation(
                RULE_PAYLOAD_TOO_LARGE,
                "/",
                f"canonical payload is {stats.payload_bytes} bytes "
                f"(limit {profile.max_payload_bytes})",
            )
        )

    verdict = "pass" if not violations else "fail"
    return ValidationReport(verdict=verdict, violations=tuple(violations), stats=stats)
