from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from semcast.scene_markup import (
    DEFAULT_PROFILE,
    ConstraintProfile,
    EmptyGraphError,
    EmptyInputError,
    MalformedAttributeError,
    MultipleCodeBlocksError,
    NonPrefixedTagError,
    RULE_DEPRECATED_ANIMATION,
    RULE_FORBIDDEN_ATTRIBUTE,
    RULE_FORBIDDEN_TAG,
    RULE_MISSING_ANIMATION,
    RULE_PAYLOAD_TOO_LARGE,
    SceneGraph,
    SceneNode,
    StrayTextError,
    UnbalancedTagError,
    parse_scene_markup,
    scene_stats,
    serialize_scene,
    validate_constraints,
)

SKY_SCENE = '<a-scene><a-sky color="#87CEEB"></a-sky></a-scene>'


def corpus_texts(dataset):
    manifest = dataset.corpus_manifest()
    names = [row["file"] for row in manifest["adversarial"]] + list(manifest["compliant"])
    return [(name, dataset.corpus_text(name)) for name in names]


class TestParse:
    def test_two_node_scene_with_sky(self):
        graph = parse_scene_markup(SKY_SCENE)
        assert len(graph.root) == 1
        assert scene_stats(graph).node_count == 2
        assert graph.declared_sky is not None
        assert graph.declared_sky.tag == "a-sky"
        assert graph.declared_sky.attribute("color") == "#87CEEB"

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            parse_scene_markup("")
        with pytest.raises(EmptyInputError):
            parse_scene_markup("   \n  ")

    def test_unclosed_tag(self):
        with pytest.raises(UnbalancedTagError):
            parse_scene_markup('<a-box color="red">')

    def test_mismatched_close(self):
        with pytest.raises(UnbalancedTagError):
            parse_scene_markup("<a-box></a-sphere>")

    def test_orphan_close(self):
        with pytest.raises(UnbalancedTagError):
            parse_scene_markup("</a-box>")

    def test_non_prefixed_tag(self):
        with pytest.raises(NonPrefixedTagError):
            parse_scene_markup("<box></box>")
        with pytest.raises(NonPrefixedTagError):
            parse_scene_markup("<script>alert(1)</script>")

    def test_uppercase_tag_rejected(self):
        with pytest.raises(NonPrefixedTagError):
            parse_scene_markup("<A-Box></A-Box>")

    def test_duplicate_attribute(self):
        with pytest.raises(MalformedAttributeError):
            parse_scene_markup('<a-box color="red" color="blue"></a-box>')

    def test_unquoted_attribute_value(self):
        with pytest.raises(MalformedAttributeError):
            parse_scene_markup("<a-box color=red></a-box>")

    def test_bare_attribute(self):
        with pytest.raises(MalformedAttributeError):
            parse_scene_markup("<a-box visible></a-box>")

    def test_stray_text(self):
        with pytest.raises(StrayTextError):
            parse_scene_markup("<a-box>hello</a-box>")

    def test_comment_rejected(self):
        with pytest.raises(StrayTextError):
            parse_scene_markup("<!-- a --><a-box></a-box>")

    def test_self_closing(self):
        graph = parse_scene_markup('<a-sky color="#87CEEB"/>')
        assert graph.root[0].tag == "a-sky"

    def test_fenced_code_block(self):
        text = f"Here is the scene:\n```html\n{SKY_SCENE}\n```\n"
        graph = parse_scene_markup(text)
        assert scene_stats(graph).node_count == 2

    def test_multiple_code_blocks(self):
        text = f"```html\n{SKY_SCENE}\n```\nand\n```html\n{SKY_SCENE}\n```"
        with pytest.raises(MultipleCodeBlocksError):
            parse_scene_markup(text)

    def test_entity_decoding(self):
        graph = parse_scene_markup('<a-text value="a &amp; b &lt;c&gt;"></a-text>')
        assert graph.root[0].attribute("value") == "a & b <c>"

    def test_attribute_order_preserved(self):
        graph = parse_scene_markup('<a-box b="2" a="1" c="3"></a-box>')
        assert [k for k, _ in graph.root[0].attributes] == ["b", "a", "c"]


class TestSerialize:
    def test_normalizes_whitespace_and_self_closing(self):
        graph = parse_scene_markup('<a-sky   color="#87CEEB"/>')
        assert serialize_scene(graph) == '<a-sky color="#87CEEB"></a-sky>'

    def test_empty_graph(self):
        with pytest.raises(EmptyGraphError):
            serialize_scene(SceneGraph(root=()))

    def test_round_trip_and_idempotence_on_corpus(self, dataset):
        for name, text in corpus_texts(dataset):
            graph = parse_scene_markup(text)
            once = serialize_scene(graph)
            reparsed = parse_scene_markup(once)
            assert reparsed == graph, name
            assert serialize_scene(reparsed) == once, name

    def test_round_trip_on_scene_fixtures(self, dataset):
        for video_id in range(1, 11):
            text = dataset.scene_fixture(video_id)
            graph = parse_scene_markup(text)
            assert parse_scene_markup(serialize_scene(graph)) == graph


class TestValidate:
    def test_forbidden_tag(self):
        graph = parse_scene_markup("<a-scene><a-assets></a-assets></a-scene>")
        report = validate_constraints(graph, DEFAULT_PROFILE)
        assert report.verdict == "fail"
        assert any(v.rule == RULE_FORBIDDEN_TAG for v in report.violations)

    def test_forbidden_attribute(self):
        graph = parse_scene_markup('<a-scene><a-entity gltf-model="x.gltf" animation="property: rotation; to: 0 360 0"></a-entity></a-scene>')
        report = validate_constraints(graph)
        assert [v.rule for v in report.violations] == [RULE_FORBIDDEN_ATTRIBUTE]

    def test_deprecated_animation_element(self):
        graph = parse_scene_markup(
            '<a-scene><a-box animation="property: rotation; to: 0 360 0"></a-box>'
            "<a-animation></a-animation></a-scene>"
        )
        report = validate_constraints(graph)
        assert [v.rule for v in report.violations] == [RULE_DEPRECATED_ANIMATION]

    def test_sky_plus_animated_box_passes(self):
        # Oracle: manual walk of the default profile's rules over this graph:
        # no forbidden tags or attributes, no external links, animation present.
        graph = parse_scene_markup(
            '<a-scene><a-sky color="#1188ee"></a-sky>'
            '<a-box animation="property: rotation; to: 0 360 0; loop: true"></a-box></a-scene>'
        )
        report = validate_constraints(graph)
        assert report.verdict == "pass"
        assert report.violations == ()

    def test_missing_animation(self):
        graph = parse_scene_markup('<a-scene><a-sky color="#111111"></a-sky></a-scene>')
        report = validate_constraints(graph)
        assert [v.rule for v in report.violations] == [RULE_MISSING_ANIMATION]

    def test_payload_cap(self):
        profile = ConstraintProfile(
            forbidden_tags=frozenset(),
            forbidden_attribute_keys=frozenset(),
            forbid_external_links=False,
            require_animation=False,
            require_sky_element=False,
            max_payload_bytes=10,
        )
        graph = parse_scene_markup(SKY_SCENE)
        report = validate_constraints(graph, profile)
        assert [v.rule for v in report.violations] == [RULE_PAYLOAD_TOO_LARGE]

    def test_verdict_iff_no_violations(self, dataset):
        for _name, text in corpus_texts(dataset):
            report = validate_constraints(parse_scene_markup(text))
            assert (report.verdict == "pass") == (len(report.violations) == 0)

    def test_report_json_is_stable(self):
        graph = parse_scene_markup(SKY_SCENE)
        a = validate_constraints(graph).to_json()
        b = validate_constraints(graph).to_json()
        assert a == b


def _without_node(node: SceneNode, path: list[int]) -> SceneNode:
    head, *rest = path
    children = list(node.children)
    if not rest:
        del children[head]
    else:
        children[head] = _without_node(children[head], rest)
    return SceneNode(node.tag, node.attributes, tuple(children))


def _path_indices(path: str) -> list[int]:
    return [int(seg.split("[")[1].rstrip("]")) for seg in path.strip("/").split("/")]


def _strip_attr(node: SceneNode, path: list[int], names: set[str]) -> SceneNode:
    if not path:
        attrs = tuple((k, v) for k, v in node.attributes if k not in names)
        return SceneNode(node.tag, attrs, node.children)
    head, *rest = path
    children = list(node.children)
    children[head] = _strip_attr(children[head], rest, names)
    return SceneNode(node.tag, node.attributes, tuple(children))


class TestMutationSoundness:
    """Removing or repairing the node named by a violation clears exactly it."""

    def test_node_level_violations_repairable(self, dataset):
        manifest = dataset.corpus_manifest()
        node_rules = {RULE_FORBIDDEN_TAG, RULE_DEPRECATED_ANIMATION}
        attr_rules = {RULE_FORBIDDEN_ATTRIBUTE, "external-link"}
        for row in manifest["adversarial"]:
            graph = parse_scene_markup(dataset.corpus_text(row["file"]))
            report = validate_constraints(graph)
            assert report.verdict == "fail"
            violation = report.violations[0]
            indices = _path_indices(violation.node_path) if violation.node_path != "/" else []
            roots = list(graph.root)
            if violation.rule in node_rules:
                head, *rest = indices
                if rest:
                    roots[head] = _without_node(roots[head], rest)
                else:
                    del roots[head]
            elif violation.rule in attr_rules:
                head, *rest = indices
                roots[head] = _strip_attr(roots[head], rest, {"gltf-model", "glb-model", "src"})
            elif violation.rule == RULE_MISSING_ANIMATION:
                head = 0
                root = roots[head]
                children = list(root.children)
                fixed = SceneNode(
                    children[-1].tag,
                    children[-1].attributes
                    + (("animation", "property: rotation; to: 0 360 0; loop: true"),),
                    children[-1].children,
                )
                children[-1] = fixed
                roots[head] = SceneNode(root.tag, root.attributes, tuple(children))
            elif violation.rule == RULE_PAYLOAD_TOO_LARGE:
                root = roots[0]
                roots[0] = SceneNode(root.tag, root.attributes, root.children[:6])
            repaired = SceneGraph(root=tuple(roots))
            after = validate_constraints(repaired)
            assert after.verdict == "pass", (row, after.violations)


class TestStats:
    def test_single_sky(self):
        stats = scene_stats(parse_scene_markup("<a-sky></a-sky>"))
        assert stats.node_count == 1
        assert stats.animated_node_count == 0
        assert stats.max_depth == 1

    def test_two_node_depth(self):
        stats = scene_stats(parse_scene_markup(SKY_SCENE))
        assert stats.node_count == 2
        assert stats.max_depth == 2

    def test_against_independent_recount(self, dataset):
        # Oracle: a breadth-first recount written independently of scene_stats'
        # depth-first walk.
        name = dataset.corpus_manifest()["compliant"][3]
        graph = parse_scene_markup(dataset.corpus_text(name))
        queue: list[tuple[SceneNode, int]] = [(r, 1) for r in graph.root]
        count = 0
        animated = 0
        depth = 0
        histogram: dict[str, int] = {}
        while queue:
            node, level = queue.pop(0)
            count += 1
            depth = max(depth, level)
            histogram[node.tag] = histogram.get(node.tag, 0) + 1
            if any(k == "animation" or k.startswith("animation__") for k, _ in node.attributes):
                animated += 1
            queue.extend((c, level + 1) for c in node.children)
        stats = scene_stats(graph)
        assert stats.node_count == count
        assert stats.animated_node_count == animated
        assert stats.max_depth == depth
        assert dict(stats.distinct_tag_histogram) == histogram

    def test_payload_bytes_exact(self, dataset):
        for name in dataset.corpus_manifest()["compliant"]:
            graph = parse_scene_markup(dataset.corpus_text(name))
            assert scene_stats(graph).payload_bytes == len(serialize_scene(graph).encode("utf-8"))


@given(
    st.lists(
        st.tuples(
            st.sampled_from(["color", "position", "animation", "src", "value"]),
            st.text(
                alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
                max_size=30,
            ),
        ),
        max_size=4,
        unique_by=lambda kv: kv[0],
    )
)
def test_attribute_values_round_trip(attrs):
    node = SceneNode("a-box", tuple(attrs), ())
    graph = SceneGraph(root=(node,))
    text = serialize_scene(graph)
    assert parse_scene_markup(text) == graph
