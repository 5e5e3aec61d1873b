import pytest

from spanrule.corpus import build_document
from spanrule.glm import (AnnotationError, Concept, ConceptElement,
                          ConceptStore, Interaction, LinkAnnotation, Operation,
                          RegexDialectError, SpanAnnotation, apply_operation,
                          concept_matches, inverse_operation, validate_regex)


def test_concept_matches_whole_token(review_store, review_doc):
    assert concept_matches(review_store.get("padj"), review_doc) == [(4, 5)]


def test_concept_matches_case_insensitive():
    c = Concept("padj", [ConceptElement("token", "Great")])
    doc = build_document("u", "GREAT book")
    assert concept_matches(c, doc) == [(0, 1)]


def test_concept_matches_regex_snaps_to_token():
    c = Concept("c", [ConceptElement("regex", "gr+eat")])
    doc = build_document("u", "so grrreat")
    assert concept_matches(c, doc) == [(1, 2)]


def test_concept_matches_empty_concept(review_doc):
    assert concept_matches(Concept("empty"), review_doc) == []


def test_concept_matches_monotone(review_doc, review_store):
    base = review_store.get("padj")
    before = set(concept_matches(base, review_doc))
    grown = Concept("padj", base.elements + [ConceptElement("token", "loved")])
    after = set(concept_matches(grown, review_doc))
    assert before <= after


def test_regex_dialect_rejects_lookaround():
    with pytest.raises(RegexDialectError):
        validate_regex("foo(?=bar)")
    with pytest.raises(RegexDialectError):
        validate_regex(r"(\w+) \1")
    validate_regex(r"gr+eat|[A-Z]\d{2,4}")


def test_token_element_whitespace_rejected():
    with pytest.raises(AnnotationError):
        ConceptElement("token", "two words")


def _empty_state():
    return Interaction(doc_uid="d"), ConceptStore()


def test_select_then_assign():
    state = _empty_state()
    state = apply_operation(state, Operation.make("create_concept", name="item"))
    state = apply_operation(state, Operation.make(
        "select", span_id="s1", start_token=1, end_token=2))
    state = apply_operation(state, Operation.make(
        "assign_concept", span_id="s1", concept="item"))
    ix, _ = state
    assert ix.spans == [SpanAnnotation("s1", 1, 2, concept="item")]


def test_select_overlap_rejected():
    state = _empty_state()
    state = apply_operation(state, Operation.make(
        "select", span_id="s1", start_token=1, end_token=3))
    with pytest.raises(AnnotationError, match="overlaps"):
        apply_operation(state, Operation.make(
            "select", span_id="s2", start_token=2, end_token=4))


def test_direct_to_creates_directed_link():
    state = _empty_state()
    state = apply_operation(state, Operation.make(
        "select", span_id="s1", start_token=0, end_token=1))
    state = apply_operation(state, Operation.make(
        "select", span_id="s2", start_token=2, end_token=3))
    state = apply_operation(state, Operation.make("direct_to", a="s1", b="s2"))
    ix, _ = state
    assert ix.links == [LinkAnnotation("s1", "s2", directed=True)]


def test_link_dangling_id():
    state = _empty_state()
    with pytest.raises(AnnotationError):
        apply_operation(state, Operation.make("link", a="s1", b="s2"))


def test_assign_unknown_concept():
    state = _empty_state()
    state = apply_operation(state, Operation.make(
        "select", span_id="s1", start_token=0, end_token=1))
    with pytest.raises(AnnotationError, match="unknown concept"):
        apply_operation(state, Operation.make(
            "assign_concept", span_id="s1", concept="nope"))


OPERATION_SEQUENCES = [
    [Operation.make("select", span_id="s1", start_token=0, end_token=1)],
    [Operation.make("create_concept", name="c")],
    [Operation.make("create_concept", name="c"),
     Operation.make("add_element", name="c", element_kind="token", pattern="hi")],
    [Operation.make("create_concept", name="c"),
     Operation.make("add_element", name="c", element_kind="token", pattern="hi"),
     Operation.make("delete_concept", name="c")],
    [Operation.make("select", span_id="s1", start_token=0, end_token=1),
     Operation.make("select", span_id="s2", start_token=2, end_token=3),
     Operation.make("link", a="s1", b="s2")],
    [Operation.make("select", span_id="s1", start_token=0, end_token=1),
     Operation.make("set_label", label=1)],
]


@pytest.mark.parametrize("ops", OPERATION_SEQUENCES)
def test_operation_inverse_roundtrip(ops):
    state = _empty_state()
    for op in ops[:-1]:
        state = apply_operation(state, op)
    op = ops[-1]
    inv = inverse_operation(state, op)
    after = apply_operation(apply_operation(state, op), inv)
    assert after[0] == state[0]
    assert after[1].to_dict()["concepts"] == state[1].to_dict()["concepts"]


def test_interaction_serialization_roundtrip():
    ix = Interaction(
        doc_uid="d9",
        spans=[SpanAnnotation("s1", 0, 2, concept="item"),
               SpanAnnotation("s2", 4, 5)],
        links=[LinkAnnotation("s1", "s2", directed=True)],
        label=1)
    assert Interaction.from_dict(ix.to_dict()) == ix


def test_interaction_validation():
    ix = Interaction(doc_uid="d", spans=[], label=0)
    with pytest.raises(AnnotationError, match="at least one span"):
        ix.validate(2)
    ix2 = Interaction(doc_uid="d",
                      spans=[SpanAnnotation("a", 0, 2), SpanAnnotation("b", 1, 3)],
                      label=0)
    with pytest.raises(AnnotationError, match="overlap"):
        ix2.validate(2)


def test_delete_concept_in_use_keeps_rule_matching(review_store, review_doc):
    # rules reference concepts by name: emptying the concept simply shrinks
    # its match set
    review_store.remove_element("padj", ConceptElement("token", "great"))
    assert concept_matches(review_store.get("padj"), review_doc) == []
