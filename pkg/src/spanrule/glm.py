"""Concepts, span annotations, links, and the interaction operation set."""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from .corpus import Document, normalize


class AnnotationError(Exception):
    pass


class RegexDialectError(AnnotationError):
    pass


# --- regex dialect -----------------------------------------------------------
# Concept regexes use a restricted dialect: literals, escapes (\d \w \s etc.),
# character classes, non-capturing/plain groups, alternation, greedy repetition
# (* + ? {m,n}) and anchors. Backreferences, lookaround, and conditional groups
# are rejected when the element is added.

_FORBIDDEN_RE = re.compile(
    r"\\[1-9]"            # backreferences
    r"|\(\?P?[=!<:]?[<=]"  # lookaround / named groups (loose net, refined below)
)
_FORBIDDEN_GROUPS = ("(?=", "(?!", "(?<", "(?P", "(?(", "\\g", "\\k")


def validate_regex(pattern: str) -> None:
    for bad in _FORBIDDEN_GROUPS:
        if bad in pattern:
            raise RegexDialectError(f"construct {bad!r} not allowed in concept regexes")
    if re.search(r"\\[1-9]", pattern):
        raise RegexDialectError("backreferences not allowed in concept regexes")
    try:
        re.compile(pattern)
    except re.error as exc:
        raise RegexDialectError(f"invalid regex {pattern!r}: {exc}") from exc


@dataclass(frozen=True)
class ConceptElement:
    kind: str  # "token" | "regex"
    pattern: str

    def __post_init__(self):
        if self.kind not in ("token", "regex"):
            raise AnnotationError(f"unknown element kind {self.kind!r}")
        if self.kind == "token":
            if not self.pattern or any(c.isspace() for c in self.pattern):
                raise AnnotationError("token literals may not contain whitespace")
        else:
            validate_regex(self.pattern)


@dataclass
class Concept:
    name: str
    elements: list[ConceptElement] = field(default_factory=list)
    color_hint: int = 0

    def token_literals(self) -> set[str]:
        return {normalize(e.pattern) for e in self.elements if e.kind == "token"}


class ConceptStore:
    """Project-global named concepts; rules reference them by name."""

    def __init__(self):
        self._concepts: dict[str, Concept] = {}
        self._next_color = 0

    def __contains__(self, name: str) -> bool:
        return name in self._concepts

    def __iter__(self):
        return iter(self._concepts.values())

    def names(self) -> list[str]:
        return list(self._concepts)

    def get(self, name: str) -> Concept:
        try:
            return self._concepts[name]
        except KeyError:
            raise AnnotationError(f"unknown concept {name!r}") from None

    def create(self, name: str) -> Concept:
        if name in self._concepts:
            raise AnnotationError(f"concept {name!r} already exists")
        c = Concept(name=name, color_hint=self._next_color % 12)
        self._next_color += 1
        self._concepts[name] = c
        return c

    def delete(self, name: str) -> Concept:
        return self._concepts.pop(name)

    def add_element(self, name: str, element: ConceptElement) -> None:
        c = self.get(name)
        if element in c.elements:
            raise AnnotationError(f"element already in concept {name!r}")
        c.elements.append(element)

    def remove_element(self, name: str, element: ConceptElement) -> None:
        c = self.get(name)
        try:
            c.elements.remove(element)
        except ValueError:
            raise AnnotationError(f"element not in concept {name!r}") from None

    def copy(self) -> "ConceptStore":
        new = ConceptStore()
        new._concepts = copy.deepcopy(self._concepts)
        new._next_color = self._next_color
        return new

    def to_dict(self) -> dict:
        return {
            "concepts": [
                {"name": c.name, "color_hint": c.color_hint,
                 "elements": [{"kind": e.kind, "pattern": e.pattern} for e in c.elements]}
                for c in self._concepts.values()
            ],
            "next_color": self._next_color,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConceptStore":
        store = cls()
        for c in data["concepts"]:
            concept = Concept(name=c["name"], color_hint=c["color_hint"],
                              elements=[ConceptElement(e["kind"], e["pattern"])
                                        for e in c["elements"]])
            store._concepts[concept.name] = concept
        store._next_color = data.get("next_color", len(store._concepts))
        return store


def concept_matches(concept: Concept, doc: Document) -> list[tuple[int, int]]:
    """Token ranges matched by any element of the concept, sorted and deduped.

    Token literals match whole tokens case-insensitively; regexes run over the
    raw text and each match is snapped to the covering token range.
    """
    from .corpus import snap_to_tokens

    hits: set[tuple[int, int]] = set()
    literals = concept.token_literals()
    if literals:
        for tok in doc.tokens:
            if tok.normalized in literals:
                hits.add((tok.index, tok.index + 1))
    for el in concept.elements:
        if el.kind != "regex":
            continue
        for m in re.finditer(el.pattern, doc.text):
            if m.start() == m.end():
                continue
            snapped = snap_to_tokens(doc.tokens, m.start(), m.end())
            if snapped is not None:
                hits.add(snapped)
    return sorted(hits)


# --- interaction state -------------------------------------------------------

@dataclass(frozen=True)
class SpanAnnotation:
    id: str
    start_token: int
    end_token: int  # half-open
    concept: Optional[str] = None

    def __post_init__(self):
        if self.end_token <= self.start_token:
            raise AnnotationError("empty span annotation")


@dataclass(frozen=True)
class LinkAnnotation:
    a: str
    b: str
    directed: bool = False  # True: a precedes b

    def __post_init__(self):
        if self.a == self.b:
            raise AnnotationError("link endpoints must differ")


@dataclass
class Interaction:
    doc_uid: str
    spans: list[SpanAnnotation] = field(default_factory=list)
    links: list[LinkAnnotation] = field(default_factory=list)
    label: Optional[int] = None

    def span(self, span_id: str) -> SpanAnnotation:
        for s in self.spans:
            if s.id == span_id:
                return s
        raise AnnotationError(f"unknown span id {span_id!r}")

    def validate(self, n_classes: int, doc: Optional[Document] = None) -> None:
        if not self.spans:
            raise AnnotationError("interaction needs at least one span")
        if self.label is None or not 0 <= self.label < n_classes:
            raise AnnotationError(f"label {self.label!r} outside [0, {n_classes})")
        ordered = sorted(self.spans, key=lambda s: s.start_token)
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.start_token < prev.end_token:
                raise AnnotationError("span annotations overlap")
        if doc is not None:
            for s in self.spans:
                if s.end_token > len(doc.tokens):
                    raise AnnotationError("span outside document")
        ids = {s.id for s in self.spans}
        if len(ids) != len(self.spans):
            raise AnnotationError("duplicate span ids")
        for link in self.links:
            if link.a not in ids or link.b not in ids:
                raise AnnotationError("link references unknown span id")

    def to_dict(self) -> dict:
        return {
            "doc_uid": self.doc_uid,
            "spans": [{"id": s.id, "start_token": s.start_token,
                       "end_token": s.end_token, "concept": s.concept}
                      for s in self.spans],
            "links": [{"a": l.a, "b": l.b, "directed": l.directed} for l in self.links],
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Interaction":
        return cls(
            doc_uid=data["doc_uid"],
            spans=[SpanAnnotation(s["id"], s["start_token"], s["end_token"],
                                  s.get("concept")) for s in data["spans"]],
            links=[LinkAnnotation(l["a"], l["b"], l.get("directed", False))
                   for l in data["links"]],
            label=data.get("label"),
        )


# --- operations --------------------------------------------------------------

@dataclass(frozen=True)
class Operation:
    """One labeling-interface action; apply_operation is pure and invertible."""
    kind: str
    args: tuple[tuple[str, Any], ...]

    @classmethod
    def make(cls, kind: str, **kwargs: Any) -> "Operation":
        return cls(kind, tuple(sorted(kwargs.items())))

    @property
    def kwargs(self) -> dict:
        return dict(self.args)


State = tuple[Interaction, ConceptStore]


def apply_operation(state: State, op: Operation) -> State:
    ix, store = state
    ix = copy.deepcopy(ix)
    store = store.copy()
    a = op.kwargs
    if op.kind == "select":
        span = SpanAnnotation(a["span_id"], a["start_token"], a["end_token"])
        for existing in ix.spans:
            if span.start_token < existing.end_token and existing.start_token < span.end_token:
                raise AnnotationError("selection overlaps an existing span")
        ix.spans.append(span)
    elif op.kind == "deselect":
        span = ix.span(a["span_id"])
        ix.links = [l for l in ix.links if span.id not in (l.a, l.b)]
        ix.spans.remove(span)
    elif op.kind == "assign_concept":
        span = ix.span(a["span_id"])
        concept = a["concept"]
        if concept is not None and concept not in store:
            raise AnnotationError(f"unknown concept {concept!r}")
        ix.spans[ix.spans.index(span)] = replace(span, concept=concept)
    elif op.kind == "create_concept":
        store.create(a["name"])
    elif op.kind == "delete_concept":
        store.delete(a["name"])
    elif op.kind == "restore_concept":
        if a["name"] in store:
            raise AnnotationError(f"concept {a['name']!r} already exists")
        store._concepts[a["name"]] = Concept(
            name=a["name"], color_hint=a["color_hint"],
            elements=[ConceptElement(k, p) for k, p in a["elements"]])
    elif op.kind == "add_element":
        store.add_element(a["name"], ConceptElement(a["element_kind"], a["pattern"]))
    elif op.kind == "remove_element":
        store.remove_element(a["name"], ConceptElement(a["element_kind"], a["pattern"]))
    elif op.kind == "link":
        _add_link(ix, LinkAnnotation(a["a"], a["b"], directed=False))
    elif op.kind == "direct_to":
        _add_link(ix, LinkAnnotation(a["a"], a["b"], directed=True))
    elif op.kind == "unlink":
        target = LinkAnnotation(a["a"], a["b"], a["directed"])
        try:
            ix.links.remove(target)
        except ValueError:
            raise AnnotationError("no such link") from None
    elif op.kind == "set_label":
        ix.label = a["label"]
    else:
        raise AnnotationError(f"unknown operation {op.kind!r}")
    return ix, store


def _add_link(ix: Interaction, link: LinkAnnotation) -> None:
    ix.span(link.a)
    ix.span(link.b)
    if link in ix.links:
        raise AnnotationError("duplicate link")
    ix.links.append(link)


def inverse_operation(state: State, op: Operation) -> Operation:
    """Inverse of op relative to the state it is applied to."""
    ix, store = state
    a = op.kwargs
    if op.kind == "select":
        return Operation.make("deselect", span_id=a["span_id"])
    if op.kind == "deselect":
        span = ix.span(a["span_id"])
        # restoring links is the caller's concern; deselect of a linked span
        # is not invertible by a single operation
        return Operation.make("select", span_id=span.id,
                              start_token=span.start_token, end_token=span.end_token)
    if op.kind == "assign_concept":
        prev = ix.span(a["span_id"]).concept
        return Operation.make("assign_concept", span_id=a["span_id"], concept=prev)
    if op.kind == "create_concept":
        return Operation.make("delete_concept", name=a["name"])
    if op.kind == "delete_concept":
        concept = store.get(a["name"])
        return Operation.make(
            "restore_concept", name=a["name"], color_hint=concept.color_hint,
            elements=tuple((e.kind, e.pattern) for e in concept.elements))
    if op.kind == "restore_concept":
        return Operation.make("delete_concept", name=a["name"])
    if op.kind == "add_element":
        return Operation.make("remove_element", name=a["name"],
                              element_kind=a["element_kind"], pattern=a["pattern"])
    if op.kind == "remove_element":
        return Operation.make("add_element", name=a["name"],
                              element_kind=a["element_kind"], pattern=a["pattern"])
    if op.kind == "link":
        return Operation.make("unlink", a=a["a"], b=a["b"], directed=False)
    if op.kind == "direct_to":
        return Operation.make("unlink", a=a["a"], b=a["b"], directed=True)
    if op.kind == "unlink":
        kind = "direct_to" if a["directed"] else "link"
        return Operation.make(kind, a=a["a"], b=a["b"])
    if op.kind == "set_label":
        return Operation.make("set_label", label=ix.label)
    raise AnnotationError(f"no inverse for operation {op.kind!r}")
