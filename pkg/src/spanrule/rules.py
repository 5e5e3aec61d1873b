"""Labeling-rule language: compilation from interactions, evaluation, label matrix.

A rule is an existentially quantified conjunction over token variables:
{t1, t2 | t1 = 'book' AND t2 in padj AND idx(t1) < idx(t2)} => label.

Rule ids are the lowercase hex of a 64-bit FNV-1a hash of the canonical JSON
form (sorted predicates, sorted sentence pairs); this hash is part of the
persistence format.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import Corpus, Document
from .glm import ConceptStore, Interaction, concept_matches

ABSTAIN = -1

# predicate operators
EQ = "="
NEQ = "!="
IN = "in"
NOT_IN = "not_in"
IDX_LT = "idx<"

# rhs kinds
LITERAL = "literal"
CONCEPT = "concept"
ENTITY = "entity"
VAR = "var"

_SET_KINDS = (CONCEPT, ENTITY)


class RuleError(Exception):
    pass


class EvaluationError(RuleError):
    """Raised when a rule references a concept that no longer resolves."""


def stable_hash64(data: str) -> str:
    """64-bit FNV-1a of the UTF-8 bytes, lowercase hex. Persistence-stable."""
    h = 0xCBF29CE484222325
    for byte in data.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


@dataclass(frozen=True, order=True)
class Predicate:
    lhs: str
    op: str
    rhs: str
    rhs_kind: str
    transform: Optional[str] = None

    def __post_init__(self):
        if self.op in (IN, NOT_IN):
            if self.rhs_kind not in _SET_KINDS:
                raise RuleError("set operators need a concept or entity rhs")
        elif self.op == IDX_LT:
            if self.rhs_kind != VAR:
                raise RuleError("idx< needs a variable rhs")
        elif self.op in (EQ, NEQ):
            if self.rhs_kind not in (LITERAL, VAR):
                raise RuleError(f"{self.op} needs a literal or variable rhs")
        else:
            raise RuleError(f"unknown operator {self.op!r}")

    def variables(self) -> set[str]:
        out = {self.lhs}
        if self.rhs_kind == VAR:
            out.add(self.rhs)
        return out

    def to_list(self) -> list:
        return [self.transform, self.lhs, self.op, self.rhs, self.rhs_kind]


@dataclass(frozen=True)
class Rule:
    variables: tuple[str, ...]
    conditions: frozenset[Predicate]
    sentence_pairs: frozenset[tuple[str, str]] = frozenset()  # unordered pairs
    label: int = 0

    def __post_init__(self):
        used = set()
        for p in self.conditions:
            used |= p.variables()
        for v in self.variables:
            if v not in used:
                raise RuleError(f"variable {v!r} appears in no predicate")
        if used - set(self.variables):
            raise RuleError("predicate references undeclared variable")
        for a, b in self.sentence_pairs:
            if a >= b:
                raise RuleError("sentence pairs must be stored ordered (a < b)")

    def canonical_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "conditions": sorted(p.to_list() for p in self.conditions),
            "sentence_pairs": sorted(list(p) for p in self.sentence_pairs),
            "label": self.label,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.canonical_dict(), separators=(",", ":"), sort_keys=True)

    @cached_property
    def id(self) -> str:
        return stable_hash64(self.canonical_json())

    @classmethod
    def from_dict(cls, data: dict) -> "Rule":
        return cls(
            variables=tuple(data["variables"]),
            conditions=frozenset(
                Predicate(lhs=c[1], op=c[2], rhs=c[3], rhs_kind=c[4], transform=c[0])
                for c in data["conditions"]),
            sentence_pairs=frozenset((a, b) for a, b in data["sentence_pairs"]),
            label=data["label"],
        )


def sentence_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def compile_interaction(ix: Interaction, doc: Document, store: ConceptStore) -> Rule:
    """Compile one demonstration into its seed rule.

    Variables are named t1..tn in token order, so annotation order never
    changes the rule id.
    """
    ix.validate(n_classes=ix.label + 1 if ix.label is not None else 1, doc=doc)
    ordered = sorted(ix.spans, key=lambda s: s.start_token)
    var_of = {s.id: f"t{i + 1}" for i, s in enumerate(ordered)}
    conditions: set[Predicate] = set()
    for s in ordered:
        var = var_of[s.id]
        if s.concept is not None:
            store.get(s.concept)  # must exist at compile time
            conditions.add(Predicate(var, IN, s.concept, CONCEPT))
        else:
            phrase = doc.normalized_phrase(s.start_token, s.end_token)
            conditions.add(Predicate(var, EQ, phrase, LITERAL))
    pairs: set[tuple[str, str]] = set()
    for link in ix.links:
        va, vb = var_of[link.a], var_of[link.b]
        pairs.add(sentence_pair(va, vb))
        if link.directed:
            conditions.add(Predicate(va, IDX_LT, vb, VAR))
    return Rule(
        variables=tuple(f"t{i + 1}" for i in range(len(ordered))),
        conditions=frozenset(conditions),
        sentence_pairs=frozenset(pairs),
        label=ix.label,
    )


# --- evaluation --------------------------------------------------------------

def _phrase_candidates(doc: Document, phrase: str) -> list[tuple[int, int]]:
    words = phrase.split(" ")
    n = len(words)
    out = []
    for i in range(len(doc.tokens) - n + 1):
        if all(doc.tokens[i + k].normalized == words[k] for k in range(n)):
            out.append((i, i + n))
    return out


def _entity_candidates(doc: Document, tag: str) -> list[tuple[int, int]]:
    # an entity predicate is satisfied by any single token covered by a span
    # of that type
    out = []
    for e in doc.entities:
        if e.entity_type == tag:
            out.extend((i, i + 1) for i in range(e.start_token, e.end_token))
    return sorted(set(out))


def _set_matches(rhs: str, rhs_kind: str, doc: Document,
                 store: ConceptStore) -> list[tuple[int, int]]:
    if rhs_kind == CONCEPT:
        if rhs not in store:
            raise EvaluationError(f"rule references unknown concept {rhs!r}")
        return concept_matches(store.get(rhs), doc)
    return _entity_candidates(doc, rhs)


def evaluate_rule(rule: Rule, doc: Document, store: ConceptStore) -> int:
    """rule.label if some assignment of token ranges satisfies every predicate,
    else ABSTAIN. `not_in` predicates are document-wide absence guards and bind
    no token."""
    guards = [p for p in rule.conditions if p.op == NOT_IN]
    for g in guards:
        if _set_matches(g.rhs, g.rhs_kind, doc, store):
            return ABSTAIN

    bound_vars = []
    for v in rule.variables:
        positive = [p for p in rule.conditions
                    if p.op != NOT_IN and v in p.variables()]
        if positive:
            bound_vars.append(v)

    candidates: dict[str, list[tuple[int, int]]] = {}
    for v in bound_vars:
        ranges: Optional[list[tuple[int, int]]] = None
        for p in rule.conditions:
            if p.lhs != v or p.op == NOT_IN or p.rhs_kind == VAR:
                continue
            if p.op == EQ:
                cur = _phrase_candidates(doc, p.rhs)
            elif p.op == NEQ:
                cur = [(i, i + 1) for i, t in enumerate(doc.tokens)
                       if t.normalized != p.rhs]
            else:  # IN
                cur = _set_matches(p.rhs, p.rhs_kind, doc, store)
            ranges = cur if ranges is None else [r for r in ranges if r in set(cur)]
        if ranges is None:
            ranges = [(i, i + 1) for i in range(len(doc.tokens))]
        if not ranges:
            return ABSTAIN
        candidates[v] = ranges

    if not bound_vars:
        return rule.label

    positional = [(p.lhs, p.rhs) for p in rule.conditions if p.op == IDX_LT]
    pairs = [(a, b) for a, b in rule.sentence_pairs
             if a in candidates and b in candidates]

    for combo in itertools.product(*(candidates[v] for v in bound_vars)):
        binding = dict(zip(bound_vars, combo))
        if len(set(combo)) != len(combo):
            continue  # no two variables may bind the same range
        if any(binding[a][0] >= binding[b][0] for a, b in positional
               if a in binding and b in binding):
            continue
        ok = True
        for a, b in pairs:
            if doc.sentence_of(binding[a][0]) != doc.sentence_of(binding[b][0]):
                ok = False
                break
        if ok:
            return rule.label
    return ABSTAIN


# --- label matrix ------------------------------------------------------------

@dataclass
class LabelingFunction:
    rule: Rule
    accepted_at: int
    enabled: bool = True

    @property
    def id(self) -> str:
        return self.rule.id


@dataclass
class LabelMatrix:
    uids: tuple[str, ...]
    column_ids: tuple[str, ...]
    votes: np.ndarray  # shape (n_docs, n_functions), int, ABSTAIN = -1

    def __post_init__(self):
        assert self.votes.shape == (len(self.uids), len(self.column_ids))


def evaluate_column(rule: Rule, corpus: Corpus, store: ConceptStore) -> np.ndarray:
    return np.array([evaluate_rule(rule, d, store) for d in corpus], dtype=np.int64)


def evaluate_all(functions: Sequence[LabelingFunction], corpus: Corpus,
                 store: ConceptStore) -> LabelMatrix:
    active = [f for f in sorted(functions, key=lambda f: f.accepted_at) if f.enabled]
    uids = tuple(d.uid for d in corpus)
    if not active:
        return LabelMatrix(uids, (), np.zeros((len(uids), 0), dtype=np.int64))
    cols = [evaluate_column(f.rule, corpus, store) for f in active]
    return LabelMatrix(uids, tuple(f.id for f in active), np.column_stack(cols))


class MatrixCache:
    """Incremental label matrix over a fixed corpus: adding or removing one
    function recomputes only its column."""

    def __init__(self, corpus: Corpus, store: ConceptStore):
        self.corpus = corpus
        self.store = store
        self._columns: dict[str, np.ndarray] = {}

    def add(self, rule: Rule) -> None:
        if rule.id not in self._columns:
            self._columns[rule.id] = evaluate_column(rule, self.corpus, self.store)

    def remove(self, rule_id: str) -> None:
        self._columns.pop(rule_id, None)

    def invalidate(self) -> None:
        """Concept edits can change any column; drop everything."""
        self._columns.clear()

    def matrix(self, functions: Sequence[LabelingFunction]) -> LabelMatrix:
        active = [f for f in sorted(functions, key=lambda f: f.accepted_at)
                  if f.enabled]
        uids = tuple(d.uid for d in self.corpus)
        for f in active:
            self.add(f.rule)
        if not active:
            return LabelMatrix(uids, (), np.zeros((len(uids), 0), dtype=np.int64))
        cols = [self._columns[f.id] for f in active]
        return LabelMatrix(uids, tuple(f.id for f in active), np.column_stack(cols))
