"""Generalizes a seed rule into a ranked candidate set.

Expansion heuristics:
  (a) literal -> concept / entity-tag substitution,
  (b) toggling a linked pair between position-specific (same sentence, ordered)
      and general co-existence (same document, unordered),
  (c) restriction to non-empty variable subsets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .glm import ConceptStore
from .rules import (CONCEPT, ENTITY, EQ, IDX_LT, IN, LITERAL, NOT_IN, VAR,
                    Predicate, Rule, RuleError, sentence_pair)

MAX_VARIABLES = 3
MAX_CANDIDATES = 256
DEFAULT_K = 5
ENTITY_SET_WEIGHT = 10  # fixed |rhs| stand-in for open entity classes


@dataclass(frozen=True)
class RankedCandidate:
    rule: Rule
    score: float
    interaction_coverage: float


@dataclass
class CandidateSet:
    seed: Rule
    candidates: list[RankedCandidate] = field(default_factory=list)


def _literal_alternatives(pred: Predicate, store: ConceptStore,
                          entity_tags: Iterable[str]) -> list[Predicate]:
    """Substitutions for (var = w): the literal itself, every concept containing
    w, and every entity tag covering the annotated span."""
    out = [pred]
    word = pred.rhs
    if " " not in word:
        for concept in store:
            if word in concept.token_literals():
                out.append(Predicate(pred.lhs, IN, concept.name, CONCEPT))
    for tag in sorted(set(entity_tags)):
        out.append(Predicate(pred.lhs, IN, tag, ENTITY))
    return out


def expand(seed: Rule, store: ConceptStore,
           entity_tags: Optional[Mapping[str, Iterable[str]]] = None) -> set[Rule]:
    """Closure of the seed under the generalization heuristics.

    entity_tags maps a variable to the entity types covering its annotated
    span in the source document.
    """
    entity_tags = entity_tags or {}
    if len(seed.variables) > MAX_VARIABLES:
        raise RuleError(f"seed exceeds the {MAX_VARIABLES}-variable cap")

    literal_preds = [p for p in seed.conditions if p.op == EQ and p.rhs_kind == LITERAL]
    fixed_preds = [p for p in seed.conditions
                   if not (p.op == EQ and p.rhs_kind == LITERAL) and p.op != IDX_LT]
    directed = {(p.lhs, p.rhs) for p in seed.conditions if p.op == IDX_LT}

    # per-linked-pair toggle: original link form vs document co-existence
    pair_options: list[list[tuple[Optional[Predicate], Optional[tuple[str, str]]]]] = []
    for a, b in sorted(seed.sentence_pairs):
        idx_pred = None
        for la, lb in directed:
            if sentence_pair(la, lb) == (a, b):
                idx_pred = Predicate(la, IDX_LT, lb, VAR)
        pair_options.append([(idx_pred, (a, b)), (None, None)])

    literal_options = [_literal_alternatives(p, store, entity_tags.get(p.lhs, ()))
                       for p in literal_preds]

    results: set[Rule] = set()
    for literal_choice in itertools.product(*literal_options):
        for pair_choice in itertools.product(*pair_options):
            conditions = set(fixed_preds) | set(literal_choice)
            pairs = set()
            for idx_pred, pair in pair_choice:
                if idx_pred is not None:
                    conditions.add(idx_pred)
                if pair is not None:
                    pairs.add(pair)
            for rule in _variable_subsets(seed, conditions, pairs):
                results.add(rule)
                if len(results) >= MAX_CANDIDATES:
                    results.add(seed)
                    return results
    results.add(seed)  # guaranteed present regardless of caps
    return results


def _variable_subsets(seed: Rule, conditions: set[Predicate],
                      pairs: set[tuple[str, str]]) -> Iterable[Rule]:
    variables = seed.variables
    for size in range(len(variables), 0, -1):
        for subset in itertools.combinations(variables, size):
            keep = set(subset)
            conds = frozenset(p for p in conditions if p.variables() <= keep)
            if any(not any(v in p.variables() for p in conds) for v in subset):
                continue
            sub_pairs = frozenset(p for p in pairs if set(p) <= keep)
            yield Rule(variables=subset, conditions=conds,
                       sentence_pairs=sub_pairs, label=seed.label)


def generalization_score(rule: Rule, store: ConceptStore) -> int:
    """Product over conditions of the right-hand-side set size; literal,
    inequality and positional predicates contribute 1."""
    score = 1
    for p in rule.conditions:
        if p.op in (IN, NOT_IN):
            if p.rhs_kind == CONCEPT:
                score *= len(store.get(p.rhs).elements)
            else:
                score *= ENTITY_SET_WEIGHT
    return score


def interaction_coverage(rule: Rule, seed: Rule) -> float:
    if not seed.variables:
        return 1.0
    return len(set(rule.variables) & set(seed.variables)) / len(seed.variables)


def rank(candidates: Iterable[Rule], seed: Rule, store: ConceptStore,
         k: int = DEFAULT_K) -> CandidateSet:
    """Order: interaction coverage desc, generalization score desc, predicate
    count asc, canonical rule id asc; truncated to k."""
    if k < 1:
        raise RuleError("k must be >= 1")
    by_id: dict[str, Rule] = {}
    for rule in candidates:
        by_id.setdefault(rule.id, rule)
    scored = []
    for rule in by_id.values():
        cov = interaction_coverage(rule, seed)
        g = generalization_score(rule, store)
        scored.append((-cov, -g, len(rule.conditions), rule.id, rule, cov, g))
    scored.sort(key=lambda t: t[:4])
    top = [RankedCandidate(rule=t[4], score=float(t[6]), interaction_coverage=t[5])
           for t in scored[:k]]
    return CandidateSet(seed=seed, candidates=top)


def synthesize(seed: Rule, store: ConceptStore,
               entity_tags: Optional[Mapping[str, Iterable[str]]] = None,
               k: int = DEFAULT_K) -> CandidateSet:
    return rank(expand(seed, store, entity_tags), seed, store, k)


# --- rendering ---------------------------------------------------------------
# Grammar (stable, consumed by the UI):
#   condition ::= "<var> = '<phrase>'" | "<var> != '<phrase>'"
#               | "<var> ∈ <set>" | "<var> ∉ <set>" | "idx(<a>) < idx(<b>)"
#   rule ::= cond (" AND " cond)* [", same sentence" | ", same document"] " ⇒ " LABEL

_OP_SYMBOL = {IN: "∈", NOT_IN: "∉"}


def render_predicate(p: Predicate) -> str:
    if p.op == IDX_LT:
        return f"idx({p.lhs}) < idx({p.rhs})"
    if p.op in (IN, NOT_IN):
        return f"{p.lhs} {_OP_SYMBOL[p.op]} {p.rhs}"
    rhs = p.rhs if p.rhs_kind == VAR else f"'{p.rhs}'"
    return f"{p.lhs} {p.op} {rhs}"


def render_rule(rule: Rule, label_names: Optional[Sequence[str]] = None) -> str:
    parts = [render_predicate(p) for p in sorted(rule.conditions)]
    text = " AND ".join(parts)
    if len(rule.variables) > 1:
        text += ", same sentence" if rule.sentence_pairs else ", same document"
    if label_names and 0 <= rule.label < len(label_names):
        label = str(label_names[rule.label]).upper()
    else:
        label = f"CLASS_{rule.label}"
    return f"{text} ⇒ {label}"
