"""Independent brute-force oracles used by the test suite.

These deliberately re-state the rule semantics as blind enumeration over all
assignments, with no candidate-list pruning, so they exercise a different code
path than the engine.
"""

import itertools
import random

from spanrule.corpus import build_document
from spanrule.glm import Concept, ConceptElement, ConceptStore, concept_matches
from spanrule.rules import (ABSTAIN, CONCEPT, ENTITY, EQ, IDX_LT, IN, LITERAL,
                            NEQ, NOT_IN, VAR, Predicate, Rule)

MAX_RANGE_LEN = 3


def _all_ranges(doc):
    n = len(doc.tokens)
    return [(i, j) for i in range(n) for j in range(i + 1, min(i + 1 + MAX_RANGE_LEN, n + 1))]


def _set_ranges(rhs, rhs_kind, doc, store):
    if rhs_kind == CONCEPT:
        return set(concept_matches(store.get(rhs), doc))
    ranges = set()
    for e in doc.entities:
        if e.entity_type == rhs:
            ranges.update((i, i + 1) for i in range(e.start_token, e.end_token))
    return ranges


def _satisfies(pred, binding, doc, store):
    if pred.op == IDX_LT:
        return binding[pred.lhs][0] < binding[pred.rhs][0]
    r = binding[pred.lhs]
    phrase = doc.normalized_phrase(*r)
    if pred.op == EQ:
        return phrase == pred.rhs
    if pred.op == NEQ:
        return phrase != pred.rhs
    if pred.op == IN:
        return r in _set_ranges(pred.rhs, pred.rhs_kind, doc, store)
    raise AssertionError(pred.op)


def oracle_evaluate(rule, doc, store):
    for p in rule.conditions:
        if p.op == NOT_IN and _set_ranges(p.rhs, p.rhs_kind, doc, store):
            return ABSTAIN
    bound = [v for v in rule.variables
             if any(p.op != NOT_IN and v in p.variables() for p in rule.conditions)]
    if not bound:
        return rule.label
    ranges = _all_ranges(doc)
    positive = [p for p in rule.conditions if p.op != NOT_IN]
    for combo in itertools.product(ranges, repeat=len(bound)):
        if len(set(combo)) != len(combo):
            continue
        binding = dict(zip(bound, combo))
        if not all(_satisfies(p, binding, doc, store) for p in positive
                   if set(p.variables()) <= set(binding)):
            continue
        ok = True
        for a, b in rule.sentence_pairs:
            if a in binding and b in binding and \
                    doc.sentence_of(binding[a][0]) != doc.sentence_of(binding[b][0]):
                ok = False
                break
        if ok:
            return rule.label
    return ABSTAIN


# --- random instance generators ---------------------------------------------

WORDS = ["book", "great", "bad", "plot", "story", "read", "buy", "love",
         "hate", "cover", "alice", "paris", "item", "fine", "slow"]


def random_store(rng: random.Random) -> ConceptStore:
    store = ConceptStore()
    for name in ("c1", "c2", "c3"):
        store.create(name)
        for w in rng.sample(WORDS, rng.randint(0, 4)):
            try:
                store.add_element(name, ConceptElement("token", w))
            except Exception:
                pass
    return store


def random_doc(rng: random.Random, uid="d"):
    n = rng.randint(1, 12)
    words = [rng.choice(WORDS) for _ in range(n)]
    parts = []
    for w in words:
        parts.append(w)
        parts.append(". " if rng.random() < 0.25 else " ")
    return build_document(uid, "".join(parts).strip())


def random_rule(rng: random.Random, store: ConceptStore) -> Rule:
    n_vars = rng.randint(1, 3)
    variables = tuple(f"t{i + 1}" for i in range(n_vars))
    conditions = set()
    for v in variables:
        kind = rng.choice(["literal", "concept", "not_in"])
        if kind == "literal":
            conditions.add(Predicate(v, EQ, rng.choice(WORDS), LITERAL))
        elif kind == "concept":
            conditions.add(Predicate(v, IN, rng.choice(store.names()), CONCEPT))
        else:
            conditions.add(Predicate(v, NOT_IN, rng.choice(store.names()), CONCEPT))
    pairs = set()
    for a, b in itertools.combinations(variables, 2):
        roll = rng.random()
        if roll < 0.3:
            conditions.add(Predicate(a, IDX_LT, b, VAR))
            pairs.add((a, b))
        elif roll < 0.5:
            pairs.add((a, b))
    return Rule(variables=variables, conditions=frozenset(conditions),
                sentence_pairs=frozenset(pairs), label=rng.randint(0, 1))
