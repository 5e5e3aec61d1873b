import json
import re

import pytest
from hypothesis import given, strategies as st

from spanrule.corpus import (Corpus, CorpusError, EntitySpan, GazetteerProvider,
                             annotate_entities, build_document, load_corpus,
                             split_sentences, tokenize)

# reference oracle for the whole-word definition
ORACLE_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?")


def test_tokenize_offsets():
    toks = tokenize("This book was so great!")
    assert [t.surface for t in toks] == ["This", "book", "was", "so", "great"]
    assert [(t.start, t.end) for t in toks] == [(0, 4), (5, 9), (10, 13), (14, 16), (17, 22)]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_apostrophes():
    assert [t.surface for t in tokenize("don't re-read")] == ["don't", "re", "read"]


@given(st.text(max_size=200))
def test_tokenize_matches_reference_regex(text):
    assert [t.surface for t in tokenize(text)] == ORACLE_RE.findall(text)


@given(st.text(max_size=200))
def test_tokenize_surface_invariants(text):
    for t in tokenize(text):
        assert text[t.start:t.end] == t.surface
        assert t.normalized == t.surface.casefold()


@given(st.text(max_size=200))
def test_tokenize_idempotent_over_surfaces(text):
    surfaces = [t.surface for t in tokenize(text)]
    again = [t.surface for t in tokenize(" ".join(surfaces))]
    assert again == surfaces


def test_split_sentences_boundary():
    doc = build_document("u", "Great book. Buy it!")
    assert doc.sentences == [(0, 2), (2, 4)]


def test_split_sentences_single():
    doc = build_document("u", "a plain sentence with no end")
    assert doc.sentences == [(0, len(doc.tokens))]


def test_split_sentences_empty():
    doc = build_document("u", "")
    assert doc.sentences == []


@given(st.text(max_size=300))
def test_sentences_partition_tokens(text):
    doc = build_document("u", text)
    covered = [i for lo, hi in doc.sentences for i in range(lo, hi)]
    assert covered == list(range(len(doc.tokens)))


def test_gazetteer_entities():
    doc = build_document("u", "I met Alice in Paris", provider=GazetteerProvider())
    assert doc.entities == [EntitySpan(2, 3, "PERSON"), EntitySpan(4, 5, "LOCATION")]


def test_no_gazetteer_hits():
    doc = build_document("u", "nothing notable here", provider=GazetteerProvider())
    assert doc.entities == []


def test_precomputed_entity_precedence():
    # file-provided ORG on "Alice" suppresses the gazetteer PERSON
    doc = build_document(
        "u", "I met Alice in Paris",
        raw_entities=[{"start": 6, "end": 11, "type": "ORG"}],
        provider=GazetteerProvider())
    types = {(e.start_token, e.entity_type) for e in doc.entities}
    assert (2, "ORG") in types
    assert (2, "PERSON") not in types
    assert (4, "LOCATION") in types


def test_provider_tag_validation():
    class BadProvider:
        tag_set = frozenset({"GOOD"})

        def char_spans(self, text):
            return [(0, 3, "BAD")]

    doc = build_document("u", "word here")
    with pytest.raises(CorpusError, match="unregistered tag"):
        annotate_entities(doc, BadProvider())


def _write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


def test_load_corpus_dev(tmp_path):
    p = tmp_path / "dev.jsonl"
    _write_jsonl(p, [{"uid": "a", "text": "good stuff", "label": 1},
                     {"uid": "b", "text": "bad stuff", "label": 0}])
    corpus = load_corpus(str(p), "dev")
    assert len(corpus) == 2
    assert corpus.get("a").gold_label == 1
    assert corpus.get("b").gold_label == 0


def test_load_corpus_unlabeled_ignores_labels(tmp_path, caplog):
    p = tmp_path / "train.jsonl"
    _write_jsonl(p, [{"uid": "a", "text": "hello", "label": 1}])
    with caplog.at_level("WARNING"):
        corpus = load_corpus(str(p), "unlabeled")
    assert corpus.get("a").gold_label is None
    assert any("ignoring" in r.message for r in caplog.records)


def test_load_corpus_missing_label(tmp_path):
    p = tmp_path / "dev.jsonl"
    _write_jsonl(p, [{"uid": "a", "text": "hello"}])
    with pytest.raises(CorpusError, match="missing 'label'"):
        load_corpus(str(p), "dev")


def test_load_corpus_malformed_line_number(tmp_path):
    p = tmp_path / "x.jsonl"
    p.write_text('{"uid": "a", "text": "ok"}\nnot json\n', encoding="utf-8")
    with pytest.raises(CorpusError, match=":2:"):
        load_corpus(str(p), "unlabeled")


def test_load_corpus_overlapping_entities(tmp_path):
    p = tmp_path / "x.jsonl"
    _write_jsonl(p, [{"uid": "a", "text": "Alice met Bob",
                      "entities": [{"start": 0, "end": 9, "type": "X"},
                                   {"start": 6, "end": 13, "type": "Y"}]}])
    with pytest.raises(CorpusError, match="overlapping entities at uid=a"):
        load_corpus(str(p), "unlabeled")


def test_load_corpus_deterministic(tmp_path):
    p = tmp_path / "t.jsonl"
    _write_jsonl(p, [{"uid": "a", "text": "Alice went to Paris. It was great!"},
                     {"uid": "b", "text": "check www.example.com for 42 deals"}])
    c1 = load_corpus(str(p), "unlabeled")
    c2 = load_corpus(str(p), "unlabeled")
    assert [d.uid for d in c1] == [d.uid for d in c2]
    for d1, d2 in zip(c1, c2):
        assert d1 == d2


def test_duplicate_uids_rejected(tmp_path):
    p = tmp_path / "t.jsonl"
    _write_jsonl(p, [{"uid": "a", "text": "x"}, {"uid": "a", "text": "y"}])
    with pytest.raises(CorpusError, match="duplicate uids"):
        load_corpus(str(p), "unlabeled")
