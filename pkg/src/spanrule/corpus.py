"""Dataset ingestion: tokenization, sentence splitting, entity annotation."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

log = logging.getLogger(__name__)

SPLITS = ("unlabeled", "dev", "test", "valid")
LABELED_SPLITS = ("dev", "test", "valid")

# Whole words: maximal alphabetic runs, optionally with one interior apostrophe.
# Digits and punctuation never enter tokens; regex concepts can still match them
# against the raw text.
TOKEN_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?")

_SENTENCE_PUNCT = (".", "!", "?")


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class Token:
    index: int
    start: int
    end: int
    surface: str
    normalized: str


@dataclass(frozen=True)
class EntitySpan:
    start_token: int
    end_token: int  # half-open
    entity_type: str

    def covers(self, token_index: int) -> bool:
        return self.start_token <= token_index < self.end_token


@dataclass
class Document:
    uid: str
    text: str
    tokens: list[Token] = field(default_factory=list)
    sentences: list[tuple[int, int]] = field(default_factory=list)
    entities: list[EntitySpan] = field(default_factory=list)
    gold_label: Optional[int] = None

    def sentence_of(self, token_index: int) -> int:
        for i, (lo, hi) in enumerate(self.sentences):
            if lo <= token_index < hi:
                return i
        raise IndexError(f"token {token_index} outside sentence ranges")

    def entity_types_covering(self, start_token: int, end_token: int) -> set[str]:
        """Entity tags whose span fully contains [start_token, end_token)."""
        return {
            e.entity_type
            for e in self.entities
            if e.start_token <= start_token and end_token <= e.end_token
        }

    def normalized_phrase(self, start_token: int, end_token: int) -> str:
        return " ".join(t.normalized for t in self.tokens[start_token:end_token])


@dataclass
class Corpus:
    split: str
    documents: list[Document]

    def __post_init__(self):
        if self.split not in SPLITS:
            raise CorpusError(f"unknown split {self.split!r}")
        self._by_uid = {d.uid: d for d in self.documents}
        if len(self._by_uid) != len(self.documents):
            raise CorpusError("duplicate uids in corpus")

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def get(self, uid: str) -> Document:
        return self._by_uid[uid]

    def __contains__(self, uid: str) -> bool:
        return uid in self._by_uid


def normalize(surface: str) -> str:
    return surface.casefold()


def tokenize(text: str) -> list[Token]:
    """Split text into whole-word tokens with character offsets."""
    tokens = []
    for i, m in enumerate(TOKEN_RE.finditer(text)):
        surface = m.group(0)
        tokens.append(Token(i, m.start(), m.end(), surface, normalize(surface)))
    return tokens


def split_sentences(doc: Document) -> list[tuple[int, int]]:
    """Partition token indices; a boundary falls after any token whose trailing
    text (up to the next token) contains . ! or ?"""
    tokens = doc.tokens
    if not tokens:
        return []
    ranges = []
    start = 0
    for i, tok in enumerate(tokens):
        gap_end = tokens[i + 1].start if i + 1 < len(tokens) else len(doc.text)
        gap = doc.text[tok.end:gap_end]
        if i + 1 < len(tokens) and any(p in gap for p in _SENTENCE_PUNCT):
            ranges.append((start, i + 1))
            start = i + 1
    ranges.append((start, len(tokens)))
    return ranges


class TransformationProvider(Protocol):
    """Pluggable entity tagger. Emits character-offset spans over raw text."""

    @property
    def tag_set(self) -> frozenset[str]: ...

    def char_spans(self, text: str) -> list[tuple[int, int, str]]: ...


_DEFAULT_PERSONS = {
    "alice", "bob", "carol", "david", "emma", "frank", "grace", "henry",
    "john", "mary", "maria", "james", "linda", "susan", "peter", "sarah",
}
_DEFAULT_LOCATIONS = {
    "paris", "london", "tokyo", "berlin", "madrid", "rome", "boston",
    "chicago", "seattle", "sydney", "toronto", "vienna",
}


class GazetteerProvider:
    """Default tagger: name/place gazetteers plus regexes for NUMBER, URL, EMAIL."""

    _NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")
    _URL_RE = re.compile(r"(?:https?://|www\.)\S+")
    _EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")

    tag_set = frozenset({"PERSON", "LOCATION", "NUMBER", "URL", "EMAIL"})

    def __init__(self, persons: Iterable[str] = _DEFAULT_PERSONS,
                 locations: Iterable[str] = _DEFAULT_LOCATIONS):
        self.persons = {normalize(p) for p in persons}
        self.locations = {normalize(p) for p in locations}

    def char_spans(self, text: str) -> list[tuple[int, int, str]]:
        spans = []
        # URL/EMAIL first so their digits are not re-tagged as NUMBER
        claimed: list[tuple[int, int]] = []
        for regex, tag in ((self._URL_RE, "URL"), (self._EMAIL_RE, "EMAIL"),
                           (self._NUMBER_RE, "NUMBER")):
            for m in regex.finditer(text):
                if any(m.start() < e and s < m.end() for s, e in claimed):
                    continue
                spans.append((m.start(), m.end(), tag))
                claimed.append((m.start(), m.end()))
        for tok in tokenize(text):
            if tok.normalized in self.persons:
                spans.append((tok.start, tok.end, "PERSON"))
            elif tok.normalized in self.locations:
                spans.append((tok.start, tok.end, "LOCATION"))
        return spans


def snap_to_tokens(tokens: Sequence[Token], start: int, end: int) -> Optional[tuple[int, int]]:
    """Smallest token range covering characters [start, end); None if no overlap."""
    covered = [t.index for t in tokens if t.start < end and t.end > start]
    if not covered:
        return None
    return covered[0], covered[-1] + 1


def annotate_entities(doc: Document, provider: TransformationProvider,
                      precomputed: Sequence[EntitySpan] = ()) -> list[EntitySpan]:
    """Provider spans snapped to token boundaries; precomputed spans win on overlap."""
    spans = list(precomputed)
    occupied = [(e.start_token, e.end_token) for e in spans]
    for cs, ce, tag in provider.char_spans(doc.text):
        if tag not in provider.tag_set:
            raise CorpusError(f"provider emitted unregistered tag {tag!r}")
        snapped = snap_to_tokens(doc.tokens, cs, ce)
        if snapped is None:
            continue
        s, e = snapped
        if any(s < oe and os_ < e for os_, oe in occupied):
            continue
        spans.append(EntitySpan(s, e, tag))
        occupied.append((s, e))
    spans.sort(key=lambda sp: (sp.start_token, sp.end_token, sp.entity_type))
    return spans


def build_document(uid: str, text: str, *, gold_label: Optional[int] = None,
                   raw_entities: Sequence[dict] = (),
                   provider: Optional[TransformationProvider] = None) -> Document:
    doc = Document(uid=uid, text=text, gold_label=gold_label)
    doc.tokens = tokenize(text)
    doc.sentences = split_sentences(doc)
    precomputed: list[EntitySpan] = []
    occupied: list[tuple[int, int]] = []
    for ent in raw_entities:
        snapped = snap_to_tokens(doc.tokens, int(ent["start"]), int(ent["end"]))
        if snapped is None:
            continue
        s, e = snapped
        if any(s < oe and os_ < e for os_, oe in occupied):
            raise CorpusError(f"overlapping entities at uid={uid}")
        precomputed.append(EntitySpan(s, e, str(ent["type"])))
        occupied.append((s, e))
    if provider is not None:
        doc.entities = annotate_entities(doc, provider, precomputed)
    else:
        doc.entities = sorted(precomputed, key=lambda sp: (sp.start_token, sp.end_token))
    return doc


def load_corpus(path: str, split: str,
                provider: Optional[TransformationProvider] = None) -> Corpus:
    """Load a JSONL corpus file. Each line: {"uid", "text", "label"?, "entities"?}.

    dev/test/valid lines must carry "label"; labels on the unlabeled split are
    ignored with a warning.
    """
    if split not in SPLITS:
        raise CorpusError(f"unknown split {split!r}")
    if provider is None:
        provider = GazetteerProvider()
    documents = []
    warned = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                uid = str(rec["uid"])
                text = str(rec["text"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: malformed record: {exc}") from exc
            label = rec.get("label")
            if split in LABELED_SPLITS:
                if label is None:
                    raise CorpusError(f"{path}:{lineno}: {split} record missing 'label'")
                label = int(label)
            elif label is not None:
                if not warned:
                    log.warning("%s: labels present in unlabeled split; ignoring", path)
                    warned = True
                label = None
            documents.append(build_document(
                uid, text, gold_label=label,
                raw_entities=rec.get("entities") or (), provider=provider))
    return Corpus(split=split, documents=documents)
