"""Project state, the annotate/synthesize/aggregate/sample loop, and the
append-only event log that makes every session replayable."""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import end_model as em
from . import label_model as lm
from .corpus import Corpus, GazetteerProvider, load_corpus
from .glm import (AnnotationError, ConceptElement, ConceptStore, Interaction,
                  concept_matches)
from .rules import (ABSTAIN, LabelingFunction, MatrixCache, Rule,
                    compile_interaction, evaluate_all)
from .sampler import SamplerState, peek_example
from .synthesizer import DEFAULT_K, RankedCandidate, expand, rank, render_rule

EVENT_KINDS = ("interaction", "accept_function", "remove_function",
               "concept_edit", "refit", "train")


class ProjectError(Exception):
    pass


class StaleSuggestionError(ProjectError):
    pass


class CorruptLogError(ProjectError):
    pass


@dataclass
class SessionEvent:
    revision: int
    timestamp: float
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"revision": self.revision, "timestamp": self.timestamp,
                "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, data: dict) -> "SessionEvent":
        if data["kind"] not in EVENT_KINDS:
            raise CorruptLogError(f"unknown event kind {data['kind']!r}")
        return cls(revision=data["revision"], timestamp=data["timestamp"],
                   kind=data["kind"], payload=data["payload"])


@dataclass
class ProjectConfig:
    n_classes: int = 2
    label_names: Optional[list[str]] = None
    sampler_policy: str = "entropy"
    sampler_seed: int = 0
    k: int = DEFAULT_K

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectConfig":
        return cls(
            n_classes=data.get("n_classes", 2),
            label_names=data.get("label_names"),
            sampler_policy=data.get("sampler", {}).get("policy", "entropy"),
            sampler_seed=data.get("sampler", {}).get("seed", 0),
            k=data.get("k", DEFAULT_K),
        )


class Project:
    """Single-writer project; all mutations append to the event log and bump
    the revision counter."""

    def __init__(self, project_id: str, corpora: dict[str, Corpus],
                 config: Optional[ProjectConfig] = None):
        if "unlabeled" not in corpora:
            raise ProjectError("project needs an unlabeled split")
        self.id = project_id
        self.config = config or ProjectConfig()
        self.corpora = corpora
        self.store = ConceptStore()
        self.functions: list[LabelingFunction] = []
        self.model: Optional[lm.GenerativeModel] = None
        self.model_stats: Optional[lm.ModelStats] = None
        self.end_metrics: Optional[dict] = None
        self.sampler = SamplerState(policy=self.config.sampler_policy,
                                    seed=self.config.sampler_seed)
        self.revision = 0
        self.events: list[SessionEvent] = []
        self._accept_seq = 0
        self._suggestions: dict[str, dict[str, Rule]] = {}
        self._caches = {split: MatrixCache(c, self.store)
                        for split, c in corpora.items()}
        self._lock = threading.RLock()
        self._log_path: Optional[Path] = None

    # --- persistence ---------------------------------------------------------

    def attach_log(self, path: str | Path) -> None:
        self._log_path = Path(path)
        self._log_path.parent.mkdir(parents=True, exist_ok=True)

    def _append_event(self, kind: str, payload: dict,
                      timestamp: Optional[float] = None) -> SessionEvent:
        self.revision += 1
        ev = SessionEvent(revision=self.revision,
                          timestamp=time.time() if timestamp is None else timestamp,
                          kind=kind, payload=payload)
        self.events.append(ev)
        if self._log_path is not None:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(ev.to_dict(), sort_keys=True) + "\n")
        return ev

    # --- matrices and posteriors --------------------------------------------

    def matrix(self, split: str):
        return self._caches[split].matrix(self.functions)

    def posteriors(self, split: str = "unlabeled") -> np.ndarray:
        matrix = self.matrix(split)
        n = len(matrix.uids)
        if self.model is None or not matrix.column_ids:
            return np.full((n, self.config.n_classes), 1.0 / self.config.n_classes)
        return lm.predict_proba(self.model, matrix)

    def _uncovered(self) -> set[str]:
        matrix = self.matrix("unlabeled")
        if not matrix.column_ids:
            return set(matrix.uids)
        covered = np.any(matrix.votes != ABSTAIN, axis=1)
        return {u for u, c in zip(matrix.uids, covered) if not c}

    # --- the loop ------------------------------------------------------------

    def serve_next(self) -> dict:
        """Payload for the labeling pane; does not mutate sampler state (a doc
        counts as shown once an interaction on it is submitted)."""
        with self._lock:
            corpus = self.corpora["unlabeled"]
            probs = self.posteriors("unlabeled")
            posteriors = {d.uid: probs[i] for i, d in enumerate(corpus)}
            uid = peek_example(posteriors, self.sampler, self._uncovered())
            return self.document_payload(uid)

    def document_payload(self, uid: str) -> dict:
        doc = self.corpora["unlabeled"].get(uid)
        return {
            "uid": doc.uid,
            "text": doc.text,
            "tokens": [{"index": t.index, "start": t.start, "end": t.end,
                        "surface": t.surface} for t in doc.tokens],
            "sentences": [list(r) for r in doc.sentences],
            "entities": [{"start_token": e.start_token, "end_token": e.end_token,
                          "type": e.entity_type} for e in doc.entities],
            "concept_matches": {
                c.name: [list(r) for r in concept_matches(c, doc)]
                for c in self.store},
        }

    def submit_interaction(self, ix: Interaction,
                           timestamp: Optional[float] = None,
                           token: Optional[str] = None) -> tuple[str, list[dict]]:
        with self._lock:
            corpus = self.corpora["unlabeled"]
            if ix.doc_uid not in corpus:
                raise ProjectError(f"interaction references unknown document {ix.doc_uid!r}")
            doc = corpus.get(ix.doc_uid)
            ix.validate(self.config.n_classes, doc)
            seed = compile_interaction(ix, doc, self.store)
            entity_tags = {}
            ordered = sorted(ix.spans, key=lambda s: s.start_token)
            for i, span in enumerate(ordered):
                tags = doc.entity_types_covering(span.start_token, span.end_token)
                if tags:
                    entity_tags[f"t{i + 1}"] = tags
            candidates = rank(expand(seed, self.store, entity_tags), seed,
                              self.store, self.config.k)
            token = token or secrets.token_hex(8)
            self._suggestions[token] = {c.rule.id: c.rule
                                        for c in candidates.candidates}
            self._append_event("interaction",
                               {"interaction": ix.to_dict(), "token": token},
                               timestamp)
            self.sampler.shown.add(ix.doc_uid)
            self.sampler.draws += 1
            return token, [self._candidate_payload(c) for c in candidates.candidates]

    def _candidate_payload(self, c: RankedCandidate) -> dict:
        dev_stats = None
        if "dev" in self.corpora:
            corpus = self.corpora["dev"]
            votes = [  # evaluate just this rule over dev
                1 if self._safe_eval(c.rule, d) == d.gold_label else 0
                for d in corpus if self._safe_eval(c.rule, d) != ABSTAIN]
            fired = len(votes)
            dev_stats = {
                "coverage": fired / len(corpus) if len(corpus) else 0.0,
                "accuracy": sum(votes) / fired if fired else None,
            }
        return {"rule_id": c.rule.id,
                "rule": c.rule.canonical_dict(),
                "rendering": render_rule(c.rule, self.config.label_names),
                "score": c.score,
                "coverage": c.interaction_coverage,
                "dev_stats": dev_stats}

    def _safe_eval(self, rule: Rule, doc):
        from .rules import evaluate_rule
        try:
            return evaluate_rule(rule, doc, self.store)
        except Exception:
            return ABSTAIN

    def accept_functions(self, token: str, rule_ids: Sequence[str],
                         timestamp: Optional[float] = None) -> dict:
        with self._lock:
            if token not in self._suggestions:
                raise StaleSuggestionError("unknown or stale suggestion token")
            pool = self._suggestions[token]
            unknown = [rid for rid in rule_ids if rid not in pool]
            if unknown:
                raise ProjectError(f"rule ids not in suggestion set: {unknown}")
            existing = {f.id for f in self.functions}
            added = False
            for rid in rule_ids:
                if rid in existing:
                    continue  # idempotent: accepting a duplicate is a no-op
                rule = pool[rid]
                self._accept_seq += 1
                self.functions.append(LabelingFunction(rule, self._accept_seq))
                existing.add(rid)
                self._append_event("accept_function",
                                   {"rule": rule.canonical_dict(),
                                    "accepted_at": self._accept_seq},
                                   timestamp)
                added = True
            if added:
                self.refit()
            return self.statistics()

    def remove_function(self, rule_id: str,
                        timestamp: Optional[float] = None) -> dict:
        with self._lock:
            before = len(self.functions)
            self.functions = [f for f in self.functions if f.id != rule_id]
            if len(self.functions) == before:
                raise ProjectError(f"no accepted function with id {rule_id!r}")
            for cache in self._caches.values():
                cache.remove(rule_id)
            self._append_event("remove_function", {"rule_id": rule_id}, timestamp)
            self.refit()
            return self.statistics()

    def edit_concept(self, op_kind: str, timestamp: Optional[float] = None,
                     **kwargs) -> None:
        with self._lock:
            if op_kind == "create_concept":
                self.store.create(kwargs["name"])
            elif op_kind == "delete_concept":
                self.store.delete(kwargs["name"])
            elif op_kind == "add_element":
                self.store.add_element(
                    kwargs["name"], ConceptElement(kwargs["element_kind"],
                                                   kwargs["pattern"]))
            elif op_kind == "remove_element":
                self.store.remove_element(
                    kwargs["name"], ConceptElement(kwargs["element_kind"],
                                                   kwargs["pattern"]))
            else:
                raise AnnotationError(f"unknown concept edit {op_kind!r}")
            for cache in self._caches.values():
                cache.invalidate()
            self._append_event("concept_edit", {"op": op_kind, "args": kwargs},
                               timestamp)
            if self.functions:
                self.refit()

    def refit(self) -> None:
        """Refit the generative model on the unlabeled-split matrix."""
        with self._lock:
            matrix = self.matrix("unlabeled")
            previous = self.model_stats
            if not matrix.column_ids:
                self.model = None
                self.model_stats = None
                return
            prior = self._dev_prior()
            try:
                self.model = lm.fit_generative(matrix, self.config.n_classes,
                                               prior_init=prior)
            except lm.LabelModelError:
                self.model = None
                self.model_stats = None
                return
            if "dev" in self.corpora:
                dev_matrix = self.matrix("dev")
                gold = [d.gold_label for d in self.corpora["dev"]]
                self.model_stats = lm.compute_model_stats(
                    self.model, dev_matrix, gold, previous)

    def _dev_prior(self) -> Optional[np.ndarray]:
        if "dev" not in self.corpora:
            return None
        gold = np.array([d.gold_label for d in self.corpora["dev"]])
        counts = np.bincount(gold, minlength=self.config.n_classes).astype(float)
        if counts.sum() == 0:
            return None
        counts = np.clip(counts, 1.0, None)  # smooth absent classes
        return counts / counts.sum()

    def statistics(self) -> dict:
        with self._lock:
            lf_stats = []
            if self.functions and "dev" in self.corpora:
                dev_matrix = self.matrix("dev")
                gold = [d.gold_label for d in self.corpora["dev"]]
                lf_stats = [
                    {"rule_id": s.rule_id, "coverage": s.coverage,
                     "overlap": s.overlap, "conflict": s.conflict,
                     "dev_accuracy": s.dev_accuracy,
                     "dev_correct": s.dev_correct,
                     "dev_incorrect": s.dev_incorrect}
                    for s in lm.compute_lf_stats(dev_matrix, gold)]
            return {
                "revision": self.revision,
                "n_functions": len(self.functions),
                "lf_stats": lf_stats,
                "model_stats": self.model_stats.to_dict() if self.model_stats else None,
                "end_metrics": self.end_metrics,
            }

    def list_functions(self) -> list[dict]:
        with self._lock:
            return [{"rule_id": f.id, "accepted_at": f.accepted_at,
                     "enabled": f.enabled,
                     "rendering": render_rule(f.rule, self.config.label_names),
                     "rule": f.rule.canonical_dict()}
                    for f in sorted(self.functions, key=lambda f: f.accepted_at)]

    def train(self, config: Optional[em.TrainConfig] = None,
              timestamp: Optional[float] = None) -> dict:
        """Train and evaluate the end model; only on explicit request."""
        with self._lock:
            config = config or em.TrainConfig()
            if self.model is None:
                raise ProjectError("no label model yet; accept functions first")
            train_corpus = self.corpora["unlabeled"]
            matrix = self.matrix("unlabeled")
            probs = lm.predict_proba(self.model, matrix)
            covered = np.any(matrix.votes != ABSTAIN, axis=1)
            docs = [d for d, c in zip(train_corpus.documents, covered) if c]
            if not docs:
                raise ProjectError("no documents covered by any function")
            vocab = em.BowVocabulary.build(train_corpus.documents)
            X = em.featurize_corpus(docs, vocab)
            model = em.train_noise_aware(X, probs[covered], config)
            metrics = {"split": None, "n_train_covered": len(docs),
                       "config": config.to_dict(), "seed": config.seed}
            if "test" in self.corpora:
                test = self.corpora["test"]
                X_test = em.featurize_corpus(test.documents, vocab)
                gold = [d.gold_label for d in test.documents]
                metrics.update(em.evaluate(model, X_test, gold,
                                           self.config.n_classes))
                metrics["split"] = "test"
                metrics["n_test"] = len(test)
            self.end_metrics = metrics
            self._append_event("train", {"config": config.to_dict()}, timestamp)
            return metrics

    def export_labels(self) -> list[dict]:
        with self._lock:
            probs = self.posteriors("unlabeled")
            return [{"uid": d.uid, "probs": [float(p) for p in probs[i]]}
                    for i, d in enumerate(self.corpora["unlabeled"])]

    # --- snapshot / replay ---------------------------------------------------

    def snapshot(self) -> dict:
        """Deterministic state snapshot (no timestamps, no caches)."""
        with self._lock:
            return {
                "id": self.id,
                "revision": self.revision,
                "concepts": self.store.to_dict(),
                "functions": [
                    {"rule": f.rule.canonical_dict(),
                     "accepted_at": f.accepted_at, "enabled": f.enabled}
                    for f in sorted(self.functions, key=lambda f: f.accepted_at)],
                "model": self.model.to_dict() if self.model else None,
                "sampler": self.sampler.to_dict(),
                "end_metrics": self.end_metrics,
            }

    def apply_event(self, ev: SessionEvent) -> None:
        """Re-apply one logged event. The caller (replay) checks revisions."""
        if ev.kind == "interaction":
            ix = Interaction.from_dict(ev.payload["interaction"])
            self.submit_interaction(ix, timestamp=ev.timestamp,
                                    token=ev.payload["token"])
        elif ev.kind == "accept_function":
            rule = Rule.from_dict(ev.payload["rule"])
            self._accept_seq = ev.payload["accepted_at"]
            self.functions.append(LabelingFunction(rule, self._accept_seq))
            self._append_event("accept_function", ev.payload, ev.timestamp)
            self.refit()
        elif ev.kind == "remove_function":
            self.remove_function(ev.payload["rule_id"], timestamp=ev.timestamp)
        elif ev.kind == "concept_edit":
            self.edit_concept(ev.payload["op"], timestamp=ev.timestamp,
                              **ev.payload["args"])
        elif ev.kind == "refit":
            self._append_event("refit", {}, ev.timestamp)
            self.refit()
        elif ev.kind == "train":
            cfg = em.TrainConfig(**ev.payload["config"])
            self.train(cfg, timestamp=ev.timestamp)
        else:
            raise CorruptLogError(f"unknown event kind {ev.kind!r}")


def replay(events: Sequence[SessionEvent], corpora: dict[str, Corpus],
           config: Optional[ProjectConfig] = None,
           project_id: str = "replayed") -> Project:
    """Deterministically reconstruct a project from its event log."""
    project = Project(project_id, corpora, config)
    for ev in events:
        expected = project.revision + 1
        if ev.revision != expected:
            raise CorruptLogError(
                f"revision gap: expected {expected}, got {ev.revision}")
        project.apply_event(ev)
        if project.revision != ev.revision:
            raise CorruptLogError("event replay drifted from logged revisions")
    return project


def read_event_log(path: str | Path) -> list[SessionEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(SessionEvent.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorruptLogError(f"{path}:{lineno}: {exc}") from exc
    return events


def load_project_corpora(corpus_dir: str | Path) -> tuple[dict[str, Corpus], ProjectConfig]:
    """Read project.json plus the split files it names."""
    corpus_dir = Path(corpus_dir)
    meta = json.loads((corpus_dir / "project.json").read_text(encoding="utf-8"))
    config = ProjectConfig.from_dict(meta)
    provider = GazetteerProvider()
    corpora = {split: load_corpus(str(corpus_dir / fname), split, provider)
               for split, fname in meta["splits"].items()}
    return corpora, config
