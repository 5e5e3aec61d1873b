#!/usr/bin/env python3
"""Record the bundled 20-event golden session on the mini spam corpus.

Drives the project layer exactly like an interactive session, writes the
resulting event log, replays it once, and pins the regression threshold
(replayed end-model f1 minus 0.02) into manifest.json.
"""

import json
from pathlib import Path

from spanrule.end_model import TrainConfig
from spanrule.glm import Interaction, SpanAnnotation
from spanrule.project import (Project, load_project_corpora, read_event_log,
                              replay)

DATA = Path(__file__).resolve().parent.parent / "src" / "spanrule" / "data" / "mini_spam"


def find_doc(corpus, word, require_all=()):
    for doc in corpus:
        norms = {t.normalized for t in doc.tokens}
        if word in norms and all(w in norms for w in require_all):
            return doc
    raise SystemExit(f"no train doc containing {word!r}")


def span_for(doc, word, concept=None, span_id="s1"):
    for t in doc.tokens:
        if t.normalized == word:
            return SpanAnnotation(span_id, t.index, t.index + 1, concept=concept)
    raise SystemExit(f"{word!r} not in {doc.uid}")


def interact(project, doc, word, concept, label):
    ix = Interaction(doc_uid=doc.uid, spans=[span_for(doc, word, concept)],
                     label=label)
    token, candidates = project.submit_interaction(ix)
    return token, candidates


def main():
    corpora, config = load_project_corpora(DATA)
    project = Project("golden", corpora, config)
    log_path = DATA / "golden_log.jsonl"
    if log_path.exists():
        log_path.unlink()
    project.attach_log(log_path)

    train = corpora["unlabeled"]

    # events 1-5: spam concept
    project.edit_concept("create_concept", name="spamword")
    for w in ("subscribe", "free", "win", "prize"):
        project.edit_concept("add_element", name="spamword",
                             element_kind="token", pattern=w)
    # events 6-11: ham concept, broad enough to co-fire with the ham literal
    project.edit_concept("create_concept", name="hamword")
    for w in ("song", "music", "lyrics", "melody", "tune"):
        project.edit_concept("add_element", name="hamword",
                             element_kind="token", pattern=w)

    # events 12-13: spam concept rule
    doc = find_doc(train, "subscribe")
    token, cands = interact(project, doc, "subscribe", "spamword", 1)
    project.accept_functions(token, [cands[0]["rule_id"]])

    # events 14-15: ham concept rule
    doc = find_doc(train, "song")
    token, cands = interact(project, doc, "song", "hamword", 0)
    project.accept_functions(token, [cands[0]["rule_id"]])

    # events 16-17: literal ham rule that overlaps the concept rule
    doc = find_doc(train, "love", require_all=("song",))
    ix = Interaction(doc_uid=doc.uid, spans=[span_for(doc, "love")], label=0)
    token, cands = project.submit_interaction(ix)
    project.accept_functions(token, [cands[0]["rule_id"]])

    # events 18-19: literal spam rule that overlaps the spam concept rule
    doc = find_doc(train, "click", require_all=("win",))
    ix = Interaction(doc_uid=doc.uid, spans=[span_for(doc, "click")], label=1)
    token, cands = project.submit_interaction(ix)
    project.accept_functions(token, [cands[0]["rule_id"]])

    # event 20: train the end model
    metrics = project.train(TrainConfig())
    print("live f1:", metrics["f1"])
    assert project.revision == 20, f"expected 20 events, got {project.revision}"

    # replay once and pin the threshold from the replayed run
    events = read_event_log(log_path)
    corpora2, config2 = load_project_corpora(DATA)
    replayed = replay(events, corpora2, config2)
    f1 = replayed.end_metrics["f1"]
    print("replayed f1:", f1)
    assert abs(f1 - metrics["f1"]) < 1e-12

    manifest = {
        "corpus": "mini_spam",
        "log": "golden_log.jsonl",
        "events": project.revision,
        "replay_f1": f1,
        "f1_threshold": round(f1 - 0.02, 6),
        "end_model_config": TrainConfig().to_dict(),
    }
    (DATA / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n",
                                       encoding="utf-8")
    print("manifest:", manifest)


if __name__ == "__main__":
    main()
