#!/usr/bin/env python3
"""Generate the bundled mini spam corpus (synthetic comment-style documents).

Writes train/dev/test JSONL plus project.json into src/spanrule/data/mini_spam.
Deterministic under the fixed seed; class 1 = spam, class 0 = ham.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "spanrule" / "data" / "mini_spam"

SPAM_OPENERS = [
    "hey guys", "hello everyone", "attention", "wow", "yo", "hi friends",
    "listen up", "dont miss this",
]
SPAM_CORES = [
    "subscribe to my channel for more videos",
    "check out my channel and subscribe",
    "win a free iphone today",
    "click the link to win free money",
    "free gift cards for the first {n} people",
    "visit {url} for a free prize",
    "i make {n} dollars a day from home, check {url}",
    "subscribe and i will subscribe back",
    "get free followers at {url}",
    "win big money in this giveaway, click now",
    "check my profile for a free prize",
    "earn cash fast, message me at {email}",
]
SPAM_CLOSERS = [
    "thanks", "dont miss out", "limited offer", "hurry up", "trust me",
    "you wont regret it", "",
]

HAM_OPENERS = [
    "honestly", "wow", "man", "i think", "to be fair", "still",
    "after all these years", "",
]
HAM_CORES = [
    "this song is amazing",
    "i love this song so much",
    "the best music video ever made",
    "this melody brings back memories",
    "who is listening in {year}",
    "the lyrics are so deep and beautiful",
    "my favorite band of all time",
    "this tune never gets old",
    "such a classic, the chorus is perfect",
    "the guitar solo gives me chills",
    "came here after the concert, still the best song",
    "my dad showed me this song and i love it",
]
HAM_CLOSERS = [
    "so good", "pure talent", "a masterpiece", "never gets old",
    "goosebumps every time", "", "",
]

URLS = ["http://tinyurl.com/{tag}", "http://bit.ly/{tag}", "www.{tag}.com"]


def make_text(rng: random.Random, spam: bool) -> str:
    if spam:
        opener = rng.choice(SPAM_OPENERS)
        core = rng.choice(SPAM_CORES)
        closer = rng.choice(SPAM_CLOSERS)
    else:
        opener = rng.choice(HAM_OPENERS)
        core = rng.choice(HAM_CORES)
        closer = rng.choice(HAM_CLOSERS)
    tag = "".join(rng.choice("abcdefghij") for _ in range(6))
    core = core.format(
        n=rng.randint(2, 500),
        url=rng.choice(URLS).format(tag=tag),
        email=f"{tag}@mail.com",
        year=rng.randint(2018, 2026),
    )
    # a little cross-talk so the task is not trivially separable
    if rng.random() < 0.08:
        core += " " + rng.choice(["nice song by the way", "love this video",
                                  "great channel"])
    parts = [p for p in (opener, core, closer) if p]
    sep = rng.choice([". ", "! ", ". ", " "])
    return sep.join(parts).strip()


def make_split(rng: random.Random, n: int, prefix: str, labeled: bool) -> list[dict]:
    records = []
    for i in range(n):
        label = rng.random() < 0.5
        rec = {"uid": f"{prefix}{i:04d}", "text": make_text(rng, label)}
        if labeled:
            rec["label"] = int(label)
        records.append(rec)
    return records


def write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240817)
    write_jsonl(OUT / "train.jsonl", make_split(rng, 1500, "tr", labeled=False))
    write_jsonl(OUT / "dev.jsonl", make_split(rng, 150, "dv", labeled=True))
    write_jsonl(OUT / "test.jsonl", make_split(rng, 400, "te", labeled=True))
    meta = {
        "n_classes": 2,
        "label_names": ["ham", "spam"],
        "splits": {"unlabeled": "train.jsonl", "dev": "dev.jsonl",
                   "test": "test.jsonl"},
        "sampler": {"policy": "entropy", "seed": 7},
    }
    (OUT / "project.json").write_text(json.dumps(meta, indent=2) + "\n",
                                      encoding="utf-8")
    print(f"wrote corpus to {OUT}")


if __name__ == "__main__":
    main()
