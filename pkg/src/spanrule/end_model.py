"""Bag-of-words logistic regression trained on probabilistic labels."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .corpus import Corpus, Document
from .metrics import classification_metrics


class EndModelError(Exception):
    pass


@dataclass
class BowVocabulary:
    index: dict[str, int]
    min_count: int

    def __len__(self) -> int:
        return len(self.index)

    @classmethod
    def build(cls, docs: Iterable[Document], min_count: int = 2) -> "BowVocabulary":
        counts: Counter[str] = Counter()
        for doc in docs:
            counts.update(t.normalized for t in doc.tokens)
        terms = sorted(t for t, c in counts.items() if c >= min_count)
        return cls(index={t: i for i, t in enumerate(terms)}, min_count=min_count)


def featurize(doc: Document, vocab: BowVocabulary) -> np.ndarray:
    """Term counts plus a trailing constant bias feature."""
    x = np.zeros(len(vocab) + 1)
    for tok in doc.tokens:
        j = vocab.index.get(tok.normalized)
        if j is not None:
            x[j] += 1.0
    x[-1] = 1.0
    return x


def featurize_corpus(docs: Sequence[Document], vocab: BowVocabulary) -> np.ndarray:
    return np.stack([featurize(d, vocab) for d in docs]) if docs else \
        np.zeros((0, len(vocab) + 1))


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    epochs: int = 100
    seed: int = 42

    def to_dict(self) -> dict:
        return {"learning_rate": self.learning_rate, "l2": self.l2,
                "epochs": self.epochs, "seed": self.seed}


@dataclass
class EndModel:
    weights: np.ndarray  # shape (n_classes, n_features+1), bias column last
    config: TrainConfig
    loss_trace: list[float] = field(default_factory=list)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _softmax(X @ self.weights.T)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grad(W: np.ndarray, X: np.ndarray, probs: np.ndarray,
                  l2: float) -> tuple[float, np.ndarray]:
    """Mean expected cross-entropy under the target distribution plus an l2
    penalty on the non-bias weights; analytic gradient."""
    n = X.shape[0]
    logits = X @ W.T
    logits -= logits.max(axis=1, keepdims=True)
    logZ = np.log(np.exp(logits).sum(axis=1, keepdims=True))
    log_softmax = logits - logZ
    loss = -np.sum(probs * log_softmax) / n
    penalty = W.copy()
    penalty[:, -1] = 0.0  # bias unregularized
    loss += l2 * np.sum(penalty ** 2)
    grad = (np.exp(log_softmax) - probs).T @ X / n + 2.0 * l2 * penalty
    return float(loss), grad


def train_noise_aware(X: np.ndarray, probs: np.ndarray,
                      config: Optional[TrainConfig] = None) -> EndModel:
    """Full-batch gradient descent on the noise-aware objective with a
    1/sqrt(t) learning-rate decay."""
    config = config or TrainConfig()
    if X.shape[0] == 0:
        raise EndModelError("empty training set")
    if X.shape[0] != probs.shape[0]:
        raise EndModelError("feature/label row mismatch")
    n_classes = probs.shape[1]
    rng = np.random.default_rng(config.seed)
    W = rng.normal(scale=0.01, size=(n_classes, X.shape[1]))
    trace = []
    for t in range(1, config.epochs + 1):
        loss, grad = loss_and_grad(W, X, probs, config.l2)
        trace.append(loss)
        W = W - (config.learning_rate / np.sqrt(t)) * grad
    return EndModel(weights=W, config=config, loss_trace=trace)


def evaluate(model: EndModel, X: np.ndarray, gold: Sequence[int],
             n_classes: int) -> dict:
    if len(gold) == 0:
        raise EndModelError("empty test set")
    pred = model.predict(X)
    return classification_metrics(np.asarray(gold), pred, n_classes)
