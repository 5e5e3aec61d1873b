"""Generative denoising of labeling-function votes, plus the statistics panes.

Model: the true class Y is drawn from a prior; each function j independently
abstains with probability 1 - beta_j, and when it fires emits the true class
with probability alpha_j, otherwise a uniformly random wrong class. Fitting is
EM with closed-form M-steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .metrics import classification_metrics
from .rules import ABSTAIN, LabelMatrix

PARAM_MIN = 0.01
PARAM_MAX = 0.99


class LabelModelError(Exception):
    pass


@dataclass
class FitConfig:
    max_iter: int = 100
    tol: float = 1e-6
    init_alpha: float = 0.7
    seed: int = 0


@dataclass
class GenerativeModel:
    n_classes: int
    class_prior: np.ndarray
    alpha: np.ndarray           # per-function accuracy when firing
    beta: np.ndarray            # per-function propensity to fire
    column_ids: tuple[str, ...]
    excluded: tuple[str, ...] = ()  # zero-coverage functions left out of the fit
    loglik: float = float("-inf")
    iterations: int = 0
    loglik_trace: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "alpha": [float(a) for a in self.alpha],
            "beta": [float(b) for b in self.beta],
            "prior": [float(p) for p in self.class_prior],
            "column_ids": list(self.column_ids),
            "excluded": list(self.excluded),
            "loglik": self.loglik,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, data: dict, n_classes: int) -> "GenerativeModel":
        return cls(
            n_classes=n_classes,
            class_prior=np.array(data["prior"], dtype=float),
            alpha=np.array(data["alpha"], dtype=float),
            beta=np.array(data["beta"], dtype=float),
            column_ids=tuple(data["column_ids"]),
            excluded=tuple(data.get("excluded", ())),
            loglik=data["loglik"],
            iterations=data["iterations"],
        )


def majority_probs(matrix: LabelMatrix, n_classes: int) -> np.ndarray:
    """Vote shares per document; uniform where every function abstains."""
    votes = matrix.votes
    n = len(matrix.uids)
    probs = np.full((n, n_classes), 1.0 / n_classes)
    for i in range(n):
        row = votes[i]
        fired = row[row != ABSTAIN]
        if fired.size:
            counts = np.bincount(fired, minlength=n_classes).astype(float)
            probs[i] = counts / counts.sum()
    return probs


def _log_row_likelihoods(votes: np.ndarray, alpha: np.ndarray, beta: np.ndarray,
                         prior: np.ndarray, n_classes: int) -> np.ndarray:
    """log P(Y=y) + log P(row | Y=y), shape (n_docs, n_classes)."""
    n, m = votes.shape
    log_l = np.tile(np.log(prior), (n, 1))
    for j in range(m):
        col = votes[:, j]
        fired = col != ABSTAIN
        log_l[~fired] += np.log(1.0 - beta[j])
        if fired.any():
            contrib = np.full((int(fired.sum()), n_classes),
                              np.log(beta[j]) + np.log((1.0 - alpha[j]) / (n_classes - 1)))
            contrib[np.arange(contrib.shape[0]), col[fired]] = (
                np.log(beta[j]) + np.log(alpha[j]))
            log_l[fired] += contrib
    return log_l


def _posterior_from_log(log_l: np.ndarray) -> tuple[np.ndarray, float]:
    shift = log_l.max(axis=1, keepdims=True)
    w = np.exp(log_l - shift)
    z = w.sum(axis=1, keepdims=True)
    loglik = float(np.sum(np.log(z) + shift))
    return w / z, loglik


def fit_generative(matrix: LabelMatrix, n_classes: int,
                   config: Optional[FitConfig] = None,
                   prior_init: Optional[np.ndarray] = None) -> GenerativeModel:
    config = config or FitConfig()
    if n_classes < 2:
        raise LabelModelError("need at least 2 classes")
    if len(matrix.column_ids) == 0 or len(matrix.uids) == 0:
        raise LabelModelError("need at least one function and one document")

    coverage = np.mean(matrix.votes != ABSTAIN, axis=0)
    keep = coverage > 0
    excluded = tuple(cid for cid, k in zip(matrix.column_ids, keep) if not k)
    votes = matrix.votes[:, keep]
    column_ids = tuple(cid for cid, k in zip(matrix.column_ids, keep) if k)
    if votes.shape[1] == 0:
        raise LabelModelError("all functions have zero coverage")

    m = votes.shape[1]
    fired = votes != ABSTAIN
    beta = np.clip(fired.mean(axis=0), PARAM_MIN, PARAM_MAX)
    alpha = np.full(m, config.init_alpha)
    # sources are assumed better than chance; without this floor EM can invert
    # low-conflict functions and collapse the prior onto one class
    alpha_min = 1.0 / n_classes + 0.01
    if prior_init is not None:
        prior = np.asarray(prior_init, dtype=float)
        prior = prior / prior.sum()
    else:
        prior = np.full(n_classes, 1.0 / n_classes)

    trace: list[float] = []
    prev_ll = -np.inf
    q = None
    for it in range(1, config.max_iter + 1):
        log_l = _log_row_likelihoods(votes, alpha, beta, prior, n_classes)
        q, ll = _posterior_from_log(log_l)
        if trace and ll < trace[-1] - 1e-8:
            raise LabelModelError("EM log-likelihood decreased")
        trace.append(ll)
        # M-step
        new_alpha = np.empty(m)
        for j in range(m):
            f = fired[:, j]
            new_alpha[j] = q[f, votes[f, j]].sum() / f.sum()
        alpha = np.clip(new_alpha, alpha_min, PARAM_MAX)
        # the class prior stays at its initialization (dev frequencies or
        # uniform): letting it free-drift collapses it onto one class whenever
        # function coverage is class-separable
        if abs(ll - prev_ll) < config.tol:
            break
        prev_ll = ll

    return GenerativeModel(
        n_classes=n_classes, class_prior=prior, alpha=alpha, beta=beta,
        column_ids=column_ids, excluded=excluded,
        loglik=trace[-1], iterations=len(trace), loglik_trace=trace)


def predict_proba(model: GenerativeModel, matrix: LabelMatrix) -> np.ndarray:
    """Posterior P(Y | votes); rows sum to 1, all-abstain rows get the prior."""
    fitted = set(model.column_ids)
    present = set(matrix.column_ids)
    if fitted - present or present - fitted - set(model.excluded):
        raise LabelModelError("matrix columns do not match the fitted model")
    index = {cid: k for k, cid in enumerate(matrix.column_ids)}
    keep = [index[cid] for cid in model.column_ids]
    votes = matrix.votes[:, keep]
    log_l = _log_row_likelihoods(votes, model.alpha, model.beta,
                                 model.class_prior, model.n_classes)
    q, _ = _posterior_from_log(log_l)
    return q


# --- statistics panes --------------------------------------------------------

@dataclass
class FunctionStats:
    rule_id: str
    coverage: float
    overlap: float
    conflict: float
    dev_accuracy: Optional[float]
    dev_correct: int
    dev_incorrect: int


def compute_lf_stats(matrix: LabelMatrix, dev_labels: Optional[Sequence[int]]) -> list[FunctionStats]:
    """Per-function coverage/overlap/conflict over the given matrix, plus
    empirical accuracy if it is a dev-split matrix with gold labels."""
    votes = matrix.votes
    n, m = votes.shape
    fired = votes != ABSTAIN
    n_fired_per_doc = fired.sum(axis=1)
    stats = []
    gold = np.asarray(dev_labels) if dev_labels is not None else None
    for j in range(m):
        fj = fired[:, j]
        coverage = float(fj.mean()) if n else 0.0
        others = fired.copy()
        others[:, j] = False
        overlap_mask = fj & (others.sum(axis=1) > 0)
        overlap = float(overlap_mask.mean()) if n else 0.0
        conflict_mask = np.zeros(n, dtype=bool)
        # disagreement among co-firing functions
        for i in np.nonzero(overlap_mask)[0]:
            row = votes[i]
            conflict_mask[i] = any(
                k != j and row[k] != ABSTAIN and row[k] != row[j]
                for k in range(m))
        conflict = float(conflict_mask.mean()) if n else 0.0
        correct = incorrect = 0
        accuracy = None
        if gold is not None and fj.any():
            correct = int(np.sum(fj & (votes[:, j] == gold)))
            incorrect = int(fj.sum()) - correct
            accuracy = correct / int(fj.sum())
        stats.append(FunctionStats(
            rule_id=matrix.column_ids[j], coverage=coverage, overlap=overlap,
            conflict=conflict, dev_accuracy=accuracy,
            dev_correct=correct, dev_incorrect=incorrect))
    return stats


@dataclass
class ModelStats:
    accuracy: float
    precision: float
    recall: float
    f1: float
    coverage: float
    deltas: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "precision": self.precision,
                "recall": self.recall, "f1": self.f1, "coverage": self.coverage,
                "deltas": dict(self.deltas)}


def compute_model_stats(model: GenerativeModel, matrix: LabelMatrix,
                        dev_labels: Sequence[int],
                        previous: Optional[ModelStats] = None) -> ModelStats:
    """Label-model quality on the dev split. Abstain rows are excluded from
    the accuracy metrics but counted against coverage."""
    if len(dev_labels) == 0:
        raise LabelModelError("dev set is empty; statistics unavailable")
    gold = np.asarray(dev_labels)
    covered = np.any(matrix.votes != ABSTAIN, axis=1)
    coverage = float(covered.mean())
    if covered.any():
        probs = predict_proba(model, matrix)
        pred = probs.argmax(axis=1)
        m = classification_metrics(gold[covered], pred[covered], model.n_classes)
    else:
        m = {"accuracy": 0.0, "precision": 0.0, "recall": 0.0, "f1": 0.0}
    stats = ModelStats(accuracy=m["accuracy"], precision=m["precision"],
                       recall=m["recall"], f1=m["f1"], coverage=coverage)
    if previous is not None:
        stats.deltas = {
            key: getattr(stats, key) - getattr(previous, key)
            for key in ("accuracy", "precision", "recall", "f1", "coverage")}
    return stats
