"""Classification metrics shared by the label model and the end model.

Binary tasks use class 1 as the positive class; multiclass metrics are
macro-averaged.
"""

from __future__ import annotations

import numpy as np


def _binary_prf(y_true: np.ndarray, y_pred: np.ndarray, positive: int) -> tuple[float, float, float]:
    tp = int(np.sum((y_pred == positive) & (y_true == positive)))
    fp = int(np.sum((y_pred == positive) & (y_true != positive)))
    fn = int(np.sum((y_pred != positive) & (y_true == positive)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def classification_metrics(y_true, y_pred, n_classes: int) -> dict:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) == 0:
        raise ValueError("empty evaluation set")
    accuracy = float(np.mean(y_true == y_pred))
    if n_classes == 2:
        precision, recall, f1 = _binary_prf(y_true, y_pred, positive=1)
    else:
        parts = [_binary_prf(y_true, y_pred, positive=c) for c in range(n_classes)]
        precision = float(np.mean([p[0] for p in parts]))
        recall = float(np.mean([p[1] for p in parts]))
        f1 = float(np.mean([p[2] for p in parts]))
    return {"accuracy": accuracy, "precision": float(precision),
            "recall": float(recall), "f1": float(f1)}
