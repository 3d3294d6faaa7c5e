"""Confusion counts, ROC curves and AUC."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    a: int  # true positives
    b: int  # false negatives
    c: int  # false positives
    d: int  # true negatives

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


def _binary_labels(labels, nodes) -> np.ndarray:
    lab = np.asarray(labels)[np.asarray(nodes, dtype=np.int64)]
    if np.any((lab != 0) & (lab != 1)):
        raise DataError(f"{int(np.sum((lab != 0) & (lab != 1)))} test node(s) have no label")
    return lab.astype(bool)


def confusion(prediction, labels) -> ConfusionMatrix:
    """Counts for ``prediction`` against 0/1 ``labels`` indexed by local id (-1 = unknown)."""
    truth = _binary_labels(labels, prediction.nodes)
    pred = np.asarray(prediction.predicted, dtype=bool)
    return ConfusionMatrix(
        a=int(np.sum(pred & truth)),
        b=int(np.sum(~pred & truth)),
        c=int(np.sum(pred & ~truth)),
        d=int(np.sum(~pred & ~truth)),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ConfigError("accuracy undefined: empty confusion matrix")
    return (cm.a + cm.d) / cm.total


def tpr(cm: ConfusionMatrix) -> float:
    if cm.a + cm.b == 0:
        raise ConfigError("tpr undefined: no positives (a + b = 0)")
    return cm.a / (cm.a + cm.b)


def fpr(cm: ConfusionMatrix) -> float:
    if cm.c + cm.d == 0:
        raise ConfigError("fpr undefined: no negatives (c + d = 0)")
    return cm.c / (cm.c + cm.d)


def metrics(cm: ConfusionMatrix) -> dict[str, float]:
    return {"accuracy": accuracy(cm), "tpr": tpr(cm), "fpr": fpr(cm)}


def naive_negative_accuracy(positives: int, total: int) -> float:
    """Accuracy of declaring every node negative."""
    return accuracy(ConfusionMatrix(0, positives, 0, total - positives))


@dataclass(frozen=True)
class RocCurve:
    """Tie-grouped ROC staircase.

    Point ``i`` counts every node scoring at least ``thresholds[i]`` as
    positive; point 0 has threshold ``+inf`` and sits at (0, 0).
    """

    thresholds: np.ndarray
    tp: np.ndarray
    fp: np.ndarray
    positives: int
    negatives: int

    @property
    def tpr(self) -> np.ndarray:
        return self.tp / self.positives

    @property
    def fpr(self) -> np.ndarray:
        return self.fp / self.negatives

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["threshold", "fpr", "tpr"])
            for t, x, y in zip(self.thresholds, self.fpr, self.tpr):
                w.writerow([repr(float(t)), repr(float(x)), repr(float(y))])

    def to_dict(self) -> dict:
        return {
            "positives": self.positives,
            "negatives": self.negatives,
            "points": [
                {"threshold": None if math.isinf(t) else float(t), "fpr": float(x), "tpr": float(y)}
                for t, x, y in zip(self.thresholds, self.fpr, self.tpr)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def roc(scores, labels, nodes=None) -> RocCurve:
    """ROC over ``nodes`` (default: all), sweeping distinct scores high to low.

    ``scores`` is a ScoreVector or an array; ``labels`` is 0/1 in the same index
    space. Nodes with equal scores enter together as one segment.
    """
    values = np.asarray(getattr(scores, "values", scores), dtype=float)
    nodes = np.arange(len(values)) if nodes is None else np.asarray(nodes, dtype=np.int64)
    truth = _binary_labels(labels, nodes)
    vals = values[nodes]
    if not np.all(np.isfinite(vals)):
        raise DataError("scores must be finite")
    positives = int(truth.sum())
    negatives = len(truth) - positives
    if positives == 0 or negatives == 0:
        raise DataError(f"ROC needs both classes in the test set (got {positives} positive, "
                        f"{negatives} negative)")
    order = np.argsort(-vals, kind="stable")
    vals, truth = vals[order], truth[order]
    tp = np.cumsum(truth)
    fp = np.cumsum(~truth)
    # last index of each tie group
    ends = np.flatnonzero(np.append(vals[1:] != vals[:-1], True))
    return RocCurve(
        thresholds=np.concatenate([[np.inf], vals[ends]]),
        tp=np.concatenate([[0], tp[ends]]),
        fp=np.concatenate([[0], fp[ends]]),
        positives=positives,
        negatives=negatives,
    )


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the staircase, evaluated in exact integer arithmetic."""
    tp = curve.tp.astype(object)
    fp = curve.fp.astype(object)
    twice_area = int(np.sum((fp[1:] - fp[:-1]) * (tp[1:] + tp[:-1])))
    return float(Fraction(twice_area, 2 * curve.positives * curve.negatives))


def auc_score(scores, labels, nodes=None) -> float:
    return auc(roc(scores, labels, nodes))


def relative_improvement(auc_new: float, auc_base: float) -> float:
    """Gain of ``auc_new`` over ``auc_base`` measured above the 0.5 chance level."""
    if auc_base <= 0.5:
        raise ConfigError(f"baseline AUC must exceed 0.5, got {auc_base}")
    return (auc_new - auc_base) / (auc_base - 0.5)
