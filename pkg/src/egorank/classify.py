"""Turn a ranking into binary community labels by thresholding."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import EgoView
from .ranking import ScoreVector

_SCOPE = re.compile(r"^(level|within)(\d+)$")


def test_set(view: EgoView, scope: str = "within2") -> np.ndarray:
    """Local ids to classify, observer excluded.

    ``level<k>`` is the ring at exactly k hops, ``within<k>`` every node up to
    k hops.
    """
    m = _SCOPE.match(str(scope))
    if not m:
        raise ConfigError(f"bad scope {scope!r}; use level<k> or within<k>")
    kind, k = m.group(1), int(m.group(2))
    if not 1 <= k <= view.hops:
        raise ConfigError(f"scope {scope!r} needs a view of at least {k} hops (view has {view.hops})")
    nodes = view.ring(k) if kind == "level" else view.within(k)
    return nodes[nodes != view.observer_local]


test_set.__test__ = False  # not a pytest test despite the name


@dataclass(frozen=True)
class Prediction:
    nodes: np.ndarray
    predicted: np.ndarray
    threshold: float
    method: str

    @property
    def positive_count(self) -> int:
        return int(self.predicted.sum())

    def to_dict(self, view: EgoView, labels: np.ndarray | None = None) -> dict:
        names = view.names
        out = {
            "method": self.method,
            "threshold": None if math.isinf(self.threshold) else self.threshold,
            "predictions": [{"node": names[i], "label": int(p)} for i, p in zip(self.nodes, self.predicted)],
        }
        if labels is not None:
            from .evaluate import confusion

            cm = confusion(self, labels)
            out["confusion"] = {"a": cm.a, "b": cm.b, "c": cm.c, "d": cm.d}
        return out


def threshold_by_count(scores: ScoreVector, nodes, k: int) -> Prediction:
    """Mark exactly the top ``k`` of ``nodes`` positive.

    Ordering is score descending, then global id ascending, so a tie group
    straddling the cut is split deterministically. The reported threshold is
    the k-th highest score (``inf`` when k is 0).
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    if not 0 <= k <= len(nodes):
        raise ConfigError(f"k={k} outside 0..{len(nodes)}")
    vals = scores.values[nodes]
    order = np.lexsort((scores.view.global_ids[nodes], -vals))
    predicted = np.zeros(len(nodes), dtype=bool)
    predicted[order[:k]] = True
    threshold = float(vals[order[k - 1]]) if k else math.inf
    return Prediction(nodes, predicted, threshold, scores.method)


def prior_count(size: int, prior: float, target_fpr: float, target_tpr: float) -> int:
    """Expected number of predicted positives at a target ROC point.

    With a fraction ``prior`` of positives, hitting ``(fpr, tpr)`` predicts
    ``fpr * (1 - prior) + tpr * prior`` of the set positive. Rounds half up.
    """
    for name, x in (("prior", prior), ("target_fpr", target_fpr), ("target_tpr", target_tpr)):
        if not 0.0 <= x <= 1.0:
            raise ConfigError(f"{name} must lie in [0, 1], got {x}")
    share = target_fpr * (1.0 - prior) + target_tpr * prior
    return min(size, int(math.floor(share * size + 0.5)))


def threshold_by_prior(scores: ScoreVector, nodes, prior: float, target_fpr: float,
                       target_tpr: float) -> Prediction:
    k = prior_count(len(nodes), prior, target_fpr, target_tpr)
    return threshold_by_count(scores, nodes, k)
