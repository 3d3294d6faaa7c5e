"""Ranking functions over an ego view.

PageRank variants are solved on the visible walk operator ``W = D^-1 A`` by
two independent routes: synchronous power iteration and asynchronous push
("ink spilling"), where each pushed node banks ``1 - alpha`` of its wet ink
and passes the remaining ``alpha`` share to its neighbours.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, ConvergenceError, DataError
from .graph import EgoView

DEFAULT_ALPHA = 0.9
DEFAULT_POWER_EPSILON = 1e-10

STRATEGIES = ("random_positive", "high_degree_positive", "observer_plus_top")


@dataclass(frozen=True)
class PprParams:
    alpha: float = DEFAULT_ALPHA
    epsilon: float = DEFAULT_POWER_EPSILON
    max_steps: int = 100_000_000

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class EscapeVector:
    """Sparse restart weights over local ids. Only the normalised form matters."""

    support: np.ndarray
    weights: np.ndarray
    size: int

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise ConfigError("support and weights differ in length")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ConfigError("escape weights must be finite and non-negative")
        if not self.weights.sum() > 0:
            raise ConfigError("escape vector needs at least one positive weight")

    def beta(self) -> np.ndarray:
        out = np.zeros(self.size)
        np.add.at(out, self.support, self.weights)
        return out / out.sum()


@dataclass
class ScoreVector:
    """Scores over every local id of ``view``, tagged with how they were made."""

    view: EgoView
    values: np.ndarray
    method: str
    params: dict = field(default_factory=dict)
    steps: int = 0
    residuals: list[float] | None = None
    wet: np.ndarray | None = None

    def ranked(self, nodes=None) -> list[tuple[str, float]]:
        """``(name, score)`` by descending score, then ascending global id."""
        nodes = np.arange(self.view.node_count) if nodes is None else np.asarray(nodes)
        gids = self.view.global_ids[nodes]
        order = np.lexsort((gids, -self.values[nodes]))
        names = self.view.graph.names
        return [(names[gids[i]], float(self.values[nodes[i]])) for i in order]

    def to_dict(self, nodes=None) -> dict:
        return {
            "method": self.method,
            "params": self.params,
            "scores": [{"node": n, "score": s} for n, s in self.ranked(nodes)],
        }

    def to_json(self, nodes=None) -> str:
        return json.dumps(self.to_dict(nodes), indent=2)


# -- escape vectors ---------------------------------------------------------

def ev_uniform(view: EgoView) -> EscapeVector:
    n = view.node_count
    return EscapeVector(np.arange(n), np.ones(n), n)


def ev_from_set(view: EgoView, nodes, weights=None) -> EscapeVector:
    """Restart set given as node names or local ids; unit weights by default."""
    nodes = list(nodes)
    if not nodes:
        raise ConfigError("restart set is empty")
    local = []
    for v in nodes:
        if isinstance(v, (int, np.integer)):
            if not 0 <= v < view.node_count:
                raise DataError(f"local id {v} is not in the view")
            local.append(int(v))
        else:
            local.append(view.local_id(v))
    w = np.ones(len(local)) if weights is None else np.asarray(weights, dtype=float)
    return EscapeVector(np.asarray(local, dtype=np.int64), w, view.node_count)


def _high_degree_first(view: EgoView, nodes: np.ndarray) -> np.ndarray:
    deg = view.degrees[nodes]
    return nodes[np.lexsort((view.global_ids[nodes], -deg))]


def ev_strategy(view: EgoView, positives, strategy: str, k: int, rng_seed=None) -> EscapeVector:
    """Restart set built from ``k`` known positives.

    ``positives`` are local ids of same-community nodes (observer excluded).
    ``observer_plus_top`` adds the observer to the ``k`` highest-degree ones.
    """
    positives = np.sort(np.asarray(positives, dtype=np.int64))
    positives = positives[positives != view.observer_local]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > len(positives):
        raise DataError(f"strategy {strategy} needs {k} positives but only {len(positives)} "
                        f"are visible (short by {k - len(positives)})")
    if strategy == "random_positive":
        rng = np.random.default_rng(rng_seed)
        chosen = np.sort(rng.choice(positives, size=k, replace=False))
    elif strategy == "high_degree_positive":
        chosen = _high_degree_first(view, positives)[:k]
    elif strategy == "observer_plus_top":
        chosen = np.concatenate([[view.observer_local], _high_degree_first(view, positives)[:k]])
    else:
        raise ConfigError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    return ev_from_set(view, chosen)


# -- solvers ----------------------------------------------------------------

def _check_ev(view: EgoView, ev: EscapeVector) -> np.ndarray:
    if ev.size != view.node_count:
        raise ConfigError(f"escape vector has size {ev.size}, view has {view.node_count} nodes")
    return ev.beta()


def ppr_power(view: EgoView, ev: EscapeVector, params: PprParams = PprParams()) -> ScoreVector:
    """Iterate ``v <- alpha W^T v + (1 - alpha) beta`` from ``v = beta``.

    The iteration is carried in difference form: with ``delta_t = v_t - v_{t-1}``
    the restart term cancels and ``delta_{t+1} = alpha W^T delta_t``. This is
    the same sequence of iterates, but the L1 step size is computed from the
    propagated difference rather than by subtracting two nearly equal vectors,
    so it keeps full relative precision down to tiny tolerances.
    """
    beta = _check_ev(view, ev)
    alpha = params.alpha
    A = view.adjacency()
    inv_deg = 1.0 / view.degrees
    # first step: alpha W^T beta + (1 - alpha) beta - beta
    delta = alpha * (A @ (beta * inv_deg) - beta)
    v = beta + delta
    residual = float(np.abs(delta).sum())
    residuals = [residual]
    steps = 1
    while residual > params.epsilon:
        if steps >= params.max_steps:
            raise ConvergenceError("power iteration did not converge", residual, steps)
        delta = alpha * (A @ (delta * inv_deg))
        v += delta
        residual = float(np.abs(delta).sum())
        residuals.append(residual)
        steps += 1
    return ScoreVector(view, v, "ppr_power",
                       {"alpha": alpha, "epsilon": params.epsilon}, steps, residuals)


def ppr_push(view: EgoView, ev: EscapeVector, params: PprParams = PprParams(),
             on_push: Callable[[np.ndarray, np.ndarray], None] | None = None) -> ScoreVector:
    """Asynchronous push until every residual satisfies ``r(i) <= epsilon * d(i)``.

    Nodes are processed FIFO; a node is queued at most once at a time. After
    each push the pushed node's residual is zeroed, so ``sum(v) + sum(r) == 1``
    throughout. ``on_push(v, r)`` is called after every push (for auditing).
    """
    beta = _check_ev(view, ev)
    alpha, eps = params.alpha, params.epsilon
    indptr = view.indptr.tolist()
    indices = view.indices.tolist()
    deg = view.degrees.tolist()
    n = view.node_count
    r = beta.tolist()
    v = [0.0] * n
    limit = [eps * d for d in deg]
    queued = [r[i] > limit[i] for i in range(n)]
    queue = deque(i for i in range(n) if queued[i])
    steps = 0
    dry = 1.0 - alpha
    while queue:
        i = queue.popleft()
        queued[i] = False
        ri = r[i]
        if ri <= limit[i]:
            continue
        if steps >= params.max_steps:
            raise ConvergenceError("push did not converge", sum(r), steps)
        v[i] += dry * ri
        r[i] = 0.0
        share = alpha * ri / deg[i]
        for j in indices[indptr[i]:indptr[i + 1]]:
            r[j] += share
            if not queued[j] and r[j] > limit[j]:
                queued[j] = True
                queue.append(j)
        steps += 1
        if on_push is not None:
            on_push(np.asarray(v), np.asarray(r))
    return ScoreVector(view, np.asarray(v), "ppr_push", {"alpha": alpha, "epsilon": eps},
                       steps, wet=np.asarray(r))


def push_epsilon_for_budget(view: EgoView, l1_budget: float) -> float:
    """Push tolerance whose worst-case wet mass ``sum(eps * d)`` equals the budget."""
    if not l1_budget > 0:
        raise ConfigError(f"L1 budget must be positive, got {l1_budget}")
    return l1_budget / float(view.degrees.sum())


def pagerank_basic(view: EgoView) -> ScoreVector:
    """Stationary distribution of the plain walk: ``d / 2m``."""
    d = view.degrees.astype(float)
    return ScoreVector(view, d / d.sum(), "pagerank_basic")


def pagerank_escape(view: EgoView, params: PprParams = PprParams()) -> ScoreVector:
    """PageRank with uniform escape (restart anywhere with probability 1 - alpha)."""
    out = ppr_power(view, ev_uniform(view), params)
    out.method = "pagerank_escape"
    return out


# -- local heuristics -------------------------------------------------------

def _shared_with_observer(view: EgoView, i: int) -> np.ndarray:
    return np.intersect1d(view.neighbors(view.observer_local), view.neighbors(i), assume_unique=True)


def common_neighbors(view: EgoView, i: int) -> int:
    """Number of visible neighbours shared by the observer and local node ``i``."""
    if not 0 <= i < view.node_count:
        raise DataError(f"local id {i} is not in the view")
    return len(_shared_with_observer(view, i))


def adamic_adar(view: EgoView, i: int) -> float:
    """Sum of ``1 / ln(deg k)`` over shared neighbours k (visible degrees)."""
    if not 0 <= i < view.node_count:
        raise DataError(f"local id {i} is not in the view")
    shared = _shared_with_observer(view, i)
    deg = view.degrees[shared]
    if np.any(deg < 2):
        raise DataError("shared neighbour with degree < 2: view is corrupt")
    return float(sum(1.0 / math.log(d) for d in deg))


def heuristic_scores(view: EgoView, method: str) -> ScoreVector:
    """Common-neighbour or Adamic/Adar score of every local node against the observer."""
    A = view.adjacency()
    mask = np.zeros(view.node_count)
    mask[view.neighbors(view.observer_local)] = 1.0
    if method == "common":
        weights = mask
    elif method == "adamic_adar":
        # a degree-1 neighbour of the observer is never shared with another node
        weights = np.zeros(view.node_count)
        ok = (mask > 0) & (view.degrees >= 2)
        weights[ok] = 1.0 / np.log(view.degrees[ok])
    else:
        raise ConfigError(f"unknown heuristic {method!r}")
    values = A @ weights
    return ScoreVector(view, values, method)
