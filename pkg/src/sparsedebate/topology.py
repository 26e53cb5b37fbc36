"""Per-round debating-graph construction: edge pruning and alternative
edge evaluation strategies.

All operations here are pure functions over weight snapshots.  Incoming
weight vectors are always ordered by head agent id (roster order) with
the tail itself excluded, so positional tie-breaking equals agent-id
tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class PruningMode(str, Enum):
    AAT = "aat"          # retain edges at or above the tail's mean incoming weight
    TOP_K = "top_k"      # retain the k largest incoming edges
    BOT_K = "bot_k"      # drop the k smallest incoming edges
    AMT = "amt"          # retain edges at or above the tail's median incoming weight
    FULL = "full"        # fully connected, no pruning


class EvaluationMode(str, Enum):
    MDM = "mdm"          # trust-formula weights: C*R*I/S
    MDM_CR = "mdm_cr"    # credibility and reliability only: C*R
    SELF = "self"        # head's own confidence, graph-wide average threshold
    PEER = "peer"        # mean peer score of the head, graph-wide average threshold


@dataclass(frozen=True)
class PruningStrategy:
    mode: PruningMode
    k: int | None = None

    def __post_init__(self) -> None:
        if self.mode in (PruningMode.TOP_K, PruningMode.BOT_K):
            if self.k is None or self.k < 1:
                raise ValueError(f"{self.mode.value} requires k >= 1, got {self.k}")
        elif self.k is not None:
            raise ValueError(f"{self.mode.value} takes no k parameter")

    def validate_for(self, n: int) -> None:
        """Check k against the roster size (k must be <= n-1)."""
        if self.k is not None and self.k > n - 1:
            raise ValueError(f"k={self.k} exceeds the {n - 1} incoming edges of a tail")


def average_incoming(weights: list[float]) -> float:
    """Arithmetic mean of a tail's incoming edge weights.

    Uses a correctly-rounded sum so the threshold comparison does not
    hinge on summation order (a naive running sum can push the mean one
    ulp past a member value).
    """
    if not weights:
        raise ValueError("cannot average an empty weight vector")
    return math.fsum(weights) / len(weights)


def prune_aat(weights: list[float]) -> list[int]:
    """Above-average-threshold mask: 1 where weight >= the mean.

    The maximum is always >= the mean, so at least one edge survives.
    """
    mean = average_incoming(weights)
    return [1 if w >= mean else 0 for w in weights]


def prune_topk(weights: list[float], k: int) -> list[int]:
    """Retain exactly the k largest weights; ties keep the lower head id."""
    _check_k(weights, k)
    order = sorted(range(len(weights)), key=lambda i: (-weights[i], i))
    keep = set(order[:k])
    return [1 if i in keep else 0 for i in range(len(weights))]


def prune_botk(weights: list[float], k: int) -> list[int]:
    """Drop the k smallest weights; ties drop the higher head id first."""
    _check_k(weights, k)
    order = sorted(range(len(weights)), key=lambda i: (weights[i], -i))
    drop = set(order[:k])
    return [0 if i in drop else 1 for i in range(len(weights))]


def prune_amt(weights: list[float]) -> list[int]:
    """Above-median-threshold mask: 1 where weight >= the median.

    For an even edge count the median is the midpoint of the two
    central values.
    """
    if not weights:
        raise ValueError("cannot take the median of an empty weight vector")
    ordered = sorted(weights)
    m = len(ordered)
    if m % 2 == 1:
        median = ordered[m // 2]
    else:
        median = (ordered[m // 2 - 1] + ordered[m // 2]) / 2.0
    return [1 if w >= median else 0 for w in weights]


def apply_pruning(weights: list[float], strategy: PruningStrategy) -> list[int]:
    """Dispatch a per-tail weight vector to the configured pruning rule."""
    if strategy.mode is PruningMode.AAT:
        return prune_aat(weights)
    if strategy.mode is PruningMode.TOP_K:
        return prune_topk(weights, strategy.k)
    if strategy.mode is PruningMode.BOT_K:
        return prune_botk(weights, strategy.k)
    if strategy.mode is PruningMode.AMT:
        return prune_amt(weights)
    if strategy.mode is PruningMode.FULL:
        return [1] * len(weights)
    raise ValueError(f"unknown pruning mode {strategy.mode!r}")


def debate_set(mask: list[int], head_ids: list[str]) -> list[str]:
    """Head agents retained by a mask, in head-id order.

    ``head_ids`` must already exclude the tail agent.
    """
    if len(mask) != len(head_ids):
        raise ValueError(f"mask length {len(mask)} != head count {len(head_ids)}")
    return [head_ids[i] for i, bit in enumerate(mask) if bit]


def weights_self_eval(confidences: list[float]) -> list[list[float]]:
    """Edge weights under self-evaluation: every edge i->j carries the
    head's own previous-round recalibrated confidence.

    Returns an n x n matrix with a zero diagonal.  Downstream pruning
    for this strategy thresholds against the graph-wide average of all
    agents' confidences (see :func:`global_average_mask`), not the
    per-tail mean.
    """
    n = len(confidences)
    return [
        [0.0 if i == j else confidences[i] for j in range(n)]
        for i in range(n)
    ]


def weights_peer_eval(scores: list[list[float | None]]) -> list[list[float]]:
    """Edge weights under peer evaluation.

    ``scores[i][k]`` is the score agent k gave to agent i's answer; the
    head score of agent i is the mean over k != i.  Every edge i->j then
    carries agent i's head score.  Missing (None) off-diagonal scores
    are rejected.
    """
    n = len(scores)
    head_scores = []
    for i in range(n):
        if len(scores[i]) != n:
            raise ValueError(f"score matrix row {i} has length {len(scores[i])}, expected {n}")
        received = []
        for k in range(n):
            if k == i:
                continue
            if scores[i][k] is None:
                raise ValueError(f"missing peer score for answer {i} from scorer {k}")
            received.append(scores[i][k])
        head_scores.append(math.fsum(received) / len(received))
    return [
        [0.0 if i == j else head_scores[i] for j in range(n)]
        for i in range(n)
    ]


def head_scores_from_matrix(weights: list[list[float]]) -> list[float]:
    """Recover per-head scalar scores from a head-constant weight matrix.

    For self/peer evaluation every off-diagonal entry of row i equals
    agent i's score; n=2 rows have exactly one off-diagonal entry.
    """
    n = len(weights)
    scores = []
    for i in range(n):
        row = [weights[i][j] for j in range(n) if j != i]
        if not row:
            raise ValueError("need at least 2 agents")
        scores.append(row[0])
    return scores


def global_average_mask(head_scores: list[float]) -> list[int]:
    """Graph-wide retention mask for self/peer evaluation.

    An agent is retained as a head (for every tail) iff its score is at
    or above the average score of the entire graph.
    """
    if not head_scores:
        raise ValueError("cannot threshold an empty score vector")
    mean = math.fsum(head_scores) / len(head_scores)
    return [1 if s >= mean else 0 for s in head_scores]


def _check_k(weights: list[float], k: int) -> None:
    if not weights:
        raise ValueError("cannot prune an empty weight vector")
    if not 1 <= k <= len(weights):
        raise ValueError(f"k={k} out of range for {len(weights)} incoming edges")
