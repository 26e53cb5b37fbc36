"""Scalar trust math for edge weighting.

Every debating-graph edge i->j carries a trust weight built from four
factors: the head agent's credibility (a scaling-law competence proxy),
its reliability (running mean of recalibrated self-confidence), the
pair's intimacy (one minus running mean cosine similarity of their
outputs) and the head's self-orientation (unused debate capacity).
All functions here are pure; the running state lives in
:mod:`sparsedebate.core`.
"""

from __future__ import annotations

from dataclasses import dataclass

# Scaling-law loss constants: loss = A/N^alpha + B/M^beta + irreducible.
LOSS_PARAM_COEF = 406.4
LOSS_PARAM_EXP = 0.34
LOSS_TOKEN_COEF = 410.7
LOSS_TOKEN_EXP = 0.28
LOSS_IRREDUCIBLE = 1.69


@dataclass(frozen=True)
class RecalibrationThresholds:
    """Piecewise confidence recalibration bands (hi > mid > lo > 0)."""

    hi: float = 0.8
    mid: float = 0.6
    lo: float = 0.3

    def __post_init__(self) -> None:
        if not (0.0 < self.lo < self.mid < self.hi <= 1.0):
            raise ValueError(
                f"thresholds must satisfy 0 < lo < mid < hi <= 1, "
                f"got lo={self.lo}, mid={self.mid}, hi={self.hi}"
            )


DEFAULT_THRESHOLDS = RecalibrationThresholds()


def recalibrate(h: float, thresholds: RecalibrationThresholds = DEFAULT_THRESHOLDS) -> float:
    """Recalibrate a raw self-confidence score to damp overconfidence.

    Scores at or above ``hi`` are capped at ``hi``; scores in [mid, hi)
    are flattened to ``mid``; scores in [lo, mid) pass through; scores
    below ``lo`` are floored at ``lo``.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"confidence must be in [0, 1], got {h}")
    if h >= thresholds.hi:
        return thresholds.hi
    if h >= thresholds.mid:
        return thresholds.mid
    if h >= thresholds.lo:
        return h
    return thresholds.lo


def scaling_loss(n_params: float, m_tokens: float) -> float:
    """Pre-training loss estimate from parameter and token counts.

    Strictly decreasing in both arguments; approaches the irreducible
    constant 1.69 from above as both grow.  Evaluation order is fixed
    left to right so spot values are stable in float64.
    """
    if n_params <= 0 or m_tokens <= 0:
        raise ValueError(
            f"parameter and token counts must be positive, got N={n_params}, M={m_tokens}"
        )
    return (
        LOSS_PARAM_COEF / n_params**LOSS_PARAM_EXP
        + LOSS_TOKEN_COEF / m_tokens**LOSS_TOKEN_EXP
        + LOSS_IRREDUCIBLE
    )


def credibility(n_params: float, m_tokens: float) -> float:
    """Competence proxy: reciprocal scaling loss, in (0, 1/1.69)."""
    return 1.0 / scaling_loss(n_params, m_tokens)


def update_reliability(r_prev: float, d: int, h_prev: float) -> float:
    """Fold the round d-1 recalibrated confidence into the running mean.

    At d=1 the previous value carries zero weight, so the result is just
    ``h_prev``; after rounds 1..d the value equals the plain mean of the
    d confidences supplied so far.
    """
    if d < 1:
        raise ValueError(f"round must be >= 1, got {d}")
    if not 0.0 <= h_prev <= 1.0:
        raise ValueError(f"confidence must be in [0, 1], got {h_prev}")
    return (r_prev * (d - 1) + h_prev) / d


def update_sim(sim_prev: float, d: int, cos_val: float) -> float:
    """Fold one pairwise cosine into the running similarity mean."""
    if d < 1:
        raise ValueError(f"round must be >= 1, got {d}")
    if not -1.0 <= cos_val <= 1.0:
        raise ValueError(f"cosine must be in [-1, 1], got {cos_val}")
    return (sim_prev * (d - 1) + cos_val) / d


def intimacy(sim: float) -> float:
    """Viewpoint difference: 1 minus average similarity, in [0, 2]."""
    if not -1.0 <= sim <= 1.0:
        raise ValueError(f"similarity must be in [-1, 1], got {sim}")
    return 1.0 - sim


def self_orientation(d: int, n: int, p: int) -> float:
    """Unused debate capacity of an agent before round d, clamped at 1.

    The raw value is (d-1)*(n-1) - p, the maximum possible deliveries
    over the preceding rounds minus the actual count.  In round 1 (and
    for fully participating agents later) the raw value is 0, which
    would zero-divide the edge weight, so the result is clamped below
    at 1.  When the clamp binds in round 1 it binds on every edge
    uniformly, preserving the weight ordering.
    """
    if d < 1:
        raise ValueError(f"round must be >= 1, got {d}")
    if n < 2:
        raise ValueError(f"need at least 2 agents, got {n}")
    cap = (d - 1) * (n - 1)
    if p < 0 or p > cap:
        raise ValueError(f"participation {p} outside [0, {cap}] for round {d}")
    return float(max(cap - p, 1))


def edge_weight(c: float, r: float, i: float, s: float) -> float:
    """Trust weight of one directed edge: (C * R * I) / S."""
    if c <= 0:
        raise ValueError(f"credibility must be positive, got {c}")
    if r < 0 or i < 0:
        raise ValueError(f"reliability and intimacy must be >= 0, got r={r}, i={i}")
    if s < 1:
        raise ValueError(f"self-orientation must be >= 1 after clamping, got {s}")
    return (c * r * i) / s


def edge_weight_cr_only(c: float, r: float) -> float:
    """Ablated trust weight using only credibility and reliability."""
    if c <= 0:
        raise ValueError(f"credibility must be positive, got {c}")
    if r < 0:
        raise ValueError(f"reliability must be >= 0, got {r}")
    return c * r
