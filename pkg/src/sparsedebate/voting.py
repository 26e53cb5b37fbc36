"""Consensus detection and majority-vote aggregation.

Votes run over normalized answer strings.  A round where every agent
produced a distinct answer yields no majority and scores as incorrect;
ties between equally supported answers are broken deterministically by
larger summed recalibrated confidence, then by the lowest supporting
agent position (the answer lists are ordered by agent id).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum


class NoMajorityReason(str, Enum):
    ALL_DISTINCT = "all_distinct"
    UNRESOLVED_TIE = "unresolved_tie"


@dataclass(frozen=True)
class VoteOutcome:
    """Either a winning answer with its supporter count, or no majority."""

    answer: str | None
    supporters: int
    reason: NoMajorityReason | None = None

    @property
    def is_answer(self) -> bool:
        return self.answer is not None

    @classmethod
    def of_answer(cls, answer: str, supporters: int) -> VoteOutcome:
        return cls(answer=answer, supporters=supporters, reason=None)

    @classmethod
    def no_majority(cls, reason: NoMajorityReason) -> VoteOutcome:
        return cls(answer=None, supporters=0, reason=reason)

    def to_dict(self) -> dict:
        if self.is_answer:
            return {"kind": "answer", "text": self.answer, "supporters": self.supporters}
        return {"kind": "no_majority", "reason": self.reason.value}

    @classmethod
    def from_dict(cls, data: dict) -> VoteOutcome:
        if data["kind"] == "answer":
            return cls.of_answer(data["text"], data["supporters"])
        return cls.no_majority(NoMajorityReason(data["reason"]))


def majority_vote(answers: list[str], confidences: list[float] | None = None) -> VoteOutcome:
    """Pick the most supported answer from one round's outputs.

    ``answers`` (and ``confidences``, when given) are ordered by agent
    id.  If every answer is unique the result is no majority.
    """
    if not answers:
        raise ValueError("cannot vote over an empty answer list")
    if confidences is not None and len(confidences) != len(answers):
        raise ValueError(
            f"{len(confidences)} confidences for {len(answers)} answers"
        )
    counts = Counter(answers)
    if all(c == 1 for c in counts.values()):
        return VoteOutcome.no_majority(NoMajorityReason.ALL_DISTINCT)
    best = max(counts.values())
    tied = [answer for answer, c in counts.items() if c == best]
    if len(tied) == 1:
        return VoteOutcome.of_answer(tied[0], best)

    def tie_key(answer: str) -> tuple[float, int]:
        supporters = [i for i, a in enumerate(answers) if a == answer]
        conf_sum = math.fsum(confidences[i] for i in supporters) if confidences else 0.0
        return (-conf_sum, min(supporters))

    winner = min(tied, key=tie_key)
    return VoteOutcome.of_answer(winner, best)


def consensus(answers: list[str]) -> bool:
    """True iff all normalized answers in a round are identical."""
    if not answers:
        raise ValueError("consensus is undefined for an empty answer list")
    return len(set(answers)) == 1
