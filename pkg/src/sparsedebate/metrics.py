"""Evaluation metrics and report aggregation.

Covers answer accuracy (exact result and containment-style match),
prompt token accounting, viewpoint-collision and viewpoint-revision
counts, per-round score/consensus curves, and the aggregate run report.
Every aggregate is a pure function of persisted transcripts, so a
report can always be recomputed from disk and must match the one
emitted at run time (wall time is run metadata, not a metric, and is
excluded from that equality).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .core import TaskKind, Transcript
from .parsing import normalize_answer
from .voting import VoteOutcome, majority_vote

# Tokenizers approximate context length; absolute counts depend on the
# choice, which is recorded in the report.  The default splits on
# whitespace.
TOKENIZERS: dict[str, Callable[[str], int]] = {
    "whitespace": lambda text: len(text.split()),
    "regex_words": lambda text: len(re.findall(r"\w+|[^\w\s]", text)),
}


def register_tokenizer(name: str, fn: Callable[[str], int]) -> None:
    """Install a custom tokenizer, e.g. an exact model tokenizer."""
    TOKENIZERS[name] = fn


def count_tokens(text: str, tokenizer: str = "whitespace") -> int:
    """Token count of a prompt under the named tokenizer."""
    try:
        fn = TOKENIZERS[tokenizer]
    except KeyError:
        raise ValueError(f"unknown tokenizer {tokenizer!r}; known: {sorted(TOKENIZERS)}")
    return fn(text)


def score_ra(outcome: VoteOutcome, gold: str, task_kind: TaskKind) -> int:
    """Result accuracy for one question: 1 iff the voted answer equals
    the gold answer after normalization.  No-majority outcomes score 0."""
    if gold is None:
        raise ValueError("result accuracy requires a gold answer")
    if not outcome.is_answer:
        return 0
    return int(
        normalize_answer(outcome.answer, task_kind) == normalize_answer(gold, task_kind)
    )


def score_em(final_text: str | None, gold: str) -> int:
    """Containment match: 1 iff the normalized gold appears inside the
    normalized final answer text."""
    if gold is None:
        raise ValueError("exact match requires a gold answer")
    if final_text is None:
        return 0
    needle = normalize_answer(gold, TaskKind.FREE_TEXT)
    haystack = normalize_answer(final_text, TaskKind.FREE_TEXT)
    if not needle:
        return 0
    return int(needle in haystack)


def compute_dvc_cvr(transcript: Transcript, gold: str | None = None) -> tuple[int, int | None]:
    """Viewpoint-collision and correct-revision counts for one debate.

    DVC counts deliveries over retained edges i->j where the two agents'
    previous-round normalized answers differ.  CVR counts per-agent
    round transitions from an incorrect to a correct normalized answer;
    it is None when no gold answer is available.
    """
    kind = transcript.task_kind
    dvc = 0
    for rec in transcript.rounds:
        if rec.round == 0:
            continue
        prev = transcript.round_record(rec.round - 1)
        for tail, heads in rec.debate_sets.items():
            for head in heads:
                if prev.outputs[head].answer != prev.outputs[tail].answer:
                    dvc += 1
    if gold is None:
        return dvc, None
    gold_norm = normalize_answer(gold, kind)
    cvr = 0
    for rec in transcript.rounds:
        if rec.round == 0:
            continue
        prev = transcript.round_record(rec.round - 1)
        for aid in transcript.agent_ids:
            was_correct = prev.outputs[aid].answer == gold_norm
            now_correct = rec.outputs[aid].answer == gold_norm
            if not was_correct and now_correct:
                cvr += 1
    return dvc, cvr


def round_answers(transcript: Transcript, d: int) -> tuple[list[str], list[float]]:
    """Normalized answers and recalibrated confidences at round d, in
    agent-id order.  Rounds past early termination reuse the final
    round's outputs (the debate has concluded; its answers stand)."""
    effective = min(d, transcript.rounds_used)
    rec = transcript.round_record(effective)
    outputs = rec.ordered_outputs(transcript.agent_ids)
    return [o.answer for o in outputs], [o.confidence for o in outputs]


def prompt_tokens_per_agent(transcript: Transcript) -> dict[str, int]:
    """Total prompt tokens consumed per agent across the whole debate."""
    totals = {aid: 0 for aid in transcript.agent_ids}
    for rec in transcript.rounds:
        for aid, tokens in rec.prompt_token_counts.items():
            totals[aid] += tokens
    return totals


@dataclass
class RunReport:
    """Aggregate metrics for one batch over one dataset.

    All fields except ``wall_time_s`` are pure functions of the
    persisted transcripts (plus the failure sidecar); percentages are
    in [0, 100] and the per-round lists cover debate rounds 1..D.
    """

    dataset: str
    n_questions: int
    n_scored: int
    excluded_no_gold: int
    failed_questions: int
    rounds_configured: int
    tokenizer: str
    ra_pct: float | None
    em_pct: float | None
    avg_prompt_tokens: float
    per_round_score_pct: list[float]
    per_round_consensus_pct: list[float]
    dvc_mean: float
    cvr_mean: float | None
    wall_time_s: float = 0.0
    notes: dict = field(default_factory=dict)

    def comparable_dict(self) -> dict:
        """Every field that must be reproducible from transcripts alone."""
        data = self.to_dict()
        data.pop("wall_time_s")
        return data

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "n_questions": self.n_questions,
            "n_scored": self.n_scored,
            "excluded_no_gold": self.excluded_no_gold,
            "failed_questions": self.failed_questions,
            "rounds_configured": self.rounds_configured,
            "tokenizer": self.tokenizer,
            "ra_pct": self.ra_pct,
            "em_pct": self.em_pct,
            "avg_prompt_tokens": self.avg_prompt_tokens,
            "per_round_score_pct": list(self.per_round_score_pct),
            "per_round_consensus_pct": list(self.per_round_consensus_pct),
            "dvc_mean": self.dvc_mean,
            "cvr_mean": self.cvr_mean,
            "wall_time_s": self.wall_time_s,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RunReport:
        known = {
            k: data[k]
            for k in (
                "dataset",
                "n_questions",
                "n_scored",
                "excluded_no_gold",
                "failed_questions",
                "rounds_configured",
                "tokenizer",
                "ra_pct",
                "em_pct",
                "avg_prompt_tokens",
                "per_round_score_pct",
                "per_round_consensus_pct",
                "dvc_mean",
                "cvr_mean",
                "wall_time_s",
                "notes",
            )
        }
        return cls(**known)


def build_report(
    transcripts: list[Transcript],
    dataset: str,
    failed_questions: int = 0,
    wall_time_s: float = 0.0,
) -> RunReport:
    """Aggregate a batch of transcripts into a run report.

    Raises on an empty batch; mixed run configurations are rejected
    because the per-round curves would be ill-defined.
    """
    if not transcripts:
        raise ValueError("cannot build a report from zero transcripts")
    ordered = sorted(transcripts, key=lambda t: t.question_id)
    rounds_configured = ordered[0].run_config.get("max_rounds", 0)
    tokenizer = ordered[0].run_config.get("tokenizer", "whitespace")
    for t in ordered:
        if t.run_config.get("max_rounds", 0) != rounds_configured:
            raise ValueError("transcripts mix different max_rounds settings")

    scored = [t for t in ordered if t.gold_answer is not None]
    ra_hits = sum(
        score_ra(t.final_outcome, t.gold_answer, t.task_kind) for t in scored
    )
    em_hits = sum(
        score_em(t.final_outcome.answer, t.gold_answer) for t in scored
    )

    per_agent_totals = [prompt_tokens_per_agent(t) for t in ordered]
    avg_tokens = sum(
        sum(totals.values()) / len(totals) for totals in per_agent_totals
    ) / len(ordered)

    per_round_score: list[float] = []
    per_round_consensus: list[float] = []
    for d in range(1, rounds_configured + 1):
        hits = 0
        agree = 0
        for t in ordered:
            answers, confidences = round_answers(t, d)
            if len(set(answers)) == 1:
                agree += 1
            if t.gold_answer is not None:
                outcome = majority_vote(answers, confidences)
                hits += score_ra(outcome, t.gold_answer, t.task_kind)
        per_round_score.append(100.0 * hits / len(scored) if scored else 0.0)
        per_round_consensus.append(100.0 * agree / len(ordered))

    dvc_values = []
    cvr_values = []
    for t in ordered:
        dvc, cvr = compute_dvc_cvr(t, t.gold_answer)
        dvc_values.append(dvc)
        if cvr is not None:
            cvr_values.append(cvr)

    return RunReport(
        dataset=dataset,
        n_questions=len(ordered),
        n_scored=len(scored),
        excluded_no_gold=len(ordered) - len(scored),
        failed_questions=failed_questions,
        rounds_configured=rounds_configured,
        tokenizer=tokenizer,
        ra_pct=100.0 * ra_hits / len(scored) if scored else None,
        em_pct=100.0 * em_hits / len(scored) if scored else None,
        avg_prompt_tokens=avg_tokens,
        per_round_score_pct=per_round_score,
        per_round_consensus_pct=per_round_consensus,
        dvc_mean=sum(dvc_values) / len(dvc_values),
        cvr_mean=sum(cvr_values) / len(cvr_values) if cvr_values else None,
        wall_time_s=wall_time_s,
    )
