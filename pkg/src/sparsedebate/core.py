"""Domain types shared by every other module: agent profiles, per-round
outputs, the running trust state, and the serializable debate transcript.

No I/O lives here.  The transcript JSON schema defined by ``to_dict`` /
``from_dict`` is the interface consumed by the batch harness, and it
carries everything needed to recompute the trust state and all metrics
from scratch (raw texts, embeddings, recalibrated confidences, debate
sets, weight snapshots, and a public echo of the run configuration).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import similarity, topology, trust
from .voting import VoteOutcome


class TaskKind(str, Enum):
    FREE_TEXT = "free_text"
    NUMERIC = "numeric"
    MULTIPLE_CHOICE = "multiple_choice"


class ParticipationMode(str, Enum):
    """What the participation counter counts for a retained edge i->j."""

    DELIVERIES = "deliveries"   # head side: i's answer was consumed by j
    RECEIPTS = "receipts"       # tail side: j consumed an answer
    BOTH = "both"


@dataclass(frozen=True)
class Question:
    question_id: str
    text: str
    gold: str | None = None
    task_kind: TaskKind = TaskKind.FREE_TEXT


@dataclass(frozen=True)
class AgentProfile:
    """A debating-graph vertex: identity plus scaling-law inputs."""

    agent_id: str
    display_name: str
    param_count_n: float    # model parameter count, > 0
    pretrain_tokens_m: float  # pre-training token count, > 0
    backend_ref: str

    def __post_init__(self) -> None:
        if not self.agent_id:
            raise ValueError("agent_id must be non-empty")
        if self.param_count_n <= 0 or self.pretrain_tokens_m <= 0:
            raise ValueError(
                f"agent {self.agent_id}: parameter and token counts must be positive"
            )

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "display_name": self.display_name,
            "param_count_n": self.param_count_n,
            "pretrain_tokens_m": self.pretrain_tokens_m,
            "backend_ref": self.backend_ref,
        }

    @classmethod
    def from_dict(cls, data: dict) -> AgentProfile:
        return cls(
            agent_id=data["agent_id"],
            display_name=data["display_name"],
            param_count_n=data["param_count_n"],
            pretrain_tokens_m=data["pretrain_tokens_m"],
            backend_ref=data["backend_ref"],
        )


@dataclass
class AgentOutput:
    """One agent's product for one round.

    ``answer`` is the normalized form used for consensus and voting;
    ``answer_text`` is the extracted answer as written, which is what
    gets forwarded to opponents.  ``confidence`` is the recalibrated
    value actually consumed by the trust math.
    """

    agent_id: str
    round: int
    raw_text: str
    answer: str
    answer_text: str
    explanation: str
    confidence_raw: float
    confidence: float
    embedding: np.ndarray | None = None
    flags: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence_raw <= 1.0:
            raise ValueError(f"confidence_raw out of [0, 1]: {self.confidence_raw}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of [0, 1]: {self.confidence}")
        if self.round < 0:
            raise ValueError(f"round must be >= 0, got {self.round}")

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "round": self.round,
            "raw_text": self.raw_text,
            "answer": self.answer,
            "answer_text": self.answer_text,
            "explanation": self.explanation,
            "confidence_raw": self.confidence_raw,
            "confidence": self.confidence,
            "embedding": None if self.embedding is None else self.embedding.tolist(),
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: dict) -> AgentOutput:
        emb = data.get("embedding")
        return cls(
            agent_id=data["agent_id"],
            round=data["round"],
            raw_text=data["raw_text"],
            answer=data["answer"],
            answer_text=data["answer_text"],
            explanation=data["explanation"],
            confidence_raw=data["confidence_raw"],
            confidence=data["confidence"],
            embedding=None if emb is None else np.asarray(emb, dtype=np.float64),
            flags=list(data.get("flags", [])),
        )


@dataclass
class RoundRecord:
    """Everything recorded for one round: outputs, debate sets, weight
    snapshots, the consensus flag, and prompt sizes.

    Round 0 is the independent initial-answer phase, so its debate sets
    are empty and it has no weight snapshot.  ``peer_scores`` is only
    present under peer evaluation (scores[i][k] = score given by k to
    i's previous answer).
    """

    round: int
    outputs: dict[str, AgentOutput]
    debate_sets: dict[str, list[str]]
    weights_raw: list[list[float]] | None
    weights_bin: list[list[int]] | None
    consensus: bool
    prompt_token_counts: dict[str, int]
    peer_scores: list[list[float]] | None = None
    prompts: dict[str, str] | None = None  # populated only under record_prompts

    def ordered_outputs(self, agent_ids: list[str]) -> list[AgentOutput]:
        return [self.outputs[aid] for aid in agent_ids]

    def to_dict(self, agent_ids: list[str]) -> dict:
        return {
            "round": self.round,
            "outputs": [self.outputs[aid].to_dict() for aid in agent_ids],
            "debate_sets": {aid: list(self.debate_sets.get(aid, [])) for aid in agent_ids},
            "weights_raw": self.weights_raw,
            "weights_bin": self.weights_bin,
            "consensus": self.consensus,
            "prompt_token_counts": {
                aid: self.prompt_token_counts[aid] for aid in agent_ids
            },
            "peer_scores": self.peer_scores,
            "prompts": (
                None if self.prompts is None
                else {aid: self.prompts[aid] for aid in agent_ids}
            ),
        }

    @classmethod
    def from_dict(cls, data: dict) -> RoundRecord:
        outputs = [AgentOutput.from_dict(o) for o in data["outputs"]]
        return cls(
            round=data["round"],
            outputs={o.agent_id: o for o in outputs},
            debate_sets={k: list(v) for k, v in data["debate_sets"].items()},
            weights_raw=data["weights_raw"],
            weights_bin=data["weights_bin"],
            consensus=data["consensus"],
            prompt_token_counts=dict(data["prompt_token_counts"]),
            peer_scores=data.get("peer_scores"),
            prompts=data.get("prompts"),
        )


@dataclass
class Transcript:
    """Complete audit record of a single debate."""

    question_id: str
    question_text: str
    gold_answer: str | None
    task_kind: TaskKind
    agent_ids: list[str]
    roster: list[AgentProfile]
    run_config: dict
    rounds: list[RoundRecord]
    final_outcome: VoteOutcome
    terminated_early: bool
    rounds_used: int
    flags: list[str] = field(default_factory=list)
    # In-memory convenience only; never serialized.
    state: DebateState | None = field(default=None, repr=False, compare=False)

    def round_record(self, d: int) -> RoundRecord:
        for rec in self.rounds:
            if rec.round == d:
                return rec
        raise KeyError(f"round {d} not in transcript")

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "question_text": self.question_text,
            "gold_answer": self.gold_answer,
            "task_kind": self.task_kind.value,
            "agent_ids": list(self.agent_ids),
            "roster": [p.to_dict() for p in self.roster],
            "run_config": self.run_config,
            "rounds": [rec.to_dict(self.agent_ids) for rec in self.rounds],
            "final_outcome": self.final_outcome.to_dict(),
            "terminated_early": self.terminated_early,
            "rounds_used": self.rounds_used,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Transcript:
        return cls(
            question_id=data["question_id"],
            question_text=data["question_text"],
            gold_answer=data["gold_answer"],
            task_kind=TaskKind(data["task_kind"]),
            agent_ids=list(data["agent_ids"]),
            roster=[AgentProfile.from_dict(p) for p in data["roster"]],
            run_config=data["run_config"],
            rounds=[RoundRecord.from_dict(r) for r in data["rounds"]],
            final_outcome=VoteOutcome.from_dict(data["final_outcome"]),
            terminated_early=data["terminated_early"],
            rounds_used=data["rounds_used"],
            flags=list(data.get("flags", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> Transcript:
        return cls.from_dict(json.loads(text))


class DebateState:
    """Incrementally maintained trust accumulators and weight matrices.

    All per-pair matrices are indexed by roster position (agent ids in
    ascending order).  ``round`` is the last round whose trust update
    has been applied; credibility is computed once at creation because
    it depends only on static profile values.
    """

    def __init__(self, agent_ids: list[str], credibility: np.ndarray):
        n = len(agent_ids)
        if n < 2:
            raise ValueError(f"need at least 2 agents, got {n}")
        if len(set(agent_ids)) != n:
            raise ValueError(f"agent ids must be unique, got {agent_ids}")
        if sorted(agent_ids) != list(agent_ids):
            raise ValueError("agent_ids must be in ascending order")
        self.agent_ids = list(agent_ids)
        self.n = n
        self.round = 0
        self.credibility = np.asarray(credibility, dtype=np.float64)
        self.reliability = np.zeros(n, dtype=np.float64)
        self.participation = np.zeros(n, dtype=np.int64)
        self.sim_avg = np.zeros((n, n), dtype=np.float64)
        self.weight_raw = np.zeros((n, n), dtype=np.float64)
        self.weight_bin = np.zeros((n, n), dtype=np.int64)

    @classmethod
    def create(cls, roster: list[AgentProfile]) -> DebateState:
        ordered = sorted(roster, key=lambda p: p.agent_id)
        cred = np.array(
            [trust.credibility(p.param_count_n, p.pretrain_tokens_m) for p in ordered]
        )
        return cls([p.agent_id for p in ordered], cred)

    def index_of(self, agent_id: str) -> int:
        return self.agent_ids.index(agent_id)

    def trust_update(self, d: int, prev_confidences: list[float], cos_matrix: np.ndarray) -> None:
        """Step-1 update for round d: fold round d-1 confidences into the
        reliability means and round d-1 pairwise cosines into the
        similarity means."""
        if d != self.round + 1:
            raise ValueError(f"expected round {self.round + 1}, got {d}")
        if len(prev_confidences) != self.n:
            raise ValueError("one confidence per agent required")
        conf = np.asarray(prev_confidences, dtype=np.float64)
        self.reliability = (self.reliability * (d - 1) + conf) / d
        cos = np.asarray(cos_matrix, dtype=np.float64)
        if cos.shape != (self.n, self.n):
            raise ValueError(f"cosine matrix must be {self.n}x{self.n}")
        updated = (self.sim_avg * (d - 1) + cos) / d
        np.fill_diagonal(updated, 0.0)
        self.sim_avg = updated
        self.round = d

    def self_orientation_vector(self, d: int) -> np.ndarray:
        """Clamped unused-capacity per agent for round d."""
        cap = (d - 1) * (self.n - 1)
        if np.any(self.participation > cap) or np.any(self.participation < 0):
            raise ValueError(
                f"participation outside [0, {cap}] for round {d}: {self.participation}"
            )
        return np.maximum(cap - self.participation, 1).astype(np.float64)

    def mdm_weight_matrix(self, cr_only: bool = False) -> np.ndarray:
        """Trust weights for the current round, zero on the diagonal."""
        if self.round < 1:
            raise ValueError("trust_update must run before weights are computed")
        head = self.credibility * self.reliability
        if cr_only:
            w = np.tile(head[:, None], (1, self.n))
        else:
            s = self.self_orientation_vector(self.round)
            w = (head / s)[:, None] * (1.0 - self.sim_avg)
        np.fill_diagonal(w, 0.0)
        return w

    def record_debate_sets(
        self,
        debate_sets: dict[str, list[str]],
        mode: ParticipationMode = ParticipationMode.DELIVERIES,
    ) -> None:
        """Update participation counters from one round's retained edges."""
        for tail, heads in debate_sets.items():
            j = self.index_of(tail)
            for head in heads:
                i = self.index_of(head)
                if i == j:
                    raise ValueError(f"self-edge recorded for {tail}")
                if mode in (ParticipationMode.DELIVERIES, ParticipationMode.BOTH):
                    self.participation[i] += 1
                if mode in (ParticipationMode.RECEIPTS, ParticipationMode.BOTH):
                    self.participation[j] += 1

    def set_weights(self, raw: np.ndarray, binary: np.ndarray) -> None:
        self.weight_raw = np.asarray(raw, dtype=np.float64).copy()
        self.weight_bin = np.asarray(binary, dtype=np.int64).copy()

    def allclose(self, other: DebateState, tol: float = 1e-9) -> bool:
        """Field-for-field comparison within ``tol`` on reals."""
        return (
            self.agent_ids == other.agent_ids
            and self.round == other.round
            and np.allclose(self.credibility, other.credibility, atol=tol, rtol=0)
            and np.allclose(self.reliability, other.reliability, atol=tol, rtol=0)
            and np.array_equal(self.participation, other.participation)
            and np.allclose(self.sim_avg, other.sim_avg, atol=tol, rtol=0)
            and np.allclose(self.weight_raw, other.weight_raw, atol=tol, rtol=0)
            and np.array_equal(self.weight_bin, other.weight_bin)
        )


def recompute_state(transcript: Transcript) -> DebateState:
    """Rebuild the trust state from scratch over a transcript's rounds.

    Uses only recorded data (confidences, embeddings, debate sets) plus
    the run-config echo, so it is an independent check of the
    incrementally maintained state.
    """
    state = DebateState.create(transcript.roster)
    mode = ParticipationMode(transcript.run_config.get("participation_mode", "deliveries"))
    evaluation = topology.EvaluationMode(transcript.run_config.get("evaluation", "mdm"))
    for rec in transcript.rounds:
        d = rec.round
        if d == 0:
            continue
        prev = transcript.round_record(d - 1)
        prev_outputs = prev.ordered_outputs(state.agent_ids)
        conf = [o.confidence for o in prev_outputs]
        embeddings = []
        for o in prev_outputs:
            if o.embedding is None:
                raise ValueError(f"round {d - 1} output of {o.agent_id} has no embedding")
            embeddings.append(o.embedding)
        cos = similarity.pairwise_cosine_matrix(embeddings)
        state.trust_update(d, conf, cos)
        if evaluation is topology.EvaluationMode.MDM:
            raw = state.mdm_weight_matrix()
        elif evaluation is topology.EvaluationMode.MDM_CR:
            raw = state.mdm_weight_matrix(cr_only=True)
        elif evaluation is topology.EvaluationMode.SELF:
            raw = np.asarray(topology.weights_self_eval(conf))
        elif evaluation is topology.EvaluationMode.PEER:
            if rec.peer_scores is None:
                raise ValueError(f"round {d} lacks peer scores")
            raw = np.asarray(topology.weights_peer_eval(rec.peer_scores))
        else:
            raise ValueError(f"unknown evaluation mode {evaluation!r}")
        binary = np.zeros((state.n, state.n), dtype=np.int64)
        for tail, heads in rec.debate_sets.items():
            j = state.index_of(tail)
            for head in heads:
                binary[state.index_of(head), j] = 1
        state.set_weights(raw, binary)
        state.record_debate_sets(rec.debate_sets, mode)
    return state
