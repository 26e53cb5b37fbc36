"""End-to-end debate execution.

A debate runs in three phases: every agent first answers the question
independently (round 0); agents then debate for up to ``max_rounds``
rounds, where each round re-weights the directed debating graph from
the trust accumulators, prunes it, regenerates answers from the
retained opponents' previous answers, and stops early on unanimous
agreement; finally the last round's answers are aggregated by majority
vote.

Within a round, generation calls may run concurrently; all state
mutation happens sequentially at the round barrier, so round-d weights
depend only on rounds 0..d-1 data.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import parsing, prompts, topology
from .backends import AgentBackend, AgentUnavailable
from .config import RunConfig
from .core import (
    AgentOutput,
    AgentProfile,
    DebateState,
    Question,
    RoundRecord,
    Transcript,
)
from .metrics import count_tokens
from .similarity import pairwise_cosine_matrix
from .trust import recalibrate
from .voting import consensus, majority_vote

logger = logging.getLogger(__name__)

FLAG_AGENT_FAILED = "agent_failed"
FLAG_CARRIED_FORWARD = "carried_forward"
FLAG_EMPTY_DEBATE_SET = "empty_debate_set"
FLAG_EMBED_FALLBACK = "embedding_fallback"


class DebateAborted(RuntimeError):
    """Every agent failed in one round; carries the partial transcript
    (None when the failure happened before any output existed)."""

    def __init__(self, message: str, transcript: Transcript | None = None):
        super().__init__(message)
        self.transcript = transcript


def run_debate(question: Question, roster: list[AgentProfile], config: RunConfig) -> Transcript:
    """Execute one debate and return its full transcript.

    The roster is processed in ascending agent-id order everywhere
    (matrices, debate sets, prompts, tie-breaking), so identical inputs
    produce byte-identical transcripts.
    """
    ordered = sorted(roster, key=lambda p: p.agent_id)
    n = len(ordered)
    if n < 2:
        raise ValueError(f"a debate needs at least 2 agents, got {n}")
    config.pruning.validate_for(n)
    agent_ids = [p.agent_id for p in ordered]
    backends = config.build_backends()
    by_agent = {p.agent_id: backends[p.backend_ref] for p in ordered}
    embedder = config.get_embedder()
    state = DebateState.create(ordered)
    max_rounds = config.max_rounds

    rounds: list[RoundRecord] = []
    flags: list[str] = []

    # Phase 1: independent initial answers.
    logger.info("debate %s: round 0 started (%d agents)", question.question_id, n)
    initial_prompt = prompts.build_initial_prompt(question.text)
    prompt_by_agent = {aid: initial_prompt for aid in agent_ids}
    raw_replies = _generate_round(question, 0, prompt_by_agent, by_agent, config)
    outputs: dict[str, AgentOutput] = {}
    failed = 0
    for aid in agent_ids:
        reply = raw_replies[aid]
        if isinstance(reply, AgentUnavailable):
            failed += 1
            logger.warning("agent %s failed in round 0: %s", aid, reply)
            outputs[aid] = _failed_initial_output(aid, question, config, embedder)
        else:
            outputs[aid] = _make_output(aid, 0, reply, question, config, embedder)
    if failed == n:
        raise DebateAborted(f"all {n} agents failed in round 0 of {question.question_id}")
    rounds.append(
        RoundRecord(
            round=0,
            outputs=outputs,
            debate_sets={aid: [] for aid in agent_ids},
            weights_raw=None,
            weights_bin=None,
            consensus=consensus([outputs[aid].answer for aid in agent_ids]),
            prompt_token_counts={
                aid: count_tokens(prompt_by_agent[aid], config.tokenizer) for aid in agent_ids
            },
            prompts=dict(prompt_by_agent) if config.record_prompts else None,
        )
    )
    logger.info("debate %s: round 0 finished", question.question_id)

    terminated_early = False
    # Phase 2: multi-round debate.
    for d in range(1, max_rounds + 1):
        logger.info("debate %s: round %d started", question.question_id, d)
        prev = rounds[-1].outputs
        prev_ordered = [prev[aid] for aid in agent_ids]
        prev_conf = [o.confidence for o in prev_ordered]

        # Step 1: edge weight optimization.
        cos = pairwise_cosine_matrix([o.embedding for o in prev_ordered])
        state.trust_update(d, prev_conf, cos)
        peer_scores: list[list[float | None]] | None = None
        if config.evaluation is topology.EvaluationMode.MDM:
            weight_raw = state.mdm_weight_matrix()
        elif config.evaluation is topology.EvaluationMode.MDM_CR:
            weight_raw = state.mdm_weight_matrix(cr_only=True)
        elif config.evaluation is topology.EvaluationMode.SELF:
            weight_raw = np.asarray(topology.weights_self_eval(prev_conf))
        elif config.evaluation is topology.EvaluationMode.PEER:
            peer_scores = _collect_peer_scores(question, d, prev_ordered, by_agent, config)
            weight_raw = np.asarray(topology.weights_peer_eval(peer_scores))
        else:
            raise ValueError(f"unknown evaluation mode {config.evaluation!r}")

        # Step 2: sparse graph establishment.
        weight_bin = _prune(weight_raw, prev_conf, config)
        debate_sets = {
            agent_ids[j]: [agent_ids[i] for i in range(n) if i != j and weight_bin[i, j]]
            for j in range(n)
        }
        state.set_weights(weight_raw, weight_bin)
        state.record_debate_sets(debate_sets, config.participation_mode)

        # Step 3: answer regeneration from retained opponents.
        prompt_by_agent = {}
        empty_sets: set[str] = set()
        for aid in agent_ids:
            received = [prev[h].answer_text for h in debate_sets[aid]]
            if received:
                prompt_by_agent[aid] = prompts.build_regen_prompt(question.text, received)
            else:
                prompt_by_agent[aid] = prompts.build_initial_prompt(question.text)
                empty_sets.add(aid)
        raw_replies = _generate_round(question, d, prompt_by_agent, by_agent, config)
        outputs = {}
        failed = 0
        for aid in agent_ids:
            reply = raw_replies[aid]
            if isinstance(reply, AgentUnavailable):
                failed += 1
                logger.warning("agent %s failed in round %d: %s", aid, d, reply)
                outputs[aid] = _carry_forward(prev[aid], d, config)
            else:
                outputs[aid] = _make_output(aid, d, reply, question, config, embedder)
                if aid in empty_sets:
                    outputs[aid].flags.append(FLAG_EMPTY_DEBATE_SET)
        if failed == n:
            partial = _assemble(
                question, agent_ids, ordered, config, rounds, False, rounds[-1].round, state,
                flags + ["aborted"],
            )
            raise DebateAborted(
                f"all {n} agents failed in round {d} of {question.question_id}",
                transcript=partial,
            )

        # Step 4: termination check on this round's answers.
        agreed = consensus([outputs[aid].answer for aid in agent_ids])
        rounds.append(
            RoundRecord(
                round=d,
                outputs=outputs,
                debate_sets=debate_sets,
                weights_raw=weight_raw.tolist(),
                weights_bin=weight_bin.tolist(),
                consensus=agreed,
                prompt_token_counts={
                    aid: count_tokens(prompt_by_agent[aid], config.tokenizer)
                    for aid in agent_ids
                },
                peer_scores=peer_scores,
                prompts=dict(prompt_by_agent) if config.record_prompts else None,
            )
        )
        logger.info(
            "debate %s: round %d finished (consensus=%s)", question.question_id, d, agreed
        )
        if agreed:
            terminated_early = d < max_rounds
            break

    return _assemble(
        question, agent_ids, ordered, config, rounds, terminated_early, rounds[-1].round,
        state, flags,
    )


def _assemble(
    question: Question,
    agent_ids: list[str],
    roster: list[AgentProfile],
    config: RunConfig,
    rounds: list[RoundRecord],
    terminated_early: bool,
    rounds_used: int,
    state: DebateState,
    flags: list[str],
) -> Transcript:
    last = rounds[-1].outputs
    answers = [last[aid].answer for aid in agent_ids]
    confidences = [last[aid].confidence for aid in agent_ids]
    return Transcript(
        question_id=question.question_id,
        question_text=question.text,
        gold_answer=question.gold,
        task_kind=question.task_kind,
        agent_ids=agent_ids,
        roster=roster,
        run_config=config.public_dict(),
        rounds=rounds,
        final_outcome=majority_vote(answers, confidences),
        terminated_early=terminated_early,
        rounds_used=rounds_used,
        flags=flags,
        state=state,
    )


def _prune(weight_raw: np.ndarray, prev_conf: list[float], config: RunConfig) -> np.ndarray:
    """Binarize the weight matrix into retained edges.

    Fully-connected mode retains everything.  Self/peer evaluation
    thresholds head scores against the graph-wide average (one retained
    head set applied to every tail); the trust modes prune per tail.
    """
    n = weight_raw.shape[0]
    binary = np.zeros((n, n), dtype=np.int64)
    if config.pruning.mode is topology.PruningMode.FULL:
        binary[:] = 1
    elif config.evaluation in (topology.EvaluationMode.SELF, topology.EvaluationMode.PEER):
        head_scores = topology.head_scores_from_matrix(weight_raw.tolist())
        retained = topology.global_average_mask(head_scores)
        for i in range(n):
            if retained[i]:
                binary[i, :] = 1
    else:
        for j in range(n):
            heads = [i for i in range(n) if i != j]
            incoming = [float(weight_raw[i, j]) for i in heads]
            mask = topology.apply_pruning(incoming, config.pruning)
            for pos, i in enumerate(heads):
                binary[i, j] = mask[pos]
    np.fill_diagonal(binary, 0)
    return binary


def _generate_round(
    question: Question,
    d: int,
    prompt_by_agent: dict[str, str],
    by_agent: dict[str, AgentBackend],
    config: RunConfig,
) -> dict[str, str | AgentUnavailable]:
    """Run one round's generation calls, possibly in parallel.

    Failures surface as AgentUnavailable values so the caller decides
    the recovery policy; any other exception propagates.
    """
    agent_ids = list(prompt_by_agent)
    workers = config.parallel_agents if config.parallel_agents > 0 else len(agent_ids)

    def call(aid: str) -> str | AgentUnavailable:
        params = config.generation_params(d, question.question_id, aid)
        try:
            return by_agent[aid].generate(prompt_by_agent[aid], params)
        except AgentUnavailable as exc:
            return exc

    if workers <= 1:
        return {aid: call(aid) for aid in agent_ids}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(call, agent_ids))
    return dict(zip(agent_ids, results))


def _collect_peer_scores(
    question: Question,
    d: int,
    prev_ordered: list[AgentOutput],
    by_agent: dict[str, AgentBackend],
    config: RunConfig,
) -> list[list[float | None]]:
    """Ask every agent to score every other agent's previous answer.

    scores[i][k] is scorer k's score for answer i; diagonals stay None.
    Unparseable score replies fall back to 0.5.
    """
    n = len(prev_ordered)
    pairs = [(i, k) for i in range(n) for k in range(n) if i != k]
    workers = config.parallel_agents if config.parallel_agents > 0 else n

    def score(pair: tuple[int, int]) -> float:
        i, k = pair
        answer = prev_ordered[i].answer_text.strip() or "(no answer)"
        prompt = prompts.build_peer_score_prompt(question.text, answer)
        scorer = prev_ordered[k].agent_id
        params = config.generation_params(d, question.question_id, scorer)
        try:
            reply = by_agent[scorer].generate(prompt, params)
        except AgentUnavailable:
            return parsing.DEFAULT_PEER_SCORE
        value, _ = parsing.parse_score_reply(reply)
        return value

    if workers <= 1:
        values = [score(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(score, pairs))
    scores: list[list[float | None]] = [[None] * n for _ in range(n)]
    for (i, k), value in zip(pairs, values):
        scores[i][k] = value
    return scores


def _make_output(
    aid: str,
    d: int,
    raw: str,
    question: Question,
    config: RunConfig,
    embedder,
) -> AgentOutput:
    parsed = parsing.parse_reply(raw)
    normalized, fell_back = parsing.normalize_answer_checked(parsed.answer, question.task_kind)
    embedding, used_fallback = embedder.embed_ex(raw)
    out_flags = sorted(flag.value for flag in parsed.flags)
    if fell_back:
        out_flags.append("normalization_fallback")
    if used_fallback:
        out_flags.append(FLAG_EMBED_FALLBACK)
    return AgentOutput(
        agent_id=aid,
        round=d,
        raw_text=raw,
        answer=normalized,
        answer_text=parsed.answer,
        explanation=parsed.explanation,
        confidence_raw=parsed.confidence_raw,
        confidence=recalibrate(parsed.confidence_raw, config.thresholds),
        embedding=embedding,
        flags=out_flags,
    )


def _failed_initial_output(aid: str, question: Question, config: RunConfig, embedder) -> AgentOutput:
    """Placeholder output for an agent that failed before producing
    anything; keeps n constant so later rounds stay well-defined."""
    embedding, _ = embedder.embed_ex("")
    return AgentOutput(
        agent_id=aid,
        round=0,
        raw_text="",
        answer="",
        answer_text="",
        explanation="",
        confidence_raw=0.0,
        confidence=config.thresholds.lo,
        embedding=embedding,
        flags=[FLAG_AGENT_FAILED],
    )


def _carry_forward(prev: AgentOutput, d: int, config: RunConfig) -> AgentOutput:
    """Reuse a failed agent's previous output at the confidence floor."""
    return AgentOutput(
        agent_id=prev.agent_id,
        round=d,
        raw_text=prev.raw_text,
        answer=prev.answer,
        answer_text=prev.answer_text,
        explanation=prev.explanation,
        confidence_raw=prev.confidence_raw,
        confidence=config.thresholds.lo,
        embedding=prev.embedding,
        flags=[FLAG_CARRIED_FORWARD],
    )
