"""Unit tests for domain types, transcript serialization, and the
incremental-vs-recomputed trust state."""

import random

import numpy as np
import pytest

from sparsedebate import run_debate
from sparsedebate.config import RunConfig
from sparsedebate.core import (
    AgentOutput,
    AgentProfile,
    DebateState,
    ParticipationMode,
    Question,
    TaskKind,
    Transcript,
    recompute_state,
)

from conftest import reference_config_dict


def make_profiles(n=3):
    return [
        AgentProfile(f"a{i}", f"agent {i}", 1e9 * i, 1e12 * i, f"a{i}")
        for i in range(1, n + 1)
    ]


def test_agent_profile_validation():
    with pytest.raises(ValueError):
        AgentProfile("a1", "x", 0, 1e12, "a1")
    with pytest.raises(ValueError):
        AgentProfile("a1", "x", 1e9, -1, "a1")
    with pytest.raises(ValueError):
        AgentProfile("", "x", 1e9, 1e12, "ref")


def test_agent_output_validation():
    with pytest.raises(ValueError):
        AgentOutput("a1", 0, "t", "a", "a", "e", confidence_raw=1.2, confidence=0.5)
    with pytest.raises(ValueError):
        AgentOutput("a1", -1, "t", "a", "a", "e", confidence_raw=0.5, confidence=0.5)


def test_agent_output_dict_round_trip():
    out = AgentOutput(
        "a1", 2, "raw", "norm", "as written", "why", 0.77, 0.6,
        embedding=np.array([0.6, 0.8]), flags=["x"],
    )
    back = AgentOutput.from_dict(out.to_dict())
    assert back.agent_id == out.agent_id
    assert back.answer == out.answer
    assert np.array_equal(back.embedding, out.embedding)
    assert back.flags == ["x"]


def test_debate_state_requires_sorted_ids():
    with pytest.raises(ValueError):
        DebateState(["b", "a"], np.array([0.4, 0.4]))
    with pytest.raises(ValueError):
        DebateState(["a"], np.array([0.4]))


def test_trust_update_matches_direct_means():
    rng = random.Random(31)
    for _ in range(50):
        n = rng.randint(2, 5)
        state = DebateState([f"a{i}" for i in range(n)], np.full(n, 0.4))
        conf_history = [[] for _ in range(n)]
        cos_history = {}
        for d in range(1, rng.randint(2, 6)):
            conf = [rng.random() for _ in range(n)]
            cos = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    cos[i, j] = cos[j, i] = rng.uniform(-1, 1)
            state.trust_update(d, conf, cos)
            for i in range(n):
                conf_history[i].append(conf[i])
            for i in range(n):
                for j in range(n):
                    if i != j:
                        cos_history.setdefault((i, j), []).append(cos[i, j])
        for i in range(n):
            assert state.reliability[i] == pytest.approx(
                sum(conf_history[i]) / len(conf_history[i]), abs=1e-12
            )
        for (i, j), values in cos_history.items():
            assert state.sim_avg[i, j] == pytest.approx(sum(values) / len(values), abs=1e-12)


def test_trust_update_rejects_round_skips():
    state = DebateState(["a", "b"], np.array([0.4, 0.4]))
    with pytest.raises(ValueError):
        state.trust_update(2, [0.5, 0.5], np.zeros((2, 2)))


def test_participation_modes():
    for mode, expected in [
        (ParticipationMode.DELIVERIES, [2, 1, 0]),
        (ParticipationMode.RECEIPTS, [1, 1, 1]),
        (ParticipationMode.BOTH, [3, 2, 1]),
    ]:
        state = DebateState(["a", "b", "c"], np.full(3, 0.4))
        # retained edges: a->b, a->c, b->a
        state.record_debate_sets({"b": ["a"], "c": ["a"], "a": ["b"]}, mode)
        assert state.participation.tolist() == expected


def test_self_orientation_vector_clamps():
    state = DebateState(["a", "b", "c"], np.full(3, 0.4))
    state.round = 1
    assert state.self_orientation_vector(1).tolist() == [1.0, 1.0, 1.0]
    state.participation = np.array([2, 1, 0])
    assert state.self_orientation_vector(2).tolist() == [1.0, 1.0, 2.0]


def test_transcript_json_round_trip_byte_identical(reference_config, reference_question):
    transcript = run_debate(reference_question, reference_config.roster, reference_config)
    text = transcript.to_json()
    again = Transcript.from_json(text)
    assert again.to_json() == text
    assert again.final_outcome == transcript.final_outcome
    assert again.agent_ids == transcript.agent_ids
    assert again.rounds_used == transcript.rounds_used


def test_round_zero_has_no_debate(reference_config, reference_question):
    transcript = run_debate(reference_question, reference_config.roster, reference_config)
    rec = transcript.round_record(0)
    assert all(heads == [] for heads in rec.debate_sets.values())
    assert rec.weights_raw is None and rec.weights_bin is None


def test_debate_sets_exclude_self(reference_config, reference_question):
    transcript = run_debate(reference_question, reference_config.roster, reference_config)
    for rec in transcript.rounds:
        for tail, heads in rec.debate_sets.items():
            assert tail not in heads
            assert set(heads) <= set(transcript.agent_ids)


def test_recomputed_state_matches_incremental(reference_question):
    for evaluation in ("mdm", "mdm_cr", "self", "peer"):
        config = RunConfig.from_dict(reference_config_dict(evaluation=evaluation))
        transcript = run_debate(reference_question, config.roster, config)
        assert transcript.state is not None
        rebuilt = recompute_state(transcript)
        assert rebuilt.allclose(transcript.state, tol=1e-9), evaluation


def test_embeddings_are_unit_norm_in_transcripts(reference_config, reference_question):
    transcript = run_debate(reference_question, reference_config.roster, reference_config)
    for rec in transcript.rounds:
        for out in rec.outputs.values():
            assert out.embedding is not None
            assert abs(np.linalg.norm(out.embedding) - 1.0) < 1e-6


def test_question_defaults():
    q = Question("id1", "text")
    assert q.gold is None
    assert q.task_kind is TaskKind.FREE_TEXT


def test_weight_matrix_matches_scalar_edge_weight():
    # the vectorized matrix must agree with the scalar edge-weight
    # contract entry for entry
    from sparsedebate import trust

    rng = random.Random(33)
    for _ in range(20):
        n = rng.randint(2, 5)
        cred = np.array([rng.uniform(0.05, 0.55) for _ in range(n)])
        state = DebateState([f"a{i}" for i in range(n)], cred)
        d = rng.randint(1, 4)
        for step in range(1, d + 1):
            conf = [rng.random() for _ in range(n)]
            cos = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    cos[i, j] = cos[j, i] = rng.uniform(-1, 1)
            state.trust_update(step, conf, cos)
        matrix = state.mdm_weight_matrix()
        s_vec = state.self_orientation_vector(d)
        for i in range(n):
            for j in range(n):
                if i == j:
                    assert matrix[i, j] == 0.0
                    continue
                expected = trust.edge_weight(
                    cred[i],
                    float(state.reliability[i]),
                    trust.intimacy(float(state.sim_avg[i, j])),
                    float(s_vec[i]),
                )
                assert matrix[i, j] == pytest.approx(expected, abs=1e-12)
        cr_matrix = state.mdm_weight_matrix(cr_only=True)
        for i in range(n):
            for j in range(n):
                if i != j:
                    expected = trust.edge_weight_cr_only(cred[i], float(state.reliability[i]))
                    assert cr_matrix[i, j] == pytest.approx(expected, abs=1e-12)
