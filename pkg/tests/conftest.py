"""Shared builders for scripted debate scenarios."""

import json

import pytest

from sparsedebate import Question, RunConfig, TaskKind


def scripted_agent(agent_id, behavior, n_params=7e9, m_tokens=2e12, name=None, peer_score=0.5):
    return {
        "id": agent_id,
        "name": name or agent_id,
        "n_params": n_params,
        "m_tokens": m_tokens,
        "backend": {"kind": "scripted", "behavior": behavior, "peer_score": peer_score},
    }


def reference_config_dict(max_rounds=5, pruning="aat", evaluation="mdm", **overrides):
    """The 5-agent scenario: one weak, overconfident stubborn dissenter
    against four majority-following agents starting A, A, A, C."""
    data = {
        "max_rounds": max_rounds,
        "pruning": pruning,
        "evaluation": evaluation,
        "seed": 7,
        "roster": [
            scripted_agent(
                "a1",
                {"kind": "stubborn", "answer": "B", "confidence": 0.95},
                n_params=1e6,
                m_tokens=1e8,
            ),
            scripted_agent("a2", {"kind": "copy_majority", "initial": "A", "confidences": [0.55]}),
            scripted_agent("a3", {"kind": "copy_majority", "initial": "A", "confidences": [0.55]}),
            scripted_agent("a4", {"kind": "copy_majority", "initial": "A", "confidences": [0.55]}),
            scripted_agent("a5", {"kind": "copy_majority", "initial": "C", "confidences": [0.55]}),
        ],
    }
    data.update(overrides)
    return data


@pytest.fixture
def reference_config():
    return RunConfig.from_dict(reference_config_dict())


@pytest.fixture
def reference_question():
    return Question(
        question_id="q-ref",
        text="Which option is best?",
        gold="A",
        task_kind=TaskKind.MULTIPLE_CHOICE,
    )


def unanimous_config_dict(answer="A", n_agents=3, max_rounds=5):
    roster = [
        scripted_agent(
            f"a{i}",
            {"kind": "copy_majority", "initial": answer, "confidences": [0.5 + 0.05 * i]},
        )
        for i in range(1, n_agents + 1)
    ]
    return {"max_rounds": max_rounds, "seed": 1, "roster": roster}


def fixed_roster_config_dict(answer_rows, max_rounds=0, seed=0):
    """One FixedSequence agent per row; each row lists (answer, confidence)
    pairs covering rounds 0..max_rounds."""
    roster = [
        scripted_agent(f"a{i}", {"kind": "fixed_sequence", "steps": steps})
        for i, steps in enumerate(answer_rows, start=1)
    ]
    return {"max_rounds": max_rounds, "seed": seed, "roster": roster}


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
