"""Prompt templates for initial answers, answer regeneration, and peer
scoring, plus the matching reply formatter used by scripted agents.

The regeneration prompt inlines only the answer text of each retained
opponent (one "One LLM agent answer:" line per head, ordered by head
agent id), never explanations or confidences.
"""

from __future__ import annotations

_FORMAT_BLOCK = (
    "The format of your answer must be:\n"
    "          Answer: (...)\n"
    "          Explanation: (...)\n"
    "          Confidence Score: (...)"
)

_CONFIDENCE_LINE = (
    "Also, evaluate how confident you are that your answer is correct. "
    "Your confidence score should between 0 and 1."
)


def build_initial_prompt(question: str) -> str:
    """Prompt for the independent phase-one answer."""
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    return (
        f"Question: {question}\n"
        "Please think it step by step and generate an answer and an explanation for your answer.\n"
        f"{_CONFIDENCE_LINE}\n"
        f"{_FORMAT_BLOCK}"
    )


def build_regen_prompt(question: str, received: list[str]) -> str:
    """Prompt for regenerating an answer given opponents' answers.

    ``received`` must be non-empty and ordered by head agent id so the
    prompt bytes are reproducible.
    """
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    if not received:
        raise ValueError("received answer list must be non-empty")
    answer_lines = "\n".join(f"One LLM agent answer: {answer}" for answer in received)
    return (
        f"Question: {question}\n"
        "\n"
        "There are some answers generated by other LLM agents:\n"
        f"{answer_lines}\n"
        "Using these answers as additional information, please generate a new answer "
        "and an explanation for your answer.\n"
        f"{_CONFIDENCE_LINE}\n"
        f"{_FORMAT_BLOCK}"
    )


def build_peer_score_prompt(question: str, answer: str) -> str:
    """Prompt asking one agent to score another agent's answer."""
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    if not answer or not answer.strip():
        raise ValueError("answer must be non-empty")
    return (
        f"Question: {question}\n"
        "One LLM agent generated the following answer:\n"
        f"Answer: {answer}\n"
        "Please evaluate how helpful this answer is for solving the question. "
        "Your score should between 0 and 1.\n"
        "The format of your reply must be:\n"
        "          Score: (...)"
    )


def format_reply(answer: str, explanation: str, confidence: float) -> str:
    """Render a well-formed reply in the expected three-field format."""
    return (
        f"Answer: ({answer})\n"
        f"Explanation: ({explanation})\n"
        f"Confidence Score: ({confidence})"
    )


def format_score_reply(score: float) -> str:
    """Render a well-formed peer-score reply."""
    return f"Score: ({score})"


def is_peer_score_prompt(prompt: str) -> bool:
    """Heuristic used by scripted backends to answer score requests."""
    return "Score: (...)" in prompt and "Confidence Score: (...)" not in prompt


def extract_received_answers(prompt: str) -> list[str]:
    """Pull the opponent answer lines back out of a regeneration prompt."""
    prefix = "One LLM agent answer: "
    return [
        line[len(prefix):]
        for line in prompt.splitlines()
        if line.startswith(prefix)
    ]
