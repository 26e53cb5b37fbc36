"""Agent backends: the generation contract, deterministic scripted
agents for offline protocol testing, and a chat-completions HTTP client
with retry/backoff.

Scripted agents read the opponent answers straight out of the
regeneration prompt, so they exercise the real prompt format and stay
deterministic given (question_id, round, received answers, seed).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from collections import Counter

from . import prompts

logger = logging.getLogger(__name__)


class AgentUnavailable(RuntimeError):
    """Raised when a backend cannot produce a reply after all retries."""

    def __init__(self, message: str, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause


@dataclass
class GenerationParams:
    """Per-call generation settings plus the debate context a backend
    may need (scripted backends key their state on it; HTTP backends
    ignore it)."""

    temperature: float = 0.7
    max_tokens: int = 1024
    timeout_s: float = 60.0
    round: int = 0
    question_id: str = ""
    agent_id: str = ""
    seed: int = 0


class AgentBackend:
    """Text-in, text-out generation contract.

    ``generate`` must be safe to call concurrently for distinct backend
    instances; one instance is only ever called once per round within a
    single debate.
    """

    def generate(self, prompt: str, params: GenerationParams) -> str:
        raise NotImplementedError


class ScriptedBehavior:
    """Answer policy for a scripted agent."""

    def answer_for(
        self, round: int, received: list[str], current: str | None
    ) -> tuple[str, float]:
        raise NotImplementedError


@dataclass
class FixedSequence(ScriptedBehavior):
    """Emit a preset (answer, confidence) per round; the last entry
    repeats if the debate runs longer than the script."""

    steps: list[tuple[str, float]]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("FixedSequence needs at least one step")

    def answer_for(self, round, received, current):
        answer, conf = self.steps[min(round, len(self.steps) - 1)]
        return answer, conf


@dataclass
class CopyMajority(ScriptedBehavior):
    """Start from a fixed answer, then adopt the majority view among the
    received answers plus its own current answer (one vote each).

    Counting itself means a single dissenting opponent can only force a
    tie, and ties (like rounds with nothing received) keep the current
    answer, so the behavior is deterministic and resists lone outliers.
    """

    initial: str
    confidences: list[float] = field(default_factory=lambda: [0.6])

    def __post_init__(self) -> None:
        if not self.confidences:
            raise ValueError("CopyMajority needs at least one confidence")

    def answer_for(self, round, received, current):
        conf = self.confidences[min(round, len(self.confidences) - 1)]
        if round == 0 or current is None:
            return self.initial, conf
        counts = Counter(received)
        counts[current] += 1
        best = max(counts.values())
        tied = [a for a, c in counts.items() if c == best]
        if len(tied) == 1:
            return tied[0], conf
        return current, conf


@dataclass
class Stubborn(ScriptedBehavior):
    """Same answer and confidence every round."""

    answer: str
    confidence: float = 0.9

    def answer_for(self, round, received, current):
        return self.answer, self.confidence


class ScriptedBackend(AgentBackend):
    """Deterministic offline agent driven by a :class:`ScriptedBehavior`.

    Replies are rendered in the standard three-field format so they
    round-trip through the parser.  Peer-score prompts are answered
    with a fixed score.
    """

    def __init__(self, behavior: ScriptedBehavior, peer_score: float = 0.5):
        self.behavior = behavior
        self.peer_score = peer_score
        self._question_id: str | None = None
        self._current: str | None = None

    def generate(self, prompt: str, params: GenerationParams) -> str:
        if prompts.is_peer_score_prompt(prompt):
            return prompts.format_score_reply(self.peer_score)
        if params.question_id != self._question_id or params.round == 0:
            self._question_id = params.question_id
            self._current = None
        received = prompts.extract_received_answers(prompt)
        answer, confidence = self.behavior.answer_for(params.round, received, self._current)
        self._current = answer
        # The agent id keeps same-answer replies from being byte-identical,
        # which would zero out pairwise intimacy artificially.
        explanation = f"Agent {params.agent_id} reasoning supports {answer}."
        return prompts.format_reply(answer, explanation, confidence)


class EchoBackend(AgentBackend):
    """Echoes the question text back as its answer; handy for parser
    and plumbing tests."""

    def __init__(self, confidence: float = 0.5, peer_score: float = 0.5):
        self.confidence = confidence
        self.peer_score = peer_score

    def generate(self, prompt: str, params: GenerationParams) -> str:
        if prompts.is_peer_score_prompt(prompt):
            return prompts.format_score_reply(self.peer_score)
        question = ""
        for line in prompt.splitlines():
            if line.startswith("Question: "):
                question = line[len("Question: "):]
                break
        return prompts.format_reply(question, "Echoed the question.", self.confidence)


class TransientHttpError(RuntimeError):
    """Retryable HTTP status from the completion endpoint."""


@dataclass
class HttpEndpoint:
    """Connection settings for a chat-completions style API."""

    base_url: str
    model: str
    api_token: str | None = None
    max_attempts: int = 3
    backoff_s: float = 0.5


class HttpChatBackend(AgentBackend):
    """Chat-completions HTTP client with exponential backoff.

    Transient failures (timeouts, connection errors, HTTP 408/429/5xx)
    are retried up to the attempt budget; anything else fails fast.
    Exhausting the budget raises :class:`AgentUnavailable` carrying the
    last cause.
    """

    RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}

    def __init__(self, endpoint: HttpEndpoint):
        self.endpoint = endpoint

    def _post(self, prompt: str, params: GenerationParams) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.endpoint.api_token:
            headers["Authorization"] = f"Bearer {self.endpoint.api_token}"
        body = {
            "model": self.endpoint.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        logger.debug("chat request body: %s", body)
        started = time.monotonic()
        resp = requests.post(
            f"{self.endpoint.base_url.rstrip('/')}/chat/completions",
            json=body,
            headers=headers,
            timeout=params.timeout_s,
        )
        latency = time.monotonic() - started
        if resp.status_code in self.RETRYABLE_STATUS:
            raise TransientHttpError(f"HTTP {resp.status_code}")
        resp.raise_for_status()
        payload = resp.json()
        logger.debug("chat response body: %s", payload)
        text = payload["choices"][0]["message"]["content"]
        usage = payload.get("usage")
        logger.info(
            "chat completion for %s: %.3fs, usage=%s",
            params.agent_id or self.endpoint.model,
            latency,
            usage,
        )
        return text

    def generate(self, prompt: str, params: GenerationParams) -> str:
        import requests

        last: Exception | None = None
        for attempt in range(1, self.endpoint.max_attempts + 1):
            try:
                return self._post(prompt, params)
            except (requests.Timeout, requests.ConnectionError, TransientHttpError) as exc:
                last = exc
                logger.warning(
                    "attempt %d/%d against %s failed: %s",
                    attempt,
                    self.endpoint.max_attempts,
                    self.endpoint.base_url,
                    exc,
                )
                if attempt < self.endpoint.max_attempts:
                    time.sleep(self.endpoint.backoff_s * 2 ** (attempt - 1))
            except Exception as exc:
                raise AgentUnavailable(f"non-retryable failure: {exc}", cause=exc) from exc
        raise AgentUnavailable(
            f"exhausted {self.endpoint.max_attempts} attempts against "
            f"{self.endpoint.base_url}: {last}",
            cause=last,
        )
