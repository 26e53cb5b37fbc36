"""Run configuration: roster, strategy selection, thresholds, backend
endpoints and embedder settings, loaded from a JSON file.

A config owns backend *specs*; live backend instances are built fresh
per debate (scripted agents keep per-debate state) while one embedder
instance is shared across the run so its cache is reused.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from .backends import (
    AgentBackend,
    CopyMajority,
    EchoBackend,
    FixedSequence,
    GenerationParams,
    HttpChatBackend,
    HttpEndpoint,
    ScriptedBackend,
    ScriptedBehavior,
    Stubborn,
)
from .core import AgentProfile, ParticipationMode
from .metrics import TOKENIZERS
from .similarity import (
    DEFAULT_DIM,
    EmbeddingCache,
    EmbeddingProvider,
    HttpEmbedder,
    LocalTrigramEmbedder,
)
from .topology import EvaluationMode, PruningMode, PruningStrategy
from .trust import RecalibrationThresholds

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROUNDS = 5
DEFAULT_TEMPERATURE = 0.7
DEFAULT_TIMEOUT_S = 60.0


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def _parse_behavior(data: dict) -> ScriptedBehavior:
    kind = data.get("kind")
    if kind == "fixed_sequence":
        steps = [(str(a), float(c)) for a, c in data["steps"]]
        return FixedSequence(steps=steps)
    if kind == "copy_majority":
        confidences = [float(c) for c in data.get("confidences", [0.6])]
        return CopyMajority(initial=str(data["initial"]), confidences=confidences)
    if kind == "stubborn":
        return Stubborn(answer=str(data["answer"]), confidence=float(data.get("confidence", 0.9)))
    raise ConfigError(f"unknown scripted behavior kind {kind!r}")


def _parse_pruning(data) -> PruningStrategy:
    if isinstance(data, str):
        mode = PruningMode(data)
        k = 3 if mode in (PruningMode.TOP_K, PruningMode.BOT_K) else None
        return PruningStrategy(mode=mode, k=k)
    mode = PruningMode(data["mode"])
    return PruningStrategy(mode=mode, k=data.get("k"))


@dataclass
class RunConfig:
    roster: list[AgentProfile]
    backend_specs: dict[str, dict]
    max_rounds: int = DEFAULT_MAX_ROUNDS
    pruning: PruningStrategy = field(
        default_factory=lambda: PruningStrategy(mode=PruningMode.AAT)
    )
    evaluation: EvaluationMode = EvaluationMode.MDM
    thresholds: RecalibrationThresholds = field(default_factory=RecalibrationThresholds)
    participation_mode: ParticipationMode = ParticipationMode.DELIVERIES
    tokenizer: str = "whitespace"
    seed: int = 0
    temperature: float = DEFAULT_TEMPERATURE
    timeout_s: float = DEFAULT_TIMEOUT_S
    max_tokens: int = 1024
    parallel_agents: int = 0  # 0 means one worker per agent
    record_prompts: bool = False
    embedder_spec: dict = field(default_factory=lambda: {"kind": "local"})
    _embedder: EmbeddingProvider | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.roster:
            raise ConfigError("roster must contain at least one agent")
        ids = [p.agent_id for p in self.roster]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate agent ids in roster: {ids}")
        if self.max_rounds < 0:
            raise ConfigError(f"max_rounds must be >= 0, got {self.max_rounds}")
        if self.tokenizer not in TOKENIZERS:
            raise ConfigError(
                f"unknown tokenizer {self.tokenizer!r}; known: {sorted(TOKENIZERS)}"
            )
        missing = [p.backend_ref for p in self.roster if p.backend_ref not in self.backend_specs]
        if missing:
            raise ConfigError(f"roster references unknown backends: {missing}")

    # -- construction -------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        roster = []
        backend_specs: dict[str, dict] = {}
        for pos, entry in enumerate(data.get("roster", [])):
            try:
                agent_id = str(entry["id"])
                profile = AgentProfile(
                    agent_id=agent_id,
                    display_name=str(entry.get("name", agent_id)),
                    param_count_n=float(entry["n_params"]),
                    pretrain_tokens_m=float(entry["m_tokens"]),
                    backend_ref=agent_id,
                )
                backend_specs[agent_id] = dict(entry["backend"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"roster entry {pos}: {exc}") from exc
            roster.append(profile)
        thresholds = data.get("thresholds")
        if thresholds is not None:
            hi, mid, lo = (float(x) for x in thresholds)
            thresholds = RecalibrationThresholds(hi=hi, mid=mid, lo=lo)
        else:
            thresholds = RecalibrationThresholds()
        return cls(
            roster=roster,
            backend_specs=backend_specs,
            max_rounds=int(data.get("max_rounds", DEFAULT_MAX_ROUNDS)),
            pruning=_parse_pruning(data.get("pruning", "aat")),
            evaluation=EvaluationMode(data.get("evaluation", "mdm")),
            thresholds=thresholds,
            participation_mode=ParticipationMode(
                data.get("participation_mode", "deliveries")
            ),
            tokenizer=str(data.get("tokenizer", "whitespace")),
            seed=int(data.get("seed", 0)),
            temperature=float(data.get("temperature", DEFAULT_TEMPERATURE)),
            timeout_s=float(data.get("timeout_s", DEFAULT_TIMEOUT_S)),
            max_tokens=int(data.get("max_tokens", 1024)),
            parallel_agents=int(data.get("parallel_agents", 0)),
            record_prompts=bool(data.get("record_prompts", False)),
            embedder_spec=dict(data.get("embedder", {"kind": "local"})),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))

    # -- runtime objects ----------------------------------------------

    def build_backends(self) -> dict[str, AgentBackend]:
        """Fresh backend instances, one per backend ref."""
        built: dict[str, AgentBackend] = {}
        for ref, spec in self.backend_specs.items():
            built[ref] = self._build_backend(ref, spec)
        return built

    def _build_backend(self, ref: str, spec: dict) -> AgentBackend:
        kind = spec.get("kind")
        if kind == "scripted":
            return ScriptedBackend(
                behavior=_parse_behavior(spec["behavior"]),
                peer_score=float(spec.get("peer_score", 0.5)),
            )
        if kind == "echo":
            return EchoBackend(
                confidence=float(spec.get("confidence", 0.5)),
                peer_score=float(spec.get("peer_score", 0.5)),
            )
        if kind == "http":
            token = None
            env_name = spec.get("env_token_name")
            if env_name:
                token = os.environ.get(env_name)
                if token is None:
                    logger.warning(
                        "env var %s for backend %s is unset; sending unauthenticated",
                        env_name,
                        ref,
                    )
            endpoint = HttpEndpoint(
                base_url=str(spec["url"]),
                model=str(spec.get("model", "")),
                api_token=token,
                max_attempts=int(spec.get("max_attempts", 3)),
                backoff_s=float(spec.get("backoff_s", 0.5)),
            )
            return HttpChatBackend(endpoint)
        raise ConfigError(f"unknown backend kind {kind!r} for {ref}")

    def scripted_only(self) -> bool:
        return all(spec.get("kind") in ("scripted", "echo") for spec in self.backend_specs.values())

    def get_embedder(self) -> EmbeddingProvider:
        if self._embedder is None:
            self._embedder = self._build_embedder()
        return self._embedder

    def _build_embedder(self) -> EmbeddingProvider:
        spec = self.embedder_spec
        kind = spec.get("kind", "local")
        dim = int(spec.get("dim", DEFAULT_DIM))
        if kind == "local":
            return LocalTrigramEmbedder(dim=dim, hash_seed=int(spec.get("hash_seed", 0)))
        if kind == "http":
            token = None
            env_name = spec.get("env_token_name")
            if env_name:
                token = os.environ.get(env_name)
            cache = EmbeddingCache()
            cache_path = spec.get("cache_path")
            if cache_path and Path(cache_path).exists():
                cache.load(cache_path)
            return HttpEmbedder(
                base_url=str(spec["url"]),
                model=str(spec.get("model", "")),
                dim=dim,
                api_token=token,
                timeout_s=float(spec.get("timeout_s", 30.0)),
                cache=cache,
            )
        raise ConfigError(f"unknown embedder kind {kind!r}")

    def generation_params(self, round: int, question_id: str, agent_id: str) -> GenerationParams:
        return GenerationParams(
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            timeout_s=self.timeout_s,
            round=round,
            question_id=question_id,
            agent_id=agent_id,
            seed=self.seed,
        )

    def public_dict(self) -> dict:
        """Serializable echo of the run settings, embedded in every
        transcript so downstream aggregation needs no side channel."""
        pruning: dict = {"mode": self.pruning.mode.value}
        if self.pruning.k is not None:
            pruning["k"] = self.pruning.k
        embedder = {
            k: v for k, v in self.embedder_spec.items() if k != "env_token_name"
        }
        return {
            "max_rounds": self.max_rounds,
            "pruning": pruning,
            "evaluation": self.evaluation.value,
            "thresholds": [self.thresholds.hi, self.thresholds.mid, self.thresholds.lo],
            "participation_mode": self.participation_mode.value,
            "tokenizer": self.tokenizer,
            "seed": self.seed,
            "temperature": self.temperature,
            "timeout_s": self.timeout_s,
            "max_tokens": self.max_tokens,
            "record_prompts": self.record_prompts,
            "embedder": embedder,
        }
