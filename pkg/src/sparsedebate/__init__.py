"""Multi-agent debate orchestration over a sparse, trust-weighted
debating graph, with deterministic scripted agents and an offline
benchmark harness."""

from .backends import (
    AgentBackend,
    AgentUnavailable,
    CopyMajority,
    EchoBackend,
    FixedSequence,
    GenerationParams,
    HttpChatBackend,
    HttpEndpoint,
    ScriptedBackend,
    Stubborn,
)
from .config import ConfigError, RunConfig
from .core import (
    AgentOutput,
    AgentProfile,
    DebateState,
    ParticipationMode,
    Question,
    RoundRecord,
    TaskKind,
    Transcript,
    recompute_state,
)
from .datasets import DatasetError, DatasetRecord, load_dataset
from .metrics import RunReport, build_report, count_tokens
from .orchestrator import DebateAborted, run_debate
from .parsing import ParsedReply, ParseFlag, normalize_answer, parse_reply
from .runner import run_batch
from .similarity import EmbeddingProvider, HttpEmbedder, LocalTrigramEmbedder, cosine
from .topology import EvaluationMode, PruningMode, PruningStrategy
from .trust import RecalibrationThresholds, credibility, recalibrate, scaling_loss
from .voting import NoMajorityReason, VoteOutcome, consensus, majority_vote

__version__ = "0.1.0"

__all__ = [
    "AgentBackend",
    "AgentOutput",
    "AgentProfile",
    "AgentUnavailable",
    "ConfigError",
    "CopyMajority",
    "DatasetError",
    "DatasetRecord",
    "DebateAborted",
    "DebateState",
    "EchoBackend",
    "EmbeddingProvider",
    "EvaluationMode",
    "FixedSequence",
    "GenerationParams",
    "HttpChatBackend",
    "HttpEmbedder",
    "HttpEndpoint",
    "LocalTrigramEmbedder",
    "NoMajorityReason",
    "ParticipationMode",
    "ParseFlag",
    "ParsedReply",
    "PruningMode",
    "PruningStrategy",
    "Question",
    "RecalibrationThresholds",
    "RoundRecord",
    "RunConfig",
    "RunReport",
    "ScriptedBackend",
    "Stubborn",
    "TaskKind",
    "Transcript",
    "VoteOutcome",
    "build_report",
    "consensus",
    "cosine",
    "count_tokens",
    "credibility",
    "load_dataset",
    "majority_vote",
    "normalize_answer",
    "parse_reply",
    "recalibrate",
    "recompute_state",
    "run_batch",
    "run_debate",
    "scaling_loss",
]
