"""Unit tests for run-configuration loading and runtime construction."""

import json

import pytest

from sparsedebate.backends import EchoBackend, HttpChatBackend, ScriptedBackend
from sparsedebate.config import ConfigError, RunConfig
from sparsedebate.core import ParticipationMode
from sparsedebate.similarity import HttpEmbedder, LocalTrigramEmbedder
from sparsedebate.topology import EvaluationMode, PruningMode

from conftest import reference_config_dict, scripted_agent


def test_defaults():
    config = RunConfig.from_dict(reference_config_dict())
    assert config.max_rounds == 5
    assert config.pruning.mode is PruningMode.AAT
    assert config.evaluation is EvaluationMode.MDM
    assert config.thresholds.hi == 0.8
    assert config.thresholds.mid == 0.6
    assert config.thresholds.lo == 0.3
    assert config.participation_mode is ParticipationMode.DELIVERIES
    assert config.tokenizer == "whitespace"
    assert config.temperature == 0.7
    assert config.timeout_s == 60.0


def test_threshold_override():
    data = reference_config_dict(thresholds=[0.9, 0.6, 0.3])
    config = RunConfig.from_dict(data)
    assert config.thresholds.hi == 0.9
    with pytest.raises(ValueError):
        RunConfig.from_dict(reference_config_dict(thresholds=[0.3, 0.6, 0.8]))


def test_pruning_string_and_dict_forms():
    assert RunConfig.from_dict(reference_config_dict(pruning="amt")).pruning.mode is PruningMode.AMT
    config = RunConfig.from_dict(reference_config_dict(pruning={"mode": "top_k", "k": 2}))
    assert config.pruning.k == 2
    # bare top_k defaults to the customary k=3
    assert RunConfig.from_dict(reference_config_dict(pruning="top_k")).pruning.k == 3


def test_duplicate_agent_ids_rejected():
    data = reference_config_dict()
    data["roster"][1]["id"] = "a1"
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


def test_unknown_tokenizer_rejected():
    with pytest.raises(ConfigError):
        RunConfig.from_dict(reference_config_dict(tokenizer="bpe-of-the-day"))


def test_unknown_backend_kind_rejected():
    data = reference_config_dict()
    data["roster"][0]["backend"] = {"kind": "telepathy"}
    config = RunConfig.from_dict(data)
    with pytest.raises(ConfigError):
        config.build_backends()


def test_unknown_behavior_kind_rejected():
    data = reference_config_dict()
    data["roster"][0]["backend"] = {"kind": "scripted", "behavior": {"kind": "chaotic"}}
    config = RunConfig.from_dict(data)
    with pytest.raises(ConfigError):
        config.build_backends()


def test_build_backends_fresh_instances():
    config = RunConfig.from_dict(reference_config_dict())
    first = config.build_backends()
    second = config.build_backends()
    assert set(first) == {"a1", "a2", "a3", "a4", "a5"}
    assert all(isinstance(b, ScriptedBackend) for b in first.values())
    assert first["a1"] is not second["a1"]  # scripted state must not leak


def test_scripted_only_detection():
    config = RunConfig.from_dict(reference_config_dict())
    assert config.scripted_only()
    data = reference_config_dict()
    data["roster"][0]["backend"] = {"kind": "http", "url": "http://x.test", "model": "m"}
    assert not RunConfig.from_dict(data).scripted_only()


def test_http_backend_token_from_env(monkeypatch):
    monkeypatch.setenv("AGENT_ONE_TOKEN", "sekrit")
    data = reference_config_dict()
    data["roster"][0]["backend"] = {
        "kind": "http",
        "url": "http://x.test/v1",
        "model": "m",
        "env_token_name": "AGENT_ONE_TOKEN",
    }
    backend = RunConfig.from_dict(data).build_backends()["a1"]
    assert isinstance(backend, HttpChatBackend)
    assert backend.endpoint.api_token == "sekrit"


def test_echo_backend_built():
    data = reference_config_dict()
    data["roster"][0]["backend"] = {"kind": "echo", "confidence": 0.4}
    backend = RunConfig.from_dict(data).build_backends()["a1"]
    assert isinstance(backend, EchoBackend)


def test_embedder_local_default_and_shared():
    config = RunConfig.from_dict(reference_config_dict())
    emb = config.get_embedder()
    assert isinstance(emb, LocalTrigramEmbedder)
    assert emb.dim == 512
    assert config.get_embedder() is emb


def test_embedder_http_spec():
    data = reference_config_dict(
        embedder={"kind": "http", "url": "http://emb.test/v1", "model": "e", "dim": 16}
    )
    emb = RunConfig.from_dict(data).get_embedder()
    assert isinstance(emb, HttpEmbedder)
    assert emb.dim == 16


def test_public_dict_round_trips_and_hides_tokens():
    data = reference_config_dict(
        embedder={"kind": "http", "url": "http://emb.test", "env_token_name": "SECRET_NAME"}
    )
    config = RunConfig.from_dict(data)
    public = config.public_dict()
    assert public["max_rounds"] == 5
    assert public["pruning"] == {"mode": "aat"}
    assert public["thresholds"] == [0.8, 0.6, 0.3]
    assert "env_token_name" not in public["embedder"]
    json.dumps(public)  # must be serializable as-is


def test_from_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(reference_config_dict()))
    config = RunConfig.from_file(path)
    assert len(config.roster) == 5


def test_empty_roster_rejected():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"roster": []})


def test_negative_rounds_rejected():
    with pytest.raises(ConfigError):
        RunConfig.from_dict(reference_config_dict(max_rounds=-1))


def test_profile_fields_parsed():
    config = RunConfig.from_dict(
        {"roster": [scripted_agent("z9", {"kind": "stubborn", "answer": "A"}, n_params=123.0, m_tokens=456.0, name="Zed")]}
    )
    profile = config.roster[0]
    assert profile.display_name == "Zed"
    assert profile.param_count_n == 123.0
    assert profile.pretrain_tokens_m == 456.0
    assert profile.backend_ref == "z9"
