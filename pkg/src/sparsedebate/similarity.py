"""Embedding providers and cosine similarity.

The trust math compares agents' round outputs through cosine similarity
of text embeddings.  ``LocalTrigramEmbedder`` is a deterministic,
offline provider (hashed character trigrams) so the whole protocol runs
without network access; ``HttpEmbedder`` talks to an embeddings HTTP
API and falls back to the local provider on failure.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_DIM = 512


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two non-zero vectors, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine is undefined for zero vectors")
    val = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, val))


def pairwise_cosine_matrix(embeddings: list[np.ndarray]) -> np.ndarray:
    """Cosine similarity for every ordered pair; the diagonal is zeroed
    because self-pairs carry no weight in the debating graph."""
    n = len(embeddings)
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            val = cosine(embeddings[i], embeddings[j])
            out[i, j] = val
            out[j, i] = val
    return out


class EmbeddingProvider:
    """Deterministic text-to-unit-vector contract.

    ``embed`` must return the same L2-normalized vector for the same
    text, and must be safe to call concurrently.
    """

    dim: int

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def embed_ex(self, text: str) -> tuple[np.ndarray, bool]:
        """Like ``embed``; the flag reports whether a fallback path ran."""
        return self.embed(text), False


class LocalTrigramEmbedder(EmbeddingProvider):
    """Offline embedder: hashed character-trigram counts, L2-normalized.

    Each trigram is hashed (keyed blake2b, so results are stable across
    processes) into one of ``dim`` signed buckets.  Texts shorter than
    three characters use the whole text as a single feature; empty text
    maps to a fixed unit basis vector.
    """

    def __init__(self, dim: int = DEFAULT_DIM, hash_seed: int = 0):
        if dim < 2:
            raise ValueError(f"dimension must be >= 2, got {dim}")
        self.dim = dim
        self._key = hash_seed.to_bytes(8, "little", signed=False)

    def _bucket(self, feature: str) -> tuple[int, float]:
        digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=9, key=self._key).digest()
        idx = int.from_bytes(digest[:8], "little") % self.dim
        sign = 1.0 if digest[8] % 2 == 0 else -1.0
        return idx, sign

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        if not text:
            vec[0] = 1.0
            return vec
        features = [text[i : i + 3] for i in range(len(text) - 2)] if len(text) >= 3 else [text]
        for feat in features:
            idx, sign = self._bucket(feat)
            vec[idx] += sign
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            # Signed counts can cancel exactly; keep the vector usable.
            vec[0] = 1.0
            return vec
        return vec / norm


class EmbeddingCache:
    """Thread-safe per-run embedding cache keyed by content hash.

    Optionally spills to a JSON sidecar file so repeated runs against a
    remote provider reuse earlier results.
    """

    def __init__(self) -> None:
        self._data: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key_for(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get(self, text: str) -> np.ndarray | None:
        with self._lock:
            vec = self._data.get(self.key_for(text))
        return None if vec is None else vec.copy()

    def put(self, text: str, vec: np.ndarray) -> None:
        with self._lock:
            self._data[self.key_for(text)] = np.asarray(vec, dtype=np.float64).copy()

    def __len__(self) -> int:
        with self._lock:
            return len(self._data)

    def save(self, path: str | Path) -> None:
        with self._lock:
            payload = {k: v.tolist() for k, v in self._data.items()}
        Path(path).write_text(json.dumps(payload))

    def load(self, path: str | Path) -> None:
        payload = json.loads(Path(path).read_text())
        with self._lock:
            for k, v in payload.items():
                self._data[k] = np.asarray(v, dtype=np.float64)


class HttpEmbedder(EmbeddingProvider):
    """Remote embeddings API client with caching and local fallback.

    POSTs ``{"model": ..., "input": [text]}`` to ``<base_url>/embeddings``
    and L2-normalizes whatever comes back.  Any failure falls back to
    the local trigram embedder (flagged through ``embed_ex``) so the
    similarity recursion stays well-defined mid-debate.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        dim: int = DEFAULT_DIM,
        api_token: str | None = None,
        timeout_s: float = 30.0,
        cache: EmbeddingCache | None = None,
        fallback: EmbeddingProvider | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.dim = dim
        self.api_token = api_token
        self.timeout_s = timeout_s
        self.cache = cache if cache is not None else EmbeddingCache()
        self.fallback = fallback if fallback is not None else LocalTrigramEmbedder(dim=dim)

    def _fetch(self, text: str) -> np.ndarray:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_token:
            headers["Authorization"] = f"Bearer {self.api_token}"
        resp = requests.post(
            f"{self.base_url}/embeddings",
            json={"model": self.model, "input": [text]},
            headers=headers,
            timeout=self.timeout_s,
        )
        resp.raise_for_status()
        vec = np.asarray(resp.json()["data"][0]["embedding"], dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if vec.ndim != 1 or norm == 0.0:
            raise ValueError("provider returned an unusable embedding")
        if vec.shape[0] != self.dim:
            # A dimension drift would poison the pairwise cosines; treat it
            # as a failure so the fallback keeps all vectors comparable.
            raise ValueError(
                f"provider returned dimension {vec.shape[0]}, configured {self.dim}"
            )
        return vec / norm

    def embed_ex(self, text: str) -> tuple[np.ndarray, bool]:
        cached = self.cache.get(text)
        if cached is not None:
            return cached, False
        try:
            vec = self._fetch(text)
        except Exception as exc:
            logger.warning("remote embedding failed, using local fallback: %s", exc)
            return self.fallback.embed(text), True
        self.cache.put(text, vec)
        return vec, False

    def embed(self, text: str) -> np.ndarray:
        vec, _ = self.embed_ex(text)
        return vec
