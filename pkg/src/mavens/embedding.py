"""Dense text embeddings and the squared-L2 distance used for retrieval.

The default embedder is a hashed character n-gram bag: every 2- and 3-gram of
the lowercased, space-padded text is feature-hashed into ``dims`` buckets with a
hash-derived sign, and the resulting count vector is L2-normalized.  It needs
no model weights and gives identical vectors on every platform, which keeps the
whole pipeline reproducible.  A remote ``/v1/embeddings`` service can be used
instead when ranking quality matters.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import httpx
import numpy as np

from .errors import BackendUnavailable, InvalidInput

DEFAULT_DIMS = 384
NGRAM_SIZES = (2, 3)


@dataclass(frozen=True)
class EmbedderSpec:
    kind: str = "deterministic-local"
    dims: int = DEFAULT_DIMS
    endpoint: str | None = None
    model: str = "text-embedding"
    parallelism: int = 4
    batch_size: int = 64
    timeout: float = 30.0

    def __post_init__(self):
        if self.kind not in ("deterministic-local", "remote-service"):
            raise InvalidInput(f"unknown embedder kind {self.kind!r}")
        if self.dims < 1:
            raise InvalidInput("dims must be >= 1")
        if self.kind == "remote-service" and not self.endpoint:
            raise InvalidInput("remote-service embedder requires an endpoint")
        if self.parallelism < 1:
            raise InvalidInput("parallelism must be >= 1")


@lru_cache(maxsize=1 << 18)
def _bucket(gram: str, dims: int) -> tuple[int, float]:
    h = int.from_bytes(hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest(), "little")
    sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
    return h % dims, sign


def hashed_ngram_vector(text: str, dims: int) -> np.ndarray:
    norm = " " + " ".join(text.lower().split()) + " "
    acc = np.zeros(dims, dtype=np.float64)
    for n in NGRAM_SIZES:
        for i in range(len(norm) - n + 1):
            b, s = _bucket(norm[i : i + n], dims)
            acc[b] += s
    length = np.sqrt(np.dot(acc, acc))
    if length == 0.0:
        # every gram cancelled out; fall back to a one-hot on the whole text
        b, s = _bucket(norm, dims)
        acc[b] = s
        length = 1.0
    return (acc / length).astype(np.float32)


def _check_text(text: str) -> None:
    if not isinstance(text, str) or not text.strip():
        raise InvalidInput("cannot embed empty text")


def embed(text: str, spec: EmbedderSpec) -> np.ndarray:
    """Embed one text into a float32 vector of length ``spec.dims``."""
    return embed_many([text], spec)[0]


def embed_many(texts: Sequence[str], spec: EmbedderSpec) -> list[np.ndarray]:
    for t in texts:
        _check_text(t)
    if spec.kind == "deterministic-local":
        return [hashed_ngram_vector(t, spec.dims) for t in texts]
    return _remote_embed(list(texts), spec)


def _remote_embed(texts: list[str], spec: EmbedderSpec) -> list[np.ndarray]:
    batches = [texts[i : i + spec.batch_size] for i in range(0, len(texts), spec.batch_size)]
    url = spec.endpoint.rstrip("/")
    if not url.endswith("/embeddings"):
        url += "/v1/embeddings"

    def call(batch: list[str]) -> list[np.ndarray]:
        try:
            resp = httpx.post(url, json={"input": batch, "model": spec.model}, timeout=spec.timeout)
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"embedding service at {url} failed: {exc}") from exc
        data = sorted(resp.json()["data"], key=lambda d: d.get("index", 0))
        out = [np.asarray(d["embedding"], dtype=np.float32) for d in data]
        if len(out) != len(batch):
            raise BackendUnavailable("embedding service returned wrong number of vectors")
        for v in out:
            if v.shape != (spec.dims,) or not np.all(np.isfinite(v)):
                raise InvalidInput(f"embedding service returned a vector of shape {v.shape}, expected ({spec.dims},)")
        return out

    with ThreadPoolExecutor(max_workers=spec.parallelism) as pool:
        results = list(pool.map(call, batches))
    return [v for batch in results for v in batch]


def _sq_dists(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    # single kernel shared by l2_sq and the flat index so both agree bit-for-bit
    diff = np.asarray(matrix, dtype=np.float64) - np.asarray(query, dtype=np.float64)
    return np.einsum("ij,ij->i", diff, diff)


def l2_sq(a, b) -> float:
    """Sum of squared component differences between two equal-length vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 1 or a.shape != b.shape:
        raise InvalidInput(f"length mismatch: {a.shape} vs {b.shape}")
    return float(_sq_dists(a[None, :], b)[0])
