"""Chat-completion gateway: prompt templates, remote/mock backends, response cache.

Every LLM call in the pipeline goes through :class:`Gateway`.  The mock
backend answers from a fixture table (longest-prefix match on the user
message) so whole runs are reproducible offline; the on-disk cache doubles as
a record/replay store for remote runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import httpx

from ._util import atomic_write
from .errors import BackendUnavailable, FixtureMiss, GenerationFailure, InvalidInput

log = logging.getLogger(__name__)

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

MAX_ATTEMPTS = 3
BACKOFF_START = 1.0


@dataclass(frozen=True)
class PromptTemplate:
    system: str
    user: str
    placeholder_names: frozenset = field(default=None)

    def __post_init__(self):
        found = frozenset(_PLACEHOLDER.findall(self.system)) | frozenset(_PLACEHOLDER.findall(self.user))
        if self.placeholder_names is None:
            object.__setattr__(self, "placeholder_names", found)
        else:
            names = frozenset(self.placeholder_names)
            object.__setattr__(self, "placeholder_names", names)
            undeclared = found - names
            if undeclared:
                raise InvalidInput(f"placeholders not declared: {sorted(undeclared)}")


def _substitute(text: str, bindings: Mapping[str, str]) -> str:
    return _PLACEHOLDER.sub(lambda m: str(bindings[m.group(1)]), text)


def render(template: PromptTemplate, bindings: Mapping[str, str]) -> tuple[str, str]:
    """Fill every ``{name}`` placeholder; raises naming the first missing one."""
    missing = sorted(n for n in template.placeholder_names if n not in bindings)
    if missing:
        raise InvalidInput(f"missing binding for placeholder {missing[0]!r}")
    return _substitute(template.system, bindings), _substitute(template.user, bindings)


@dataclass(frozen=True)
class ChatRequest:
    system: str
    user: str
    temperature: float = 0.7
    top_p: float = 0.8
    max_length: int = 8192
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise InvalidInput("temperature must lie in [0, 2]")
        if not 0.0 < self.top_p <= 1.0:
            raise InvalidInput("top_p must lie in (0, 1]")
        if self.max_length < 1:
            raise InvalidInput("max_length must be positive")


@dataclass(frozen=True)
class BackendSpec:
    kind: str = "mock"
    endpoint: str | None = None
    model_name: str = "mock"
    cache_dir: str | None = None
    parallelism: int = 4
    fixtures: str | None = None
    timeout: float = 120.0
    api_key_env: str = "MAVENS_API_KEY"
    temperature: float = 0.7
    top_p: float = 0.8
    max_length: int = 8192
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("remote", "mock"):
            raise InvalidInput(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise InvalidInput("remote backend requires an endpoint")
        if self.parallelism < 1:
            raise InvalidInput("parallelism must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def cache_key(model_name: str, req: ChatRequest) -> str:
    payload = [model_name, req.system, req.user, req.temperature, req.top_p, req.max_length, req.seed]
    blob = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_fixture_table(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    if not isinstance(table, dict):
        raise InvalidInput(f"{path}: fixture table must be a JSON object")
    return table


class MockTable:
    """Longest-prefix lookup of the user message in a fixture table.

    Keys may end with ``*`` (ignored, every key is a prefix).  A value may be a
    list of replies; one is picked by a digest of the full request, so the
    answer stays a pure function of (system, user).
    """

    def __init__(self, table: Mapping[str, object]):
        entries = []
        for key, value in table.items():
            prefix = key[:-1] if key.endswith("*") else key
            entries.append((prefix, value))
        entries.sort(key=lambda e: -len(e[0]))
        self._entries = entries

    def lookup(self, system: str, user: str) -> str:
        for prefix, value in self._entries:
            if user.startswith(prefix):
                if isinstance(value, list):
                    if not value:
                        return ""
                    h = hashlib.sha256((system + "\x00" + user).encode("utf-8")).digest()
                    return str(value[int.from_bytes(h[:8], "big") % len(value)])
                return str(value)
        raise FixtureMiss(user)


@dataclass
class GatewayStats:
    calls: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    backend_calls: int = 0
    retries: int = 0


class Gateway:
    def __init__(
        self,
        spec: BackendSpec,
        table: Mapping[str, object] | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.spec = spec
        self.stats = GatewayStats()
        self._sleep = sleep
        self._write_lock = threading.Lock()
        self._stats_lock = threading.Lock()
        self._mock = None
        if spec.kind == "mock":
            if table is None:
                table = load_fixture_table(spec.fixtures) if spec.fixtures else {}
            self._mock = MockTable(table)
        self._client = httpx.Client(timeout=spec.timeout) if spec.kind == "remote" else None

    @property
    def parallelism(self) -> int:
        return self.spec.parallelism

    def request(self, system: str, user: str, **overrides) -> ChatRequest:
        params = dict(
            temperature=self.spec.temperature,
            top_p=self.spec.top_p,
            max_length=self.spec.max_length,
            seed=self.spec.seed,
        )
        params.update(overrides)
        return ChatRequest(system=system, user=user, **params)

    def chat(self, system: str, user: str, **overrides) -> str:
        return self.complete(self.request(system, user, **overrides))

    def complete(self, req: ChatRequest) -> str:
        self._bump("calls")
        path = self._cache_path(req)
        if path is not None and path.exists():
            self._bump("cache_hits")
            return path.read_bytes().decode("utf-8")
        if path is not None:
            self._bump("cache_misses")
        if self._mock is not None:
            text = self._mock.lookup(req.system, req.user)
        else:
            text = self._remote(req)
        if not text.strip():
            raise GenerationFailure("backend returned an empty reply")
        if path is not None:
            with self._write_lock:
                atomic_write(path, text.encode("utf-8"))
        return text

    def _bump(self, name: str, by: int = 1) -> None:
        with self._stats_lock:
            setattr(self.stats, name, getattr(self.stats, name) + by)

    def _cache_path(self, req: ChatRequest) -> Path | None:
        if not self.spec.cache_dir:
            return None
        return Path(self.spec.cache_dir) / f"{cache_key(self.spec.model_name, req)}.txt"

    def _url(self) -> str:
        url = self.spec.endpoint.rstrip("/")
        if url.endswith("/chat/completions"):
            return url
        if not url.endswith("/v1"):
            url += "/v1"
        return url + "/chat/completions"

    def _remote(self, req: ChatRequest) -> str:
        body = {
            "model": self.spec.model_name,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.user},
            ],
            "temperature": req.temperature,
            "top_p": req.top_p,
            "max_tokens": req.max_length,
        }
        if req.seed is not None:
            body["seed"] = req.seed
        headers = {}
        key = os.environ.get(self.spec.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        delay = BACKOFF_START
        last: Exception | None = None
        for attempt in range(1, MAX_ATTEMPTS + 1):
            self._bump("backend_calls")
            try:
                resp = self._client.post(self._url(), json=body, headers=headers)
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"] or ""
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last = exc
                log.warning("chat request attempt %d/%d failed: %s", attempt, MAX_ATTEMPTS, exc)
                if attempt < MAX_ATTEMPTS:
                    self._bump("retries")
                    self._sleep(delay)
                    delay *= 2
        raise BackendUnavailable(f"{self._url()} unreachable after {MAX_ATTEMPTS} attempts: {last}")

    def close(self) -> None:
        if self._client is not None:
            self._client.close()


def complete(req: ChatRequest, backend: Gateway) -> str:
    return backend.complete(req)
