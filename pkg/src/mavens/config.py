"""Run configuration: one JSON file mirroring :class:`RunConfig`."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ._util import canonical_digest
from .agent_store import RoleRoster
from .aqg import AqgConfig
from .embedding import EmbedderSpec
from .errors import InvalidInput
from .llm import BackendSpec
from .opinion import DEFAULT_SKIP_WORDS
from .sentiment import AdaptationConfig

BACKEND_URL_ENV = "MAVENS_BACKEND_URL"


@dataclass
class AnalysisConfig:
    seed: int = 0
    restarts: int = 8
    k_max: int = 12
    cjk_bigrams: bool = False
    skip_words: list = field(default_factory=lambda: list(DEFAULT_SKIP_WORDS))
    min_sentence_chars: int = 6


@dataclass
class RunConfig:
    backend: BackendSpec = field(default_factory=BackendSpec)
    judge: BackendSpec | None = None
    embedder: EmbedderSpec = field(default_factory=EmbedderSpec)
    aqg: AqgConfig = field(default_factory=AqgConfig)
    roster: RoleRoster = field(default_factory=RoleRoster)
    kb_path: str = "kb"
    output_dir: str = "runs"
    language: str = "en"
    corpus_language: str = "en"
    chunk_size: int = 512
    retrieval_k: int = 2
    deny_list: list = field(default_factory=list)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    sentiment: AdaptationConfig = field(default_factory=AdaptationConfig)
    lexicon_path: str | None = None
    negators_path: str | None = None
    eval_per_domain: int = 2
    eval_seed: int = 0
    probe_questions: list | None = None
    topic_categories: dict = field(default_factory=dict)

    @property
    def judge_backend(self) -> BackendSpec:
        return self.judge or self.backend

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        return canonical_digest(self.to_dict())


_NESTED = {
    "backend": BackendSpec,
    "judge": BackendSpec,
    "embedder": EmbedderSpec,
    "aqg": AqgConfig,
    "roster": RoleRoster,
    "analysis": AnalysisConfig,
    "sentiment": AdaptationConfig,
}


def _build(cls, data: dict, where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise InvalidInput(f"unknown keys in {where}: {sorted(unknown)}")
    return cls(**data)


def config_from_dict(data: dict, base_dir: str | Path | None = None) -> RunConfig:
    data = dict(data)
    for key, cls in _NESTED.items():
        if data.get(key) is not None:
            data[key] = _build(cls, data[key], key)
    cfg = _build(RunConfig, data, "config")
    if base_dir is not None:
        _resolve_paths(cfg, Path(base_dir))
    url = os.environ.get(BACKEND_URL_ENV)
    if url:
        cfg.backend = BackendSpec(**{**asdict(cfg.backend), "endpoint": url})
    return cfg


def _resolve_paths(cfg: RunConfig, base: Path) -> None:
    def fix(p):
        if p is None:
            return None
        p = Path(p)
        return str(p if p.is_absolute() else (base / p))

    cfg.kb_path = fix(cfg.kb_path)
    cfg.output_dir = fix(cfg.output_dir)
    cfg.lexicon_path = fix(cfg.lexicon_path)
    cfg.negators_path = fix(cfg.negators_path)
    for name in ("backend", "judge"):
        spec = getattr(cfg, name)
        if spec is not None:
            setattr(cfg, name, BackendSpec(**{**asdict(spec), "fixtures": fix(spec.fixtures), "cache_dir": fix(spec.cache_dir)}))


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return config_from_dict({}, Path.cwd())
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InvalidInput(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(data, path.parent)
