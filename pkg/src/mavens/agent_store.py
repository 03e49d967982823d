"""Per-entity knowledge libraries and their grouping into generalized roles.

On-disk layout under a knowledge-base root::

    roster.json                       domain -> [entity_id, ...]
    <domain>/<entity_id>/meta.json
    <domain>/<entity_id>/chunks.jsonl
    <domain>/<entity_id>/vectors.bin  (+ ids.txt)
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from ._util import atomic_write, dump_json
from .embedding import EmbedderSpec, embed_many
from .errors import FormatError, InvalidInput, LoadFailure
from .vector_index import FlatIndex

log = logging.getLogger(__name__)

DEFAULT_DOMAINS = ("politics", "economics", "technology", "society", "entertainment", "military")
SENTENCE_END = ".!?。！？"
MIN_CHUNK_SIZE = 32
REDACTED = "[anon]"


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    text: str
    start: int
    end: int


@dataclass
class EntityAgent:
    entity_id: str
    domain: str
    language: str
    chunks: list
    index: FlatIndex
    chunk_size: int = 512

    def chunk(self, chunk_id: str) -> Chunk:
        return self.chunks[self.index._pos[chunk_id]]


@dataclass
class GeneralizedRole:
    role_id: str
    domain: str
    entities: list

    def __post_init__(self):
        if len(self.entities) < 2:
            raise InvalidInput(f"role {self.role_id} needs at least 2 entities for anonymity")
        for e in self.entities:
            if e.domain != self.domain:
                raise InvalidInput(f"entity {e.entity_id} is not in domain {self.domain}")

    @property
    def language(self) -> str:
        return self.entities[0].language


@dataclass
class RoleRoster:
    domains: list = field(default_factory=lambda: list(DEFAULT_DOMAINS))
    entities_per_domain: int = 10

    @property
    def total(self) -> int:
        return len(self.domains) * self.entities_per_domain


def role_id_for(domain: str) -> str:
    return f"role-{domain}"


def pseudonym(domain: str, i: int) -> str:
    return f"{domain[:4].lower()}-{i:02d}"


def chunk_text(document: str, chunk_size: int = 512, prefix: str = "c") -> list[Chunk]:
    """Greedy fixed-length chunking with a soft sentence break.

    A chunk ends after the last sentence terminator that falls past the middle
    of its window; without one it is cut at exactly ``chunk_size`` characters.
    The chunks concatenate back to ``document``.
    """
    if not document:
        raise InvalidInput("document must be non-empty")
    if chunk_size < MIN_CHUNK_SIZE:
        raise InvalidInput(f"chunk_size must be >= {MIN_CHUNK_SIZE}")
    chunks = []
    pos, n = 0, len(document)
    while pos < n:
        end = min(pos + chunk_size, n)
        if end < n:
            window = document[pos:end]
            cut = max(window.rfind(c) for c in SENTENCE_END)
            if cut + 1 > chunk_size // 2:
                end = pos + cut + 1
        chunks.append(Chunk(f"{prefix}{len(chunks):04d}", document[pos:end], pos, end))
        pos = end
    return chunks


def scrub(text: str, deny_list) -> str:
    """Replace every deny-listed raw identifier (case-insensitive) with a placeholder."""
    names = sorted({d.strip() for d in deny_list if d and d.strip()}, key=len, reverse=True)
    if not names:
        return text
    pattern = re.compile("|".join(re.escape(n) for n in names), re.IGNORECASE)
    return pattern.sub(REDACTED, text)


def build_entity(
    entity_id: str,
    domain: str,
    language: str,
    document: str,
    chunk_size: int,
    embedder: EmbedderSpec,
    deny_list=(),
) -> EntityAgent:
    if not re.fullmatch(r"[A-Za-z0-9_.-]+", entity_id):
        raise InvalidInput(f"entity id {entity_id!r} is not a valid pseudonym")
    document = scrub(document, deny_list)
    if not document.strip():
        raise InvalidInput(f"{entity_id}: empty document")
    chunks = chunk_text(document, chunk_size, prefix=f"{entity_id}:")
    index = FlatIndex(embedder.dims)
    for c, v in zip(chunks, embed_many([c.text if c.text.strip() else "." for c in chunks], embedder)):
        index.add(c.chunk_id, v)
    return EntityAgent(entity_id, domain, language, chunks, index.freeze(), chunk_size)


def save_entity(agent: EntityAgent, root: str | Path) -> Path:
    d = Path(root) / agent.domain / agent.entity_id
    d.mkdir(parents=True, exist_ok=True)
    meta = {
        "entity_id": agent.entity_id,
        "domain": agent.domain,
        "language": agent.language,
        "chunk_size": agent.chunk_size,
        "dims": agent.index.dims,
        "chunk_count": len(agent.chunks),
    }
    atomic_write(d / "meta.json", dump_json(meta))
    lines = "".join(
        json.dumps({"chunk_id": c.chunk_id, "text": c.text, "start": c.start, "end": c.end}, ensure_ascii=False) + "\n"
        for c in agent.chunks
    )
    atomic_write(d / "chunks.jsonl", lines)
    agent.index.save(d / "vectors.bin", d / "ids.txt")
    return d


def load_entity(path: str | Path) -> EntityAgent:
    d = Path(path)
    if not d.is_dir():
        raise LoadFailure(f"missing entity directory: {d}")
    try:
        meta = json.loads((d / "meta.json").read_text(encoding="utf-8"))
        chunk_lines = (d / "chunks.jsonl").read_text(encoding="utf-8").splitlines()
    except FileNotFoundError as exc:
        raise LoadFailure(f"incomplete entity directory {d}: {exc.filename}") from exc
    chunks = [Chunk(**json.loads(line)) for line in chunk_lines if line]
    index = FlatIndex.load(d / "vectors.bin", d / "ids.txt", dims=meta["dims"])
    if len(index) != len(chunks) or meta["chunk_count"] != len(chunks):
        raise FormatError(f"{d}: chunk/vector count mismatch")
    if index.ids != [c.chunk_id for c in chunks]:
        raise FormatError(f"{d}: vector ids do not match chunk ids")
    return EntityAgent(meta["entity_id"], meta["domain"], meta["language"], chunks, index, meta["chunk_size"])


def write_roster_manifest(root: str | Path, members: dict) -> None:
    atomic_write(Path(root) / "roster.json", dump_json({d: sorted(ids) for d, ids in members.items()}))


def load_roster(root: str | Path, roster: RoleRoster) -> list[GeneralizedRole]:
    root = Path(root)
    manifest_path = root / "roster.json"
    if not manifest_path.exists():
        raise LoadFailure(f"missing roster manifest: {manifest_path}")
    members = json.loads(manifest_path.read_text(encoding="utf-8"))
    roles = []
    for domain in roster.domains:
        ids = members.get(domain)
        if not ids:
            raise LoadFailure(f"no entities for domain {domain!r} under {root / domain}")
        if len(ids) != roster.entities_per_domain:
            raise LoadFailure(
                f"domain {domain!r} has {len(ids)} entities, roster expects {roster.entities_per_domain}"
            )
        entities = [load_entity(root / domain / eid) for eid in sorted(ids)]
        roles.append(GeneralizedRole(role_id_for(domain), domain, entities))
    return roles
