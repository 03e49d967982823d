"""Retrieval-augmented answering by the entities behind a generalized role.

Individual entity answers stay internal; only the packaged role text leaves
this module through :meth:`RoleResponse.to_dict`.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field

from ._util import parallel_map
from .agent_store import EntityAgent, GeneralizedRole
from .aqg import Question
from .embedding import EmbedderSpec, embed
from .errors import GenerationFailure, InvalidInput, MavensError, RoleFailure, TranslationFailure
from .llm import Gateway, render
from .prompts import NO_CONTEXT, TemplateSet

log = logging.getLogger(__name__)

PACKAGE_DELIMITER = "\n\n"


@dataclass
class EntityResponse:
    entity_id: str
    question_text: str
    retrieved_chunk_ids: list
    response_text: str
    hidden: bool = True


@dataclass
class RoleResponse:
    role_id: str
    domain: str
    question: Question
    entity_responses: list
    packaged_text: str
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "role_id": self.role_id,
            "domain": self.domain,
            "question": self.question.to_dict(),
            "packaged_text": self.packaged_text,
        }


@dataclass
class MoaConfig:
    k: int = 2
    source_language: str = "en"


class TranslationCache:
    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key, fn):
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = fn()
        with self._lock:
            return self._data.setdefault(key, value)


def translate_question(
    q: Question,
    target_language: str,
    backend: Gateway,
    templates: TemplateSet | None = None,
    source_language: str = "en",
) -> str:
    if not q.text.strip():
        raise InvalidInput("question text is empty")
    if target_language == source_language:
        return q.text
    templates = templates or TemplateSet()
    system, user = render(templates.translate, {"language": target_language, "question": q.text})
    try:
        text = backend.chat(system, user).strip()
    except MavensError as exc:
        raise TranslationFailure(f"translating {q.text!r} to {target_language}: {exc}") from exc
    if not text:
        raise TranslationFailure(f"empty translation of {q.text!r}")
    return text


def retrieve_context(entity: EntityAgent, question_vec, k: int) -> list[tuple[str, str, float]]:
    hits = entity.index.search_top_k(question_vec, k)
    return [(cid, entity.chunk(cid).text, dist) for cid, dist in hits]


def answer_as_entity(
    entity: EntityAgent,
    question_text: str,
    context_chunks,
    backend: Gateway,
    templates: TemplateSet | None = None,
) -> EntityResponse:
    if not question_text.strip():
        raise InvalidInput("question must be non-empty")
    templates = templates or TemplateSet()
    context = "\n\n".join(text.strip() for _, text, _ in context_chunks) or NO_CONTEXT
    system, user = render(templates.answer, {"domain": entity.domain, "question": question_text, "context": context})
    text = backend.chat(system, user).strip()
    if not text:
        raise GenerationFailure(f"empty answer from {entity.entity_id}")
    return EntityResponse(entity.entity_id, question_text, [cid for cid, _, _ in context_chunks], text)


def run_role(
    role: GeneralizedRole,
    q: Question,
    cfg: MoaConfig,
    backend: Gateway,
    embedder: EmbedderSpec,
    templates: TemplateSet | None = None,
    translations: TranslationCache | None = None,
) -> RoleResponse:
    """Wake every entity of the role, answer ``q`` and package the answers."""
    templates = templates or TemplateSet()
    translations = translations or TranslationCache()
    question_text = translations.get_or_compute(
        (q.text, role.language),
        lambda: translate_question(q, role.language, backend, templates, cfg.source_language),
    )
    qvec = embed(question_text, embedder)

    def one(entity: EntityAgent):
        try:
            ctx = retrieve_context(entity, qvec, cfg.k)
            return answer_as_entity(entity, question_text, ctx, backend, templates)
        except MavensError as exc:
            log.warning("entity %s failed on %r: %s", entity.entity_id, q.text, exc)
            return exc

    results = parallel_map(one, role.entities, backend.parallelism)
    ok, failures = [], []
    for entity, res in zip(role.entities, results):
        if isinstance(res, Exception):
            failures.append({"role_id": role.role_id, "entity_id": entity.entity_id, "question": q.text, "error": str(res)})
        else:
            ok.append(res)
    if not ok:
        raise RoleFailure(f"every entity of {role.role_id} failed on {q.text!r}")
    ok.sort(key=lambda r: r.entity_id)
    packaged = PACKAGE_DELIMITER.join(r.response_text for r in ok)
    return RoleResponse(role.role_id, role.domain, q, ok, packaged, failures)
