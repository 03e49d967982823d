"""Topic -> background review -> per-format question pools -> curated 5W1H set."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum

from ._util import parallel_map
from .embedding import EmbedderSpec, embed, embed_many
from .errors import CurationFailure, ExtractionFailure, GenerationFailure, InvalidInput
from .llm import Gateway, render
from .prompts import TemplateSet
from .vector_index import FlatIndex

log = logging.getLogger(__name__)


class QuestionFormat(str, Enum):
    WHAT = "What"
    WHERE = "Where"
    WHO = "Who"
    WHEN = "When"
    WHY = "Why"
    HOW = "How"
    OTHER = "Other"


FORMAT_ORDER = (
    QuestionFormat.WHAT,
    QuestionFormat.WHERE,
    QuestionFormat.WHO,
    QuestionFormat.WHEN,
    QuestionFormat.WHY,
    QuestionFormat.HOW,
)
_BY_WORD = {f.value.lower(): f for f in FORMAT_ORDER}

DEFAULT_EXEMPLARS = {
    "What": "What measures have local hospitals taken to handle the surge in patients?",
    "Where": "Where were the first cases of the outbreak reported?",
    "Who": "Who is responsible for coordinating the emergency response?",
    "When": "When is the peak of the season expected to arrive?",
    "Why": "Why did the number of infections rise so quickly this year?",
    "How": "How are schools adjusting their schedules to protect students?",
}


@dataclass(frozen=True)
class Question:
    text: str
    format: QuestionFormat
    topic_id: str = ""

    def to_dict(self) -> dict:
        return {"text": self.text, "format": self.format.value}

    @classmethod
    def from_dict(cls, d: dict, topic_id: str = "") -> "Question":
        return cls(d["text"], QuestionFormat(d["format"]), topic_id)


@dataclass
class AqgConfig:
    k: int = 2
    theta_cap: int = 10
    format_exemplars: dict = field(default_factory=lambda: dict(DEFAULT_EXEMPLARS))

    def __post_init__(self):
        if self.k < 1 or self.theta_cap < 1:
            raise InvalidInput("k and theta_cap must be positive")
        if self.k > self.theta_cap:
            raise InvalidInput("k must not exceed theta_cap")


@dataclass
class QuestionSet:
    topic: str
    background: str
    pools: dict
    curated: list
    k: int
    theta_cap: int

    def to_dict(self) -> dict:
        return {
            "topic": self.topic,
            "background": self.background,
            "curated": [q.to_dict() for q in self.curated],
            "pools": {f.value: [q.text for q in self.pools.get(f, [])] for f in FORMAT_ORDER if f in self.pools},
        }

    @classmethod
    def from_dict(cls, d: dict, k: int = 2, theta_cap: int = 10) -> "QuestionSet":
        topic = d["topic"]
        pools = {
            QuestionFormat(fmt): [Question(t, classify_format(t), topic) for t in texts]
            for fmt, texts in d.get("pools", {}).items()
        }
        curated = [Question.from_dict(q, topic) for q in d["curated"]]
        return cls(topic, d["background"], pools, curated, k, theta_cap)


def classify_format(text: str) -> QuestionFormat:
    m = re.match(r"\s*([A-Za-z]+)", text)
    if not m:
        return QuestionFormat.OTHER
    return _BY_WORD.get(m.group(1).lower(), QuestionFormat.OTHER)


_LIST_MARKER = re.compile(r"^\s*(?:[-*•·]+\s*|\(?\d{1,3}\s*[.)\]:、]\s*|[A-Za-z][.)]\s+|Q\d*[:.]\s*)+")


def normalize_line(line: str) -> str:
    s = _LIST_MARKER.sub("", line.strip())
    s = s.strip().strip("\"'“”*").strip()
    return s


def parse_questions(reply: str, topic_id: str = "", cap: int | None = None) -> list[Question]:
    """Turn a free-form LLM reply into questions, one per line.

    A line is kept when it starts with a 5W1H word; a trailing period (or
    nothing) becomes ``?``.  Exact repeats inside one reply are dropped.
    """
    out: list[Question] = []
    seen = set()
    for raw in reply.splitlines():
        s = normalize_line(raw)
        if not s:
            continue
        fmt = classify_format(s)
        if fmt is QuestionFormat.OTHER:
            continue
        s = s.rstrip(" .。;；:")
        if not s.endswith("?"):
            s = s.rstrip("？") + "?"
        if s in seen:
            continue
        seen.add(s)
        out.append(Question(s, fmt, topic_id))
        if cap is not None and len(out) >= cap:
            break
    return out


def generate_background(topic: str, backend: Gateway, templates: TemplateSet | None = None) -> str:
    if not topic or not topic.strip():
        raise InvalidInput("topic must be non-empty")
    templates = templates or TemplateSet()
    system, user = render(templates.background, {"topic": topic.strip()})
    text = backend.chat(system, user).strip()
    if not text:
        raise GenerationFailure(f"empty background for topic {topic!r}")
    return text


def extract_questions(
    background: str,
    fmt: QuestionFormat,
    backend: Gateway,
    templates: TemplateSet | None = None,
    cfg: AqgConfig | None = None,
    topic_id: str = "",
) -> list[Question]:
    if fmt is QuestionFormat.OTHER:
        raise InvalidInput("cannot extract questions of format Other")
    templates = templates or TemplateSet()
    cfg = cfg or AqgConfig()
    bindings = {"fmt": fmt.value, "example": cfg.format_exemplars[fmt.value], "review": background}
    system, user = render(templates.questions, bindings)
    questions = parse_questions(backend.chat(system, user), topic_id, cap=cfg.theta_cap)
    if not questions:
        raise ExtractionFailure(f"no parseable {fmt.value} questions")
    drift = sum(q.format is not fmt for q in questions)
    if drift:
        log.debug("%d of %d questions requested as %s came back in another format", drift, len(questions), fmt.value)
    return questions


def curate(pools: dict, background: str, cfg: AqgConfig, embedder: EmbedderSpec, topic: str = "") -> QuestionSet:
    """Keep the ``cfg.k`` questions of each pool nearest to the background vector."""
    if not background.strip():
        raise InvalidInput("background must be non-empty")
    if not any(pools.get(f) for f in FORMAT_ORDER):
        raise CurationFailure("all question pools are empty")
    b = embed(background, embedder)
    selected: list[Question] = []
    for fmt in FORMAT_ORDER:
        pool = pools.get(fmt) or []
        if not pool:
            continue
        index = FlatIndex(embedder.dims)
        for i, vec in enumerate(embed_many([q.text for q in pool], embedder)):
            index.add(str(i), vec)
        for id_, _ in index.freeze().search_top_k(b, cfg.k):
            selected.append(pool[int(id_)])
    curated, seen = [], set()
    for q in selected:
        if q.text not in seen:
            seen.add(q.text)
            curated.append(q)
    return QuestionSet(topic, background, dict(pools), curated, cfg.k, cfg.theta_cap)


def build_question_set(
    topic: str,
    backend: Gateway,
    embedder: EmbedderSpec,
    cfg: AqgConfig | None = None,
    templates: TemplateSet | None = None,
    failures: list | None = None,
) -> QuestionSet:
    """Full question-generation chain for one topic."""
    cfg = cfg or AqgConfig()
    templates = templates or TemplateSet()
    background = generate_background(topic, backend, templates)

    def one(fmt):
        try:
            return extract_questions(background, fmt, backend, templates, cfg, topic)
        except ExtractionFailure as exc:
            log.warning("topic %r: %s", topic, exc)
            if failures is not None:
                failures.append({"stage": "aqg", "format": fmt.value, "error": str(exc)})
            return []

    results = parallel_map(one, FORMAT_ORDER, backend.parallelism)
    pools = {fmt: qs for fmt, qs in zip(FORMAT_ORDER, results)}
    return curate(pools, background, cfg, embedder, topic)
