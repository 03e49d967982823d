"""LLM-as-judge scoring for question sets and agents, and the score tables."""

from __future__ import annotations

import csv
import io
import logging
import math
import random
import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from ._util import parallel_map
from .errors import InvalidInput, MavensError, UnparseableScore
from .llm import Gateway, PromptTemplate, render
from .prompts import JUDGE_TEMPLATES

log = logging.getLogger(__name__)

RETRY_SUFFIX = "\n\nReply with a single integer."
AVG = "Avg."


@dataclass(frozen=True)
class JudgeDimension:
    name: str
    prompt_template: PromptTemplate
    low: int
    high: int


DIMENSIONS = {
    name: JudgeDimension(name, JUDGE_TEMPLATES[name], 1 if name in ("RBT", "RQQ", "RBQ") else 0, 10)
    for name in ("RBT", "RQQ", "RBQ", "RAW", "CUS", "SPE", "SIM")
}
AQG_DIMS = ("RBT", "RQQ", "RBQ")
AGENT_DIMS = ("RAW", "CUS", "SPE")


@dataclass(frozen=True)
class JudgeScore:
    dimension: str
    subject_id: str
    raw_reply: str
    score: int


_INT = re.compile(r"(?<![\w.])\d+(?!\d|\.\d)")


def parse_score(reply: str, low: int, high: int) -> int | None:
    """First integer token in ``reply`` that lies within [low, high]."""
    for m in _INT.finditer(reply):
        v = int(m.group())
        if low <= v <= high:
            return v
    return None


def judge(dimension: JudgeDimension | str, bindings: Mapping[str, str], backend: Gateway, subject_id: str = "") -> JudgeScore:
    if isinstance(dimension, str):
        dimension = DIMENSIONS[dimension]
    system, user = render(dimension.prompt_template, bindings)
    replies = []
    for attempt_user in (user, user + RETRY_SUFFIX):
        reply = backend.chat(system, attempt_user)
        replies.append(reply)
        score = parse_score(reply, dimension.low, dimension.high)
        if score is not None:
            return JudgeScore(dimension.name, subject_id, reply, score)
    exc = UnparseableScore(f"{dimension.name} for {subject_id!r}: no integer in [{dimension.low}, {dimension.high}]")
    exc.replies = replies
    raise exc


# tables ---------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    mean: float
    variance: float | None
    n: int

    def fmt(self) -> str:
        if self.variance is None:
            return f"{self.mean:.3f}"
        return f"{self.mean:.3f} ({self.variance:.3f})"


def _mean(xs) -> float:
    xs = list(xs)
    return math.fsum(xs) / len(xs)


def _variance(xs, ddof: int = 0) -> float:
    xs = list(xs)
    m = _mean(xs)
    return math.fsum((x - m) ** 2 for x in xs) / (len(xs) - ddof)


@dataclass
class ScoreTable:
    rows: dict = field(default_factory=dict)
    dimensions: list = field(default_factory=list)

    def cell(self, group: str, dim: str) -> Cell:
        return self.rows[group][dim]

    def means(self) -> dict:
        return {g: {d: c.mean for d, c in row.items()} for g, row in self.rows.items()}

    def with_average_row(self, name: str = AVG, ddof: int | None = None) -> "ScoreTable":
        """Append a row holding the mean of the group means per dimension.

        With ``ddof`` set, the row also carries the variance of the group means.
        """
        groups = [g for g in self.rows if g != name]
        avg = {}
        for d in self.dimensions:
            vals = [self.rows[g][d].mean for g in groups if d in self.rows[g]]
            if vals:
                var = _variance(vals, ddof) if ddof is not None and len(vals) > ddof else None
                avg[d] = Cell(_mean(vals), var, len(vals))
        rows = {g: self.rows[g] for g in groups}
        rows[name] = avg
        return ScoreTable(rows, list(self.dimensions))

    def with_average_column(self, dims: Iterable[str], name: str = AVG) -> "ScoreTable":
        dims = list(dims)
        rows = {}
        for g, row in self.rows.items():
            vals = [row[d].mean for d in dims if d in row]
            rows[g] = dict(row)
            if vals:
                rows[g][name] = Cell(_mean(vals), None, len(vals))
        return ScoreTable(rows, list(self.dimensions) + [name])

    def to_dict(self) -> dict:
        return {
            "dimensions": list(self.dimensions),
            "rows": {
                g: {d: {"mean": c.mean, "variance": c.variance, "n": c.n} for d, c in row.items()}
                for g, row in self.rows.items()
            },
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["group"] + list(self.dimensions))
        for g, row in self.rows.items():
            w.writerow([g] + [row[d].fmt() if d in row else "" for d in self.dimensions])
        return buf.getvalue()

    def render(self) -> str:
        width = max([5] + [len(g) for g in self.rows])
        cols = [max(len(d), 15) for d in self.dimensions]
        lines = [f"{'':<{width}}  " + "  ".join(f"{d:>{c}}" for d, c in zip(self.dimensions, cols))]
        for g, row in self.rows.items():
            cells = [row[d].fmt() if d in row else "-" for d in self.dimensions]
            lines.append(f"{g:<{width}}  " + "  ".join(f"{v:>{c}}" for v, c in zip(cells, cols)))
        return "\n".join(lines)


_CELL = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*(?:\(\s*(-?\d+(?:\.\d+)?)\s*\))?\s*$")


def parse_table_csv(text: str) -> dict:
    """Inverse of :meth:`ScoreTable.to_csv`: group -> dim -> (mean, variance|None)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    dims = header[1:]
    out = {}
    for row in reader:
        if not row:
            continue
        cells = {}
        for d, v in zip(dims, row[1:]):
            if not v:
                continue
            m = _CELL.match(v)
            if not m:
                raise InvalidInput(f"unparseable table cell {v!r}")
            cells[d] = (float(m.group(1)), float(m.group(2)) if m.group(2) is not None else None)
        out[row[0]] = cells
    return out


def aggregate_scores(scores: Iterable[JudgeScore], grouping: Callable[[str], str] | Mapping[str, str] | None = None, ddof: int = 0) -> ScoreTable:
    """Mean per (group, dimension); variance only where a subject was rated more than once."""
    scores = list(scores)
    if not scores:
        raise InvalidInput("need at least one score")
    if grouping is None:
        group_of = lambda s: s  # noqa: E731
    elif callable(grouping):
        group_of = grouping
    else:
        group_of = grouping.__getitem__
    cells: dict = {}
    dims: list = []
    for s in scores:
        if s.dimension not in dims:
            dims.append(s.dimension)
        cells.setdefault(group_of(s.subject_id), {}).setdefault(s.dimension, []).append(s)
    rows = {}
    for g, by_dim in cells.items():
        rows[g] = {}
        for d, items in by_dim.items():
            vals = [float(s.score) for s in items]
            per_subject: dict = {}
            for s in items:
                per_subject[s.subject_id] = per_subject.get(s.subject_id, 0) + 1
            multi = max(per_subject.values()) >= 2
            var = _variance(vals, ddof) if multi and len(vals) > ddof else None
            rows[g][d] = Cell(_mean(vals), var, len(vals))
    ordered_dims = [d for d in DIMENSIONS if d in dims] + [d for d in dims if d not in DIMENSIONS]
    return ScoreTable(rows, ordered_dims)


# recorders and evaluators ---------------------------------------------


class JudgeLog:
    """Collects every judge outcome, including exclusions, for the audit trail."""

    def __init__(self):
        self.scores: list[JudgeScore] = []
        self.excluded: list[dict] = []
        self._lock = threading.Lock()

    def run(self, dim: str, bindings: Mapping[str, str], backend: Gateway, subject_id: str) -> JudgeScore | None:
        try:
            s = judge(dim, bindings, backend, subject_id)
        except UnparseableScore as exc:
            with self._lock:
                self.excluded.append({"dimension": dim, "subject_id": subject_id, "replies": getattr(exc, "replies", []), "error": str(exc)})
            return None
        except MavensError as exc:
            with self._lock:
                self.excluded.append({"dimension": dim, "subject_id": subject_id, "replies": [], "error": str(exc)})
            return None
        with self._lock:
            self.scores.append(s)
        return s

    def audit_records(self) -> list[dict]:
        recs = [{"dimension": s.dimension, "subject_id": s.subject_id, "score": s.score, "reply": s.raw_reply} for s in self.scores]
        recs += [{"dimension": e["dimension"], "subject_id": e["subject_id"], "score": None, "replies": e["replies"], "error": e["error"]} for e in self.excluded]
        return sorted(recs, key=lambda r: (r["dimension"], r["subject_id"]))


def evaluate_aqg(question_sets, backend: Gateway, categories: Mapping[str, str] | None = None, log_: JudgeLog | None = None) -> ScoreTable:
    """RBT per topic, RQQ and RBQ per curated question, grouped by topic category."""
    log_ = log_ or JudgeLog()
    categories = categories or {}
    jobs = []
    group = {}
    for qs in question_sets:
        cat = categories.get(qs.topic, "all")
        tid = f"topic:{qs.topic}"
        group[tid] = cat
        jobs.append(("RBT", {"topic": qs.topic, "background": qs.background}, tid))
        for i, q in enumerate(qs.curated):
            qid = f"q:{qs.topic}#{i}"
            group[qid] = cat
            jobs.append(("RQQ", {"question": q.text}, qid))
            jobs.append(("RBQ", {"question": q.text, "background": qs.background}, qid))
    results = parallel_map(lambda j: log_.run(j[0], j[1], backend, j[2]), jobs, backend.parallelism)
    scores = [s for s in results if s is not None]
    if not scores:
        raise UnparseableScore("every judge reply was unparseable")
    table = aggregate_scores(scores, group)
    order = list(dict.fromkeys(categories.get(qs.topic, "all") for qs in question_sets))
    table.rows = {g: table.rows[g] for g in order if g in table.rows}
    return table.with_average_row()


@dataclass(frozen=True)
class AgentAnswer:
    agent_id: str
    domain: str
    question: str
    text: str
    knowledge: str


def evaluate_agents(answers, backend: Gateway, domain_order=None, log_: JudgeLog | None = None) -> tuple[ScoreTable, ScoreTable]:
    """Score agent answers on RAW/CUS/SPE.

    Returns ``(domain_table, agent_table)``: each agent's score is its mean
    over the probe questions, each domain row the mean of its agents, plus an
    average column and an average row.
    """
    answers = list(answers)
    log_ = log_ or JudgeLog()
    jobs = []
    for i, a in enumerate(answers):
        sid = f"{a.agent_id}#{i}"
        jobs.append(("RAW", {"event": a.question, "text": a.text}, sid))
        jobs.append(("CUS", {"knowledge": a.knowledge, "text": a.text}, sid))
        jobs.append(("SPE", {"knowledge": a.knowledge, "text": a.text}, sid))
    results = parallel_map(lambda j: log_.run(j[0], j[1], backend, j[2]), jobs, backend.parallelism)
    scores = [s for s in results if s is not None]
    if not scores:
        raise UnparseableScore("every judge reply was unparseable")
    agent_of = {f"{a.agent_id}#{i}": a.agent_id for i, a in enumerate(answers)}
    domain_of = {a.agent_id: a.domain for a in answers}
    agent_table = aggregate_scores(scores, agent_of)
    return domain_means(agent_table, domain_of, domain_order), agent_table


def domain_means(agent_table: ScoreTable, domain_of: Mapping[str, str], domain_order=None) -> ScoreTable:
    by_domain: dict = {}
    for agent, row in agent_table.rows.items():
        for d, c in row.items():
            by_domain.setdefault(domain_of[agent], {}).setdefault(d, []).append(c.mean)
    order = [d for d in (domain_order or []) if d in by_domain] + sorted(d for d in by_domain if d not in (domain_order or []))
    rows = {g: {d: Cell(_mean(v), None, len(v)) for d, v in by_domain[g].items()} for g in order}
    dims = [d for d in AGENT_DIMS if any(d in r for r in rows.values())]
    table = ScoreTable(rows, dims).with_average_column(dims)
    return table.with_average_row()


def stratified_sample(roles, per_domain: int = 2, seed: int = 0) -> list:
    """Pick ``per_domain`` entities from every role, reproducibly."""
    rng = random.Random(seed)
    picked = []
    for role in roles:
        ents = sorted(role.entities, key=lambda e: e.entity_id)
        chosen = rng.sample(ents, min(per_domain, len(ents)))
        picked.extend(sorted(chosen, key=lambda e: e.entity_id))
    return picked
