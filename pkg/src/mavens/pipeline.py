"""Stage orchestration behind the command-line interface."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from ._util import atomic_write, file_digest, parallel_map, write_json
from .agent_store import build_entity, load_roster, pseudonym, save_entity, write_roster_manifest
from .aqg import Question, QuestionSet, build_question_set, classify_format
from .config import RunConfig
from .embedding import embed
from .errors import InvalidInput, MavensError, RoleFailure, TranslationFailure
from .evaluation import AgentAnswer, JudgeLog, evaluate_agents, evaluate_aqg, stratified_sample
from .llm import Gateway
from .moa import MoaConfig, TranslationCache, answer_as_entity, retrieve_context, run_role, translate_question
from .opinion import OpinionSentence, RuleBasedExtractor, classical_mds, cluster_opinions, segment_and_filter, tfidf
from .sentiment import aggregate, build_lexicon, default_lexicon, read_lexicon, score_text

log = logging.getLogger(__name__)

class StageFailure(MavensError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def bundled_topics() -> dict:
    return json.loads((resources.files("mavens") / "data" / "topics.json").read_text(encoding="utf-8"))


def bundled_probe_questions() -> list[str]:
    text = (resources.files("mavens") / "data" / "probe_questions.txt").read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def topic_categories(cfg: RunConfig) -> dict:
    if cfg.topic_categories:
        return dict(cfg.topic_categories)
    return {t: cat for cat, topics in bundled_topics().items() for t in topics}


# ingest ---------------------------------------------------------------


def ingest(corpus_dir: str | Path, cfg: RunConfig) -> dict:
    """Build the knowledge base from ``corpus/<domain>/<entity>.txt``."""
    corpus = Path(corpus_dir)
    if not corpus.is_dir():
        raise InvalidInput(f"corpus directory not found: {corpus}")
    sources = {}
    for domain in cfg.roster.domains:
        d = corpus / domain
        files = sorted(d.glob("*.txt")) if d.is_dir() else []
        if not files:
            raise InvalidInput(f"no entity files under {d}")
        sources[domain] = files
    deny = set(cfg.deny_list)
    for files in sources.values():
        for f in files:
            deny.update({f.stem, f.stem.replace("_", " ")})

    jobs = [(domain, pseudonym(domain, i + 1), f) for domain, files in sources.items() for i, f in enumerate(files)]

    def build(job):
        domain, eid, path = job
        try:
            text = path.read_text(encoding="utf-8")
            agent = build_entity(eid, domain, cfg.corpus_language, text, cfg.chunk_size, cfg.embedder, deny)
            save_entity(agent, cfg.kb_path)
            return agent
        except (MavensError, OSError, UnicodeDecodeError) as exc:
            log.warning("entity %s failed to build: %s", eid, exc)
            return exc

    results = parallel_map(build, jobs, 1)
    members: dict = {d: [] for d in sources}
    chunk_counts: dict = {d: [] for d in sources}
    failures = []
    for (domain, eid, _), res in zip(jobs, results):
        if isinstance(res, Exception):
            failures.append({"entity_id": eid, "domain": domain, "error": str(res)})
        else:
            members[domain].append(eid)
            chunk_counts[domain].append(len(res.chunks))
    Path(cfg.kb_path).mkdir(parents=True, exist_ok=True)
    write_roster_manifest(cfg.kb_path, members)
    summary = {
        "entities": {d: len(ids) for d, ids in members.items()},
        "chunks": {d: sum(c) for d, c in chunk_counts.items()},
        "failures": failures,
    }
    write_json(Path(cfg.kb_path) / "ingest_manifest.json", summary)
    return summary


def kb_digest(kb_path: str | Path) -> str:
    h = hashlib.sha256()
    root = Path(kb_path)
    for p in sorted(root.rglob("*")):
        if p.is_file() and p.name != "ingest_manifest.json":
            h.update(str(p.relative_to(root)).encode())
            h.update(file_digest(p).encode())
    return h.hexdigest()


# predict --------------------------------------------------------------


def _load_lexicon(cfg: RunConfig):
    if cfg.lexicon_path:
        return read_lexicon(cfg.lexicon_path, cfg.negators_path)
    return default_lexicon()


def _roles(cfg: RunConfig):
    if not (Path(cfg.kb_path) / "roster.json").exists():
        raise InvalidInput(f"no knowledge base at {cfg.kb_path}; run ingest first")
    return load_roster(cfg.kb_path, cfg.roster)


def predict(topic: str, cfg: RunConfig, run_id: str | None = None, gateway: Gateway | None = None) -> tuple[Path, dict]:
    if not topic.strip():
        raise InvalidInput("topic must be non-empty")
    roles = _roles(cfg)
    run_id = run_id or datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    run_dir = Path(cfg.output_dir) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    backend = gateway or Gateway(cfg.backend)
    manifest = {
        "run_id": run_id,
        "topic": topic,
        "config_digest": cfg.digest(),
        "stage_seconds": {},
        "counts": {},
        "failures": [],
        "artifacts": {},
    }
    t_start = time.perf_counter()

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        except MavensError as exc:
            manifest["failures"].append({"stage": name, "error": str(exc)})
            _finish_manifest(run_dir, manifest, t_start)
            raise StageFailure(name, exc) from exc
        finally:
            manifest["stage_seconds"][name] = round(time.perf_counter() - t0, 3)

    qs = stage("questions", lambda: build_question_set(topic, backend, cfg.embedder, cfg.aqg, failures=manifest["failures"]))
    write_json(run_dir / "questions.json", qs.to_dict())
    manifest["counts"]["questions"] = len(qs.curated)

    responses = stage("responses", lambda: _answer_all(roles, qs.curated, cfg, backend, manifest["failures"]))
    write_json(run_dir / "responses.json", [r.to_dict() for r in responses])
    manifest["counts"]["responses"] = len(responses)

    n_sent, k = stage("opinions", lambda: _analyze_opinions(responses, cfg, run_dir))
    manifest["counts"]["opinion_sentences"] = n_sent
    manifest["counts"]["clusters"] = k

    report = stage("sentiment", lambda: _sentiment(responses, cfg, run_dir))
    _finish_manifest(run_dir, manifest, t_start)
    return run_dir, {**manifest, "sentiment_table": report.table()}


def _finish_manifest(run_dir: Path, manifest: dict, t_start: float) -> None:
    manifest["total_seconds"] = round(time.perf_counter() - t_start, 3)
    for name in ("questions.json", "responses.json", "opinions.json", "clusters.json", "sentiment.json", "lexicon.tsv"):
        p = run_dir / name
        if p.exists():
            manifest["artifacts"][name] = file_digest(p)
    write_json(run_dir / "manifest.json", manifest)


def _answer_all(roles, questions, cfg: RunConfig, backend: Gateway, failures: list):
    moa_cfg = MoaConfig(k=cfg.retrieval_k, source_language=cfg.language)
    translations = TranslationCache()
    out = []
    for role in roles:
        for q in questions:
            try:
                r = run_role(role, q, moa_cfg, backend, cfg.embedder, translations=translations)
            except (TranslationFailure, RoleFailure) as exc:
                failures.append({"stage": "responses", "role_id": role.role_id, "question": q.text, "error": str(exc)})
                continue
            failures.extend(r.failures)
            out.append(r)
    if not out:
        raise RoleFailure("no role produced a response")
    return out


def _analyze_opinions(responses, cfg: RunConfig, run_dir: Path) -> tuple[int, int]:
    a = cfg.analysis
    extractor = RuleBasedExtractor()
    sentences = segment_and_filter(responses, a.skip_words, a.min_sentence_chars)
    opinions = [OpinionSentence(extractor(s.text), s.source_role_id, s.source_domain) for s in sentences]
    write_json(run_dir / "opinions.json", [o.to_dict() for o in opinions])
    if not opinions:
        write_json(run_dir / "clusters.json", {"k": 0, "inertia_curve": {}, "clusters": [], "coordinates": []})
        return 0, 0
    matrix = tfidf([o.text for o in opinions], cjk_bigrams=a.cjk_bigrams)
    res = cluster_opinions(matrix, seed=a.seed, k_max=a.k_max, restarts=a.restarts)
    coords = classical_mds(matrix.rows)
    clusters = []
    for cid in range(1, res.k + 1):
        members = [i for i, c in enumerate(res.assignments) if c == cid]
        clusters.append(
            {
                "id": cid,
                "size": len(members),
                "top_terms": [[t, round(w, 6)] for t, w in res.top_terms.get(cid, [])],
                "member_indices": members,
            }
        )
    write_json(
        run_dir / "clusters.json",
        {
            "k": res.k,
            "inertia_curve": {str(k): round(v, 9) for k, v in res.inertia_curve.items()},
            "clusters": clusters,
            "coordinates": [[round(float(x), 6), round(float(y), 6)] for x, y in coords],
        },
    )
    return len(opinions), res.k


def _sentiment(responses, cfg: RunConfig, run_dir: Path):
    seed = _load_lexicon(cfg)
    lexicon = build_lexicon([r.packaged_text for r in responses], seed, cfg.sentiment)
    scores = [(r.role_id, r.domain, score_text(r.packaged_text, lexicon, cfg.sentiment)) for r in responses]
    report = aggregate(scores, cfg.roster.domains)
    write_json(run_dir / "sentiment.json", report.to_dict())
    atomic_write(run_dir / "lexicon.tsv", lexicon.to_tsv())
    return report


# eval -----------------------------------------------------------------


def evaluate_run(run_dir: str | Path, cfg: RunConfig, gateway: Gateway | None = None, judge_gateway: Gateway | None = None) -> dict:
    run_dir = Path(run_dir)
    qpath = run_dir / "questions.json"
    if not qpath.exists():
        raise InvalidInput(f"missing run artifact: {qpath}")
    qs = QuestionSet.from_dict(json.loads(qpath.read_text(encoding="utf-8")), cfg.aqg.k, cfg.aqg.theta_cap)
    backend = gateway or Gateway(cfg.backend)
    judge_backend = judge_gateway or Gateway(cfg.judge_backend)
    jlog = JudgeLog()

    aqg_table = evaluate_aqg([qs], judge_backend, topic_categories(cfg), jlog)

    roles = _roles(cfg)
    agents = stratified_sample(roles, cfg.eval_per_domain, cfg.eval_seed)
    probes = cfg.probe_questions or bundled_probe_questions()
    answers = collect_agent_answers(agents, probes, cfg, backend)
    domain_table, agent_table = evaluate_agents(answers, judge_backend, cfg.roster.domains, jlog)

    result = {
        "aqg": aqg_table.to_dict(),
        "agents": domain_table.to_dict(),
        "agents_individual": agent_table.to_dict(),
        "sampled_agents": [a.entity_id for a in agents],
        "probe_questions": probes,
        "judged": len(jlog.scores),
        "excluded": len(jlog.excluded),
    }
    write_json(run_dir / "evaluation.json", result)
    atomic_write(run_dir / "evaluation_aqg.csv", aqg_table.to_csv())
    atomic_write(run_dir / "evaluation_agents.csv", domain_table.to_csv())
    audit = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in jlog.audit_records())
    atomic_write(run_dir / "audit" / "judge_replies.jsonl", audit)
    result["tables"] = {"aqg": aqg_table.render(), "agents": domain_table.render()}
    return result


def collect_agent_answers(agents, probes, cfg: RunConfig, backend: Gateway) -> list[AgentAnswer]:
    """Hidden per-entity answers to the probe questions, for judging only."""
    translations = TranslationCache()

    def one(job):
        agent, text = job
        q = Question(text, classify_format(text))
        try:
            qt = translations.get_or_compute(
                (text, agent.language),
                lambda: translate_question(q, agent.language, backend, source_language=cfg.language),
            )
            ctx = retrieve_context(agent, embed(qt, cfg.embedder), cfg.retrieval_k)
            resp = answer_as_entity(agent, qt, ctx, backend)
        except MavensError as exc:
            log.warning("probe %r for %s failed: %s", text, agent.entity_id, exc)
            return None
        knowledge = "\n\n".join(t for _, t, _ in ctx)
        return AgentAnswer(agent.entity_id, agent.domain, text, resp.response_text, knowledge)

    jobs = [(a, p) for a in agents for p in probes]
    return [r for r in parallel_map(one, jobs, backend.parallelism) if r is not None]


# ask ------------------------------------------------------------------


def ask(role_id: str, question: str, cfg: RunConfig, gateway: Gateway | None = None) -> dict:
    roles = _roles(cfg)
    match = [r for r in roles if role_id in (r.role_id, r.domain)]
    if not match:
        raise InvalidInput(f"unknown role {role_id!r}; known: {[r.role_id for r in roles]}")
    backend = gateway or Gateway(cfg.backend)
    q = Question(question, classify_format(question))
    r = run_role(match[0], q, MoaConfig(cfg.retrieval_k, cfg.language), backend, cfg.embedder)
    return r.to_dict()
