"""One test per acceptance criterion, at the stated tolerances and time budgets."""

import json
import math
import random
import time

import numpy as np

from mavens import pipeline
from mavens.aqg import AqgConfig, QuestionFormat, build_question_set
from mavens.cli import main
from mavens.config import load_config
from mavens.embedding import EmbedderSpec, l2_sq
from mavens.evaluation import (
    AGENT_DIMS,
    RETRY_SUFFIX,
    AgentAnswer,
    JudgeLog,
    JudgeScore,
    aggregate_scores,
    evaluate_agents,
    evaluate_aqg,
    parse_score,
)
from mavens.llm import BackendSpec, Gateway
from mavens.opinion import choose_k, inertia_curve, kmeans, tfidf
from mavens.sentiment import SentimentLexicon, score_text
from mavens.testkit import (
    adjusted_rand_index,
    aqg_fixture_table,
    brute_force_topk,
    reference_l2_sq,
    reference_mean_variance,
    reference_tfidf,
)
from mavens.vector_index import FlatIndex

from conftest import TOPIC, write_project


def mock(table):
    return Gateway(BackendSpec(), table=table)


def test_ac01_curated_set_cardinality():
    t0 = time.perf_counter()
    topics = [t for ts in pipeline.bundled_topics().values() for t in ts]
    assert len(topics) == 15
    backend = mock(aqg_fixture_table(topics, n_per_format=2))
    sets = [build_question_set(t, backend, EmbedderSpec(), AqgConfig(k=2)) for t in topics]
    assert all(len(qs.curated) == 12 for qs in sets)
    assert sum(len(qs.curated) for qs in sets) == 180
    for qs in sets:
        assert QuestionFormat.OTHER not in {q.format for q in qs.curated}
    assert time.perf_counter() - t0 < 5


def test_ac02_knn_exactness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    for _ in range(100):
        n = int(rng.integers(1, 1001))
        dims = int(rng.integers(1, 65))
        k = int(rng.integers(0, 20))
        vecs = rng.normal(size=(n, dims)).astype(np.float32)
        if rng.random() < 0.3:
            vecs = np.round(vecs).astype(np.float32)  # force ties
        index = FlatIndex(dims)
        for i, v in enumerate(vecs):
            index.add(f"v{i}", v)
        q = rng.normal(size=dims).astype(np.float32)
        got = [i for i, _ in index.search_top_k(q, k)]
        assert got == brute_force_topk([(f"v{i}", v.tolist()) for i, v in enumerate(vecs)], q.tolist(), k)
    assert time.perf_counter() - t0 < 10


def test_ac03_distance_formula():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    for _ in range(1000):
        dims = int(rng.integers(1, 128))
        a, b = rng.normal(size=dims), rng.normal(size=dims)
        ref = reference_l2_sq(a, b)
        assert math.isclose(l2_sq(a, b), ref, rel_tol=1e-9, abs_tol=1e-300)
    assert time.perf_counter() - t0 < 1


def test_ac04_tfidf_oracle():
    t0 = time.perf_counter()
    rng = random.Random(4)
    words = "war peace market price fear hope trade growth army troops news rise fall".split()
    for _ in range(10):
        sents = [" ".join(rng.choices(words, k=rng.randint(1, 9))) for _ in range(rng.randint(1, 20))]
        m = tfidf(sents)
        vocab, rows = reference_tfidf(sents)
        assert m.vocabulary == vocab
        assert np.allclose(m.rows, np.array(rows), rtol=0, atol=1e-9)
    assert time.perf_counter() - t0 < 2


def test_ac05_kmeans_and_knee():
    t0 = time.perf_counter()
    for seed in range(20):
        rng = np.random.default_rng(seed)
        centers = np.array([[0.0, 0.0], [10.0, 0.0], [5.0, 9.0]])
        labels = np.repeat([0, 1, 2], 40)
        x = centers[labels] + rng.normal(scale=0.5, size=(120, 2))
        curve, fits = inertia_curve(x, range(1, 9), seed=seed, restarts=4)
        k = choose_k(curve)
        assert k == 3
        assert adjusted_rand_index(fits[k].assignments, labels.tolist()) >= 0.99
        hist = kmeans(x, 3, seed=seed, restarts=1).inertia_history
        assert all(b <= a + 1e-9 * max(1.0, a) for a, b in zip(hist, hist[1:]))
    assert time.perf_counter() - t0 < 10


def test_ac06_sentiment_bounds_and_monotonicity():
    t0 = time.perf_counter()
    rng = random.Random(6)
    pool = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa"]
    fillers = ["the", "cat", "sat", "on", "mat", "today", "."]
    for _ in range(1000):
        terms = rng.sample(pool, rng.randint(2, len(pool)))
        entries = {t: rng.choice([-1, 1]) * rng.uniform(0.05, 1.0) for t in terms}
        lex = SentimentLexicon(entries, ["not", "never"])
        toks = rng.choices(terms + fillers + ["not"], k=rng.randint(0, 25))
        text = " ".join(toks)
        s = score_text(text, lex)
        assert -1.0 <= s <= 1.0
        pos = [t for t, p in entries.items() if p > 0]
        neg = [t for t, p in entries.items() if p < 0]
        if pos:
            # a sentence break first so no negator reaches the appended terms
            assert score_text(text + " . " + " ".join(rng.choices(pos, k=3)), lex) >= s - 1e-12
        if neg:
            assert score_text(text + " . " + " ".join(rng.choices(neg, k=3)), lex) <= s + 1e-12
    lex = SentimentLexicon({"good": 1.0, "bad": -1.0}, ["not"])
    assert score_text("good good", lex) == 1.0
    assert score_text("not good", lex) == -1.0
    assert score_text("nothing to see", lex) == 0.0
    assert time.perf_counter() - t0 < 5


def test_ac07_aggregation_arithmetic():
    t0 = time.perf_counter()
    scores = [JudgeScore("RAW", "agent", str(v), v) for v in (8, 9, 10)]
    cell = aggregate_scores(scores).cell("agent", "RAW")
    assert f"{cell.mean:.3f}" == "9.000" and f"{cell.variance:.3f}" == "0.667"

    # per-question fixtures for a domain x agent layout, then the domain table
    rng = random.Random(7)
    domains = {"politics": ["p1", "p2"], "economics": ["e1", "e2"], "military": ["m1", "m2"]}
    answers, table = [], {}
    for d, agents in domains.items():
        for a in agents:
            for q in range(10):
                answers.append(AgentAnswer(a, d, f"q{q}", f"{a} answer {q}", f"{a} knowledge"))
                table[f"{a}#{len(answers) - 1}"] = {dim: rng.randint(0, 10) for dim in AGENT_DIMS}

    class Judge:
        parallelism = 1

        def chat(self, system, user):
            text = user[len("Text A: ") :] if user.startswith("Text A") else user
            idx = next(i for i, a in enumerate(answers) if a.text == text)
            dim = "RAW" if "addresses the event" in system else "CUS" if "speaking style" in system else "SPE"
            return str(table[f"{answers[idx].agent_id}#{idx}"][dim])

    domain_table, _ = evaluate_agents(answers, Judge(), list(domains))
    for d, agents in domains.items():
        agent_means = {
            dim: [reference_mean_variance([table[k][dim] for k in table if k.split("#")[0] == a])[0] for a in agents]
            for dim in AGENT_DIMS
        }
        row = {dim: reference_mean_variance(v)[0] for dim, v in agent_means.items()}
        for dim in AGENT_DIMS:
            assert abs(domain_table.cell(d, dim).mean - row[dim]) <= 1e-12
        assert abs(domain_table.cell(d, "Avg.").mean - reference_mean_variance(list(row.values()))[0]) <= 1e-12
    for dim in list(AGENT_DIMS) + ["Avg."]:
        col = [domain_table.cell(d, dim).mean for d in domains]
        assert abs(domain_table.cell("Avg.", dim).mean - reference_mean_variance(col)[0]) <= 1e-12
    assert time.perf_counter() - t0 < 1


def _digests(run_dir):
    return json.loads((run_dir / "manifest.json").read_text())["artifacts"]


def test_ac08_end_to_end_determinism(tmp_path):
    t0 = time.perf_counter()
    proj = write_project(tmp_path / "p", ["politics", "military"], 2)
    cfg_path = str(proj["config"])
    assert main(["ingest", "--corpus", str(proj["corpus"]), "--config", cfg_path]) == 0
    assert main(["predict", "--topic", TOPIC, "--config", cfg_path, "--run-id", "one"]) == 0
    first = _digests(proj["root"] / "runs" / "one")
    assert main(["predict", "--topic", TOPIC, "--config", cfg_path, "--run-id", "one"]) == 0
    second = _digests(proj["root"] / "runs" / "one")
    assert first == second
    assert set(first) >= {"questions.json", "responses.json", "opinions.json", "clusters.json", "sentiment.json"}
    assert time.perf_counter() - t0 < 30


def test_ac09_anonymity_scan(tmp_path):
    proj = write_project(tmp_path / "p", ["politics", "military"], 2)
    cfg_path = str(proj["config"])
    assert main(["ingest", "--corpus", str(proj["corpus"]), "--config", cfg_path]) == 0
    assert main(["predict", "--topic", TOPIC, "--config", cfg_path, "--run-id", "anon"]) == 0
    cfg = load_config(proj["config"])
    roster = json.loads((proj["root"] / "kb" / "roster.json").read_text())
    entity_ids = [e for ids in roster.values() for e in ids]
    raw = [n for names in proj["names"].values() for n in names]
    forbidden = entity_ids + raw + [n.replace(" ", "_") for n in raw] + list(cfg.deny_list)
    run = proj["root"] / "runs" / "anon"
    for name in ("responses.json", "opinions.json", "sentiment.json"):
        text = (run / name).read_text(encoding="utf-8")
        hits = [f for f in forbidden if f in text]
        assert hits == [], f"{name} leaks {hits}"


def test_ac10_judge_parsing():
    t0 = time.perf_counter()
    reply = (
        "Text A discusses the same event with a similar stance, although it adds a few details. "
        "I would give this question a similarity score of 9."
    )
    assert parse_score(reply, 0, 10) == 9

    from mavens.aqg import Question, QuestionSet

    qs = QuestionSet(TOPIC, "Background.", {}, [Question("What happened?", QuestionFormat.WHAT)], 2, 10)
    aqg = evaluate_aqg([qs], mock({"": "7"}))
    assert all(c.fmt() == "7.000" for row in aqg.rows.values() for c in row.values())
    answers = [AgentAnswer("a1", "politics", "q", "text", "kb"), AgentAnswer("a2", "military", "q", "text2", "kb")]
    dom, _ = evaluate_agents(answers, mock({"": "7"}))
    assert all(f"{c.mean:.3f}" == "7.000" for row in dom.rows.values() for c in row.values())

    # first reply unparseable, the retry answers; a second subject never parses
    log = JudgeLog()
    table = {"Question: What happened?": "no idea", "Question: What happened?" + RETRY_SUFFIX: "8", "": "n/a"}
    qs2 = QuestionSet(TOPIC, "Background.", {}, [Question("What happened?", QuestionFormat.WHAT), Question("Why now?", QuestionFormat.WHY)], 2, 10)
    aqg = evaluate_aqg([qs2], mock({**table, "Topic: ": "9"}), log_=log)
    assert aqg.cell("all", "RQQ").mean == 8.0 and aqg.cell("all", "RQQ").n == 1
    assert {(e["dimension"], e["subject_id"]) for e in log.excluded} == {("RQQ", f"q:{TOPIC}#1"), ("RBQ", f"q:{TOPIC}#1")}
    assert all(len(e["replies"]) == 2 for e in log.excluded)
    assert time.perf_counter() - t0 < 2


def test_ac11_roster_shape(tmp_path):
    domains = ["politics", "economics", "technology", "society", "entertainment", "military"]
    proj = write_project(tmp_path / "p", domains, 10, sentences=30)
    cfg = load_config(proj["config"])
    summary = pipeline.ingest(proj["corpus"], cfg)
    assert sum(summary["entities"].values()) == 60
    roles = pipeline.load_roster(cfg.kb_path, cfg.roster)
    assert len(roles) == 6 and sum(len(r.entities) for r in roles) == 60
    run_dir, manifest = pipeline.predict(TOPIC, cfg, "shape")
    assert manifest["counts"]["questions"] == 12
    responses = json.loads((run_dir / "responses.json").read_text())
    assert len(responses) == 72
