import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mavens.agent_store import GeneralizedRole, build_entity
from mavens.embedding import EmbedderSpec
from mavens.errors import InvalidInput, UnparseableScore
from mavens.evaluation import (
    AGENT_DIMS,
    DIMENSIONS,
    AgentAnswer,
    Cell,
    JudgeLog,
    JudgeScore,
    ScoreTable,
    aggregate_scores,
    evaluate_agents,
    judge,
    parse_score,
    parse_table_csv,
    stratified_sample,
)
from mavens.llm import BackendSpec, Gateway
from mavens.testkit import reference_mean_variance


def gw(table):
    return Gateway(BackendSpec(), table=table)


@pytest.mark.parametrize(
    "reply,low,high,expected",
    [
        ("...I would give this question a similarity score of 9.", 0, 10, 9),
        ("Score: 8/10", 0, 10, 8),
        ("I rate it 7.5 overall, so 7", 0, 10, 7),
        ("11 is too high; 10", 1, 10, 10),
        ("0", 1, 10, None),
        ("0", 0, 10, 0),
        ("no number", 0, 10, None),
        ("v2 gets 6", 0, 10, 6),
    ],
)
def test_parse_score(reply, low, high, expected):
    assert parse_score(reply, low, high) == expected


def test_scale_bounds():
    assert (DIMENSIONS["RBT"].low, DIMENSIONS["RBT"].high) == (1, 10)
    assert (DIMENSIONS["RAW"].low, DIMENSIONS["RAW"].high) == (0, 10)


def test_judge_retry_then_raise():
    with pytest.raises(UnparseableScore) as info:
        judge("RQQ", {"question": "What?"}, gw({"": "hmm"}))
    assert len(info.value.replies) == 2


def test_population_variance():
    cell = aggregate_scores([JudgeScore("RAW", "s", "", v) for v in (8, 9, 10)]).cell("s", "RAW")
    assert (round(cell.mean, 3), round(cell.variance, 3), cell.n) == (9.0, 0.667, 3)
    assert cell.fmt() == "9.000 (0.667)"


def test_single_rating_has_no_variance():
    t = aggregate_scores([JudgeScore("RAW", "a", "", 5), JudgeScore("RAW", "b", "", 7)], {"a": "g", "b": "g"})
    assert t.cell("g", "RAW") == Cell(6.0, None, 2)


def test_aggregate_requires_scores():
    with pytest.raises(InvalidInput):
        aggregate_scores([])


@given(st.lists(st.integers(0, 10), min_size=2, max_size=20))
def test_aggregate_matches_reference(vals):
    cell = aggregate_scores([JudgeScore("SPE", "x", "", v) for v in vals]).cell("x", "SPE")
    m, v = reference_mean_variance(vals)
    assert cell.mean == pytest.approx(m, abs=1e-12) and cell.variance == pytest.approx(v, abs=1e-12)
    assert 0 <= cell.mean <= 10


def _table(rows, dims):
    return ScoreTable({g: {d: Cell(v, None, 1) for d, v in zip(dims, vals)} for g, vals in rows.items()}, list(dims))


def test_reference_agent_table_arithmetic():
    rows = {
        "Politics": (6.250, 7.800, 7.00),
        "Economics": (4.200, 7.700, 6.900),
        "Technology": (3.750, 7.950, 8.350),
        "Society": (5.950, 7.700, 8.750),
        "Entertainment": (3.100, 8.150, 9.250),
        "Military": (5.600, 6.050, 8.800),
    }
    t = _table(rows, AGENT_DIMS).with_average_column(AGENT_DIMS).with_average_row()
    got = {g: [f"{t.cell(g, d).mean:.3f}" for d in t.dimensions] for g in ("Politics", "Economics", "Society", "Avg.")}
    assert got["Politics"][-1] == "7.017"
    assert got["Economics"][-1] == "6.267"
    assert got["Society"][-1] == "7.467"
    assert got["Avg."] == ["4.808", "7.558", "8.175", "6.847"]


def test_reference_question_table_averages():
    # inputs are already rounded to 3 places, so allow one unit of rounding
    dims = ("RBT", "RQQ", "RBQ")
    gpt = {"Health": (10.0, 9.942, 9.0), "Economics": (10.0, 10.0, 8.175), "Psychology": (10.0, 9.967, 7.983)}
    avg = _table(gpt, dims).with_average_row()
    for d, want in zip(dims, (10.000, 9.969, 8.386)):
        assert abs(avg.cell("Avg.", d).mean - want) <= 0.0015

    manual = {"Health": (8.067, 9.622, 8.289), "Economics": (8.667, 8.667, 8.933), "Psychology": (9.467, 9.844, 9.133)}
    # the spread reported beside the average is the sample variance of the category means
    avg = _table(manual, dims).with_average_row(ddof=1)
    for d, (m, v) in zip(dims, ((8.733, 0.493), (9.378, 0.392), (8.785, 0.195))):
        assert abs(avg.cell("Avg.", d).mean - m) <= 0.0015
        assert abs(avg.cell("Avg.", d).variance - v) <= 0.0015
    pop = _table(manual, dims).with_average_row(ddof=0)
    assert abs(pop.cell("Avg.", "RBT").variance - 0.493) > 0.1


def test_off_domain_zero_pulls_raw_down():
    answers = [AgentAnswer("a1", "entertainment", f"q{i}", f"text {i}", "kb") for i in range(10)]

    class J:
        parallelism = 1

        def chat(self, system, user):
            if "addresses the event" in system:
                return "0" if user == "text 3" else "6"
            return "8"

    dom, agents = evaluate_agents(answers, J())
    assert agents.cell("a1", "RAW").mean == pytest.approx((9 * 6 + 0) / 10)
    assert dom.cell("entertainment", "RAW").mean == pytest.approx(5.4)
    assert dom.cell("entertainment", "Avg.").mean == pytest.approx((5.4 + 8 + 8) / 3)


def test_csv_roundtrip():
    t = ScoreTable({"Health": {"RBT": Cell(8.0667, 2.8133, 3), "RQQ": Cell(9.6, None, 1)}}, ["RBT", "RQQ"])
    parsed = parse_table_csv(t.to_csv())
    assert parsed == {"Health": {"RBT": (8.067, 2.813), "RQQ": (9.6, None)}}
    assert t.to_csv().splitlines()[1] == "Health,8.067 (2.813),9.600"


def test_judge_log_audit():
    log = JudgeLog()
    b = gw({"Question: good": "9", "": "??"})
    log.run("RQQ", {"question": "good"}, b, "q1")
    log.run("RQQ", {"question": "bad"}, b, "q2")
    recs = log.audit_records()
    assert [r["score"] for r in recs] == [9, None]


def test_stratified_sample_reproducible():
    spec = EmbedderSpec(dims=16)
    roles = []
    for d in ("politics", "military"):
        ents = [build_entity(f"{d[:4]}-{i:02d}", d, "en", "text words here.", 64, spec) for i in range(1, 11)]
        roles.append(GeneralizedRole(f"role-{d}", d, ents))
    a = [e.entity_id for e in stratified_sample(roles, 2, seed=3)]
    b = [e.entity_id for e in stratified_sample(roles, 2, seed=3)]
    assert a == b and len(a) == 4
    assert sum(x.startswith("poli") for x in a) == 2
    assert len({tuple(e.entity_id for e in stratified_sample(roles, 2, seed=s)) for s in range(10)}) > 1
