import json
from pathlib import Path

import pytest

from mavens.config import load_config
from mavens.testkit import SyntheticCorpusSpec, generate_corpus, judge_fixture_table, pipeline_fixture_table

TOPIC = "Russo-Ukrainian War"

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance.append((name, report.outcome, round(report.duration, 3)))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, secs in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}  ({secs:.3f}s)")


def write_project(root: Path, domains, per_domain: int, sentences: int = 40, topics=(TOPIC,), judge=None, seed=0):
    """Synthetic corpus, mock fixtures and a config file under ``root``."""
    root.mkdir(parents=True, exist_ok=True)
    names = generate_corpus(
        SyntheticCorpusSpec(domains=list(domains), entities_per_domain=per_domain, sentences_per_entity=sentences, seed=seed),
        root / "corpus",
    )
    (root / "fixtures.json").write_text(json.dumps(pipeline_fixture_table(list(topics))), encoding="utf-8")
    (root / "judge.json").write_text(json.dumps(judge or judge_fixture_table()), encoding="utf-8")
    cfg = {
        "backend": {"kind": "mock", "fixtures": "fixtures.json"},
        "judge": {"kind": "mock", "fixtures": "judge.json"},
        "roster": {"domains": list(domains), "entities_per_domain": per_domain},
        "analysis": {"restarts": 4},
    }
    (root / "config.json").write_text(json.dumps(cfg), encoding="utf-8")
    return {"root": root, "corpus": root / "corpus", "config": root / "config.json", "names": names}


@pytest.fixture
def small_project(tmp_path):
    return write_project(tmp_path / "proj", ["politics", "military"], 2)


@pytest.fixture
def small_cfg(small_project):
    return load_config(small_project["config"])
