"""Full 6-domain x 10-entity run on synthetic data with the mock backend.

Builds corpus, fixtures and config in a work directory, then runs ingest,
predict and eval and prints counts and wall times next to reference figures
from a GPT-4 run on a private social-media corpus.  Those are printed for
orientation only; a mock run is not expected to match them.
"""

import argparse
import json
import time
from pathlib import Path

from mavens import pipeline
from mavens.config import load_config
from mavens.testkit import SyntheticCorpusSpec, generate_corpus, judge_fixture_table, pipeline_fixture_table

REPORTED = {
    "runtime_s": 840.54,
    "opinion_sentences": 550,
    "clusters": 8,
    "sentiment": {"military": -0.0909, "politics": -0.0538},
    "agents_avg": {"RAW": 4.808, "CUS": 7.558, "SPE": 8.175, "Avg.": 6.847},
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--work", default="case_study")
    ap.add_argument("--topic", default="Russo-Ukrainian War")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    work = Path(args.work)
    work.mkdir(parents=True, exist_ok=True)
    bias = {"military": -0.15, "politics": 0.05, "entertainment": 0.1}
    generate_corpus(SyntheticCorpusSpec(seed=args.seed, polarity_bias=bias), work / "corpus")
    (work / "fixtures.json").write_text(json.dumps(pipeline_fixture_table([args.topic]), ensure_ascii=False))
    (work / "judge.json").write_text(json.dumps(judge_fixture_table()))
    (work / "config.json").write_text(
        json.dumps(
            {
                "backend": {"kind": "mock", "fixtures": "fixtures.json"},
                "judge": {"kind": "mock", "fixtures": "judge.json"},
                "analysis": {"seed": args.seed},
            },
            indent=2,
        )
    )
    cfg = load_config(work / "config.json")

    t0 = time.perf_counter()
    summary = pipeline.ingest(work / "corpus", cfg)
    t_ingest = time.perf_counter() - t0
    run_dir, manifest = pipeline.predict(args.topic, cfg, run_id=f"case-{args.seed}")
    t0 = time.perf_counter()
    result = pipeline.evaluate_run(run_dir, cfg)
    t_eval = time.perf_counter() - t0

    print(f"entities ingested   {sum(summary['entities'].values())}  ({t_ingest:.2f}s)")
    print(f"curated questions   {manifest['counts']['questions']}")
    print(f"role responses      {manifest['counts']['responses']}")
    print(f"opinion sentences   {manifest['counts']['opinion_sentences']}  (reported: {REPORTED['opinion_sentences']})")
    print(f"clusters            {manifest['counts']['clusters']}  (reported: {REPORTED['clusters']})")
    print(f"predict wall time   {manifest['total_seconds']:.2f}s  (reported: {REPORTED['runtime_s']}s)")
    print(f"eval wall time      {t_eval:.2f}s")
    print()
    print(manifest["sentiment_table"])
    print(f"reported: {REPORTED['sentiment']}")
    print()
    print(result["tables"]["agents"])
    print(f"reported Avg.: {REPORTED['agents_avg']}")
    print(f"\nartifacts in {run_dir}")


if __name__ == "__main__":
    main()
