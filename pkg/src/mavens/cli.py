"""``mavens`` command line: ingest, predict, eval, ask.

Exit codes: 0 success, 1 stage failure, 2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .config import load_config
from .errors import FormatError, InvalidInput, LoadFailure, MavensError


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mavens", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="build the knowledge base from a corpus directory")
    s.add_argument("--corpus", required=True)
    s.add_argument("--config")

    s = sub.add_parser("predict", help="run the full chain for one topic")
    s.add_argument("--topic", required=True)
    s.add_argument("--config")
    s.add_argument("--run-id")

    s = sub.add_parser("eval", help="judge-score a finished run")
    s.add_argument("--run", required=True)
    s.add_argument("--config")

    s = sub.add_parser("ask", help="ask one generalized role a question")
    s.add_argument("--role", required=True)
    s.add_argument("--question", required=True)
    s.add_argument("--config")
    return p


def _run(args) -> int:
    cfg = load_config(args.config)
    if args.command == "ingest":
        summary = pipeline.ingest(args.corpus, cfg)
        for domain, n in summary["entities"].items():
            print(f"{domain:<14} {n:>3} entities {summary['chunks'][domain]:>6} chunks")
        for f in summary["failures"]:
            print(f"failed: {f['entity_id']}: {f['error']}", file=sys.stderr)
        return 0
    if args.command == "predict":
        run_dir, manifest = pipeline.predict(args.topic, cfg, args.run_id)
        print(manifest["sentiment_table"])
        print(f"\nrun: {run_dir}  ({manifest['total_seconds']:.2f}s, {len(manifest['failures'])} failures)")
        return 0
    if args.command == "eval":
        result = pipeline.evaluate_run(args.run, cfg)
        print(result["tables"]["aqg"])
        print()
        print(result["tables"]["agents"])
        print(f"\njudged {result['judged']}, excluded {result['excluded']}")
        return 0
    if args.command == "ask":
        out = pipeline.ask(args.role, args.question, cfg)
        print(json.dumps(out, ensure_ascii=False, indent=2))
        return 0
    return 2


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except (InvalidInput, LoadFailure, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except pipeline.StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MavensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
