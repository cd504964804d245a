"""Offline tooling: generate puzzles, grade arrangements, render
explanations with the fallback provider, replay event logs, and validate
problems.

Exactly one JSON document goes to stdout; diagnostics go to stderr as an
ApiError-style JSON object. Exit codes: 0 success (and, for grade, a
correct arrangement), 1 an incorrect grade, 2 a domain or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile

from .align import align, normalize_source
from .errors import DomainError
from .evaluator import CodeEvaluator, eval_result_to_dict
from .explain import explanation_bundle
from .generate import GenConfig, generate_puzzle
from .grading import grade_parsons, grade_result_to_dict
from .model import (
    arrangement_from_dict,
    problem_from_dict,
    puzzle_from_dict,
    puzzle_to_dict,
)
from .providers import make_provider
from .session import SessionService, SessionStore, replay_log, session_to_dict


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def cmd_generate(args) -> int:
    with open(args.solution) as fh:
        solution = normalize_source(fh.read())
    with open(args.attempt) as fh:
        student = normalize_source(fh.read())
    alignment = align(student, solution)
    cfg = GenConfig(
        max_distractors=args.max_distractors,
        pair_threshold=args.pair_threshold,
        seed=args.seed,
    )
    puzzle = generate_puzzle(alignment, solution, student, cfg)
    _emit(puzzle_to_dict(puzzle))
    return 0


def cmd_grade(args) -> int:
    puzzle = puzzle_from_dict(_read_json(args.puzzle))
    arr = arrangement_from_dict(_read_json(args.arrangement))
    result = grade_parsons(puzzle, arr)
    _emit(grade_result_to_dict(result))
    return 0 if result.correct else 1


def cmd_explain(args) -> int:
    puzzle = puzzle_from_dict(_read_json(args.puzzle))
    provider = make_provider("null" if args.fallback else "http")
    _emit(explanation_bundle(puzzle, provider, seed=args.seed))
    return 0


def cmd_replay(args) -> int:
    events = []
    with open(args.log) as fh:
        for line in fh:
            if line.strip():
                events.append(json.loads(line))
    with tempfile.TemporaryDirectory() as data_dir:
        store = SessionStore(data_dir)
        if args.problem:
            store.save_problem(problem_from_dict(_read_json(args.problem)))
        service = SessionService(store, make_provider(args.provider))
        final = replay_log(events, service)
        _emit(session_to_dict(final))
    return 0


def cmd_validate_problem(args) -> int:
    problem = problem_from_dict(_read_json(args.problem))
    evaluator = CodeEvaluator(args.interpreter)
    result = evaluator.run(problem.solution_source, list(problem.test_suite))
    _emit(eval_result_to_dict(result))
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parsons-scaffold")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a puzzle from solution + attempt files")
    p.add_argument("--solution", required=True)
    p.add_argument("--attempt", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-distractors", type=int, default=3)
    p.add_argument("--pair-threshold", type=float, default=0.3)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("grade", help="grade an arrangement against a puzzle")
    p.add_argument("--puzzle", required=True)
    p.add_argument("--arrangement", required=True)
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("explain", help="render the explanation bundle for a puzzle")
    p.add_argument("--puzzle", required=True)
    p.add_argument("--fallback", action="store_true",
                   help="use the deterministic offline generator")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("replay", help="rebuild the final session from an event log")
    p.add_argument("--log", required=True)
    p.add_argument("--problem", help="problem JSON needed to regenerate puzzles")
    p.add_argument("--provider", default="null", choices=["null", "replay"])
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("validate-problem",
                       help="run the reference solution against its own suite")
    p.add_argument("--problem", required=True)
    p.add_argument("--interpreter", default=None)
    p.set_defaults(func=cmd_validate_problem)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        sys.stderr.write(
            json.dumps({"code": exc.code, "message": exc.message}) + "\n"
        )
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(
            json.dumps({"code": "usage_error", "message": str(exc)}) + "\n"
        )
        return 2


if __name__ == "__main__":
    sys.exit(main())
