"""Exact grading of Parsons arrangements.

Correctness is line-list equality with the reference solution plus a
no-distractor rule; feedback exposes only the earliest deviation by
answer-area position.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Arrangement, ParsonsPuzzle, expand_arrangement

ERROR_KINDS = (
    "wrong-block",
    "wrong-indent",
    "distractor-used",
    "missing-block",
    "extra-block",
)


@dataclass(frozen=True)
class GradeError:
    position: int
    kind: str


@dataclass(frozen=True)
class GradeResult:
    correct: bool
    first_error: GradeError | None
    attempt_number: int


def grade_parsons(
    puzzle: ParsonsPuzzle, arr: Arrangement, attempt_number: int = 1
) -> GradeResult:
    expanded = expand_arrangement(puzzle, arr)  # validates block ids up front
    solution = [(ln.normalized, ln.indent) for ln in puzzle.solution_lines()]
    used_distractor = any(
        puzzle.block(bid).kind == "distractor" for bid in arr.block_ids()
    )
    if expanded == solution and not used_distractor:
        return GradeResult(correct=True, first_error=None, attempt_number=attempt_number)

    expected = sorted(
        puzzle.blocks_of_kind("movable"), key=lambda b: b.solution_pos
    )
    error = None
    for pos, (bid, indent) in enumerate(arr.placements):
        block = puzzle.block(bid)
        if block.kind == "distractor":
            error = GradeError(pos, "distractor-used")
            break
        if pos >= len(expected):
            error = GradeError(pos, "extra-block")
            break
        if block.id != expected[pos].id:
            error = GradeError(pos, "wrong-block")
            break
        if indent != expected[pos].lines[0].indent:
            error = GradeError(pos, "wrong-indent")
            break
    if error is None:
        # Every placed block was right; the arrangement is a strict prefix.
        error = GradeError(len(arr.placements), "missing-block")
    return GradeResult(correct=False, first_error=error, attempt_number=attempt_number)


def grade_result_to_dict(result: GradeResult) -> dict:
    return {
        "correct": result.correct,
        "first_error": None
        if result.first_error is None
        else {"position": result.first_error.position, "kind": result.first_error.kind},
        "attempt_number": result.attempt_number,
    }
