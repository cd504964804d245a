import pytest

from parsons_scaffold.align import align, normalize_source
from parsons_scaffold.generate import GenConfig, generate_puzzle
from parsons_scaffold.grading import grade_parsons
from parsons_scaffold.model import Arrangement
from conftest import corpus_puzzles
from oracles import arrangement_is_solution, enumerate_arrangements


def canonical(puzzle):
    movable = sorted(
        puzzle.blocks_of_kind("movable"), key=lambda b: b.solution_pos
    )
    return Arrangement(tuple((b.id, b.lines[0].indent) for b in movable))


@pytest.fixture
def small_puzzle():
    # 3 movable blocks + 1 paired distractor.
    solution = normalize_source("def f(x):\n    y = x + 1\n    return y\n")
    student = normalize_source("def f(x):\n    y = x + 2\n")
    alignment = align(student, solution)
    puzzle = generate_puzzle(alignment, solution, student, GenConfig(seed=9))
    # "def f(x):" matches, 2 movable remain; widen by regenerating from an
    # empty attempt plus an injected distractor instead.
    student2 = normalize_source("y = x + 2\n")
    alignment2 = align(student2, solution)
    return generate_puzzle(alignment2, solution, student2, GenConfig(seed=9))


class TestGradeParsons:
    def test_solution_arrangement_correct(self, total_puzzle):
        result = grade_parsons(total_puzzle, canonical(total_puzzle))
        assert result.correct
        assert result.first_error is None

    def test_wrong_indent_reported(self, total_puzzle):
        arr = canonical(total_puzzle)
        placements = list(arr.placements)
        bid, indent = placements[1]
        placements[1] = (bid, indent + 1)
        result = grade_parsons(total_puzzle, Arrangement(tuple(placements)))
        assert not result.correct
        assert result.first_error.kind == "wrong-indent"
        assert result.first_error.position == 1

    def test_wrong_order_reported(self, total_puzzle):
        arr = canonical(total_puzzle)
        placements = list(arr.placements)
        placements[0], placements[1] = placements[1], placements[0]
        result = grade_parsons(total_puzzle, Arrangement(tuple(placements)))
        assert not result.correct
        assert result.first_error.kind == "wrong-block"
        assert result.first_error.position == 0

    def test_distractor_reported_where_it_sits(self, total_puzzle):
        arr = canonical(total_puzzle)
        distractor = total_puzzle.blocks_of_kind("distractor")[0]
        placements = list(arr.placements)
        placements.insert(1, (distractor.id, 1))
        result = grade_parsons(total_puzzle, Arrangement(tuple(placements)))
        assert not result.correct
        assert result.first_error.kind == "distractor-used"
        assert result.first_error.position == 1

    def test_prefix_reports_missing_block_at_end(self, total_puzzle):
        arr = canonical(total_puzzle)
        placements = list(arr.placements)[:-1]
        result = grade_parsons(total_puzzle, Arrangement(tuple(placements)))
        assert not result.correct
        assert result.first_error.kind == "missing-block"
        assert result.first_error.position == len(placements)

    def test_attempt_number_echoed_without_affecting_verdict(self, total_puzzle):
        arr = canonical(total_puzzle)
        r1 = grade_parsons(total_puzzle, arr, attempt_number=1)
        r5 = grade_parsons(total_puzzle, arr, attempt_number=5)
        assert r1.correct == r5.correct
        assert r5.attempt_number == 5

    def test_exhaustive_oracle_small_puzzle(self, small_puzzle):
        assert len([b for b in small_puzzle.blocks if b.kind != "fixed"]) <= 4
        indent_choices = sorted(
            {ln.indent for ln in small_puzzle.solution_lines()}
        )
        correct_count = 0
        for arr in enumerate_arrangements(small_puzzle, indent_choices):
            verdict = arrangement_is_solution(small_puzzle, arr)
            graded = grade_parsons(small_puzzle, arr)
            assert graded.correct == verdict, arr
            correct_count += verdict
        assert correct_count == 1

    def test_corpus_canonical_arrangements_grade_correct(self):
        for name, puzzle, *_ in corpus_puzzles():
            assert grade_parsons(puzzle, canonical(puzzle)).correct, name
