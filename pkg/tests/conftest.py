import json
from pathlib import Path

import pytest

from parsons_scaffold.align import align, normalize_source
from parsons_scaffold.errors import AlreadyCorrect
from parsons_scaffold.generate import GenConfig, generate_puzzle
from parsons_scaffold.model import Problem, TestCase

CORPUS_DIR = Path(__file__).parent / "corpus"

TOTAL_SOLUTION = """\
def total(nums):
    s = 0
    for n in nums:
        s = s + n
    return s
"""

TOTAL_ATTEMPT = """\
def total(nums):
    s = 1
    for n in nums:
        return s
"""


def load_corpus():
    """All (name, solution_text, attempt_text) fixture pairs."""
    pairs = []
    for sol_path in sorted(CORPUS_DIR.glob("*.solution.py")):
        name = sol_path.name.replace(".solution.py", "")
        att_path = CORPUS_DIR / f"{name}.attempt.py"
        pairs.append((name, sol_path.read_text(), att_path.read_text()))
    return pairs


def corpus_puzzles(seed=7):
    """Generated puzzle per corpus pair (skipping already-correct attempts)."""
    out = []
    for name, sol_text, att_text in load_corpus():
        solution = normalize_source(sol_text)
        student = normalize_source(att_text)
        alignment = align(student, solution)
        try:
            puzzle = generate_puzzle(
                alignment, solution, student, GenConfig(seed=seed),
                puzzle_id=name, problem_id=name,
            )
        except AlreadyCorrect:
            continue
        out.append((name, puzzle, solution, student, alignment))
    return out


@pytest.fixture
def total_solution():
    return normalize_source(TOTAL_SOLUTION)


@pytest.fixture
def total_attempt():
    return normalize_source(TOTAL_ATTEMPT)


@pytest.fixture
def total_puzzle(total_solution, total_attempt):
    alignment = align(total_attempt, total_solution)
    return generate_puzzle(
        alignment, total_solution, total_attempt, GenConfig(seed=42)
    )


TOTAL_PROBLEM = Problem(
    id="total",
    statement="Write total(nums) that returns the sum of a list of numbers.",
    solution_source=TOTAL_SOLUTION,
    test_suite=(
        TestCase(mode="function-call", input=[[1, 2, 3]], expected="6",
                 function_name="total"),
        TestCase(mode="function-call", input=[[]], expected="0",
                 function_name="total"),
        TestCase(mode="function-call", input=[[5]], expected="5",
                 function_name="total"),
    ),
)


@pytest.fixture
def total_problem():
    return TOTAL_PROBLEM
