import pytest

from parsons_scaffold.errors import EvaluatorUnavailable
from parsons_scaffold.evaluator import CodeEvaluator, trim_output
from parsons_scaffold.model import TestCase


@pytest.fixture(scope="module")
def evaluator():
    return CodeEvaluator()


def test_missing_interpreter_rejected():
    with pytest.raises(EvaluatorUnavailable):
        CodeEvaluator("/no/such/interpreter")


def test_reference_solution_passes_own_suite(evaluator, total_problem):
    result = evaluator.run(total_problem.solution_source, list(total_problem.test_suite))
    assert result.passed
    assert all(o.passed for o in result.per_test)


def test_empty_program_fails_output_test(evaluator):
    suite = [TestCase(mode="stdin-stdout", input="", expected="5")]
    result = evaluator.run("", suite)
    assert not result.passed
    assert result.per_test[0].observed == ""


def test_trailing_newline_tolerance(evaluator):
    suite = [TestCase(mode="stdin-stdout", input="", expected="5")]
    result = evaluator.run("print(5)", suite)  # prints "5\n"
    assert result.passed


def test_trim_rule():
    assert trim_output("5  \n") == "5"
    assert trim_output("a\nb  \n\n\n") == "a\nb"
    assert trim_output("") == ""


def test_stdin_mode(evaluator):
    suite = [TestCase(mode="stdin-stdout", input="3\n4\n", expected="7")]
    code = "a = int(input())\nb = int(input())\nprint(a + b)\n"
    assert evaluator.run(code, suite).passed


def test_function_call_repr_comparison(evaluator):
    suite = [
        TestCase(mode="function-call", input=[[1, 2]], expected="[2, 4]",
                 function_name="doubled"),
    ]
    code = "def doubled(xs):\n    return [2 * x for x in xs]\n"
    assert evaluator.run(code, suite).passed


def test_crash_recorded_not_raised(evaluator):
    suite = [TestCase(mode="stdin-stdout", input="", expected="ok")]
    result = evaluator.run("raise RuntimeError('boom')", suite)
    assert not result.passed
    assert "error" in result.per_test[0].observed


def test_timeout_recorded_not_raised(evaluator):
    suite = [TestCase(mode="stdin-stdout", input="", expected="x", timeout_ms=300)]
    result = evaluator.run("while True:\n    pass\n", suite)
    assert not result.passed
    assert "timeout" in result.per_test[0].observed
