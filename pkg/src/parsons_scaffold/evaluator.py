"""Runs student programs against a problem's test suite.

The only subsystem that touches process execution: each test runs in a
fresh interpreter child process inside an empty temp directory with a hard
timeout. No sandboxing beyond that is attempted here.
"""

from __future__ import annotations

import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import EvaluatorUnavailable
from .model import TestCase


@dataclass(frozen=True)
class TestOutcome:
    index: int
    passed: bool
    observed: str  # output, or an error description
    duration_ms: int


@dataclass(frozen=True)
class CodeEvalResult:
    passed: bool
    per_test: tuple[TestOutcome, ...]


def trim_output(text: str) -> str:
    """Per-line trailing-whitespace trim plus a single trailing newline."""
    lines = [line.rstrip() for line in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


class CodeEvaluator:
    """Executes Python test cases through an interpreter child process."""

    def __init__(self, interpreter: str | None = None):
        self.interpreter = interpreter or sys.executable
        if shutil.which(self.interpreter) is None and not Path(self.interpreter).exists():
            raise EvaluatorUnavailable(
                f"interpreter {self.interpreter!r} not found"
            )

    def run(self, code: str, suite: list[TestCase]) -> CodeEvalResult:
        if not suite:
            raise ValueError("test suite must be non-empty")
        outcomes = [self._run_one(code, i, tc) for i, tc in enumerate(suite)]
        return CodeEvalResult(
            passed=all(o.passed for o in outcomes), per_test=tuple(outcomes)
        )

    def _run_one(self, code: str, index: int, tc: TestCase) -> TestOutcome:
        program = code
        stdin = ""
        if tc.mode == "stdin-stdout":
            stdin = tc.input if isinstance(tc.input, str) else ""
        else:  # function-call
            args = ", ".join(repr(a) for a in tc.input)
            program = f"{code}\nprint(repr({tc.function_name}({args})))\n"

        start = time.monotonic()
        with tempfile.TemporaryDirectory() as workdir:
            try:
                proc = subprocess.run(
                    [self.interpreter, "-c", program],
                    input=stdin,
                    capture_output=True,
                    text=True,
                    timeout=tc.timeout_ms / 1000.0,
                    cwd=workdir,
                )
            except subprocess.TimeoutExpired:
                elapsed = int((time.monotonic() - start) * 1000)
                return TestOutcome(index, False, f"timeout after {tc.timeout_ms} ms", elapsed)
        elapsed = int((time.monotonic() - start) * 1000)
        if proc.returncode != 0:
            detail = trim_output(proc.stderr).splitlines()
            message = detail[-1] if detail else f"exit code {proc.returncode}"
            return TestOutcome(index, False, f"error: {message}", elapsed)
        observed = trim_output(proc.stdout)
        expected = trim_output(tc.expected)
        return TestOutcome(index, observed == expected, observed, elapsed)


def eval_result_to_dict(result: CodeEvalResult) -> dict:
    return {
        "passed": result.passed,
        "per_test": [
            {
                "index": o.index,
                "passed": o.passed,
                "observed": o.observed,
                "duration_ms": o.duration_ms,
            }
            for o in result.per_test
        ],
    }
