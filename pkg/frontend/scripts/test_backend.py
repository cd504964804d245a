"""Backend for the end-to-end UI test: the real API server with a
replay provider seeded with a fixed subgoal list, one problem preloaded,
and the real interpreter-backed code evaluator.

Usage: python3 test_backend.py PORT [DATA_DIR]
"""

import json
import sys
import tempfile

import uvicorn

from parsons_scaffold.api import create_app
from parsons_scaffold.model import Problem, TestCase

SOLUTION = """\
def total(nums):
    s = 0
    for n in nums:
        s = s + n
    return s
"""

SUBGOALS = [
    "Define a function that accepts the list.",
    "Start the running sum at zero.",
    "Visit every number in the list.",
    "Add each number to the running sum.",
    "Return the finished sum.",
]


def main() -> None:
    port = int(sys.argv[1])
    data_dir = sys.argv[2] if len(sys.argv) > 2 else tempfile.mkdtemp()
    app = create_app(
        data_dir=data_dir,
        provider_kind="replay",
        provider_fixtures={"subgoals-v1": json.dumps(SUBGOALS)},
    )
    problem = Problem(
        id="total",
        statement="Write total(nums) that returns the sum of a list of numbers.",
        solution_source=SOLUTION,
        test_suite=(
            TestCase(mode="function-call", input=[[1, 2, 3]], expected="6",
                     function_name="total"),
            TestCase(mode="function-call", input=[[]], expected="0",
                     function_name="total"),
            TestCase(mode="function-call", input=[[5]], expected="5",
                     function_name="total"),
        ),
    )
    app.state.service.add_problem(problem)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="info")


if __name__ == "__main__":
    main()
