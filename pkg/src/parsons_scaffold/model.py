"""Shared domain types: problems, lines, atoms, blocks, puzzles, arrangements.

All types are immutable values after construction (frozen dataclasses) and
safe to share across threads. The JSON encodings produced by ``*_to_dict``
and consumed by ``*_from_dict`` are the canonical wire formats used by the
API and the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateBlock, UnknownBlock

INDENT_WIDTH = 4

ATOM_KINDS = (
    "keyword",
    "identifier",
    "number-literal",
    "string-literal",
    "operator",
    "punctuation",
)


@dataclass(frozen=True)
class Atom:
    text: str
    kind: str  # one of ATOM_KINDS
    col_span: tuple[int, int]  # [start, end) offsets into the normalized line


@dataclass(frozen=True)
class SourceLine:
    raw: str
    normalized: str
    indent: int
    atoms: tuple[Atom, ...] = ()
    unterminated_string: bool = False

    @property
    def key(self) -> tuple[int, str]:
        """Comparison key: indentation is part of line identity."""
        return (self.indent, self.normalized)

    def render(self, indent: int | None = None) -> str:
        level = self.indent if indent is None else indent
        return " " * (INDENT_WIDTH * level) + self.normalized


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # keep pytest from collecting this dataclass

    mode: str  # "stdin-stdout" | "function-call"
    input: str | list
    expected: str
    timeout_ms: int = 2000
    function_name: str | None = None  # required for function-call mode

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.mode not in ("stdin-stdout", "function-call"):
            raise ValueError(f"unknown test mode {self.mode!r}")
        if self.mode == "function-call" and not self.function_name:
            raise ValueError("function-call tests need function_name")


@dataclass(frozen=True)
class Problem:
    id: str
    statement: str
    solution_source: str
    test_suite: tuple[TestCase, ...]
    author: str = ""
    title: str = ""

    def __post_init__(self):
        if not self.test_suite:
            raise ValueError("test_suite must be non-empty")


@dataclass(frozen=True)
class Block:
    id: str
    lines: tuple[SourceLine, ...]
    kind: str  # "fixed" | "movable" | "distractor"
    solution_pos: int | None = None  # first covered solution line; None for distractors
    paired_with: str | None = None  # distractor <-> movable pairing

    def __post_init__(self):
        if not self.lines:
            raise ValueError("a block holds at least one line")
        if self.kind in ("fixed", "movable") and self.solution_pos is None:
            raise ValueError(f"{self.kind} block {self.id} needs solution_pos")

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def covered_range(self) -> range:
        """Solution line indices this block occupies (empty for distractors)."""
        if self.solution_pos is None:
            return range(0)
        return range(self.solution_pos, self.solution_pos + len(self.lines))


@dataclass(frozen=True)
class ParsonsPuzzle:
    puzzle_id: str
    problem_id: str
    blocks: tuple[Block, ...]
    tray_order: tuple[str, ...]
    solution_line_count: int
    seed: int
    merges_applied: int = 0

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise UnknownBlock(f"block {block_id!r} not in puzzle {self.puzzle_id}")

    def blocks_of_kind(self, kind: str) -> list[Block]:
        return [b for b in self.blocks if b.kind == kind]

    def solution_lines(self) -> list[SourceLine]:
        """The reference solution reassembled from fixed + movable blocks."""
        placed = sorted(
            (b for b in self.blocks if b.kind != "distractor"),
            key=lambda b: b.solution_pos,
        )
        return [line for b in placed for line in b.lines]


@dataclass(frozen=True)
class Arrangement:
    placements: tuple[tuple[str, int], ...]  # (block_id, indent) in answer-area order

    def block_ids(self) -> list[str]:
        return [bid for bid, _ in self.placements]


def expand_arrangement(
    puzzle: ParsonsPuzzle, arr: Arrangement
) -> list[tuple[str, int]]:
    """Assemble the full program implied by an arrangement.

    Fixed blocks flush into the output as soon as the solution position they
    occupy has been reached; arranged movable blocks fill the remaining
    solution slots in the order given; distractors appear verbatim where
    placed without consuming solution slots. Returns (normalized, indent)
    pairs.
    """
    seen: set[str] = set()
    for bid, _ in arr.placements:
        if bid in seen:
            raise DuplicateBlock(f"block {bid!r} placed twice")
        seen.add(bid)
        block = puzzle.block(bid)  # raises UnknownBlock
        if block.kind == "fixed":
            raise DuplicateBlock(f"fixed block {bid!r} cannot be arranged")

    fixed = sorted(puzzle.blocks_of_kind("fixed"), key=lambda b: b.solution_pos)
    out: list[tuple[str, int]] = []
    pos = 0  # next solution line index to account for

    def flush_fixed():
        nonlocal pos
        while fixed and fixed[0].solution_pos <= pos:
            blk = fixed.pop(0)
            out.extend((ln.normalized, ln.indent) for ln in blk.lines)
            pos = blk.solution_pos + len(blk.lines)

    for bid, indent in arr.placements:
        flush_fixed()
        block = puzzle.block(bid)
        base = block.lines[0].indent
        out.extend(
            (ln.normalized, indent + (ln.indent - base)) for ln in block.lines
        )
        if block.kind == "movable":
            pos += len(block.lines)
            flush_fixed()
    flush_fixed()
    # Fixed blocks past unfilled slots still belong to the program.
    for blk in fixed:
        out.extend((ln.normalized, ln.indent) for ln in blk.lines)
    return out


def check_puzzle_invariants(puzzle: ParsonsPuzzle) -> list[str]:
    """Diagnostic scan; empty list iff all structural invariants hold."""
    violations: list[str] = []
    ids = [b.id for b in puzzle.blocks]
    if len(set(ids)) != len(ids):
        violations.append(f"duplicate block ids: {sorted(ids)}")

    coverage: dict[int, list[str]] = {}
    for b in puzzle.blocks:
        if b.kind == "distractor":
            if b.solution_pos is not None:
                violations.append(f"distractor {b.id} carries solution_pos")
            continue
        for idx in b.covered_range():
            coverage.setdefault(idx, []).append(b.id)

    for idx in range(puzzle.solution_line_count):
        owners = coverage.get(idx, [])
        if not owners:
            violations.append(f"solution line {idx} uncovered")
        elif len(owners) > 1:
            violations.append(f"double coverage of line {idx} by {owners}")
    for idx in sorted(set(coverage) - set(range(puzzle.solution_line_count))):
        violations.append(f"coverage outside solution range at line {idx}")

    movable_ids = {b.id for b in puzzle.blocks if b.kind == "movable"}
    for b in puzzle.blocks_of_kind("distractor"):
        if b.paired_with is not None and b.paired_with not in movable_ids:
            violations.append(
                f"distractor {b.id} paired with non-movable {b.paired_with}"
            )

    non_fixed = [b.id for b in puzzle.blocks if b.kind != "fixed"]
    if sorted(puzzle.tray_order) != sorted(non_fixed):
        missing = set(non_fixed) - set(puzzle.tray_order)
        extra = set(puzzle.tray_order) - set(non_fixed)
        violations.append(
            f"tray incomplete or wrong: missing={sorted(missing)} extra={sorted(extra)}"
        )

    movable_sorted = sorted(
        (b for b in puzzle.blocks if b.kind == "movable"),
        key=lambda b: b.solution_pos,
    )
    if len(movable_sorted) >= 2:
        if list(puzzle.tray_order) == [b.id for b in movable_sorted]:
            violations.append("tray order equals solution order")
    return violations


# ---------------------------------------------------------------------------
# Canonical JSON encodings
# ---------------------------------------------------------------------------

def source_line_to_dict(line: SourceLine) -> dict:
    d = {
        "raw": line.raw,
        "normalized": line.normalized,
        "indent": line.indent,
        "atoms": [
            {"text": a.text, "kind": a.kind, "col_span": list(a.col_span)}
            for a in line.atoms
        ],
    }
    if line.unterminated_string:
        d["unterminated_string"] = True
    return d


def source_line_from_dict(d: dict) -> SourceLine:
    return SourceLine(
        raw=d["raw"],
        normalized=d["normalized"],
        indent=d["indent"],
        atoms=tuple(
            Atom(a["text"], a["kind"], tuple(a["col_span"]))
            for a in d.get("atoms", [])
        ),
        unterminated_string=d.get("unterminated_string", False),
    )


def block_to_dict(block: Block) -> dict:
    return {
        "id": block.id,
        "lines": [source_line_to_dict(ln) for ln in block.lines],
        "kind": block.kind,
        "solution_pos": block.solution_pos,
        "paired_with": block.paired_with,
    }


def block_from_dict(d: dict) -> Block:
    return Block(
        id=d["id"],
        lines=tuple(source_line_from_dict(ln) for ln in d["lines"]),
        kind=d["kind"],
        solution_pos=d.get("solution_pos"),
        paired_with=d.get("paired_with"),
    )


def puzzle_to_dict(puzzle: ParsonsPuzzle) -> dict:
    return {
        "puzzle_id": puzzle.puzzle_id,
        "problem_id": puzzle.problem_id,
        "blocks": [block_to_dict(b) for b in puzzle.blocks],
        "tray_order": list(puzzle.tray_order),
        "solution_line_count": puzzle.solution_line_count,
        "seed": puzzle.seed,
        "merges_applied": puzzle.merges_applied,
    }


def puzzle_from_dict(d: dict) -> ParsonsPuzzle:
    return ParsonsPuzzle(
        puzzle_id=d["puzzle_id"],
        problem_id=d["problem_id"],
        blocks=tuple(block_from_dict(b) for b in d["blocks"]),
        tray_order=tuple(d["tray_order"]),
        solution_line_count=d["solution_line_count"],
        seed=d["seed"],
        merges_applied=d.get("merges_applied", 0),
    )


def arrangement_to_dict(arr: Arrangement) -> dict:
    return {
        "placements": [
            {"block_id": bid, "indent": indent} for bid, indent in arr.placements
        ]
    }


def arrangement_from_dict(d: dict) -> Arrangement:
    return Arrangement(
        placements=tuple(
            (p["block_id"], p["indent"]) for p in d["placements"]
        )
    )


def test_case_to_dict(tc: TestCase) -> dict:
    d = {
        "mode": tc.mode,
        "input": tc.input,
        "expected": tc.expected,
        "timeout_ms": tc.timeout_ms,
    }
    if tc.function_name is not None:
        d["function_name"] = tc.function_name
    return d


def test_case_from_dict(d: dict) -> TestCase:
    return TestCase(
        mode=d["mode"],
        input=d["input"],
        expected=d["expected"],
        timeout_ms=d.get("timeout_ms", 2000),
        function_name=d.get("function_name"),
    )


def problem_to_dict(problem: Problem) -> dict:
    return {
        "id": problem.id,
        "statement": problem.statement,
        "solution_source": problem.solution_source,
        "test_suite": [test_case_to_dict(tc) for tc in problem.test_suite],
        "author": problem.author,
        "title": problem.title,
    }


def problem_from_dict(d: dict) -> Problem:
    return Problem(
        id=d["id"],
        statement=d["statement"],
        solution_source=d["solution_source"],
        test_suite=tuple(test_case_from_dict(tc) for tc in d["test_suite"]),
        author=d.get("author", ""),
        title=d.get("title", ""),
    )
