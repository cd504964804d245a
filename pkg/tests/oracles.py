"""Independent brute-force oracles the fast paths are checked against.

These deliberately share no code with the implementations they verify.
"""

from functools import lru_cache
from itertools import permutations, product

from parsons_scaffold.model import Arrangement


def brute_force_lcs_length(a: list, b: list) -> int:
    """Exponential-flavored recursive LCS length; fine for <= ~12 items."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a) or j == len(b):
            return 0
        best = max(go(i + 1, j), go(i, j + 1))
        if a[i] == b[j]:
            best = max(best, 1 + go(i + 1, j + 1))
        return best

    return go(0, 0)


def all_common_subsequences(a: list, b: list):
    """Every common subsequence as a list of (i, j) index pairs."""
    results = []

    def go(i, j, acc):
        results.append(list(acc))
        for ii in range(i, len(a)):
            for jj in range(j, len(b)):
                if a[ii] == b[jj]:
                    acc.append((ii, jj))
                    go(ii + 1, jj + 1, acc)
                    acc.pop()

    go(0, 0, [])
    return results


def enumerate_arrangements(puzzle, indent_choices):
    """All arrangements choosing any subset of non-fixed blocks in any
    order, with every combination of the given indents."""
    non_fixed = [b.id for b in puzzle.blocks if b.kind != "fixed"]
    for size in range(len(non_fixed) + 1):
        for ids in permutations(non_fixed, size):
            for indents in product(indent_choices, repeat=size):
                yield Arrangement(placements=tuple(zip(ids, indents)))


def simulate_expansion(puzzle, arr):
    """Re-implementation of the documented expansion semantics, written as a
    slot-filling simulation rather than the production flush loop."""
    blocks = {b.id: b for b in puzzle.blocks}
    fixed_at = {
        b.solution_pos: b for b in puzzle.blocks if b.kind == "fixed"
    }
    lines = []
    filled = 0  # solution lines emitted so far

    def emit_fixed_due():
        nonlocal filled
        while filled in fixed_at:
            blk = fixed_at.pop(filled)
            for ln in blk.lines:
                lines.append((ln.normalized, ln.indent))
            filled += len(blk.lines)

    emit_fixed_due()
    for bid, indent in arr.placements:
        blk = blocks[bid]
        base = blk.lines[0].indent
        for ln in blk.lines:
            lines.append((ln.normalized, indent + ln.indent - base))
        if blk.kind == "movable":
            filled += len(blk.lines)
            emit_fixed_due()
    for pos in sorted(fixed_at):
        for ln in fixed_at[pos].lines:
            lines.append((ln.normalized, ln.indent))
    return lines


def arrangement_is_solution(puzzle, arr) -> bool:
    """Enumeration verdict: the expansion equals the solution line list and
    no distractor block was used."""
    blocks = {b.id: b for b in puzzle.blocks}
    if any(blocks[bid].kind == "distractor" for bid, _ in arr.placements):
        return False
    solution = [(ln.normalized, ln.indent) for ln in puzzle.solution_lines()]
    return simulate_expansion(puzzle, arr) == solution
