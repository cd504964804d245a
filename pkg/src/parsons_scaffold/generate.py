"""Builds the personalized puzzle from an alignment.

Matched student lines become fixed blocks, unmatched solution lines become
movable blocks, and distractors are mined verbatim from the student's
incorrect lines, each paired with the movable block it most plausibly
replaces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .align import Alignment, similarity
from .errors import AlreadyCorrect, NotAdjacent, NotMovable, TooFewBlocks
from .model import Block, ParsonsPuzzle, SourceLine, check_puzzle_invariants


@dataclass(frozen=True)
class GenConfig:
    max_distractors: int = 3
    pair_threshold: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.max_distractors < 0:
            raise ValueError("max_distractors must be >= 0")
        if not 0.0 <= self.pair_threshold <= 1.0:
            raise ValueError("pair_threshold must be in [0, 1]")


class Xorshift64Star:
    """xorshift64* PRNG; tiny, fast, and stable across platforms."""

    MULT = 0x2545F4914F6CDD1D
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        # The all-zero state is a fixed point; nudge it off.
        self.state = (seed & self.MASK) or 0x9E3779B97F4A7C15

    def next(self) -> int:
        s = self.state
        s ^= (s >> 12)
        s ^= (s << 25) & self.MASK
        s ^= (s >> 27)
        self.state = s
        return (s * self.MULT) & self.MASK

    def below(self, bound: int) -> int:
        return self.next() % bound


def fisher_yates(items: list, rng: Xorshift64Star) -> list:
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def shuffle_tray(non_fixed_blocks: list[Block], seed: int) -> list[str]:
    """Deterministic tray permutation that never presents the solved order.

    Input order: movable blocks by solution position, then distractors in
    creation order. If the shuffle lands on the solution-sorted order of the
    movable blocks (only possible when the tray is all-movable) the first
    two entries swap.
    """
    ids = [b.id for b in non_fixed_blocks]
    shuffled = fisher_yates(ids, Xorshift64Star(seed))
    movable_sorted = [
        b.id
        for b in sorted(
            (b for b in non_fixed_blocks if b.kind == "movable"),
            key=lambda b: b.solution_pos,
        )
    ]
    if len(movable_sorted) >= 2 and shuffled == movable_sorted:
        shuffled[0], shuffled[1] = shuffled[1], shuffled[0]
    return shuffled


def select_distractors(
    alignment: Alignment,
    student: list[SourceLine],
    movable_blocks: list[Block],
    cfg: GenConfig,
) -> list[Block]:
    """Pair incorrect student lines with their closest movable block.

    Greedy by descending best similarity (ties broken by lower student
    index); a movable block takes at most one distractor; candidates below
    the threshold against every free block are dropped, as are candidates
    identical to their paired block (they would duplicate a correct block).
    At most max_distractors survive, preferring higher similarity.
    """
    candidates = [(idx, student[idx]) for idx in alignment.incorrect_student]
    if not candidates or not movable_blocks or cfg.max_distractors == 0:
        return []

    def best_sim(line: SourceLine) -> float:
        return max(similarity(line, b.lines[0]) for b in movable_blocks)

    order = sorted(candidates, key=lambda c: (-best_sim(c[1]), c[0]))
    taken: set[str] = set()
    paired: list[tuple[float, int, SourceLine, Block]] = []
    for idx, line in order:
        free = [b for b in movable_blocks if b.id not in taken]
        if not free:
            break
        block = max(free, key=lambda b: (similarity(line, b.lines[0]), b.id))
        sim = similarity(line, block.lines[0])
        if sim < cfg.pair_threshold:
            continue
        if line.key == block.lines[0].key:
            continue  # identical to the correct block under the comparison key
        taken.add(block.id)
        paired.append((sim, idx, line, block))

    paired.sort(key=lambda p: (-p[0], p[1]))
    return [
        Block(
            id=f"d{idx}",
            lines=(line,),
            kind="distractor",
            paired_with=block.id,
        )
        for _, idx, line, block in paired[: cfg.max_distractors]
    ]


def generate_puzzle(
    alignment: Alignment,
    solution: list[SourceLine],
    student: list[SourceLine],
    cfg: GenConfig,
    puzzle_id: str = "puzzle",
    problem_id: str = "problem",
) -> ParsonsPuzzle:
    """One fixed block per matched solution line, one movable per unmatched.

    Raises AlreadyCorrect if nothing is unmatched; the caller should route
    the student back to the write-code flow.
    """
    if not alignment.unmatched_solution:
        raise AlreadyCorrect("student code already matches the solution")

    matched_solution = {sol for _, sol in alignment.matched}
    fixed = [
        Block(id=f"f{idx}", lines=(solution[idx],), kind="fixed", solution_pos=idx)
        for idx in sorted(matched_solution)
    ]
    movable = [
        Block(id=f"m{idx}", lines=(solution[idx],), kind="movable", solution_pos=idx)
        for idx in alignment.unmatched_solution
    ]
    distractors = select_distractors(alignment, student, movable, cfg)
    tray = shuffle_tray(movable + distractors, cfg.seed)
    puzzle = ParsonsPuzzle(
        puzzle_id=puzzle_id,
        problem_id=problem_id,
        blocks=tuple(fixed + movable + distractors),
        tray_order=tuple(tray),
        solution_line_count=len(solution),
        seed=cfg.seed,
        merges_applied=0,
    )
    violations = check_puzzle_invariants(puzzle)
    if violations:  # generator postcondition; indicates a bug, not bad input
        raise AssertionError(f"generated puzzle violates invariants: {violations}")
    return puzzle


def merge_blocks(
    puzzle: ParsonsPuzzle, a: str, b: str, final_merge: bool = False
) -> ParsonsPuzzle:
    """Combine two solution-adjacent movable blocks into one.

    Requires at least 3 movable blocks, or exactly 2 when this is the final
    allowed merge. Distractors paired with either side re-pair to the merged
    block; the tray reshuffles with seed + merges_applied.
    """
    block_a = puzzle.block(a)
    block_b = puzzle.block(b)
    if block_a.kind != "movable" or block_b.kind != "movable":
        raise NotMovable(f"blocks {a!r}, {b!r} must both be movable")
    movable_count = len(puzzle.blocks_of_kind("movable"))
    if movable_count < 3 and not (movable_count == 2 and final_merge):
        raise TooFewBlocks("merge would leave fewer than 2 movable blocks")
    if block_a.solution_pos + len(block_a.lines) != block_b.solution_pos:
        raise NotAdjacent(
            f"blocks {a!r} and {b!r} are not adjacent in the solution"
        )

    merged = Block(
        id=f"{a}+{b}",
        lines=block_a.lines + block_b.lines,
        kind="movable",
        solution_pos=block_a.solution_pos,
    )
    blocks: list[Block] = []
    for blk in puzzle.blocks:
        if blk.id == a:
            blocks.append(merged)
        elif blk.id == b:
            continue
        elif blk.kind == "distractor" and blk.paired_with in (a, b):
            blocks.append(
                Block(
                    id=blk.id,
                    lines=blk.lines,
                    kind="distractor",
                    paired_with=merged.id,
                )
            )
        else:
            blocks.append(blk)

    merges_applied = puzzle.merges_applied + 1
    movable = sorted(
        (blk for blk in blocks if blk.kind == "movable"),
        key=lambda blk: blk.solution_pos,
    )
    distractors = [blk for blk in blocks if blk.kind == "distractor"]
    tray = shuffle_tray(movable + distractors, puzzle.seed + merges_applied)
    return ParsonsPuzzle(
        puzzle_id=puzzle.puzzle_id,
        problem_id=puzzle.problem_id,
        blocks=tuple(blocks),
        tray_order=tuple(tray),
        solution_line_count=puzzle.solution_line_count,
        seed=puzzle.seed,
        merges_applied=merges_applied,
    )


def auto_merge_pair(puzzle: ParsonsPuzzle) -> tuple[str, str] | None:
    """Earliest solution-adjacent movable pair, for callers with no preference."""
    movable = sorted(
        puzzle.blocks_of_kind("movable"), key=lambda b: b.solution_pos
    )
    for first, second in zip(movable, movable[1:]):
        if first.solution_pos + len(first.lines) == second.solution_pos:
            return first.id, second.id
    return None
