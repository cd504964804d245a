import pytest

from parsons_scaffold.align import align, normalize_line, normalize_source, similarity
from parsons_scaffold.errors import (
    AlreadyCorrect,
    NotAdjacent,
    NotMovable,
    TooFewBlocks,
)
from parsons_scaffold.generate import (
    GenConfig,
    Xorshift64Star,
    auto_merge_pair,
    generate_puzzle,
    merge_blocks,
    select_distractors,
    shuffle_tray,
)
from parsons_scaffold.model import (
    Arrangement,
    Block,
    check_puzzle_invariants,
    expand_arrangement,
)
from conftest import corpus_puzzles, load_corpus


class TestShuffleTray:
    def blocks(self, n, distractors=0):
        out = [
            Block(f"m{i}", (normalize_line(f"x{i} = {i}"),), "movable", i)
            for i in range(n)
        ]
        out += [
            Block(f"d{i}", (normalize_line(f"y{i} = {i}"),), "distractor",
                  paired_with=f"m{i}")
            for i in range(distractors)
        ]
        return out

    def test_single_block(self):
        assert shuffle_tray(self.blocks(1), seed=5) == ["m0"]

    def test_deterministic(self):
        blocks = self.blocks(4, distractors=2)
        assert shuffle_tray(blocks, seed=99) == shuffle_tray(blocks, seed=99)

    def test_golden_seed_42(self):
        # Frozen output of xorshift64* + Fisher-Yates at implementation time.
        assert shuffle_tray(self.blocks(4), seed=42) == ["m1", "m3", "m2", "m0"]

    def test_never_solution_sorted(self):
        blocks = self.blocks(3)
        for seed in range(200):
            order = shuffle_tray(blocks, seed)
            assert order != ["m0", "m1", "m2"], f"seed {seed}"

    def test_prng_is_xorshift64star(self):
        # Independent recomputation of the first draw from seed 1.
        s = 1
        s ^= s >> 12
        s ^= (s << 25) & ((1 << 64) - 1)
        s ^= s >> 27
        expected = (s * 0x2545F4914F6CDD1D) & ((1 << 64) - 1)
        assert Xorshift64Star(1).next() == expected


class TestSelectDistractors:
    def test_no_incorrect_lines(self, total_solution):
        alignment = align(total_solution, total_solution)
        assert select_distractors(alignment, total_solution, [], GenConfig()) == []

    def test_two_candidates_one_block(self):
        solution = normalize_source("count = 0\n")
        student = normalize_source("count = 5\nxyzzy\n")
        alignment = align(student, solution)
        movable = [Block("m0", (solution[0],), "movable", 0)]
        chosen = select_distractors(alignment, student, movable, GenConfig())
        # "count = 5" wins the only block; "xyzzy" is below threshold
        # against nothing that remains.
        assert [b.lines[0].normalized for b in chosen] == ["count = 5"]

    def test_below_threshold_excluded(self):
        solution = normalize_source("s = s + n\n")
        student = normalize_source("xyzzy\n")
        alignment = align(student, solution)
        movable = [Block("m0", (solution[0],), "movable", 0)]
        assert similarity(student[0], solution[0]) < 0.3
        assert select_distractors(alignment, student, movable, GenConfig()) == []

    def test_greedy_matches_max_similarity_first(self):
        # Enumerate all pairings by hand: "s = 2" is closer to "s = 0" than
        # "sum = 2" is, so it takes the block.
        solution = normalize_source("s = 0\n")
        student = normalize_source("sum = 2\ns = 2\n")
        alignment = align(student, solution)
        movable = [Block("m0", (solution[0],), "movable", 0)]
        sims = {ln.normalized: similarity(ln, solution[0]) for ln in student}
        assert sims["s = 2"] > sims["sum = 2"]
        chosen = select_distractors(alignment, student, movable, GenConfig())
        assert [b.lines[0].normalized for b in chosen] == ["s = 2"]

    def test_identical_candidate_discarded(self):
        solution = normalize_source("s = 0\n")
        student = normalize_source("s = 0\nnoise\n")
        # Force the identical line to be "incorrect" by aligning against a
        # different solution, then pairing manually.
        movable = [Block("m0", (solution[0],), "movable", 0)]
        other = normalize_source("t = 9\n")
        alignment = align(student, other)
        chosen = select_distractors(alignment, student, movable, GenConfig())
        assert all(b.lines[0].normalized != "s = 0" for b in chosen)

    def test_cap_prefers_higher_similarity(self):
        solution = normalize_source("a = 1\nb = 2\nc = 3\n")
        student = normalize_source("a = 9\nb = 22\nc = 333\n")
        alignment = align(student, solution)
        movable = [
            Block(f"m{i}", (solution[i],), "movable", i) for i in range(3)
        ]
        cfg = GenConfig(max_distractors=1)
        # Hand-computed similarities: "b = 22" vs "b = 2" is 5/6, beating
        # "a = 9" vs "a = 1" at 4/5 and "c = 333" vs "c = 3" at 5/7.
        sims = {
            ln.normalized: max(similarity(ln, b.lines[0]) for b in movable)
            for ln in student
        }
        assert sims["b = 22"] > sims["a = 9"] > sims["c = 333"]
        chosen = select_distractors(alignment, student, movable, cfg)
        assert len(chosen) == 1
        assert chosen[0].lines[0].normalized == "b = 22"


class TestGeneratePuzzle:
    def test_empty_student_all_movable(self, total_solution):
        alignment = align([], total_solution)
        puzzle = generate_puzzle(alignment, total_solution, [], GenConfig(seed=3))
        assert len(puzzle.blocks_of_kind("fixed")) == 0
        assert len(puzzle.blocks_of_kind("movable")) == 5
        assert len(puzzle.blocks_of_kind("distractor")) == 0

    def test_spec_worked_example(self, total_puzzle):
        fixed_positions = sorted(
            b.solution_pos for b in total_puzzle.blocks_of_kind("fixed")
        )
        movable_positions = sorted(
            b.solution_pos for b in total_puzzle.blocks_of_kind("movable")
        )
        assert fixed_positions == [0, 2]
        assert movable_positions == [1, 3, 4]
        distractors = {
            b.lines[0].normalized: b for b in total_puzzle.blocks_of_kind("distractor")
        }
        assert set(distractors) == {"s = 1", "return s"}
        # "s = 1"@1 pairs with "s = 0"@1 (similarity 0.8); the student's
        # "return s"@2 pairs with the solution's "return s"@1 (text identical,
        # indent differs).
        assert total_puzzle.block(distractors["s = 1"].paired_with).lines[0].normalized == "s = 0"
        assert total_puzzle.block(distractors["return s"].paired_with).lines[0].normalized == "return s"
        assert distractors["return s"].lines[0].indent == 2

    def test_already_correct(self, total_solution):
        alignment = align(total_solution, total_solution)
        with pytest.raises(AlreadyCorrect):
            generate_puzzle(alignment, total_solution, total_solution, GenConfig())

    def test_deterministic(self, total_solution, total_attempt):
        alignment = align(total_attempt, total_solution)
        cfg = GenConfig(seed=123)
        p1 = generate_puzzle(alignment, total_solution, total_attempt, cfg)
        p2 = generate_puzzle(alignment, total_solution, total_attempt, cfg)
        assert p1 == p2

    def test_corpus_puzzles_pass_invariants(self):
        puzzles = corpus_puzzles()
        assert len(puzzles) >= 10
        for name, puzzle, solution, student, _ in puzzles:
            assert check_puzzle_invariants(puzzle) == [], name
            rebuilt = [
                (ln.normalized, ln.indent) for ln in puzzle.solution_lines()
            ]
            assert rebuilt == [(ln.normalized, ln.indent) for ln in solution], name

    def test_distractors_verbatim_from_student(self):
        for name, puzzle, solution, student, alignment in corpus_puzzles():
            incorrect_keys = {
                student[i].key for i in alignment.incorrect_student
            }
            for d in puzzle.blocks_of_kind("distractor"):
                assert d.lines[0].key in incorrect_keys, name


class TestMergeBlocks:
    def canonical_arrangement(self, puzzle):
        movable = sorted(
            puzzle.blocks_of_kind("movable"), key=lambda b: b.solution_pos
        )
        return Arrangement(
            tuple((b.id, b.lines[0].indent) for b in movable)
        )

    def test_merge_reduces_movable_count_by_one(self, total_puzzle):
        pair = auto_merge_pair(total_puzzle)
        assert pair is not None
        merged = merge_blocks(total_puzzle, *pair)
        assert len(merged.blocks_of_kind("movable")) == len(
            total_puzzle.blocks_of_kind("movable")
        ) - 1
        assert merged.merges_applied == 1

    def test_merge_preserves_solution_lines(self, total_puzzle):
        pair = auto_merge_pair(total_puzzle)
        merged = merge_blocks(total_puzzle, *pair)
        assert merged.solution_lines() == total_puzzle.solution_lines()

    def test_merged_puzzle_still_solvable(self, total_puzzle):
        merged = merge_blocks(total_puzzle, *auto_merge_pair(total_puzzle))
        assert check_puzzle_invariants(merged) == []
        expanded = expand_arrangement(merged, self.canonical_arrangement(merged))
        expected = [(ln.normalized, ln.indent) for ln in merged.solution_lines()]
        assert expanded == expected

    def test_not_adjacent(self, total_puzzle):
        with pytest.raises(NotAdjacent):
            merge_blocks(total_puzzle, "m1", "m4")

    def test_not_movable(self, total_puzzle):
        with pytest.raises(NotMovable):
            merge_blocks(total_puzzle, "f0", "m1")

    def test_too_few_blocks(self):
        solution = normalize_source("a = 1\nb = 2\n")
        puzzle = generate_puzzle(align([], solution), solution, [], GenConfig(seed=1))
        with pytest.raises(TooFewBlocks):
            merge_blocks(puzzle, "m0", "m1")
        # The final allowed merge may go down to one block.
        merged = merge_blocks(puzzle, "m0", "m1", final_merge=True)
        assert len(merged.blocks_of_kind("movable")) == 1

    def test_distractor_repaired_to_merged_block(self, total_puzzle):
        merged = merge_blocks(total_puzzle, "m3", "m4")
        repaired = [
            d for d in merged.blocks_of_kind("distractor")
            if d.paired_with == "m3+m4"
        ]
        assert repaired, "distractor paired with m4 must follow the merge"
        assert check_puzzle_invariants(merged) == []

    def test_reshuffle_uses_new_seed(self, total_puzzle):
        merged = merge_blocks(total_puzzle, "m3", "m4")
        again = merge_blocks(total_puzzle, "m3", "m4")
        assert merged.tray_order == again.tray_order  # deterministic
