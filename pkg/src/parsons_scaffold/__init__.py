"""Personalized Parsons-problem scaffolding engine.

Given a write-code exercise and a struggling student's partial attempt,
this package builds a Parsons puzzle in which the student's correct lines
are fixed in place and distractors are mined from their own mistakes,
grades arrangements, adapts difficulty by merging blocks after repeated
failure, and wraps the puzzle in four tiers of textual explanation.
"""

from .align import Alignment, align, normalize_line, normalize_source, similarity, tokenize_atoms
from .errors import DomainError
from .generate import GenConfig, generate_puzzle, merge_blocks, shuffle_tray
from .grading import GradeResult, grade_parsons
from .model import (
    Arrangement,
    Atom,
    Block,
    ParsonsPuzzle,
    Problem,
    SourceLine,
    TestCase,
    check_puzzle_invariants,
    expand_arrangement,
)
from .session import SessionService, SessionStore, replay_log

__all__ = [
    "Alignment",
    "Arrangement",
    "Atom",
    "Block",
    "DomainError",
    "GenConfig",
    "GradeResult",
    "ParsonsPuzzle",
    "Problem",
    "SessionService",
    "SessionStore",
    "SourceLine",
    "TestCase",
    "align",
    "check_puzzle_invariants",
    "expand_arrangement",
    "generate_puzzle",
    "grade_parsons",
    "merge_blocks",
    "normalize_line",
    "normalize_source",
    "replay_log",
    "shuffle_tray",
    "similarity",
    "tokenize_atoms",
]

__version__ = "0.1.0"
