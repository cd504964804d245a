"""Normalization, tokenization, and alignment of student code against a solution.

All functions here are pure; the alignment backbone is a longest common
subsequence over (indent, normalized-text) line keys with a leftmost
tie-break in student indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import INDENT_WIDTH, Atom, SourceLine

KEYWORDS = frozenset(
    """
    def return for while if elif else in and or not None True False
    break continue pass import from as with is lambda global del
    """.split()
)

_NUMBER = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
# Longest operators first so e.g. "==" is not split into "=", "=".
_OPERATORS = sorted(
    [
        "**=", "//=", "<<=", ">>=",
        "==", "!=", "<=", ">=", "//", "**", "->",
        "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
        "+", "-", "*", "/", "%", "=", "<", ">", "&", "|", "^", "~", "@",
    ],
    key=len,
    reverse=True,
)


def normalize_line(raw: str) -> SourceLine | None:
    """Turn one physical line into a SourceLine, or None for blank/comment lines.

    Tabs count as one indent step; a ``#`` outside string literals starts a
    comment; runs of whitespace outside strings collapse to single spaces.
    A string literal left open keeps the rest of the line verbatim and sets
    the unterminated_string flag.
    """
    expanded = raw.replace("\t", " " * INDENT_WIDTH)
    stripped = expanded.lstrip(" ")
    leading = len(expanded) - len(stripped)
    body = stripped.rstrip()

    normalized_chars: list[str] = []
    unterminated = False
    i = 0
    n = len(body)
    while i < n:
        ch = body[i]
        if ch in ("'", '"'):
            close = body.find(ch, i + 1)
            if close == -1:
                normalized_chars.append(body[i:])
                unterminated = True
                i = n
            else:
                normalized_chars.append(body[i : close + 1])
                i = close + 1
        elif ch == "#":
            break
        elif ch in (" ", "\t"):
            if normalized_chars and normalized_chars[-1] != " ":
                normalized_chars.append(" ")
            while i < n and body[i] in (" ", "\t"):
                i += 1
            continue
        else:
            normalized_chars.append(ch)
            i += 1

    normalized = "".join(normalized_chars).strip()
    if not normalized:
        return None
    line = SourceLine(
        raw=raw,
        normalized=normalized,
        indent=leading // INDENT_WIDTH,
        unterminated_string=unterminated,
    )
    return SourceLine(
        raw=line.raw,
        normalized=line.normalized,
        indent=line.indent,
        atoms=tuple(tokenize_atoms(line)),
        unterminated_string=unterminated,
    )


def normalize_source(source: str) -> list[SourceLine]:
    """Normalize a whole program, dropping blank and comment-only lines."""
    lines = []
    for raw in source.splitlines():
        line = normalize_line(raw)
        if line is not None:
            lines.append(line)
    return lines


def tokenize_atoms(line: SourceLine) -> list[Atom]:
    """Lex the normalized text into atoms with [start, end) spans.

    Spans index into the normalized text; concatenating them with the
    inter-token whitespace reconstructs it exactly.
    """
    text = line.normalized
    atoms: list[Atom] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == " ":
            i += 1
            continue
        if ch in ("'", '"'):
            close = text.find(ch, i + 1)
            end = n if close == -1 else close + 1
            atoms.append(Atom(text[i:end], "string-literal", (i, end)))
            i = end
            continue
        m = _NUMBER.match(text, i)
        if m:
            atoms.append(Atom(m.group(), "number-literal", (i, m.end())))
            i = m.end()
            continue
        m = _NAME.match(text, i)
        if m:
            kind = "keyword" if m.group() in KEYWORDS else "identifier"
            atoms.append(Atom(m.group(), kind, (i, m.end())))
            i = m.end()
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                atoms.append(Atom(op, "operator", (i, i + len(op))))
                i += len(op)
                break
        else:
            atoms.append(Atom(ch, "punctuation", (i, i + 1)))
            i += 1
    return atoms


@dataclass(frozen=True)
class Alignment:
    matched: tuple[tuple[int, int], ...]  # (student_idx, solution_idx), increasing
    incorrect_student: tuple[int, ...]
    unmatched_solution: tuple[int, ...]


def align(student: list[SourceLine], solution: list[SourceLine]) -> Alignment:
    """LCS of the two line sequences under (indent, normalized) keys.

    Among maximum-length common subsequences the one with lexicographically
    smallest student indices wins (solution indices break remaining ties).
    """
    a = [ln.key for ln in student]
    b = [ln.key for ln in solution]
    n, m = len(a), len(b)
    # L[i][j] = LCS length of a[i:], b[j:]
    L = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                L[i][j] = L[i + 1][j + 1] + 1
            else:
                L[i][j] = max(L[i + 1][j], L[i][j + 1])

    matched: list[tuple[int, int]] = []
    i = j = 0
    while i < n and j < m and L[i][j] > 0:
        if a[i] == b[j] and L[i + 1][j + 1] + 1 == L[i][j]:
            matched.append((i, j))
            i += 1
            j += 1
        elif L[i][j + 1] == L[i][j]:
            # Skipping this solution line costs nothing, so keep student
            # line i in play for a later (leftmost) match.
            j += 1
        else:
            i += 1

    matched_students = {p[0] for p in matched}
    matched_solutions = {p[1] for p in matched}
    return Alignment(
        matched=tuple(matched),
        incorrect_student=tuple(
            k for k in range(n) if k not in matched_students
        ),
        unmatched_solution=tuple(
            k for k in range(m) if k not in matched_solutions
        ),
    )


def levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def similarity(a: SourceLine, b: SourceLine) -> float:
    """1 - normalized edit distance over normalized text; both-empty -> 1."""
    longest = max(len(a.normalized), len(b.normalized))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a.normalized, b.normalized) / longest
