"""Four tiers of textual explanation around a puzzle.

Each generator asks the provider for structured JSON, validates it against
the tier's schema, retries once, and then falls back to a deterministic
template-based generator. The fallback path keeps the whole system usable
offline; only structure is validated, never pedagogy.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .align import KEYWORDS
from .errors import AnswerCountMismatch, AtomOutOfRange
from .generate import Xorshift64Star
from .model import Block, ParsonsPuzzle, SourceLine
from .providers import ProviderFailure, ProviderRequest

SUBGOAL_MIN, SUBGOAL_MAX = 4, 6
SUBGOAL_MAX_LEN = 160
CLOZE_MIN_BLANKS, CLOZE_MAX_BLANKS = 3, 6
CLOZE_MIN_OPTIONS = 3


@dataclass(frozen=True)
class SubgoalList:
    items: tuple[str, ...]


@dataclass(frozen=True)
class DistractorContrast:
    why_correct: str
    why_distractor_wrong: str


@dataclass(frozen=True)
class BlockExplanation:
    block_id: str
    behavior: str
    purpose: str
    distractor_contrast: DistractorContrast | None = None


@dataclass(frozen=True)
class AtomExplanation:
    block_id: str
    atom_index: int
    surface: str
    purpose: str
    execution: str | None = None


@dataclass(frozen=True)
class ClozeBlank:
    options: tuple[str, ...]
    correct_index: int


@dataclass(frozen=True)
class ClozeQuestion:
    template: str  # contains {{0}} .. {{k-1}} markers
    blanks: tuple[ClozeBlank, ...]


@dataclass(frozen=True)
class ClozeGrade:
    correct: bool
    per_blank: tuple[bool, ...]


# ---------------------------------------------------------------------------
# Structural validation
# ---------------------------------------------------------------------------

def validate_subgoals(items) -> list[str]:
    problems = []
    if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
        return ["not a list of strings"]
    if not SUBGOAL_MIN <= len(items) <= SUBGOAL_MAX:
        problems.append(f"need {SUBGOAL_MIN}-{SUBGOAL_MAX} items, got {len(items)}")
    for i, item in enumerate(items):
        if not item.strip():
            problems.append(f"item {i} empty")
        if len(item) > SUBGOAL_MAX_LEN:
            problems.append(f"item {i} longer than {SUBGOAL_MAX_LEN} chars")
    return problems


def validate_cloze(obj) -> list[str]:
    problems = []
    if not isinstance(obj, dict):
        return ["not an object"]
    template = obj.get("template")
    blanks = obj.get("blanks")
    if not isinstance(template, str) or not isinstance(blanks, list):
        return ["missing template or blanks"]
    if not CLOZE_MIN_BLANKS <= len(blanks) <= CLOZE_MAX_BLANKS:
        problems.append(
            f"need {CLOZE_MIN_BLANKS}-{CLOZE_MAX_BLANKS} blanks, got {len(blanks)}"
        )
    for i, blank in enumerate(blanks):
        if not isinstance(blank, dict):
            problems.append(f"blank {i} not an object")
            continue
        options = blank.get("options")
        idx = blank.get("correct_index")
        if not isinstance(options, list) or len(options) < CLOZE_MIN_OPTIONS:
            problems.append(f"blank {i} needs >= {CLOZE_MIN_OPTIONS} options")
            continue
        if len(set(options)) != len(options):
            problems.append(f"blank {i} has duplicate options")
        if not isinstance(idx, int) or not 0 <= idx < len(options):
            problems.append(f"blank {i} correct_index out of range")
        if f"{{{{{i}}}}}" not in template:
            problems.append(f"marker {{{{{i}}}}} missing from template")
    return problems


def _ask_json(provider, template_id: str, prompt: str):
    """One provider round trip parsed as JSON; None on any failure."""
    try:
        response = provider.complete(
            ProviderRequest(template_id=template_id, rendered_prompt=prompt)
        )
        return json.loads(response.text)
    except (ProviderFailure, json.JSONDecodeError):
        return None


def _ask_validated(provider, template_id, prompt, validate):
    """Provider call, validated; one retry, then None (caller falls back)."""
    for _ in range(2):
        parsed = _ask_json(provider, template_id, prompt)
        if parsed is not None and not validate(parsed):
            return parsed
    return None


# ---------------------------------------------------------------------------
# Line-role analysis shared by the fallback generators
# ---------------------------------------------------------------------------

def line_role(line: SourceLine) -> str:
    text = line.normalized
    first = text.split(" ", 1)[0].rstrip(":")
    if first == "def":
        return "signature"
    if first in ("for", "while"):
        return "loop"
    if first in ("if", "elif", "else"):
        return "branch"
    if first == "return":
        return "return"
    if re.search(r"(?<![=<>!+\-*/%])=(?!=)", text):
        return "assignment"
    if first == "print" or text.startswith("print("):
        return "output"
    return "statement"


def _identifiers(line: SourceLine) -> list[str]:
    return [a.text for a in line.atoms if a.kind == "identifier"]


def _assignment_sides(text: str) -> tuple[str, str]:
    m = re.search(r"(?<![=<>!+\-*/%])=(?!=)", text)
    if not m:
        return text, ""
    return text[: m.start()].strip(), text[m.end() :].strip()


def describe_line(line: SourceLine) -> str:
    """One plain-language sentence about what the line does when it runs."""
    text = line.normalized
    role = line_role(line)
    if role == "signature":
        name = _identifiers(line)[0] if _identifiers(line) else "the function"
        params = _identifiers(line)[1:]
        if params:
            return (
                f"Defines the function {name} taking "
                f"{', '.join(params)} as input."
            )
        return f"Defines the function {name}."
    if role == "loop":
        if text.startswith("for"):
            ids = _identifiers(line)
            var = ids[0] if ids else "each item"
            seq = ids[1] if len(ids) > 1 else "the sequence"
            return f"Runs its body once for each {var} in {seq}."
        return f"Repeats its body while the condition {text[len('while '):].rstrip(':')} holds."
    if role == "branch":
        return f"Chooses whether to run its body based on the condition in '{text}'."
    if role == "return":
        value = text[len("return") :].strip() or "None"
        return f"Returns {value} to the caller and ends the function."
    if role == "assignment":
        lhs, rhs = _assignment_sides(text)
        if re.fullmatch(r"\w+ ?[+\-*/]= ?.*", text):
            return f"Updates {text.split()[0]} using the value {rhs}."
        return f"Assigns the value {rhs} to {lhs}."
    if role == "output":
        return f"Prints the value of {text[len('print') :].strip('()')}."
    return f"Executes the statement '{text}'."


def _line_purpose(line: SourceLine) -> str:
    role = line_role(line)
    purposes = {
        "signature": "It declares the entry point the tests will call.",
        "loop": "It walks through the data so every element is handled.",
        "branch": "It selects the right behavior for this case.",
        "return": "It hands the finished result back to the caller.",
        "assignment": "It keeps track of a value the later steps rely on.",
        "output": "It produces the program's visible output.",
        "statement": "It performs one step of the overall task.",
    }
    return purposes[role]


# ---------------------------------------------------------------------------
# Subgoal guidance
# ---------------------------------------------------------------------------

_SUBGOAL_PROMPT = """Break the task below into 4-6 short subgoals for a novice.
Answer with a JSON array of strings, each at most 160 characters.

Task: {statement}

Reference solution:
{solution}
"""

_GENERIC_SUBGOALS = (
    "Read the problem statement and identify the inputs and expected output.",
    "Sketch the order of the steps before arranging the blocks.",
    "Check each block's indentation against the structure of the program.",
    "Trace the finished program on a small example to confirm it works.",
)


def _solution_groups(lines: list[SourceLine]) -> list[list[SourceLine]]:
    """Group lines so a loop/branch header swallows its deeper body lines."""
    groups: list[list[SourceLine]] = []
    header_indent: int | None = None
    for line in lines:
        if (
            groups
            and header_indent is not None
            and line.indent > header_indent
        ):
            groups[-1].append(line)
            continue
        groups.append([line])
        header_indent = (
            line.indent if line_role(line) in ("loop", "branch") else None
        )
    return groups


def fallback_subgoals(solution_lines: list[SourceLine]) -> SubgoalList:
    items = []
    for group in _solution_groups(solution_lines):
        sentence = describe_line(group[0])
        if len(group) > 1 and line_role(group[0]) in ("loop", "branch"):
            inner = "; ".join(describe_line(ln).rstrip(".") for ln in group[1:])
            sentence = f"{sentence[:-1]}: {inner.lower()}."
        items.append(sentence[:SUBGOAL_MAX_LEN])
    if len(items) > SUBGOAL_MAX:
        head = items[: SUBGOAL_MAX - 1]
        head.append("Finish the remaining steps and check the result."[:SUBGOAL_MAX_LEN])
        items = head
    pad = iter(_GENERIC_SUBGOALS)
    while len(items) < SUBGOAL_MIN:
        items.append(next(pad))
    return SubgoalList(items=tuple(items))


def generate_subgoals(statement: str, solution_lines: list[SourceLine], provider) -> SubgoalList:
    prompt = _SUBGOAL_PROMPT.format(
        statement=statement,
        solution="\n".join(ln.render() for ln in solution_lines),
    )
    parsed = _ask_validated(provider, "subgoals-v1", prompt, validate_subgoals)
    if parsed is not None:
        return SubgoalList(items=tuple(parsed))
    return fallback_subgoals(solution_lines)


# ---------------------------------------------------------------------------
# Block-level explanations
# ---------------------------------------------------------------------------

_BLOCK_PROMPT = """Explain this code block to a novice. Answer with JSON:
{{"behavior": "...", "purpose": "..."{contrast_fields}}}

Full solution:
{solution}

Block:
{block}
{distractor_part}"""


def _validate_block_payload(expect_contrast: bool):
    def check(obj) -> list[str]:
        if not isinstance(obj, dict):
            return ["not an object"]
        problems = []
        for field in ("behavior", "purpose"):
            if not isinstance(obj.get(field), str) or not obj[field].strip():
                problems.append(f"{field} missing or empty")
        if expect_contrast:
            for field in ("why_correct", "why_distractor_wrong"):
                if not isinstance(obj.get(field), str) or not obj[field].strip():
                    problems.append(f"{field} missing or empty")
        return problems

    return check


def fallback_block_explanation(
    block: Block, paired_distractor: Block | None
) -> BlockExplanation:
    behavior = " ".join(describe_line(ln) for ln in block.lines)
    purpose = _line_purpose(block.lines[0])
    contrast = None
    if paired_distractor is not None:
        good = block.lines[0]
        bad = paired_distractor.lines[0]
        why_correct = (
            f"The solution needs '{good.normalized}' at indentation level "
            f"{good.indent} here. {describe_line(good)}"
        )
        if good.normalized == bad.normalized:
            why_wrong = (
                f"'{bad.normalized}' is the right text but at indentation level "
                f"{bad.indent}, which would attach it to the wrong part of the program."
            )
        else:
            why_wrong = (
                f"'{bad.normalized}' comes from your earlier attempt; "
                f"it does not perform the step the solution needs at this point."
            )
        contrast = DistractorContrast(
            why_correct=why_correct, why_distractor_wrong=why_wrong
        )
    return BlockExplanation(
        block_id=block.id,
        behavior=behavior,
        purpose=purpose,
        distractor_contrast=contrast,
    )


def generate_block_explanation(
    block: Block,
    paired_distractor: Block | None,
    solution_text: str,
    provider,
) -> BlockExplanation:
    if block.kind == "distractor":
        raise ValueError("distractors are explained via their paired block")
    expect_contrast = paired_distractor is not None
    contrast_fields = (
        ', "why_correct": "...", "why_distractor_wrong": "..."'
        if expect_contrast
        else ""
    )
    distractor_part = (
        "Paired distractor from the student's attempt:\n"
        + "\n".join(ln.render() for ln in paired_distractor.lines)
        if expect_contrast
        else ""
    )
    prompt = _BLOCK_PROMPT.format(
        contrast_fields=contrast_fields,
        solution=solution_text,
        block="\n".join(ln.render() for ln in block.lines),
        distractor_part=distractor_part,
    )
    parsed = _ask_validated(
        provider,
        f"block-v1:{block.id}",
        prompt,
        _validate_block_payload(expect_contrast),
    )
    if parsed is not None:
        contrast = (
            DistractorContrast(
                why_correct=parsed["why_correct"],
                why_distractor_wrong=parsed["why_distractor_wrong"],
            )
            if expect_contrast
            else None
        )
        return BlockExplanation(
            block_id=block.id,
            behavior=parsed["behavior"],
            purpose=parsed["purpose"],
            distractor_contrast=contrast,
        )
    return fallback_block_explanation(block, paired_distractor)


# ---------------------------------------------------------------------------
# Atom-level explanations
# ---------------------------------------------------------------------------

KEYWORD_NOTES = {
    "def": ("Starts a function definition.", "Gives the code a reusable name."),
    "return": ("Ends the function and sends a value back.", "Delivers the result."),
    "for": ("Begins a loop over a sequence.", "Visits every element in turn."),
    "while": ("Begins a loop guarded by a condition.", "Repeats until the condition fails."),
    "if": ("Runs the body only when the condition is true.", "Selects a branch."),
    "elif": ("Checks another condition when the previous ones failed.", "Adds a branch."),
    "else": ("Runs when no previous condition matched.", "Covers the remaining case."),
    "in": ("Takes each element of the sequence on its right.", "Connects loop variable and data."),
    "and": ("True only when both sides are true.", "Combines conditions."),
    "or": ("True when either side is true.", "Combines conditions."),
    "not": ("Flips a truth value.", "Negates a condition."),
    "None": ("The value meaning 'nothing here'.", "Marks an absent result."),
    "True": ("The boolean truth value.", "States a fact that holds."),
    "False": ("The boolean falsehood value.", "States a fact that does not hold."),
    "break": ("Leaves the enclosing loop immediately.", "Stops early."),
    "continue": ("Skips to the next loop iteration.", "Ignores the rest of this pass."),
    "pass": ("Does nothing.", "Fills a body that needs no action."),
}

OPERATOR_NOTES = {
    "=": ("Stores the right-hand value under the left-hand name.", "Remembers a value."),
    "==": ("Compares two values for equality.", "Tests a condition."),
    "!=": ("Compares two values for inequality.", "Tests a condition."),
    "+": ("Adds the two values.", "Combines quantities."),
    "-": ("Subtracts the right value from the left.", "Takes a difference."),
    "*": ("Multiplies the two values.", "Scales a quantity."),
    "/": ("Divides the left value by the right.", "Splits a quantity."),
    "%": ("Gives the remainder of a division.", "Checks divisibility or wraps around."),
    "+=": ("Adds the right value into the variable on the left.", "Accumulates."),
    "-=": ("Subtracts the right value from the variable on the left.", "Decreases a total."),
    "<": ("True when the left value is smaller.", "Orders two values."),
    ">": ("True when the left value is larger.", "Orders two values."),
    "<=": ("True when the left value is smaller or equal.", "Orders two values."),
    ">=": ("True when the left value is larger or equal.", "Orders two values."),
    "//": ("Divides and drops the fractional part.", "Counts whole groups."),
    "**": ("Raises the left value to a power.", "Computes exponents."),
}

PUNCTUATION_NOTES = {
    ":": "Introduces the indented body that follows.",
    "(": "Opens a grouping or call.",
    ")": "Closes a grouping or call.",
    "[": "Opens an index or list.",
    "]": "Closes an index or list.",
    ",": "Separates items in a sequence.",
    ".": "Accesses an attribute or method.",
}

_ATOM_PROMPT = """Explain the highlighted element of this code line for a novice.
Answer with JSON: {{"surface": "{surface}", "execution": "..." or null, "purpose": "..."}}

Line: {line}
Element: {surface} (a {kind})
"""


def _validate_atom_payload(surface: str, kind: str):
    def check(obj) -> list[str]:
        if not isinstance(obj, dict):
            return ["not an object"]
        problems = []
        if obj.get("surface") != surface:
            problems.append("surface must echo the atom text")
        if not isinstance(obj.get("purpose"), str) or not obj["purpose"].strip():
            problems.append("purpose missing")
        execution = obj.get("execution")
        if kind == "punctuation":
            if execution is not None and not isinstance(execution, str):
                problems.append("execution must be text or null")
        elif not isinstance(execution, str) or not execution.strip():
            problems.append("execution required for executing atoms")
        return problems

    return check


def fallback_atom_explanation(block: Block, atom_index: int) -> AtomExplanation:
    atoms = [a for ln in block.lines for a in ln.atoms]
    atom = atoms[atom_index]
    if atom.kind == "keyword" and atom.text in KEYWORD_NOTES:
        execution, purpose = KEYWORD_NOTES[atom.text]
    elif atom.kind == "keyword":
        execution = f"The keyword '{atom.text}' directs how this statement runs."
        purpose = "It is part of the statement's fixed structure."
    elif atom.kind == "operator" and atom.text in OPERATOR_NOTES:
        execution, purpose = OPERATOR_NOTES[atom.text]
    elif atom.kind == "operator":
        execution = f"Applies the '{atom.text}' operation to its operands."
        purpose = "It combines the surrounding values."
    elif atom.kind == "identifier":
        execution = f"Evaluates to the value currently bound to the name '{atom.text}'."
        purpose = f"The name '{atom.text}' carries data between the steps."
    elif atom.kind in ("number-literal", "string-literal"):
        execution = f"Evaluates to the constant value {atom.text}."
        purpose = "It supplies a fixed value the program needs."
    else:  # punctuation: no execution of its own
        execution = None
        purpose = PUNCTUATION_NOTES.get(
            atom.text, f"The symbol '{atom.text}' structures the statement."
        )
    return AtomExplanation(
        block_id=block.id,
        atom_index=atom_index,
        surface=atom.text,
        execution=execution,
        purpose=purpose,
    )


def generate_atom_explanation(block: Block, atom_index: int, provider) -> AtomExplanation:
    atoms = [a for ln in block.lines for a in ln.atoms]
    if not 0 <= atom_index < len(atoms):
        raise AtomOutOfRange(
            f"atom index {atom_index} out of range for block {block.id}"
        )
    atom = atoms[atom_index]
    prompt = _ATOM_PROMPT.format(
        surface=atom.text,
        line=" / ".join(ln.normalized for ln in block.lines),
        kind=atom.kind,
    )
    parsed = _ask_validated(
        provider,
        f"atom-v1:{block.id}:{atom_index}",
        prompt,
        _validate_atom_payload(atom.text, atom.kind),
    )
    if parsed is not None:
        return AtomExplanation(
            block_id=block.id,
            atom_index=atom_index,
            surface=atom.text,
            execution=parsed.get("execution"),
            purpose=parsed["purpose"],
        )
    return fallback_atom_explanation(block, atom_index)


# ---------------------------------------------------------------------------
# Self-explanation cloze
# ---------------------------------------------------------------------------

_CLOZE_PROMPT = """Write a short explanation of the solution's reasoning with
{k} keywords blanked out as {{{{0}}}} .. markers. Answer with JSON:
{{"template": "...", "blanks": [{{"options": ["..."], "correct_index": 0}}]}}
Each blank needs at least 3 distinct same-kind options including the correct one.

Solution:
{solution}
"""

_FALLBACK_OPTION_POOL = {
    "keyword": ["while", "if", "elif", "import", "lambda", "with"],
    "identifier": ["total", "index", "count", "result", "items", "value"],
}

_BLANK_WORD = re.compile(r"\w+")


def fallback_cloze(
    solution_blocks: list[Block],
    block_explanations: list[BlockExplanation],
    seed: int,
) -> ClozeQuestion:
    """Blank keyword/identifier atoms out of the concatenated explanations."""
    rng = Xorshift64Star(seed)
    template = " ".join(e.behavior for e in block_explanations)
    atoms = [a for b in solution_blocks for ln in b.lines for a in ln.atoms]
    by_kind: dict[str, list[str]] = {"keyword": [], "identifier": []}
    for atom in atoms:
        if atom.kind in by_kind and atom.text not in by_kind[atom.kind]:
            by_kind[atom.kind].append(atom.text)

    words_in_template = set(_BLANK_WORD.findall(template))
    candidates = [
        (kind, text)
        for kind in ("identifier", "keyword")
        for text in by_kind[kind]
        if text in words_in_template
    ]
    # Top up from general concept words present in the text.
    concept_pool = ["Returns", "Defines", "value", "function", "caller", "body"]
    for word in concept_pool:
        if len(candidates) >= CLOZE_MAX_BLANKS:
            break
        if word in words_in_template and all(c[1] != word for c in candidates):
            candidates.append(("identifier", word))
    if len(candidates) < CLOZE_MIN_BLANKS:
        for word in sorted(words_in_template):
            if len(candidates) >= CLOZE_MIN_BLANKS:
                break
            if len(word) >= 3 and all(c[1] != word for c in candidates):
                candidates.append(("identifier", word))
    candidates = candidates[:CLOZE_MAX_BLANKS]

    blanks: list[ClozeBlank] = []
    for i, (kind, word) in enumerate(candidates):
        template = re.sub(
            rf"\b{re.escape(word)}\b", f"{{{{{i}}}}}", template, count=1
        )
        distractor_pool = [t for t in by_kind.get(kind, []) if t != word]
        for extra in _FALLBACK_OPTION_POOL[kind]:
            if extra != word and extra not in distractor_pool:
                distractor_pool.append(extra)
        wrong: list[str] = []
        while len(wrong) < CLOZE_MIN_OPTIONS - 1 and distractor_pool:
            wrong.append(distractor_pool.pop(rng.below(len(distractor_pool))))
        options = wrong + [word]
        # Deterministic option order: rotate by rng so the key is not last.
        offset = rng.below(len(options))
        options = options[offset:] + options[:offset]
        blanks.append(
            ClozeBlank(
                options=tuple(options), correct_index=options.index(word)
            )
        )
    question = ClozeQuestion(template=template, blanks=tuple(blanks))
    assert not validate_cloze(cloze_to_dict(question)), "fallback cloze invalid"
    return question


def generate_cloze(
    solution_blocks: list[Block],
    block_explanations: list[BlockExplanation],
    provider,
    seed: int = 0,
) -> ClozeQuestion:
    solution_text = "\n".join(
        ln.render() for b in solution_blocks for ln in b.lines
    )
    prompt = _CLOZE_PROMPT.format(k=4, solution=solution_text)
    parsed = _ask_validated(provider, "cloze-v1", prompt, validate_cloze)
    if parsed is not None:
        return ClozeQuestion(
            template=parsed["template"],
            blanks=tuple(
                ClozeBlank(
                    options=tuple(b["options"]), correct_index=b["correct_index"]
                )
                for b in parsed["blanks"]
            ),
        )
    return fallback_cloze(solution_blocks, block_explanations, seed)


def grade_cloze(question: ClozeQuestion, answers: list[int]) -> ClozeGrade:
    if len(answers) != len(question.blanks):
        raise AnswerCountMismatch(
            f"expected {len(question.blanks)} answers, got {len(answers)}"
        )
    per_blank = tuple(
        answer == blank.correct_index
        for answer, blank in zip(answers, question.blanks)
    )
    return ClozeGrade(correct=all(per_blank), per_blank=per_blank)


# ---------------------------------------------------------------------------
# JSON encodings
# ---------------------------------------------------------------------------

def subgoals_to_dict(subgoals: SubgoalList) -> dict:
    return {"items": list(subgoals.items)}


def block_explanation_to_dict(exp: BlockExplanation) -> dict:
    return {
        "block_id": exp.block_id,
        "behavior": exp.behavior,
        "purpose": exp.purpose,
        "distractor_contrast": None
        if exp.distractor_contrast is None
        else {
            "why_correct": exp.distractor_contrast.why_correct,
            "why_distractor_wrong": exp.distractor_contrast.why_distractor_wrong,
        },
    }


def atom_explanation_to_dict(exp: AtomExplanation) -> dict:
    return {
        "block_id": exp.block_id,
        "atom_index": exp.atom_index,
        "surface": exp.surface,
        "execution": exp.execution,
        "purpose": exp.purpose,
    }


def cloze_to_dict(question: ClozeQuestion) -> dict:
    return {
        "template": question.template,
        "blanks": [
            {"options": list(b.options), "correct_index": b.correct_index}
            for b in question.blanks
        ],
    }


def cloze_from_dict(d: dict) -> ClozeQuestion:
    return ClozeQuestion(
        template=d["template"],
        blanks=tuple(
            ClozeBlank(options=tuple(b["options"]), correct_index=b["correct_index"])
            for b in d["blanks"]
        ),
    )


def explanation_bundle(puzzle: ParsonsPuzzle, provider, seed: int = 0) -> dict:
    """Everything the offline CLI renders for one puzzle."""
    solution_blocks = sorted(
        (b for b in puzzle.blocks if b.kind != "distractor"),
        key=lambda b: b.solution_pos,
    )
    solution_text = "\n".join(
        ln.render() for b in solution_blocks for ln in b.lines
    )
    paired = {
        d.paired_with: d
        for d in puzzle.blocks_of_kind("distractor")
        if d.paired_with
    }
    subgoals = generate_subgoals("", puzzle.solution_lines(), provider)
    block_exps = [
        generate_block_explanation(b, paired.get(b.id), solution_text, provider)
        for b in solution_blocks
    ]
    atom_exps = [
        generate_atom_explanation(b, i, provider)
        for b in solution_blocks
        for i in range(sum(len(ln.atoms) for ln in b.lines))
    ]
    cloze = generate_cloze(solution_blocks, block_exps, provider, seed=seed)
    return {
        "subgoals": subgoals_to_dict(subgoals),
        "blocks": [block_explanation_to_dict(e) for e in block_exps],
        "atoms": [atom_explanation_to_dict(e) for e in atom_exps],
        "cloze": cloze_to_dict(cloze),
    }
