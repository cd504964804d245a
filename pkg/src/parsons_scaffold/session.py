"""Per-student session state machine and its persistence.

Phases: Writing -> (help) ParsonsActive -> (solve) ParsonsSolved -> (copy)
Writing -> (pass) SelfExplanation -> Done, with Done reached directly when
the student never used Parsons help. Three Parsons failures unlock one
block merge, plus one more per further failure.

Every state change appends to a JSON-lines event log; replaying a log
against a fresh store reproduces the final session exactly, including
timestamps (which ride on the events).
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import explain
from .align import align, normalize_source
from .errors import (
    AlreadyCorrect,
    InvalidPhase,
    MergeLocked,
    NotFound,
    ValidationFailure,
)
from .evaluator import CodeEvalResult, CodeEvaluator, eval_result_to_dict
from .generate import GenConfig, generate_puzzle, merge_blocks
from .grading import GradeResult, grade_parsons, grade_result_to_dict
from .model import (
    Arrangement,
    ParsonsPuzzle,
    Problem,
    problem_from_dict,
    problem_to_dict,
    puzzle_from_dict,
    puzzle_to_dict,
)

PHASES = ("Writing", "ParsonsActive", "ParsonsSolved", "Correct", "SelfExplanation", "Done")

EVENT_KINDS = (
    "code_attempt",
    "help_requested",
    "parsons_attempt",
    "merge",
    "copy_solution",
    "explanation_viewed",
    "cloze_answered",
    "phase_change",
)


@dataclass
class Session:
    id: str
    problem_id: str
    student_id: str
    phase: str = "Writing"
    latest_code: str = ""
    puzzle: ParsonsPuzzle | None = None
    solved_puzzle: ParsonsPuzzle | None = None  # retained across copy-back
    subgoals: list[str] = field(default_factory=list)
    cloze: explain.ClozeQuestion | None = None
    parsons_failures: int = 0
    help_count: int = 0
    used_parsons_help: bool = False
    created: float = 0.0
    updated: float = 0.0

    @property
    def merges_allowed(self) -> int:
        if self.phase != "ParsonsActive" or self.puzzle is None:
            return 0
        return max(0, max(0, self.parsons_failures - 2) - self.puzzle.merges_applied)


def session_to_dict(session: Session) -> dict:
    return {
        "id": session.id,
        "problem_id": session.problem_id,
        "student_id": session.student_id,
        "phase": session.phase,
        "latest_code": session.latest_code,
        "puzzle": None if session.puzzle is None else puzzle_to_dict(session.puzzle),
        "solved_puzzle": None
        if session.solved_puzzle is None
        else puzzle_to_dict(session.solved_puzzle),
        "subgoals": list(session.subgoals),
        "cloze": None if session.cloze is None else explain.cloze_to_dict(session.cloze),
        "parsons_failures": session.parsons_failures,
        "help_count": session.help_count,
        "used_parsons_help": session.used_parsons_help,
        "created": session.created,
        "updated": session.updated,
    }


def session_from_dict(d: dict) -> Session:
    return Session(
        id=d["id"],
        problem_id=d["problem_id"],
        student_id=d["student_id"],
        phase=d["phase"],
        latest_code=d["latest_code"],
        puzzle=None if d["puzzle"] is None else puzzle_from_dict(d["puzzle"]),
        solved_puzzle=None
        if d["solved_puzzle"] is None
        else puzzle_from_dict(d["solved_puzzle"]),
        subgoals=list(d["subgoals"]),
        cloze=None if d["cloze"] is None else explain.cloze_from_dict(d["cloze"]),
        parsons_failures=d["parsons_failures"],
        help_count=d["help_count"],
        used_parsons_help=d["used_parsons_help"],
        created=d["created"],
        updated=d["updated"],
    )


class SessionStore:
    """Embedded key-value store (one JSON file per entity) + event log."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        (self.root / "problems").mkdir(parents=True, exist_ok=True)
        self.events_path = self.root / "events.jsonl"
        self._lock = threading.Lock()
        self._seq: dict[str, int] = {}
        self._load_seq()

    def _load_seq(self) -> None:
        if not self.events_path.exists():
            return
        for line in self.events_path.read_text().splitlines():
            if line.strip():
                event = json.loads(line)
                self._seq[event["session_id"]] = event["seq"]

    def save_session(self, session: Session) -> None:
        path = self.root / "sessions" / f"{session.id}.json"
        path.write_text(json.dumps(session_to_dict(session), sort_keys=True))

    def load_session(self, session_id: str) -> Session:
        path = self.root / "sessions" / f"{session_id}.json"
        if not path.exists():
            raise NotFound(f"session {session_id!r} not found")
        return session_from_dict(json.loads(path.read_text()))

    def save_problem(self, problem: Problem) -> None:
        path = self.root / "problems" / f"{problem.id}.json"
        path.write_text(json.dumps(problem_to_dict(problem), sort_keys=True))

    def load_problem(self, problem_id: str) -> Problem:
        path = self.root / "problems" / f"{problem_id}.json"
        if not path.exists():
            raise NotFound(f"problem {problem_id!r} not found")
        return problem_from_dict(json.loads(path.read_text()))

    def append_event(self, session_id: str, kind: str, payload: dict, ts: float) -> dict:
        assert kind in EVENT_KINDS, kind
        with self._lock:
            seq = self._seq.get(session_id, 0) + 1
            self._seq[session_id] = seq
            event = {
                "session_id": session_id,
                "seq": seq,
                "kind": kind,
                "payload": payload,
                "ts": ts,
            }
            with self.events_path.open("a") as fh:
                fh.write(json.dumps(event) + "\n")
        return event

    def events_for(self, session_id: str) -> list[dict]:
        if not self.events_path.exists():
            return []
        events = []
        for line in self.events_path.read_text().splitlines():
            if line.strip():
                event = json.loads(line)
                if event["session_id"] == session_id:
                    events.append(event)
        return events


def _help_seed(session_id: str, help_count: int) -> int:
    digest = hashlib.sha256(f"{session_id}:{help_count}".encode()).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)


def _cloze_seed(session_id: str) -> int:
    digest = hashlib.sha256(f"{session_id}:cloze".encode()).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << 63) - 1)


class SessionService:
    """All session operations; per-session mutual exclusion.

    Every mutating operation accepts an optional ``ts`` so the replay path
    can pin timestamps to the recorded ones.
    """

    def __init__(
        self,
        store: SessionStore,
        provider,
        evaluator: CodeEvaluator | None = None,
        gen_config: GenConfig | None = None,
    ):
        self.store = store
        self.provider = provider
        self.evaluator = evaluator
        self.gen_config = gen_config or GenConfig()
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- problems ----------------------------------------------------------

    def add_problem(self, problem: Problem, validate: bool = True) -> None:
        if validate:
            if self.evaluator is None:
                raise ValidationFailure("no evaluator configured for validation")
            result = self.evaluator.run(problem.solution_source, list(problem.test_suite))
            if not result.passed:
                raise ValidationFailure(
                    f"reference solution fails its own suite for {problem.id!r}"
                )
        if not normalize_source(problem.solution_source):
            raise ValidationFailure("solution has no executable lines")
        self.store.save_problem(problem)

    # -- lifecycle ---------------------------------------------------------

    def create_session(
        self,
        problem_id: str,
        student_id: str,
        session_id: str | None = None,
        ts: float | None = None,
    ) -> Session:
        self.store.load_problem(problem_id)  # existence check
        now = time.time() if ts is None else ts
        session = Session(
            id=session_id or uuid.uuid4().hex,
            problem_id=problem_id,
            student_id=student_id,
            created=now,
            updated=now,
        )
        self.store.append_event(
            session.id,
            "phase_change",
            {
                "from": None,
                "to": "Writing",
                "problem_id": problem_id,
                "student_id": student_id,
            },
            now,
        )
        self.store.save_session(session)
        return session

    def get_session(self, session_id: str) -> Session:
        return self.store.load_session(session_id)

    # -- helpers -----------------------------------------------------------

    def _require_phase(self, session: Session, *phases: str) -> None:
        if session.phase not in phases:
            raise InvalidPhase(
                f"operation requires phase {' or '.join(phases)}, "
                f"session is in {session.phase}"
            )

    def _transition(self, session: Session, to: str, ts: float) -> None:
        self.store.append_event(
            session.id, "phase_change", {"from": session.phase, "to": to}, ts
        )
        session.phase = to

    def _finish(self, session: Session, ts: float) -> None:
        session.updated = ts
        self.store.save_session(session)

    # -- operations --------------------------------------------------------

    def request_help(self, session_id: str, ts: float | None = None) -> dict:
        with self._lock_for(session_id):
            session = self.store.load_session(session_id)
            self._require_phase(session, "Writing")
            now = time.time() if ts is None else ts
            problem = self.store.load_problem(session.problem_id)
            solution = normalize_source(problem.solution_source)
            student = normalize_source(session.latest_code)
            alignment = align(student, solution)
            seed = _help_seed(session.id, session.help_count + 1)
            cfg = GenConfig(
                max_distractors=self.gen_config.max_distractors,
                pair_threshold=self.gen_config.pair_threshold,
                seed=seed,
            )
            # AlreadyCorrect propagates; phase stays Writing and nothing
            # is logged because state did not change.
            puzzle = generate_puzzle(
                alignment,
                solution,
                student,
                cfg,
                puzzle_id=f"{session.id}-p{session.help_count + 1}",
                problem_id=session.problem_id,
            )
            subgoals = explain.generate_subgoals(
                problem.statement, solution, self.provider
            )
            session.help_count += 1
            session.puzzle = puzzle
            session.solved_puzzle = None
            session.subgoals = list(subgoals.items)
            session.parsons_failures = 0
            session.used_parsons_help = True
            self.store.append_event(
                session.id,
                "help_requested",
                {"help_count": session.help_count, "seed": seed},
                now,
            )
            self._transition(session, "ParsonsActive", now)
            self._finish(session, now)
            return {"puzzle": puzzle, "subgoals": subgoals, "session": session}

    def submit_parsons(
        self, session_id: str, arr: Arrangement, ts: float | None = None
    ) -> GradeResult:
        with self._lock_for(session_id):
            session = self.store.load_session(session_id)
            self._require_phase(session, "ParsonsActive")
            now = time.time() if ts is None else ts
            attempt = session.parsons_failures + 1
            result = grade_parsons(session.puzzle, arr, attempt_number=attempt)
            self.store.append_event(
                session.id,
                "parsons_attempt",
                {
                    "arrangement": [
                        {"block_id": bid, "indent": indent}
                        for bid, indent in arr.placements
                    ],
                    "result": grade_result_to_dict(result),
                },
                now,
            )
            if result.correct:
                self._transition(session, "ParsonsSolved", now)
            else:
                session.parsons_failures += 1
            self._finish(session, now)
            return result

    def request_merge(
        self, session_id: str, a: str, b: str, ts: float | None = None
    ) -> ParsonsPuzzle:
        with self._lock_for(session_id):
            session = self.store.load_session(session_id)
            self._require_phase(session, "ParsonsActive")
            now = time.time() if ts is None else ts
            if session.merges_allowed < 1:
                raise MergeLocked(
                    f"merging unlocks after 3 failures; "
                    f"{session.parsons_failures} so far"
                )
            merged = merge_blocks(
                session.puzzle, a, b, final_merge=session.merges_allowed == 1
            )
            session.puzzle = merged
            self.store.append_event(
                session.id,
                "merge",
                {"a": a, "b": b, "merges_applied": merged.merges_applied},
                now,
            )
            self._finish(session, now)
            return merged

    def copy_solution(self, session_id: str, ts: float | None = None) -> str:
        with self._lock_for(session_id):
            session = self.store.load_session(session_id)
            self._require_phase(session, "ParsonsSolved")
            now = time.time() if ts is None else ts
            code = "\n".join(
                ln.render() for ln in session.puzzle.solution_lines()
            ) + "\n"
            session.latest_code = code
            session.solved_puzzle = session.puzzle
            session.puzzle = None
            self.store.append_event(session.id, "copy_solution", {}, now)
            self._transition(session, "Writing", now)
            self._finish(session, now)
            return code

    def submit_code(
        self,
        session_id: str,
        code: str,
        ts: float | None = None,
        recorded_passed: bool | None = None,
    ) -> CodeEvalResult:
        with self._lock_for(session_id):
            session = self.store.load_session(session_id)
            self._require_phase(session, "Writing")
            now = time.time() if ts is None else ts
            if recorded_passed is None:
                if self.evaluator is None:
                    raise ValidationFailure("no code evaluator configured")
                problem = self.store.load_problem(session.problem_id)
                result = self.evaluator.run(code, list(problem.test_suite))
            else:
                result = CodeEvalResult(passed=recorded_passed, per_test=())
            session.latest_code = code
            self.store.append_event(
                session.id,
                "code_attempt",
                {"code": code, "passed": result.passed},
                now,
            )
            if result.passed:
                if session.used_parsons_help:
                    # The solved puzzle reappears, stripped of explanations,
                    # alongside the self-explanation menus.
                    session.puzzle = session.solved_puzzle
                    session.cloze = self._issue_cloze(session)
                    self._transition(session, "SelfExplanation", now)
                else:
                    self._transition(session, "Done", now)
            self._finish(session, now)
            return result

    def _issue_cloze(self, session: Session) -> explain.ClozeQuestion:
        puzzle = session.puzzle or session.solved_puzzle
        solution_blocks = sorted(
            (b for b in puzzle.blocks if b.kind != "distractor"),
            key=lambda b: b.solution_pos,
        )
        paired = {
            d.paired_with: d
            for d in puzzle.blocks_of_kind("distractor")
            if d.paired_with
        }
        solution_text = "\n".join(
            ln.render() for b in solution_blocks for ln in b.lines
        )
        block_exps = [
            explain.generate_block_explanation(
                b, paired.get(b.id), solution_text, self.provider
            )
            for b in solution_blocks
        ]
        return explain.generate_cloze(
            solution_blocks,
            block_exps,
            self.provider,
            seed=_cloze_seed(session.id),
        )

    def get_self_explanation(self, session_id: str) -> explain.ClozeQuestion:
        session = self.store.load_session(session_id)
        self._require_phase(session, "SelfExplanation")
        return session.cloze

    def submit_self_explanation(
        self, session_id: str, answers: list[int], ts: float | None = None
    ) -> explain.ClozeGrade:
        with self._lock_for(session_id):
            session = self.store.load_session(session_id)
            self._require_phase(session, "SelfExplanation")
            now = time.time() if ts is None else ts
            grade = explain.grade_cloze(session.cloze, answers)
            self.store.append_event(
                session.id,
                "cloze_answered",
                {
                    "answers": list(answers),
                    "correct": grade.correct,
                    "per_blank": list(grade.per_blank),
                },
                now,
            )
            if grade.correct:
                self._transition(session, "Done", now)
            self._finish(session, now)
            return grade

    def explain_block(self, session_id: str, block_id: str, ts: float | None = None):
        session = self.store.load_session(session_id)
        self._require_phase(session, "ParsonsSolved")
        puzzle = session.puzzle
        block = puzzle.block(block_id)
        paired = next(
            (
                d
                for d in puzzle.blocks_of_kind("distractor")
                if d.paired_with == block_id
            ),
            None,
        )
        solution_text = "\n".join(ln.render() for ln in puzzle.solution_lines())
        result = explain.generate_block_explanation(
            block, paired, solution_text, self.provider
        )
        now = time.time() if ts is None else ts
        self.store.append_event(
            session_id,
            "explanation_viewed",
            {"level": "block", "block_id": block_id},
            now,
        )
        session.updated = now
        self.store.save_session(session)
        return result

    def explain_atom(
        self, session_id: str, block_id: str, atom_index: int, ts: float | None = None
    ):
        session = self.store.load_session(session_id)
        self._require_phase(session, "ParsonsSolved")
        block = session.puzzle.block(block_id)
        result = explain.generate_atom_explanation(block, atom_index, self.provider)
        now = time.time() if ts is None else ts
        self.store.append_event(
            session_id,
            "explanation_viewed",
            {"level": "atom", "block_id": block_id, "atom_index": atom_index},
            now,
        )
        session.updated = now
        self.store.save_session(session)
        return result


def replay_log(events: list[dict], service: SessionService) -> Session:
    """Re-run a recorded event stream against a fresh service.

    phase_change events (other than the creation marker) are skipped; they
    are re-emitted by the operations themselves, so the rebuilt log matches
    the recorded one.
    """
    if not events:
        raise ValueError("empty event log")
    first = events[0]
    if first["kind"] != "phase_change" or first["payload"].get("from") is not None:
        raise ValueError("log must start with the session-creation event")
    session_id = first["session_id"]
    service.create_session(
        problem_id=first["payload"]["problem_id"],
        student_id=first["payload"]["student_id"],
        session_id=session_id,
        ts=first["ts"],
    )
    for event in events[1:]:
        kind, payload, ts = event["kind"], event["payload"], event["ts"]
        if kind == "phase_change":
            continue
        if kind == "code_attempt":
            service.submit_code(
                session_id,
                payload["code"],
                ts=ts,
                recorded_passed=payload["passed"],
            )
        elif kind == "help_requested":
            service.request_help(session_id, ts=ts)
        elif kind == "parsons_attempt":
            arr = Arrangement(
                placements=tuple(
                    (p["block_id"], p["indent"]) for p in payload["arrangement"]
                )
            )
            service.submit_parsons(session_id, arr, ts=ts)
        elif kind == "merge":
            service.request_merge(session_id, payload["a"], payload["b"], ts=ts)
        elif kind == "copy_solution":
            service.copy_solution(session_id, ts=ts)
        elif kind == "cloze_answered":
            service.submit_self_explanation(session_id, payload["answers"], ts=ts)
        elif kind == "explanation_viewed":
            if payload["level"] == "block":
                service.explain_block(session_id, payload["block_id"], ts=ts)
            else:
                service.explain_atom(
                    session_id, payload["block_id"], payload["atom_index"], ts=ts
                )
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    return service.get_session(session_id)
