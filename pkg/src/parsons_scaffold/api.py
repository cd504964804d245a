"""HTTP/JSON boundary over the session service.

The engine types carry answers; the wire must not. Puzzles cross this
boundary only through the public view built here, which strips solution
positions, distractor pairings, and block kinds for everything the student
still has to arrange.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import explain
from .errors import DomainError
from .evaluator import CodeEvaluator, eval_result_to_dict
from .grading import grade_result_to_dict
from .model import (
    Arrangement,
    ParsonsPuzzle,
    arrangement_from_dict,
    problem_from_dict,
    problem_to_dict,
)
from .providers import make_provider
from .session import Session, SessionService, SessionStore


def public_puzzle_view(puzzle: ParsonsPuzzle) -> dict:
    """Student-facing puzzle JSON: no solution_pos, kind, or pairing for
    anything in the tray; tray lines carry only indent relative to the
    block's first line."""
    fixed = sorted(puzzle.blocks_of_kind("fixed"), key=lambda b: b.solution_pos)
    blocks_by_id = {b.id: b for b in puzzle.blocks}
    tray = []
    for bid in puzzle.tray_order:
        block = blocks_by_id[bid]
        base = block.lines[0].indent
        tray.append(
            {
                "id": block.id,
                "lines": [
                    {"text": ln.normalized, "indent_delta": ln.indent - base}
                    for ln in block.lines
                ],
            }
        )
    return {
        "puzzle_id": puzzle.puzzle_id,
        "problem_id": puzzle.problem_id,
        "solution_line_count": puzzle.solution_line_count,
        "merges_applied": puzzle.merges_applied,
        "fixed_blocks": [
            {
                "id": b.id,
                "position": b.solution_pos,
                "lines": [
                    {"text": ln.normalized, "indent": ln.indent} for ln in b.lines
                ],
            }
            for b in fixed
        ],
        "tray_blocks": tray,
    }


def public_cloze_view(question: explain.ClozeQuestion) -> dict:
    """Cloze without the answer key."""
    return {
        "template": question.template,
        "blanks": [{"options": list(b.options)} for b in question.blanks],
    }


def session_view(session: Session) -> dict:
    return {
        "id": session.id,
        "problem_id": session.problem_id,
        "student_id": session.student_id,
        "phase": session.phase,
        "latest_code": session.latest_code,
        "parsons_failures": session.parsons_failures,
        "merges_allowed": session.merges_allowed,
        "used_parsons_help": session.used_parsons_help,
        "subgoals": list(session.subgoals),
        "puzzle": None
        if session.puzzle is None
        else public_puzzle_view(session.puzzle),
        "created": session.created,
        "updated": session.updated,
    }


def create_app(
    data_dir: str | None = None,
    provider_kind: str | None = None,
    provider_fixtures: dict | None = None,
    evaluator: CodeEvaluator | None = None,
) -> FastAPI:
    data_dir = data_dir or os.environ.get("DATA_DIR", "./data")
    provider_kind = provider_kind or os.environ.get("PROVIDER_KIND", "null")
    store = SessionStore(data_dir)
    provider = make_provider(
        provider_kind,
        cache_path=os.path.join(data_dir, "provider_cache.json"),
        fixtures=provider_fixtures,
    )
    service = SessionService(
        store, provider, evaluator=evaluator or CodeEvaluator()
    )
    app = FastAPI(title="parsons-scaffold", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(DomainError)
    async def domain_error_handler(request: Request, exc: DomainError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.post("/api/problems", status_code=201)
    async def create_problem(payload: dict):
        problem = problem_from_dict(payload)
        service.add_problem(problem)
        return {"id": problem.id}

    @app.get("/api/problems/{problem_id}")
    async def get_problem(problem_id: str):
        problem = service.store.load_problem(problem_id)
        doc = problem_to_dict(problem)
        del doc["solution_source"]  # students never see the reference solution
        return doc

    @app.post("/api/sessions", status_code=201)
    async def create_session(payload: dict):
        session = service.create_session(
            problem_id=payload["problem_id"],
            student_id=payload.get("student_id", "anonymous"),
        )
        return session_view(session)

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str):
        return session_view(service.get_session(session_id))

    @app.post("/api/sessions/{session_id}/code-attempts")
    async def code_attempt(session_id: str, payload: dict):
        result = service.submit_code(session_id, payload["code"])
        session = service.get_session(session_id)
        return {
            "result": eval_result_to_dict(result),
            "phase": session.phase,
            "self_explanation": None
            if session.cloze is None or session.phase != "SelfExplanation"
            else public_cloze_view(session.cloze),
        }

    @app.post("/api/sessions/{session_id}/help")
    async def request_help(session_id: str):
        outcome = service.request_help(session_id)
        return {
            "puzzle": public_puzzle_view(outcome["puzzle"]),
            "subgoals": list(outcome["subgoals"].items),
        }

    @app.post("/api/sessions/{session_id}/parsons-attempts")
    async def parsons_attempt(session_id: str, payload: dict):
        arr = arrangement_from_dict(payload)
        result = service.submit_parsons(session_id, arr)
        session = service.get_session(session_id)
        return {
            "result": grade_result_to_dict(result),
            "phase": session.phase,
            "merges_allowed": session.merges_allowed,
        }

    @app.post("/api/sessions/{session_id}/merges")
    async def merge(session_id: str, payload: dict):
        merged = service.request_merge(session_id, payload["a"], payload["b"])
        session = service.get_session(session_id)
        return {
            "puzzle": public_puzzle_view(merged),
            "merges_allowed": session.merges_allowed,
        }

    @app.post("/api/sessions/{session_id}/copy-solution")
    async def copy_solution(session_id: str):
        code = service.copy_solution(session_id)
        return {"code": code, "phase": service.get_session(session_id).phase}

    @app.get("/api/sessions/{session_id}/explanations/blocks/{block_id}")
    async def block_explanation(session_id: str, block_id: str):
        result = service.explain_block(session_id, block_id)
        return explain.block_explanation_to_dict(result)

    @app.get(
        "/api/sessions/{session_id}/explanations/blocks/{block_id}/atoms/{atom_index}"
    )
    async def atom_explanation(session_id: str, block_id: str, atom_index: int):
        result = service.explain_atom(session_id, block_id, atom_index)
        return explain.atom_explanation_to_dict(result)

    @app.get("/api/sessions/{session_id}/self-explanation")
    async def get_self_explanation(session_id: str):
        question = service.get_self_explanation(session_id)
        session = service.get_session(session_id)
        return {
            "question": public_cloze_view(question),
            "puzzle": None
            if session.puzzle is None
            else public_puzzle_view(session.puzzle),
        }

    @app.post("/api/sessions/{session_id}/self-explanation")
    async def post_self_explanation(session_id: str, payload: dict):
        grade = service.submit_self_explanation(session_id, payload["answers"])
        session = service.get_session(session_id)
        return {
            "correct": grade.correct,
            "per_blank": list(grade.per_blank),
            "phase": session.phase,
        }

    return app


def main() -> None:  # pragma: no cover - deployment entry point
    import uvicorn

    bind = os.environ.get("BIND_ADDR", "127.0.0.1:8000")
    host, _, port = bind.partition(":")
    uvicorn.run(create_app(), host=host, port=int(port or "8000"))


if __name__ == "__main__":  # pragma: no cover
    main()
