"""Domain error hierarchy shared by the engine, the HTTP API, and the CLI.

Every error carries a stable ``code`` string so the API layer can map it to
a JSON error body without inspecting types, and the CLI can echo it on
stderr.
"""


class DomainError(Exception):
    """Base class for all expected, caller-visible failures."""

    code = "domain_error"
    http_status = 400

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownBlock(DomainError):
    code = "unknown_block"
    http_status = 422


class DuplicateBlock(DomainError):
    code = "duplicate_block"
    http_status = 422


class AlreadyCorrect(DomainError):
    code = "already_correct"
    http_status = 409


class NotAdjacent(DomainError):
    code = "not_adjacent"
    http_status = 422


class NotMovable(DomainError):
    code = "not_movable"
    http_status = 422


class TooFewBlocks(DomainError):
    code = "too_few_blocks"
    http_status = 422


class InvalidPhase(DomainError):
    code = "invalid_phase"
    http_status = 409


class MergeLocked(DomainError):
    code = "merge_locked"
    http_status = 409


class AnswerCountMismatch(DomainError):
    code = "answer_count_mismatch"
    http_status = 422


class AtomOutOfRange(DomainError):
    code = "atom_out_of_range"
    http_status = 422


class EvaluatorUnavailable(DomainError):
    code = "evaluator_unavailable"
    http_status = 503


class NotFound(DomainError):
    code = "not_found"
    http_status = 404


class ValidationFailure(DomainError):
    """Problem authoring rejected (e.g. reference solution fails its suite)."""

    code = "validation_failure"
    http_status = 422
