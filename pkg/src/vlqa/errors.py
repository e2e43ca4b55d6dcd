"""Exception types shared across the package."""

from __future__ import annotations


class VlqaError(Exception):
    """Base class for all library errors."""


class MismatchedVideoError(VlqaError):
    """A moment was paired with a video asset it does not belong to."""


class DuplicateDocIdError(VlqaError):
    """Two documents with the same doc_id were handed to the indexer."""


class SnapshotFormatError(VlqaError):
    """On-disk index snapshot has a bad magic or an unsupported version."""


class EmptyInputError(VlqaError):
    """An operation that requires at least one element got none."""


class UnsortedFramesError(VlqaError):
    """Frame features were not in strictly increasing frame order."""


class NonTilingSplitsError(VlqaError):
    """Split intervals do not tile [0, duration] contiguously."""


class GatewayError(VlqaError):
    """Base class for LLM gateway failures."""


class GatewayTimeoutError(GatewayError):
    """The upstream model did not answer within the configured timeout."""


class UpstreamError(GatewayError):
    """The upstream model kept returning 5xx after retries."""


class AuthError(GatewayError):
    """The upstream rejected our credentials (401/403). Never retried."""


class RateLimitedError(GatewayError):
    """The upstream kept returning 429 after retries."""


class ScriptMissError(GatewayError):
    """The scripted gateway has no response registered for the prompt tag."""


class NoQueriesGeneratedError(VlqaError):
    """The model produced zero parseable search queries, even after a retry."""


class UnknownDocIdError(VlqaError):
    """A retrieval item references a doc_id absent from the index snapshot."""


class UnknownMomentIdError(VlqaError):
    """An eval case references a moment_id absent from the library."""


class StrictValidationError(VlqaError):
    """Strict ingestion aborted on an invalid record."""

    def __init__(self, path: str, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


class StageError(VlqaError):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
