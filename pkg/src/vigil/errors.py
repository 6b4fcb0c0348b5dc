"""Exception taxonomy shared across modules.

Validation-type errors map to CLI exit code 1, the rest to exit code 2.
"""


class VigilError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(VigilError, ValueError):
    """Malformed input: bad filter values, out-of-range parameters, bad requests."""


class ConfigurationError(ValidationError):
    """Invalid run configuration (unknown keys, non-positive windows, ...)."""


class SourceUnavailableError(VigilError):
    """Stream uri does not resolve to a readable fixture or endpoint."""


class MalformedFixtureError(VigilError):
    """Bytes do not parse as an SVF fixture."""


class DuplicateKeyError(VigilError):
    """Write-once violation: storage key already holds a blob."""


class ChunkNotFoundError(VigilError):
    """Storage key has no blob."""


class PipelineStageError(VigilError):
    """A preprocessing stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class InferenceUnavailableError(VigilError):
    """Classifier could not produce a result; the chunk is retained for retry."""


class ResponseSchemaError(VigilError):
    """Remote classifier answered, but the payload violates the wire contract."""


class TrainingDivergedError(VigilError):
    """Non-finite loss during gradient descent; carries diagnostics."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"non-finite loss {loss!r} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss


class UnknownChunkError(VigilError):
    """Inference refers to a chunk_id the backend has never seen."""


class UnknownAlertError(VigilError):
    """No alert with this id."""


class AlertConflictError(VigilError):
    """Alert was already reviewed; state transitions happen exactly once."""


class AnnotationFormatError(ValidationError):
    """Annotation file line failed to parse; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message}, line {line}")
        self.line = line


class InsufficientCapacityError(ValidationError):
    """Capacity plan supports zero clients."""
