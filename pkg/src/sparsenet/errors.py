"""Exception taxonomy shared across the package.

Argument errors raise plain :class:`ValueError`; everything that maps to a
distinct CLI exit code gets its own class here.
"""


class SparsenetError(Exception):
    """Base class for package-specific failures."""


class FormatError(SparsenetError):
    """Malformed input data: edge lists, IDX files, dataset schemas."""


class StructureError(SparsenetError):
    """Graph/DAG violates a structural precondition (cycle, disconnected)."""


class GenerationError(SparsenetError):
    """A random-graph generator exhausted its retry budget."""


class EmbeddingError(SparsenetError):
    """A layered DAG cannot be embedded into a classifier."""


class TrainingDivergedError(SparsenetError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"non-finite loss at epoch {epoch}")


class FittingError(SparsenetError):
    """An estimator failed to converge."""
