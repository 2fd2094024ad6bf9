"""Exception types shared across the package."""


class TendonLfdError(Exception):
    """Base class for all package errors."""


class InvalidConfig(TendonLfdError):
    pass


class EmptyShape(TendonLfdError):
    pass


class DimensionMismatch(TendonLfdError):
    pass


class SingularUpdate(TendonLfdError):
    pass


class SingularSystem(TendonLfdError):
    pass


class DegenerateData(TendonLfdError):
    pass


class DegenerateInput(TendonLfdError):
    pass


class EmptyInput(TendonLfdError):
    pass


class ParseError(TendonLfdError):
    pass


class EmptyMesh(TendonLfdError):
    pass


class ProjectionFailure(TendonLfdError):
    pass


class EmptyRecording(TendonLfdError):
    pass


class IncompleteContext(TendonLfdError):
    pass


class SchemaMismatch(TendonLfdError):
    pass
