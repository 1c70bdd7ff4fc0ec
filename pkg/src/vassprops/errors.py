"""Exception hierarchy shared by the whole package."""


class VassError(Exception):
    """Base class for every error raised by vassprops."""


class ModelError(VassError):
    """A model failed validation."""


class DimensionMismatch(ModelError):
    pass


class UnknownState(ModelError):
    pass


class EmptyModel(ModelError):
    pass


class NegativeCounter(VassError):
    def __init__(self, index: int, value: int):
        super().__init__(f"counter {index + 1} would become {value}")
        self.index = index
        self.value = value


class WrongSource(VassError):
    pass


class BrokenPath(VassError):
    def __init__(self, position: int, message: str = ""):
        super().__init__(message or f"path breaks adjacency at step {position}")
        self.position = position


class MalformedDecomposition(VassError):
    pass


class PreconditionViolated(VassError):
    pass


class ResourceCap(VassError):
    """An exploration exceeded its configured budget."""

    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


class SearchCap(ResourceCap):
    pass


class OracleDisagreement(VassError):
    """Two independent decision routes returned contradicting definite answers."""


class ParseError(VassError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
