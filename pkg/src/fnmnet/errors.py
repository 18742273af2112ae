"""Exception types shared across the package."""


class FnmNetError(Exception):
    """Base class for all package errors."""


class ResourceError(FnmNetError):
    """An exploration exceeded a configured cap (reachable markings, linkings, ...)."""


class PreconditionError(FnmNetError, ValueError):
    """A function was called on an input outside its documented domain."""


class NetError(FnmNetError, ValueError):
    """A P/T net violates a structural invariant (empty preset, unknown place, ...)."""


class DefinitionError(FnmNetError):
    """Bad constant definitions: undefined, duplicated or unguarded."""


class FnmSyntaxError(FnmNetError):
    """A parse failure with a 1-based source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        loc = f"{line}:{col}: " if line else ""
        super().__init__(f"{loc}{message}")


class CategoryError(FnmSyntaxError):
    """A syntactically valid phrase used in a position its category forbids."""
