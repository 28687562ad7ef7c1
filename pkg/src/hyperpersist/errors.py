"""Exception hierarchy shared by the library and the command line."""


class HyperpersistError(Exception):
    """Base class for every error raised by hyperpersist."""


class HypergraphError(HyperpersistError, ValueError):
    """Invalid hypergraph, filtration or morphism, or mismatched bases."""


class FieldError(HyperpersistError, ValueError):
    """Bad modulus, shape mismatch, or an inconsistent linear system."""


class ChainError(HyperpersistError):
    """A chain-level construction broke one of its own guarantees."""


class PersistenceError(HyperpersistError):
    """Non-commuting ladders, negative multiplicities, mismatched grids."""


class ValidationError(HyperpersistError):
    """Input files parsed cleanly but do not describe a usable problem."""


class ParseError(HyperpersistError):
    """Malformed input text. Carries the source name and 1-based line."""

    def __init__(self, message, path="<string>", line=None):
        self.path = path
        self.line = line
        where = path if line is None else f"{path}:{line}"
        super().__init__(f"{where}: {message}")
