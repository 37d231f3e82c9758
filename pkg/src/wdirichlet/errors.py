class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NotAUnitError(DomainError):
    """The (1,1) coefficient vanishes, so no formal inverse exists."""


class PreconditionError(DomainError):
    """A measured precondition (e.g. contractivity) does not hold."""


class SpecParseError(ValueError):
    """Malformed weight/character spec or series file.

    ``line`` and ``col`` are 1-based; ``line`` is 1 for single-line specs.
    """

    def __init__(self, msg, line=1, col=1, source="<spec>"):
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {msg}")
