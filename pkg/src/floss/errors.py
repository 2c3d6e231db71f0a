"""Exception types shared across the package."""


class FlossError(Exception):
    """Base class for all package-specific errors."""


class ParseError(FlossError):
    """Syntax or structural error in a theory file."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class UnknownAtomError(FlossError):
    """A formula mentions an atom the world does not assign."""


class OpenFormulaError(FlossError):
    """A formula expected to be closed has free variables."""


class EmptyDomainError(FlossError):
    """A quantified theory was grounded over an empty constant domain."""


class CapacityError(FlossError):
    """An exact world sweep would exceed the configured atom cap."""


class UnstratifiableError(FlossError):
    """A logic program has a cycle through negation."""
