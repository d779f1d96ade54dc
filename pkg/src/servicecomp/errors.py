"""Exception hierarchy shared by every module of the package."""


class ServiceCompError(Exception):
    """Base class for all errors raised by servicecomp."""


class FormatError(ServiceCompError, ValueError):
    """A text file (``.saut``, ``.tm``, delegator) could not be read.

    ``kind`` is a short stable tag, ``line`` and ``column`` are 1-based
    positions (0 when not applicable).
    """

    kind = "format"

    def __init__(self, message, line=0, column=0, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where = f"{source}:"
        if line:
            where += f"{line}:{column}:"
        super().__init__(f"{where} {self.kind}: {message}" if where else f"{self.kind}: {message}")


class SyntaxFormatError(FormatError):
    kind = "syntax"


class DuplicateTransitionError(FormatError):
    kind = "duplicate-transition"


class UnknownReferenceError(FormatError):
    kind = "unknown-reference"


class MissingInitialError(FormatError):
    kind = "missing-initial"


class InvalidAutomatonError(ServiceCompError, ValueError):
    """Programmatic construction violated an automaton invariant."""


class UnknownStateError(ServiceCompError, KeyError):
    pass


class MalformedGlobalStateError(ServiceCompError, ValueError):
    pass


class CapExceededError(ServiceCompError):
    """An explicit exploration grew beyond its configured cap."""

    def __init__(self, what, cap, reached):
        self.what = what
        self.cap = cap
        self.reached = reached
        super().__init__(f"{what} cap exceeded: reached {reached} > {cap}")


class AlphabetsNotDisjointError(ServiceCompError, ValueError):
    def __init__(self, label, first, second):
        self.label = label
        self.services = (first, second)
        super().__init__(
            f"alphabets-not-disjoint: label {label!r} belongs to services {first} and {second}"
        )


class SynthesisImpossibleError(ServiceCompError):
    """The initial pair is not in the simulation relation."""


class TraceNotExecutableError(ServiceCompError, ValueError):
    def __init__(self, position, label):
        self.position = position
        self.label = label
        super().__init__(f"trace not executable by the goal at position {position} (label {label!r})")


class InvalidMachineError(ServiceCompError, ValueError):
    """A Turing machine violates its structural invariants."""


class EncodingPreconditionError(ServiceCompError, ValueError):
    pass
