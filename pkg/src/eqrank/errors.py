"""Exception types shared across the package."""


class EqRankError(Exception):
    """Base class for errors raised by this package."""


class ParseError(EqRankError):
    """A corpus file could not be parsed.

    Carries the offending path and 1-based line number so command-line
    callers can point at the exact input line.
    """

    def __init__(self, path: str, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class DuplicatePaperError(EqRankError):
    """The same paper id was supplied twice with conflicting dates."""


class EmptySnapshotError(EqRankError):
    """A cutoff date selects no dated papers."""


class NoEligiblePapersError(EqRankError):
    """A citation cut left no old papers eligible for the migration rate."""
