"""Exception hierarchy.  CLI exit codes: usage=1, data=2, engine=3."""


class KgnpError(Exception):
    pass


class UsageError(KgnpError):
    exit_code = 1


class DataError(KgnpError):
    """Bad input files, parse errors, malformed records."""

    exit_code = 2


class ParseError(DataError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = " at line %d" % line
            if column is not None:
                loc += ", column %d" % column
        super().__init__(message + loc)
        self.line = line
        self.column = column


class EngineError(KgnpError):
    """Runtime failures of the resolution or embedding machinery."""

    exit_code = 3


class AccessDenied(EngineError):
    pass


class LinkMissing(EngineError):
    pass


class UnknownPredicate(EngineError):
    pass


class DepthLimitExceeded(EngineError):
    pass
