"""Exception types shared across the package."""


class SporadicError(Exception):
    """Base class for every error raised by this package."""


class ParseError(SporadicError, ValueError):
    """Malformed input text. Carries the 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class InvariantError(SporadicError, ValueError):
    """A value violates a model invariant (e.g. ``D > P`` for some task)."""

    def __init__(self, message, task=None):
        self.task = task
        super().__init__(message)


class IllegalReleaseError(SporadicError, ValueError):
    """A job was released before the minimum interarrival time elapsed."""


class StrategyIncompleteError(SporadicError, KeyError):
    """A partial strategy was queried on an input outside its domain."""

    def __init__(self, config, release):
        self.config = config
        self.release = release
        super().__init__(f"strategy undefined on config={config} release={release}")

    def __str__(self):
        return self.args[0]


class ResourceLimitError(SporadicError, RuntimeError):
    """An exploration exceeded its configured state or work budget."""


class NotOnlineFeasibleError(SporadicError):
    """Strategy synthesis was requested for a system that is not online feasible."""


class InvalidScheduleError(SporadicError, ValueError):
    """A continuous schedule fails one of its validity conditions."""

    def __init__(self, report):
        self.report = report
        super().__init__(report.message)
