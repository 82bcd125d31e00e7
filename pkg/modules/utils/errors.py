"""Exception types raised by the solver toolkit."""


class QnlsError(Exception):
    """Base class for toolkit errors."""


class ParameterError(QnlsError, ValueError):
    """A model parameter violates an admissibility hypothesis."""

    def __init__(self, message: str, field: str = "", hypothesis: str = ""):
        self.field = field
        self.hypothesis = hypothesis
        prefix = f"[{hypothesis}] " if hypothesis else ""
        where = f"{field}: " if field else ""
        super().__init__(f"{prefix}{where}{message}")


class ConfigError(QnlsError, ValueError):
    """A run configuration is malformed or incomplete."""

    def __init__(self, message: str, field: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class FiberRootError(QnlsError):
    """The fiber derivative has no sign change inside the search window."""


class ShootingError(QnlsError):
    """A shooting solver could not bracket its target."""


class CriticalSetError(QnlsError):
    """A critical-branch iterate left the open set where the fiber projection exists."""
