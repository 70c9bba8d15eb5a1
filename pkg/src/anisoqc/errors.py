"""Exception hierarchy shared by every module."""


class AnisoError(Exception):
    """Base class for all package errors."""


class DimensionError(AnisoError, ValueError):
    """Operands live on different numbers of qubits or have mismatched shapes."""


class ContractError(AnisoError, ValueError):
    """An input violates an operation's precondition."""


class ResourceError(AnisoError, RuntimeError):
    """A configured size cap was exceeded.

    ``partial`` carries whatever partial result was computed before the cap
    was hit (for example a non-converged Lie basis), or ``None``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CapabilityError(AnisoError):
    """The requested construction needs a control or generator that is unavailable."""

    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = missing


class LeakageError(ContractError):
    """A physical state has too much weight outside the code space."""

    def __init__(self, message, leakage):
        super().__init__(message)
        self.leakage = leakage


class SpecParseError(AnisoError, ValueError):
    """Device description could not be parsed.

    ``kind`` is one of ``"syntax"``, ``"duplicate"``, ``"index"``.
    """

    def __init__(self, message, line, column=1, kind="syntax"):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.kind = kind
        self.detail = message
