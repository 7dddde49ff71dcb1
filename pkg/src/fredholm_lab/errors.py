"""Exception hierarchy.

Every error raised by the library derives from :class:`FredholmLabError`,
which itself is a ``ValueError`` so callers validating user input can
catch it generically.
"""


class FredholmLabError(ValueError):
    pass


class NonFinite(FredholmLabError):
    pass


class NotIdempotent(FredholmLabError):
    pass


class SingularPivot(FredholmLabError):
    pass


class SingularMap(FredholmLabError):
    pass


class DimensionMismatch(FredholmLabError):
    pass


class NotNested(FredholmLabError):
    pass


class NotInBeta(FredholmLabError):
    pass


class NotTransversal(FredholmLabError):
    pass


class NotHermitian(FredholmLabError):
    pass


class NotUnitary(FredholmLabError):
    pass


class NotSymplectic(FredholmLabError):
    pass


class NotIsotropic(FredholmLabError):
    pass


class NotLagrangian(FredholmLabError):
    pass


class NotAnnihilator(FredholmLabError):
    pass


class NotAGraph(FredholmLabError):
    pass


class NotClosed(FredholmLabError):
    pass


class InsufficientSampling(FredholmLabError):
    pass


class NonconstantDefect(FredholmLabError):
    pass


class SchemaError(FredholmLabError):
    """Malformed serialized input; ``field`` names the offending key path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class FormulaViolation(FredholmLabError):
    """An index identity failed. Never expected; signals a bug.

    ``report`` carries the full report whose ``failures`` list names the
    identity and both integer sides.
    """

    def __init__(self, report):
        names = ", ".join(c.name for c in report.failures)
        super().__init__(f"identity violated: {names}")
        self.report = report
