"""Exception hierarchy for the toolkit.

Every domain failure raised by the library derives from ``BorelToolkitError``;
the command line maps these to exit code 1.
"""


class BorelToolkitError(ValueError):
    """Base class for domain errors."""


class ZetaIndexError(BorelToolkitError):
    pass


class OrderError(BorelToolkitError):
    pass


class ConstantTermError(BorelToolkitError):
    pass


class PlaneMismatchError(BorelToolkitError):
    pass


class SymbolTableError(BorelToolkitError):
    pass


class UnsupportedSingularityError(BorelToolkitError):
    pass


class RatioMethodError(BorelToolkitError):
    pass


class PoleProximityError(BorelToolkitError):
    def __init__(self, message: str, pole: complex):
        super().__init__(message)
        self.pole = pole


class ResidueConsistencyError(BorelToolkitError):
    pass


class RayValidationError(BorelToolkitError):
    pass


class RayDivergenceError(BorelToolkitError):
    def __init__(self, message: str, node: int):
        super().__init__(message)
        self.node = node


class CorrectorConvergenceError(BorelToolkitError):
    def __init__(self, message: str, node: int):
        super().__init__(message)
        self.node = node


class ChenConvergenceError(BorelToolkitError):
    pass


class ConfigError(BorelToolkitError):
    pass
