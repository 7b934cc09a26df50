"""Exception types shared across the package."""


class ForgeError(Exception):
    """Base class for all library errors."""


class DimensionError(ForgeError, ValueError):
    pass


class ResourceError(ForgeError):
    pass


class HermiticityError(ForgeError, ValueError):
    pass


class UnitarityError(ForgeError, ValueError):
    pass


class BranchError(ForgeError):
    """An eigenphase sits on (or too close to) the branch cut of the logarithm."""

    def __init__(self, message: str, phase: float):
        super().__init__(message)
        self.phase = phase


class ConvergenceError(ForgeError):
    pass


class ConfigError(ForgeError, ValueError):
    pass
