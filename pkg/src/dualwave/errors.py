"""Exception types raised by dualwave."""


class DualWaveError(ValueError):
    """Base class for all dualwave errors."""


class SingularPoint(DualWaveError):
    pass


class BranchViolation(DualWaveError):
    pass


class StencilOutOfDomain(DualWaveError):
    pass


class EmptyGrid(DualWaveError):
    pass


class SignViolation(DualWaveError):
    pass


class NegativeIndexSquared(DualWaveError):
    pass


class OutOfDomain(DualWaveError):
    pass


class ConfigError(DualWaveError):
    pass
