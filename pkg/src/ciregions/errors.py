"""Exception hierarchy shared by all modules."""


class CIRegionsError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CIRegionsError):
    pass


class NegativeProbability(ValidationError):
    pass


class MassNotOne(ValidationError):
    pass


class DuplicateEntry(ValidationError):
    pass


class ZeroMassConditioning(CIRegionsError):
    pass


class InconsistentInformation(CIRegionsError):
    """An information measure came out negative beyond floating error."""


class SupportMismatch(CIRegionsError):
    pass


class OptimizerDidNotConverge(CIRegionsError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class BudgetExceeded(CIRegionsError):
    pass


class TagMismatch(CIRegionsError):
    pass


class SizeGuard(CIRegionsError):
    pass


class ZeroTargetIntercept(CIRegionsError):
    pass


class NoPositiveConstraint(CIRegionsError):
    pass


class OracleNotRun(CIRegionsError):
    pass


class IdentityViolation(CIRegionsError):
    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance
