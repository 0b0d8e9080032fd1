"""Exception hierarchy shared by all subpackages."""


class RfemError(Exception):
    """Base class for every error raised by the library."""


class MeshError(RfemError, ValueError):
    pass


class MeshFormatError(MeshError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpaceError(RfemError, ValueError):
    pass


class QuadratureError(SpaceError):
    pass


class RecoveryError(RfemError, ValueError):
    pass


class ContinuousFunctionError(RecoveryError):
    """Raised when a jump-based ratio is requested for a continuous function."""


class ProblemError(RfemError, ValueError):
    pass


class BoundaryClassificationError(ProblemError):
    pass


class AssemblyError(RfemError, RuntimeError):
    pass


class SolverError(RfemError, RuntimeError):
    def __init__(self, message, residuals=None):
        self.residuals = list(residuals) if residuals is not None else []
        super().__init__(message)


class AnalysisError(RfemError, RuntimeError):
    pass


class ConfigError(RfemError, ValueError):
    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
