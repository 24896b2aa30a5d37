"""
Solver Exceptions
Error hierarchy shared by the loader, solver services and API layer
"""


class CcpError(Exception):
    """Base class for every error raised by the solver stack"""


class SchemaError(CcpError):
    """Malformed instance document"""


class ValidationError(CcpError):
    """Instance data violates a model invariant"""


class DimensionError(CcpError):
    """Vector or matrix has the wrong shape"""


class SizeLimit(CcpError):
    """Enumeration requested beyond the supported size"""


class ParamError(CcpError):
    """Generator parameters outside their allowed ranges"""


class NumericalFailure(CcpError):
    """Simplex run lost numerical stability"""


class InvalidMark(CcpError):
    """Checkpoint mark is unknown or already reverted past"""


class BudgetExceeded(CcpError):
    """Auxiliary branch-and-bound exhausted its node budget"""


class NoFractional(CcpError):
    """No free fractional variable is available for branching"""


INPUT_ERRORS = (SchemaError, ValidationError, DimensionError, ParamError)
