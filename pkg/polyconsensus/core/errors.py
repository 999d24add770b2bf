"""Exception hierarchy shared by the library, the CLI and the HTTP routers."""
from typing import Any, Optional


class PolyConsensusError(Exception):
    kind = "error"
    exit_code = 1

    def __init__(self, message: str, detail: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


class InputError(PolyConsensusError):
    kind = "input"


class SizeError(InputError):
    kind = "size"


class DimensionError(InputError):
    kind = "dimension"


class PatternError(InputError):
    kind = "pattern"


class AssumptionViolation(InputError):
    """Pattern matrix is not a connected generalized Laplacian; `detail` holds the report."""
    kind = "assumption1"


class IntervalError(InputError):
    kind = "interval"


class ConfigError(InputError):
    kind = "config"


class ConsistencyError(PolyConsensusError):
    kind = "consistency"


class ConvergenceError(PolyConsensusError):
    kind = "convergence"


class DynamicsError(PolyConsensusError):
    kind = "dynamics"
    exit_code = 3


class SolverError(PolyConsensusError):
    kind = "solver"
    exit_code = 2
