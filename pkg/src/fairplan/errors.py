"""Exception hierarchy shared across the engine."""


class FairplanError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message, details=None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self):
        return {"code": self.code, "message": self.message, "details": self.details}


class EditError(FairplanError):
    code = "edit-rejected"


class GeometryError(FairplanError):
    code = "bad-geometry"


class DomainError(FairplanError):
    """Mathematical precondition violated (zero mean benefit, bad alpha, ...)."""

    code = "domain-error"


class CalibrationError(FairplanError):
    code = "calibration-infeasible"


class ConvergenceError(FairplanError):
    code = "no-convergence"


class SolverError(FairplanError):
    code = "solver-failure"


class ParseError(FairplanError):
    code = "parse-error"


class NotFoundError(FairplanError):
    code = "not-found"


class StoreError(FairplanError):
    code = "store-corrupt"
