"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ArcSynthError(Exception):
    """Base class for all package errors."""


class DegenerateInputError(ArcSynthError, ValueError):
    """Zero polynomial or zero function where a nonzero one is required."""


class PoleProximityError(ArcSynthError, ValueError):
    def __init__(self, pole: complex, z: complex):
        super().__init__(f"evaluation at {z!r} is within tolerance of pole {pole!r}")
        self.pole = pole
        self.z = z


class NotAnalyticError(ArcSynthError, ValueError):
    def __init__(self, pole: complex):
        super().__init__(f"pole {pole!r} lies in the closed unit disk")
        self.pole = pole


class NotSchurError(ArcSynthError, ValueError):
    """Raised by callers that require a Schur input and were given something else."""


class ZeroFunctionError(DegenerateInputError):
    pass


class DomainError(ArcSynthError, ValueError):
    """Parameter outside its admissible range (eps, rho, empty check sets, ...)."""


class KernelPoleError(ArcSynthError, ValueError):
    def __init__(self, z: complex):
        super().__init__(f"evaluation point {z!r} lies on the integration arc")
        self.z = z


class DivergenceError(ArcSynthError, ArithmeticError):
    """Log-weight is not integrable on the arc (refinement did not converge)."""


class WrongBranchError(ArcSynthError, ValueError):
    pass


class BlaschkeInputError(WrongBranchError):
    """The input is a finite Blaschke product; use the diagonal embedding."""


class CertificationError(ArcSynthError, ValueError):
    """Entry is not in Smirnov form, so boundary moduli certify nothing."""


class WitnessSingularError(ArcSynthError, ArithmeticError):
    def __init__(self, z: complex, det: float):
        super().__init__(f"det S = {det:.3e} at reflected point {z!r}")
        self.z = z
        self.det = det


class HypothesisViolatedError(ArcSynthError, ValueError):
    pass
