"""Exception types shared across the toolkit."""


class EscBifError(Exception):
    """Base class for all numerical failures raised by this package."""


class NonConvergence(EscBifError):
    """An iterative solver exhausted its iteration budget."""


class SingularJacobian(EscBifError):
    """A Newton Jacobian was singular, typically a static bifurcation of the
    equilibrium map."""


class SingularSolve(EscBifError):
    """A linear solve hit a numerically singular system."""


class WindowMismatch(EscBifError):
    """A sampling window does not span an integer number of periods."""


class DegenerateResponse(EscBifError):
    """The local frequency response vanishes, so phase quantities are
    undefined."""


class TangentSingularity(EscBifError):
    """A tangent evaluation sits within tolerance of a pole of tan."""


class CorrectorDivergence(EscBifError):
    """The continuation corrector failed at the minimum step size."""


class NewtonDivergence(EscBifError):
    """Shooting Newton iteration failed to converge."""


class RankDeficientJacobian(EscBifError):
    """The shooting Jacobian I - Phi' is numerically singular and the
    residual cannot be reduced, as happens at a cyclic fold."""


class IllConditionedPencil(EscBifError):
    """No generalized eigenvalue of the system pencil passed the
    transmission-zero residual check."""


class InconclusiveSign(EscBifError):
    """A sign-based classification fell below its resolution threshold."""


class StepSizeUnderflow(EscBifError):
    """The ODE integrator reduced its step size below the usable minimum."""
