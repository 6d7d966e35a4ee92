"""Exception hierarchy for shakhovspec."""


class ShakhovSpecError(Exception):
    """Base class for all numerical/usage failures raised by this package."""


class EssentialLineError(ShakhovSpecError):
    """Evaluation requested on (or within 1e-9 of) the essential-spectrum line."""


class DegenerateParams(ShakhovSpecError):
    """Parameter combination for which the requested expansion is singular."""


class BoundaryZero(ShakhovSpecError):
    """A factor zero sits on a contour and jittering failed to clear it."""


class NonConvergent(ShakhovSpecError):
    """Adaptive boundary refinement exceeded its segment budget."""


class Diverged(ShakhovSpecError):
    """Newton refinement left its trust region or stalled."""


class StallDetected(ShakhovSpecError):
    """Continuation step size underflowed without an identified event."""


class NoMerge(ShakhovSpecError):
    """Merge detection found no approach between the two branches."""


class QuadratureFail(ShakhovSpecError):
    """Adaptive quadrature could not reach the requested tolerance."""


class EmptyKernel(ShakhovSpecError):
    """No singular value below threshold at a claimed root (unconverged root)."""


class FitAmbiguous(ShakhovSpecError):
    """Two fitted decay rates are too close to separate at this horizon."""


class UsageError(ShakhovSpecError):
    """Malformed command-line invocation."""
