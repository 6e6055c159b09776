"""Exception hierarchy shared by every curvekit module.

Every error carries the name of the invariant that failed so the CLI can
report it verbatim on standard error.
"""


class CurveKitError(Exception):
    """Base class for numerical failures raised by curvekit."""

    invariant = "unspecified"

    def __init__(self, message, invariant=None):
        super().__init__(message)
        if invariant is not None:
            self.invariant = invariant


class DegenerateInput(CurveKitError):
    invariant = "input curve has enough non-degenerate samples"


class DuplicatePoints(CurveKitError):
    invariant = "consecutive points are distinct"


class NotUnitSpeed(CurveKitError):
    invariant = "curve is arc-length parametrized"


class VanishingCurvature(CurveKitError):
    invariant = "kappa > kappa_min at every sample"


class InvalidFrame(CurveKitError):
    invariant = "frame is orthonormal and right-handed"


class StepTooLarge(CurveKitError):
    invariant = "step <= 0.01 / max(kappa, |tau|)"


class NonPositiveCurvature(CurveKitError):
    invariant = "kappa(s) > 0 on the domain"


class DomainError(CurveKitError):
    invariant = "evaluation inside the profile domain"


class UnknownFamily(CurveKitError):
    invariant = "family is one of circle, helix, salkowski"


class ParamOutOfRange(CurveKitError):
    invariant = "family parameters complete and in range"


class CurvatureVanishes(CurveKitError):
    invariant = "Mannheim profile curvature bounded away from zero"


class DomainMismatch(CurveKitError):
    invariant = "inputs share a sample grid"


class NotApplicable(CurveKitError):
    invariant = "operation requires v == 0"


class DivideByZero(CurveKitError):
    invariant = "kappa^2 + tau^2 >= 1e-12"


class DegeneratePartner(CurveKitError):
    invariant = "partner curve is regular with defined frames"


class SingularOffset(CurveKitError):
    invariant = "|lambda| >= 1e-9"


class VTooLarge(CurveKitError):
    invariant = "|v| < 1 - 1e-9"


class NotSpherical(CurveKitError):
    invariant = "curve lies on a sphere centred at the origin"


class CurvatureSignChange(CurveKitError):
    invariant = "cos(phi) > 0 on the domain"


class InvalidField(CurveKitError):
    invariant = "V = uT + vN + wB is a unit field"
