"""Exception hierarchy shared by every gfusion module."""


class GFusionError(Exception):
    """Base class for all errors raised by gfusion."""


class DimensionMismatch(GFusionError, ValueError):
    pass


class AllColumnsNegligible(GFusionError, ValueError):
    pass


class NotOrthonormal(GFusionError, ValueError):
    pass


class NotHermitian(GFusionError, ValueError):
    pass


class NotPSD(GFusionError, ValueError):
    pass


class ConvergenceFailure(GFusionError, ArithmeticError):
    pass


class InvalidFamily(GFusionError, ValueError):
    pass


class NotAFrame(GFusionError, ValueError):
    pass


class NotInvertible(GFusionError, ValueError):
    pass


class WrongCoupling(GFusionError, ValueError):
    pass


class CertificateRejected(GFusionError, ValueError):
    pass


class InconsistentPair(GFusionError, ValueError):
    pass


class CommutationViolation(GFusionError, ValueError):
    pass


class ShapeMismatch(GFusionError, ValueError):
    pass


class ParseError(GFusionError, ValueError):
    pass


class ValidationError(GFusionError, ValueError):
    """Spec document is well-formed but describes an invalid family.

    ``path`` names the first offending location, e.g. ``members[2].operator``.
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class InfeasibleProfile(GFusionError, ValueError):
    pass
