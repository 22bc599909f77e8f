"""Exception hierarchy shared by all modules."""


class ConicError(Exception):
    """Base class for every error raised by this package."""


class ZeroPolynomial(ConicError):
    pass


class NonConvergence(ConicError):
    """Root finding could not meet its residual contract at this precision."""


class DivisionByZero(ConicError, ZeroDivisionError):
    pass


class NotAConic(ConicError):
    """Input is degenerate, empty, or a circle where a proper conic is required."""


class CircleHasNoDirectrix(NotAConic):
    pass


class DegenerateInput(ConicError):
    pass


class CoincidentObjects(ConicError):
    """Two identical lines or circles: the intersection is not a finite set."""


class EliminationDegenerate(ConicError):
    pass


class FormParameterMismatch(ConicError):
    pass


class OrientationClassMismatch(ConicError):
    """Central conics whose completed-square sides differ in sign are not homothetic."""


class DegenerateGadget(ConicError):
    pass


class ClassUnreachable(ConicError):
    pass


class InvalidFixedConic(ConicError):
    pass


class SelectionError(ConicError):
    """A multi-valued step could not be resolved against its hint."""


class SelectionAmbiguous(SelectionError):
    pass


class NoMatch(SelectionError):
    pass


class NoIntersection(ConicError):
    pass


class MalformedProgram(ConicError):
    pass
