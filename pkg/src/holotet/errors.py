"""Exception hierarchy.

Every error carries a machine-readable ``reason`` equal to its class name,
which the CLI writes to stderr.
"""


class HolotetError(Exception):
    """Base class for all library errors."""

    @property
    def reason(self) -> str:
        return type(self).__name__


class InvalidInput(HolotetError):
    pass


# rotor algebra
class DegenerateRotor(HolotetError):
    pass


class IdentityRotation(HolotetError):
    pass


# closure analysis
class ClosureViolated(HolotetError):
    pass


class DegenerateConfiguration(HolotetError):
    pass


class NoValidSigns(HolotetError):
    pass


class MultipleValidSigns(HolotetError):
    pass


class InconsistentDihedral(HolotetError):
    pass


class InvalidGram(HolotetError):
    pass


class Degenerate(HolotetError):
    pass


class SignMismatch(HolotetError):
    pass


# reconstruction
class ReconstructionFailure(HolotetError):
    pass


class SingularNormalMatrix(HolotetError):
    pass


class TimelikeViolation(HolotetError):
    pass


class CoincidentVertices(HolotetError):
    pass


class VertexFigureDegenerate(HolotetError):
    pass


class AreaMismatch(HolotetError):
    pass


# forward model
class DegenerateGeodesic(HolotetError):
    pass


class SpacelikePlane(HolotetError):
    pass


class NotIncident(HolotetError):
    pass


class Misaligned(HolotetError):
    pass


# phase space
class OutOfChart(HolotetError):
    pass


class DiagonalDegenerate(HolotetError):
    pass


class PhiUndefined(HolotetError):
    pass


# sampling
class RejectionExhausted(HolotetError):
    pass
