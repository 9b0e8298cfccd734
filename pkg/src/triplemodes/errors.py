"""Exception types raised by the triplemodes package."""


class TripleModeError(ValueError):
    """Base class for all library errors."""


class MediumOrderError(TripleModeError):
    pass


class NonPositiveFrequency(TripleModeError):
    pass


class GrazingIncidence(TripleModeError):
    pass


class PolarizationMismatch(TripleModeError):
    pass


class DivergentIntegral(TripleModeError):
    pass


class QuadratureFailure(TripleModeError):
    pass


class ResolutionTooCoarse(TripleModeError):
    pass


class TailTooLarge(TripleModeError):
    pass


class EmptyGrid(TripleModeError):
    pass


class ZeroWaveVector(TripleModeError):
    pass
