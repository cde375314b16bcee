"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``ConfigError`` (bad input, exit 2) and ``NumericalError`` (a computation
could not meet its contract, exit 3).
"""


class TrapSymError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(TrapSymError):
    """Input is malformed or violates a precondition."""


class NumericalError(TrapSymError):
    """A numerical routine failed to deliver a trustworthy result."""


# configuration / precondition failures
class ConfigInvalid(ConfigError):
    pass


class UnsupportedKind(ConfigError):
    pass


class UnsupportedTrap(ConfigError):
    pass


class AsymmetricTrap(ConfigError):
    pass


class SizeMismatch(ConfigError):
    pass


class LabelNotInComposition(ConfigError):
    pass


class ShapeAlphabetMismatch(ConfigError):
    pass


class UnsupportedN(ConfigError):
    pass


class WrongN(ConfigError):
    pass


class EmptySpectrum(ConfigError):
    pass


class UnknownClass(ConfigError):
    pass


class StateOutOfRange(ConfigError):
    pass


class RepeatedLabel(ConfigError):
    pass


class NegativeAmplitude(ConfigError):
    pass


class MissingElement(ConfigError):
    pass


class EmptySector(ConfigError):
    pass


# numerical failures
class GridTooSmall(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class NonconvergedEigensolver(NumericalError):
    pass


class KernelUndersampled(NumericalError):
    pass


class DerivativeUnavailable(NumericalError):
    pass


class IoError(TrapSymError):
    pass


class SpectrumTooShort(ConfigError):
    """The one-body spectrum ends before the requested energy cutoff."""
