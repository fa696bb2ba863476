"""Exception types shared across the package.

Each class carries the CLI exit code it maps to, so the command layer can
translate failures without a lookup table.
"""


class WxError(Exception):
    exit_code = 1


class ArgumentError(WxError, ValueError):
    """Invalid argument value (negative visibility, inverted box, k > n, ...)."""

    exit_code = 2


class FormatError(WxError, ValueError):
    """Input bytes do not follow the expected file layout."""

    exit_code = 4


class UnsupportedVersionError(FormatError):
    pass


class CorruptionError(FormatError):
    """Stored fingerprint disagrees with the one recomputed from the file."""


class MetarParseError(WxError, ValueError):
    exit_code = 4


class EmptySceneError(WxError, ValueError):
    exit_code = 5


class NumericalError(WxError, ArithmeticError):
    exit_code = 6


class UndefinedLevelError(NumericalError):
    """Compressibility level requested for a zero-energy scene."""


class DegenerateReconstructionError(NumericalError):
    pass


class CompatibilityError(WxError, ValueError):
    """A basis and a scene were built over different site lists."""

    exit_code = 7

    def __init__(self, message, expected=None, actual=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual
