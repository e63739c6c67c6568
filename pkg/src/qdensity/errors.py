"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation-type failures exit 1,
:class:`PrecisionExhausted` exits 2, and :class:`SoundnessError` exits 3.
"""


class QDensityError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(QDensityError):
    """A run parameter or input literal is outside its allowed range."""


class PrecisionExhausted(QDensityError):
    """The tracked error bound is too large to certify the requested answer.

    Raised instead of returning a possibly-wrong value; retry with more
    fractional bits.
    """


class RationalDetected(QDensityError):
    """A value turned out to be rational where an irrational is required."""


class AllRational(QDensityError):
    """Every candidate direction produced a rational value."""


class AlphaZero(QDensityError):
    """The leading coordinate is indistinguishable from zero, so the target
    lift z = -t/(4*alpha) is undefined."""


class CapExceeded(QDensityError):
    """A brute-force enumeration was asked to scan beyond its hard cap."""


class SoundnessError(QDensityError):
    """Internal re-verification of an emitted result failed.

    This is the tripwire for bugs in the solver pipeline; it must never fire
    in a correct build.
    """
