"""Signed fixed-point reals with certified error bounds.

A :class:`FixedReal` stores an integer mantissa scaled by ``2**-F`` together
with an integer error radius measured in units of ``2**-F`` (ulps).  Every
operation guarantees that the true real number lies inside
``[mant - err, mant + err] * 2**-F``.  When a value is additionally known to
be an exact rational, the :class:`~fractions.Fraction` rides along in the
``exact`` slot; it drives terminating continued fractions, rationality
detection and exact threshold comparisons.

Error propagation is conservative but tight where cheap: mantissa addition is
exact (no extra ulp), multiplication uses the standard interval cross terms
plus one ulp for the final rounding, and division widens to the exact rational
interval endpoints before re-rounding.

Quadratic surds ``(u + v*sqrt(d))/w`` are constructed through an integer
square root carried to ``2F`` bits, so the initial radius is a single ulp.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from math import isqrt

from .errors import PrecisionExhausted, ValidationError

DEFAULT_PRECISION = 256
MIN_PRECISION = 64


def _round_div(n: int, d: int) -> int:
    """Nearest integer to n/d (d > 0), ties to even."""
    q, r = divmod(n, d)
    twice = 2 * r
    if twice > d or (twice == d and q & 1):
        q += 1
    return q


def _round_shift(n: int, k: int) -> int:
    """Nearest integer to n / 2**k, ties to even."""
    if k <= 0:
        return n << (-k)
    return _round_div(n, 1 << k)


def _ceil_div(n: int, d: int) -> int:
    return -((-n) // d)


class FixedReal:
    """Fixed-point real with mantissa, ulp error radius and optional exact value."""

    __slots__ = ("mant", "err", "F", "exact")

    def __init__(self, mant: int, err: int, F: int, exact: Fraction | None = None):
        if err < 0:
            raise ValueError("error radius must be nonnegative")
        self.mant = mant
        self.err = err
        self.F = F
        if exact is None and err == 0:
            # a point interval is the exact dyadic rational it sits on
            exact = Fraction(mant, 1 << F)
        self.exact = exact

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_fraction(cls, value: Fraction | int, F: int = DEFAULT_PRECISION) -> "FixedReal":
        fr = Fraction(value)
        num, den = fr.numerator, fr.denominator
        scaled = num << F
        mant = _round_div(scaled, den)
        err = 0 if scaled % den == 0 else 1
        return cls(mant, err, F, fr)

    @classmethod
    def from_int(cls, value: int, F: int = DEFAULT_PRECISION) -> "FixedReal":
        return cls(value << F, 0, F, Fraction(value))

    @classmethod
    def from_float(cls, value: float, F: int = DEFAULT_PRECISION) -> "FixedReal":
        # floats are dyadic rationals, so this is exact
        return cls.from_fraction(Fraction(value), F)

    @classmethod
    def sqrt_int(cls, d: int, F: int = DEFAULT_PRECISION) -> "FixedReal":
        """sqrt(d) for a nonnegative integer d, one ulp of certified error."""
        if d < 0:
            raise ValidationError("sqrt of a negative integer")
        r = isqrt(d)
        if r * r == d:
            return cls.from_int(r, F)
        mant = isqrt(d << (2 * F))
        return cls(mant, 1, F, None)

    @classmethod
    def from_surd(cls, u: int, v: int, w: int, d: int, F: int = DEFAULT_PRECISION) -> "FixedReal":
        """(u + v*sqrt(d)) / w with w != 0."""
        if w == 0:
            raise ValidationError("surd denominator must be nonzero")
        root = cls.sqrt_int(d, F)
        return root.mul_int(v).add_fraction(Fraction(u)).div_int(w)

    _DEC_RE = re.compile(r"^[+-]?(\d+)(?:\.(\d*))?$")

    @classmethod
    def from_decimal(cls, text: str, F: int = DEFAULT_PRECISION) -> "FixedReal":
        """Decimal literal; the radius includes half an ulp of the last digit.

        The carried exact value is the written decimal itself, so downstream
        rationality detection treats any finite decimal as rational.
        """
        text = text.strip()
        m = cls._DEC_RE.match(text)
        if not m:
            raise ValidationError(f"bad decimal literal: {text!r}")
        frac_digits = m.group(2) or ""
        value = Fraction(text)
        base = cls.from_fraction(value, F)
        half_ulp = _ceil_div(1 << F, 2 * 10 ** len(frac_digits))
        return cls(base.mant, base.err + half_ulp, F, value)

    @classmethod
    def zero(cls, F: int = DEFAULT_PRECISION) -> "FixedReal":
        return cls.from_int(0, F)

    # ------------------------------------------------------------------
    # interval views
    # ------------------------------------------------------------------

    def lo(self) -> Fraction:
        """Certified lower bound on the true value."""
        if self.exact is not None:
            return self.exact
        return Fraction(self.mant - self.err, 1 << self.F)

    def hi(self) -> Fraction:
        """Certified upper bound on the true value."""
        if self.exact is not None:
            return self.exact
        return Fraction(self.mant + self.err, 1 << self.F)

    def midpoint(self) -> Fraction:
        return Fraction(self.mant, 1 << self.F)

    def err_fraction(self) -> Fraction:
        return Fraction(self.err, 1 << self.F)

    def certainly_le(self, bound) -> bool:
        return self.hi() <= Fraction(bound)

    def certainly_gt(self, bound) -> bool:
        return self.lo() > Fraction(bound)

    def contains_zero(self) -> bool:
        """True when the certified interval straddles or touches zero."""
        if self.exact is not None:
            return self.exact == 0
        return abs(self.mant) <= self.err

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def _check_compatible(self, other: "FixedReal") -> None:
        if self.F != other.F:
            raise ValueError(
                f"mixed precisions {self.F} and {other.F}; convert with with_precision"
            )

    def _coerce(self, other) -> "FixedReal":
        if isinstance(other, FixedReal):
            self._check_compatible(other)
            return other
        if isinstance(other, (int, Fraction)):
            return FixedReal.from_fraction(Fraction(other), self.F)
        if isinstance(other, float):
            return FixedReal.from_float(other, self.F)
        raise TypeError(f"cannot mix FixedReal with {type(other).__name__}")

    def __add__(self, other) -> "FixedReal":
        o = self._coerce(other)
        exact = self.exact + o.exact if self.exact is not None and o.exact is not None else None
        return FixedReal(self.mant + o.mant, self.err + o.err, self.F, exact)

    __radd__ = __add__

    def __sub__(self, other) -> "FixedReal":
        return self + self._coerce(other).__neg__()

    def __rsub__(self, other) -> "FixedReal":
        return self._coerce(other) - self

    def __neg__(self) -> "FixedReal":
        exact = -self.exact if self.exact is not None else None
        return FixedReal(-self.mant, self.err, self.F, exact)

    def __abs__(self) -> "FixedReal":
        exact = abs(self.exact) if self.exact is not None else None
        return FixedReal(abs(self.mant), self.err, self.F, exact)

    def add_int(self, k: int) -> "FixedReal":
        exact = self.exact + k if self.exact is not None else None
        return FixedReal(self.mant + (k << self.F), self.err, self.F, exact)

    def add_fraction(self, fr: Fraction) -> "FixedReal":
        return self + FixedReal.from_fraction(fr, self.F)

    def mul_int(self, k: int) -> "FixedReal":
        exact = self.exact * k if self.exact is not None else None
        return FixedReal(self.mant * k, self.err * abs(k), self.F, exact)

    def mul_fraction(self, fr: Fraction) -> "FixedReal":
        fr = Fraction(fr)
        if self.exact is not None:
            return FixedReal.from_fraction(self.exact * fr, self.F)
        p, q = fr.numerator, fr.denominator
        mant = _round_div(self.mant * p, q)
        err = _ceil_div(self.err * abs(p), q) + 1
        return FixedReal(mant, err, self.F, None)

    def __mul__(self, other) -> "FixedReal":
        o = self._coerce(other)
        if self.exact is not None and o.exact is not None:
            return FixedReal.from_fraction(self.exact * o.exact, self.F)
        F = self.F
        mant = _round_shift(self.mant * o.mant, F)
        cross = abs(self.mant) * o.err + abs(o.mant) * self.err + self.err * o.err
        err = (cross >> F) + 2
        return FixedReal(mant, err, F, None)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "FixedReal":
        o = self._coerce(other)
        if o.contains_zero():
            raise PrecisionExhausted("division by an interval containing zero")
        if self.exact == 0:
            return FixedReal.zero(self.F)
        if self.exact is not None and o.exact is not None:
            return FixedReal.from_fraction(self.exact / o.exact, self.F)
        a_lo, a_hi = self.lo(), self.hi()
        b_lo, b_hi = o.lo(), o.hi()
        corners = (a_lo / b_lo, a_lo / b_hi, a_hi / b_lo, a_hi / b_hi)
        q_lo, q_hi = min(corners), max(corners)
        F = self.F
        mid = (q_lo + q_hi) / 2
        radius = (q_hi - q_lo) / 2
        mant = _round_div(mid.numerator << F, mid.denominator)
        err = _ceil_div(radius.numerator << F, radius.denominator) + 1
        return FixedReal(mant, err, F, None)

    def div_int(self, k: int) -> "FixedReal":
        if k == 0:
            raise ZeroDivisionError("div_int by zero")
        exact = self.exact / k if self.exact is not None else None
        mant = _round_div(self.mant, k) if k > 0 else _round_div(-self.mant, -k)
        err = _ceil_div(self.err, abs(k)) + 1
        if exact is not None:
            # exact value known: only the representation error remains
            scaled = exact.numerator << self.F
            mant = _round_div(scaled, exact.denominator)
            err = 0 if scaled % exact.denominator == 0 else 1
        return FixedReal(mant, err, self.F, exact)

    # ------------------------------------------------------------------
    # rounding, reduction mod 1, circle norm
    # ------------------------------------------------------------------

    def floor(self) -> int:
        """Floor of the midpoint (not certified near integers)."""
        return self.mant >> self.F

    def round_nearest(self) -> int:
        """Nearest integer to the midpoint, ties to even."""
        return _round_shift(self.mant, self.F)

    def check_radius(self, tol) -> None:
        """Refuse (PrecisionExhausted) when the radius exceeds tol; None skips."""
        if tol is not None and self.err_fraction() > Fraction(tol):
            raise PrecisionExhausted(
                f"error radius {float(self.err_fraction()):.3e} exceeds tolerance {float(tol):.3e}"
            )

    def frac_part(self, tol=None) -> "FixedReal":
        """Value reduced mod 1 into [0, 1), error radius unchanged.

        The same integer is subtracted from the mantissa and the exact value,
        so circle arithmetic stays consistent; an inexact value whose interval
        straddles an integer keeps its full radius and may sit within err of
        either edge.
        """
        self.check_radius(tol)
        k = self.mant >> self.F
        exact = self.exact - k if self.exact is not None else None
        return FixedReal(self.mant - (k << self.F), self.err, self.F, exact)

    def circle_norm(self, tol=None) -> "FixedReal":
        """Distance to the nearest integer, in [0, 1/2]."""
        self.check_radius(tol)
        S = 1 << self.F
        H = S >> 1
        r = ((self.mant + H) % S) - H
        exact = None
        if self.exact is not None:
            f = self.exact - math.floor(self.exact)
            exact = min(f, 1 - f)
        return FixedReal(abs(r), self.err, self.F, exact)

    # ------------------------------------------------------------------
    # conversions
    # ------------------------------------------------------------------

    def with_precision(self, F2: int) -> "FixedReal":
        if F2 == self.F:
            return self
        if self.exact is not None:
            return FixedReal.from_fraction(self.exact, F2)
        if F2 > self.F:
            shift = F2 - self.F
            return FixedReal(self.mant << shift, self.err << shift, F2, None)
        shift = self.F - F2
        mant = _round_shift(self.mant, shift)
        err = _ceil_div(self.err, 1 << shift) + 1
        return FixedReal(mant, err, F2, None)

    def to_float(self) -> float:
        m = self.mant
        if m == 0:
            return 0.0
        sign = -1.0 if m < 0 else 1.0
        a = abs(m)
        shift = a.bit_length() - 54
        if shift > 0:
            return sign * math.ldexp(float(a >> shift), shift - self.F)
        return sign * math.ldexp(float(a), -self.F)

    __float__ = to_float

    def __repr__(self) -> str:
        return f"FixedReal({self.to_float():.17g} ± {float(self.err_fraction()):.3g}, F={self.F})"


def as_fixed(value, F: int = DEFAULT_PRECISION) -> FixedReal:
    """Lift ints, Fractions, floats and literal strings to FixedReal."""
    if isinstance(value, FixedReal):
        return value if value.F == F else value.with_precision(F)
    if isinstance(value, (int, Fraction)):
        return FixedReal.from_fraction(Fraction(value), F)
    if isinstance(value, float):
        return FixedReal.from_float(value, F)
    if isinstance(value, str):
        return parse_real(value, F)
    raise TypeError(f"cannot convert {type(value).__name__} to FixedReal")


def parse_real(text: str, F: int = DEFAULT_PRECISION) -> FixedReal:
    """Parse a real-number literal.

    Grammar:
      ``p/q``            exact rational
      ``sqrt:d``         square root of a nonnegative integer
      ``surd:u,v,w,d``   (u + v*sqrt(d)) / w
      ``dec:<digits>``   decimal string, half an ulp of the last digit of slack
      ``k``              bare integer, same as k/1
    """
    s = text.strip()
    if not s:
        raise ValidationError("empty real literal")
    try:
        if s.startswith("sqrt:"):
            return FixedReal.sqrt_int(int(s[5:]), F)
        if s.startswith("surd:"):
            parts = s[5:].split(",")
            if len(parts) != 4:
                raise ValidationError(f"surd literal needs 4 fields: {text!r}")
            u, v, w, d = (int(p) for p in parts)
            return FixedReal.from_surd(u, v, w, d, F)
        if s.startswith("dec:"):
            return FixedReal.from_decimal(s[4:], F)
        if "/" in s:
            num, den = s.split("/", 1)
            return FixedReal.from_fraction(Fraction(int(num), int(den)), F)
        return FixedReal.from_int(int(s), F)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad real literal {text!r}: {exc}") from exc
