"""Arbitrary-precision binary floating point for cancellation-prone series.

Ascending power series for the oscillatory special functions in this
package lose roughly 0.434*x decimal digits to cancellation at argument x,
so summing them for x in the hundreds is hopeless in machine precision.
ExtReal is a deliberately small integer-mantissa binary float: enough to
sum those series at a caller-chosen working precision, and nothing more
(no extended-precision transcendentals are provided or needed).
"""

from __future__ import annotations

import math

from .errors import DomainError

_LOG2_10 = math.log2(10.0)

# Decimal digits lost by the ascending J/I/H series are ~0.434*x, i.e.
# ~1.443*x bits; 1.45 leaves slack and 64 guard bits absorb per-term
# rounding over the few thousand terms a large-x evaluation needs.
_CANCEL_BITS_PER_X = 1.45
_GUARD_BITS = 64


def required_precision(x: float, target_digits: int) -> int:
    """Working precision (bits) for summing an ascending series at x.

    Covers the e^x-scale cancellation of the alternating Bessel/Struve
    series plus the requested number of significant decimal digits.
    Monotone in both arguments.
    """
    if x < 0:
        raise DomainError("required_precision needs x >= 0, got %r" % x)
    return int(math.ceil(_CANCEL_BITS_PER_X * x + _LOG2_10 * target_digits)) + _GUARD_BITS


def gamma(x: float) -> float:
    """Gamma function for x > 0 at machine precision.

    Enters only as a multiplicative prefactor or in finite coefficients,
    so the platform's fixed-coefficient rational approximation (a few ulp)
    is accurate far beyond what any downstream tolerance needs.
    """
    if not x > 0:
        raise DomainError("gamma defined here only for x > 0, got %r" % x)
    return math.gamma(x)


class ExtReal:
    """Immutable sign/mantissa/exponent float with explicit precision.

    value = sign * mantissa * 2**exponent, where the mantissa of a nonzero
    number is normalized to exactly `precision` bits (top bit set).
    Arithmetic rounds to nearest-even at the operand precision, so every
    operation is well within the 2-ulp contract.
    """

    __slots__ = ("sign", "mantissa", "exponent", "precision")

    def __init__(self, sign: int, mantissa: int, exponent: int, precision: int):
        # Raw constructor: inputs must already be normalized.
        self.sign = sign
        self.mantissa = mantissa
        self.exponent = exponent
        self.precision = precision

    # -- construction -----------------------------------------------------

    @classmethod
    def _make(cls, sign: int, mantissa: int, exponent: int, precision: int) -> "ExtReal":
        if sign == 0 or mantissa == 0:
            return cls(0, 0, 0, precision)
        length = mantissa.bit_length()
        shift = length - precision
        if shift > 0:
            low = mantissa & ((1 << shift) - 1)
            half = 1 << (shift - 1)
            mantissa >>= shift
            exponent += shift
            if low > half or (low == half and (mantissa & 1)):
                mantissa += 1
                if mantissa.bit_length() > precision:
                    mantissa >>= 1
                    exponent += 1
        elif shift < 0:
            mantissa <<= -shift
            exponent += shift
        return cls(sign, mantissa, exponent, precision)

    @classmethod
    def zero(cls, precision: int) -> "ExtReal":
        return cls(0, 0, 0, precision)

    @classmethod
    def from_int(cls, value: int, precision: int) -> "ExtReal":
        if value == 0:
            return cls.zero(precision)
        sign = 1 if value > 0 else -1
        return cls._make(sign, abs(value), 0, precision)

    @classmethod
    def from_float(cls, value: float, precision: int) -> "ExtReal":
        if value == 0.0:
            return cls.zero(precision)
        if not math.isfinite(value):
            raise DomainError("ExtReal requires a finite value, got %r" % value)
        frac, exp2 = math.frexp(abs(value))
        mant = int(frac * (1 << 53))  # exact: frac has at most 53 bits
        return cls._make(1 if value > 0 else -1, mant, exp2 - 53, precision)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.sign == 0

    def magnitude_exponent(self) -> int:
        """floor(log2(|x|)) + 1 for nonzero x; very negative for zero."""
        if self.sign == 0:
            return -(1 << 62)
        return self.exponent + self.mantissa.bit_length()

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        mant = self.mantissa
        exp = self.exponent
        length = mant.bit_length()
        shift = length - 53
        if shift > 0:
            low = mant & ((1 << shift) - 1)
            half = 1 << (shift - 1)
            mant >>= shift
            exp += shift
            if low > half or (low == half and (mant & 1)):
                mant += 1
        return self.sign * math.ldexp(float(mant), exp)

    def as_integer_ratio(self) -> tuple[int, int]:
        """Exact value as numerator/denominator (for test oracles)."""
        if self.sign == 0:
            return (0, 1)
        num = self.sign * self.mantissa
        if self.exponent >= 0:
            return (num << self.exponent, 1)
        return (num, 1 << -self.exponent)

    def _check_precision(self, other: "ExtReal") -> None:
        if self.precision != other.precision:
            raise DomainError(
                "operands must share a working precision (%d vs %d)"
                % (self.precision, other.precision)
            )

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "ExtReal":
        return ExtReal(-self.sign, self.mantissa, self.exponent, self.precision)

    def __abs__(self) -> "ExtReal":
        return ExtReal(abs(self.sign), self.mantissa, self.exponent, self.precision)

    def __add__(self, other: "ExtReal") -> "ExtReal":
        self._check_precision(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        a, b = self, other
        if a.exponent < b.exponent:
            a, b = b, a
        gap = a.exponent - b.exponent
        if gap > a.precision + 4:
            # |b| below half an ulp of a: a already correctly rounded.
            if b.magnitude_exponent() < a.magnitude_exponent() - a.precision - 2:
                return a
            gap_cap = a.precision + 4
            dropped = b.mantissa & ((1 << (gap - gap_cap)) - 1)
            bm = (b.mantissa >> (gap - gap_cap)) | (1 if dropped else 0)
            total = (a.sign * a.mantissa << gap_cap) + b.sign * bm
            exp = a.exponent - gap_cap
        else:
            total = (a.sign * a.mantissa << gap) + b.sign * b.mantissa
            exp = b.exponent
        if total == 0:
            return ExtReal.zero(self.precision)
        sign = 1 if total > 0 else -1
        return ExtReal._make(sign, abs(total), exp, self.precision)

    def __sub__(self, other: "ExtReal") -> "ExtReal":
        return self + (-other)

    def __mul__(self, other: "ExtReal") -> "ExtReal":
        self._check_precision(other)
        if self.sign == 0 or other.sign == 0:
            return ExtReal.zero(self.precision)
        return ExtReal._make(
            self.sign * other.sign,
            self.mantissa * other.mantissa,
            self.exponent + other.exponent,
            self.precision,
        )

    def __truediv__(self, other: "ExtReal") -> "ExtReal":
        self._check_precision(other)
        if other.sign == 0:
            raise ZeroDivisionError("ExtReal division by zero")
        if self.sign == 0:
            return ExtReal.zero(self.precision)
        prec = self.precision
        shifted = self.mantissa << (prec + 2)
        quotient, remainder = divmod(shifted, other.mantissa)
        if remainder:
            quotient |= 1  # sticky bit keeps rounding honest
        return ExtReal._make(
            self.sign * other.sign,
            quotient,
            self.exponent - other.exponent - (prec + 2),
            prec,
        )

    def mul_pow2(self, k: int) -> "ExtReal":
        """Exact scaling by 2**k."""
        if self.sign == 0:
            return self
        return ExtReal(self.sign, self.mantissa, self.exponent + k, self.precision)

    # -- comparisons (by value) ---------------------------------------------

    def _cmp(self, other: "ExtReal") -> int:
        diff = self - other
        return diff.sign

    def __lt__(self, other: "ExtReal") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "ExtReal") -> bool:
        return self._cmp(other) <= 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExtReal):
            return NotImplemented
        return (
            self.sign == other.sign
            and self.mantissa == other.mantissa
            and self.exponent == other.exponent
        )

    def __hash__(self):
        return hash(self.as_integer_ratio())

    def __repr__(self) -> str:
        return "ExtReal(%r, prec=%d)" % (self.to_float(), self.precision)


def arith(a: ExtReal, b: ExtReal, op: str) -> ExtReal:
    """Functional facade over the four ExtReal operations."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise DomainError("unknown op %r; expected add/sub/mul/div" % op)
