"""Bessel J/I, Struve H, their ratios, and the Macdonald half-integer polynomials.

Evaluation strategy, chosen so the zero finders and identity checks never
fight cancellation in machine precision:

* function values come from the ascending power series, summed in ExtReal
  at ``required_precision(x, target_digits)`` with terms generated by the
  exact term-ratio recurrence (the gamma prefactor is applied once, at
  machine precision, which only scales the result);
* the ratios J_{nu+1}/J_nu and I_{nu+1}/I_nu come from continued fractions
  in machine precision, which is cheap and cancellation-free at any x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DomainError,
    InvariantViolation,
    NumericalFailure,
    PoleError,
    RangeError,
)
from .numkernel import ExtReal, gamma, required_precision

ComplexVal = complex

_SERIES_CAP_SLOPE = 10  # series must converge within 10*x + 200 terms
_SERIES_CAP_OFFSET = 200

_RATIO_POLE_THRESHOLD = 1e12  # |J_{nu+1}/J_nu| this large means x is within
                              # ~1e-12 of a zero of J_nu


@dataclass(frozen=True)
class Order:
    """Real order of a function family."""

    nu: float


@dataclass(frozen=True)
class PolyCoeffs:
    """Monic polynomial with ascending real coefficients."""

    degree: int
    coeffs: tuple[float, ...]


def _nu_of(order) -> float:
    return float(order.nu) if isinstance(order, Order) else float(order)


def _require_bessel_order(nu: float) -> None:
    if not nu > -1.0:
        raise DomainError("Bessel-family order must satisfy nu > -1, got %r" % nu)


def _require_struve_order(nu: float) -> None:
    # Slack below -1/2 exists only so that H_{nu-1} is reachable when the
    # derivative recurrence needs it.
    if not (-1.5 < nu < 0.5):
        raise DomainError("Struve order supported on (-3/2, 1/2), got %r" % nu)


def _series_sum(nu: float, x: float, prec: int, offset_a: float, offset_b: float,
                sign: int) -> ExtReal:
    """Sum_{m>=0} t_m with t_0 = 1 and
    t_{m+1} = t_m * sign * (x/2)^2 / ((m+offset_a)(m+nu+offset_b)),
    in ExtReal at `prec` bits.

    Every recurrence factor is formed to full working precision; a single
    double-rounded factor would be amplified by the e^x cancellation.
    """
    x_ext = ExtReal.from_float(x, prec)
    quarter_x2 = (x_ext * x_ext).mul_pow2(-2)
    if sign < 0:
        quarter_x2 = -quarter_x2
    nu_ext = ExtReal.from_float(nu, prec)

    term = ExtReal.from_int(1, prec)
    total = term
    max_mag = term.magnitude_exponent()
    cap = _SERIES_CAP_SLOPE * int(x) + _SERIES_CAP_OFFSET
    prev_mag = max_mag
    for m in range(cap):
        # m + offset is exact in a double for every m this loop can reach.
        d1 = ExtReal.from_float(m + offset_a, prec)
        d2 = ExtReal.from_float(m + offset_b, prec) + nu_ext
        term = term * quarter_x2 / (d1 * d2)
        total = total + term
        mag = term.magnitude_exponent()
        if mag > max_mag:
            max_mag = mag
        elif mag < prev_mag and mag < max_mag - prec - 4:
            return total
        prev_mag = mag
    raise NumericalFailure(
        "ascending series did not converge in %d terms (nu=%r, x=%r)" % (cap, nu, x)
    )


def bessel_j(order, x: float, target_digits: int = 14) -> float:
    """J_nu(x) for nu > -1, x >= 0, correct to target_digits significant
    digits (absolute 10**-target_digits when the value is near zero)."""
    nu = _nu_of(order)
    _require_bessel_order(nu)
    if x < 0:
        raise DomainError("bessel_j needs x >= 0, got %r" % x)
    if x == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        raise DomainError("J_nu diverges at x=0 for nu < 0")
    prec = required_precision(x, target_digits)
    total = _series_sum(nu, x, prec, 1.0, 1.0, -1)
    prefactor = math.pow(0.5 * x, nu) / gamma(nu + 1.0)
    return (total * ExtReal.from_float(prefactor, prec)).to_float()


def bessel_i(order, x: float, target_digits: int = 14) -> float:
    """I_nu(x) for nu > -1, x >= 0; same series path as bessel_j for
    uniformity even though the all-positive terms never cancel."""
    nu = _nu_of(order)
    _require_bessel_order(nu)
    if x < 0:
        raise DomainError("bessel_i needs x >= 0, got %r" % x)
    if x == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        raise DomainError("I_nu diverges at x=0 for nu < 0")
    prec = required_precision(x, target_digits)
    total = _series_sum(nu, x, prec, 1.0, 1.0, +1)
    prefactor = math.pow(0.5 * x, nu) / gamma(nu + 1.0)
    return (total * ExtReal.from_float(prefactor, prec)).to_float()


def struve_h(order, x: float, target_digits: int = 14) -> float:
    """Struve H_nu(x) for nu in (-3/2, 1/2), x > 0."""
    nu = _nu_of(order)
    _require_struve_order(nu)
    if not x > 0:
        raise DomainError("struve_h needs x > 0, got %r" % x)
    prec = required_precision(x, target_digits)
    total = _series_sum(nu, x, prec, 1.5, 1.5, -1)
    prefactor = math.pow(0.5 * x, nu + 1.0) / (gamma(1.5) * gamma(nu + 1.5))
    return (total * ExtReal.from_float(prefactor, prec)).to_float()


def struve_h_deriv(order, x: float, target_digits: int = 14) -> float:
    """H_nu'(x) from the downward recurrence
    H_nu'(x) = H_{nu-1}(x) - (nu/x) H_nu(x); never a finite difference."""
    nu = _nu_of(order)
    if not (-0.5 < nu < 0.5):
        raise DomainError("struve_h_deriv needs |nu| < 1/2, got %r" % nu)
    if not x > 0:
        raise DomainError("struve_h_deriv needs x > 0, got %r" % x)
    lower = struve_h(nu - 1.0, x, target_digits)
    same = struve_h(nu, x, target_digits)
    return lower - (nu / x) * same


def _lentz_ratio(nu: float, x: float, sign: int) -> float:
    """Continued fraction for J_{nu+1}/J_nu (sign=-1) or I_{nu+1}/I_nu
    (sign=+1), by the modified Lentz scheme."""
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0
    cap = 600 + int(5.0 * x)
    converged = 0
    for k in range(1, cap + 1):
        a = 1.0 if k == 1 else float(sign)
        b = 2.0 * (nu + k) / x
        d = b + a * d
        if d == 0.0:
            d = tiny
        c = b + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            converged += 1
            if converged >= 2:
                return f
        else:
            converged = 0
    raise NumericalFailure(
        "ratio continued fraction did not converge in %d steps (nu=%r, x=%r)"
        % (cap, nu, x)
    )


def ratio_j_raw(order, x: float) -> float:
    """J_{nu+1}(x)/J_nu(x) with no pole guard (used by Newton refinement,
    whose iterates legitimately approach zeros of J_nu)."""
    nu = _nu_of(order)
    _require_bessel_order(nu)
    if not x > 0:
        raise DomainError("ratio_j needs x > 0, got %r" % x)
    return _lentz_ratio(nu, x, -1)


def ratio_j(order, x: float) -> float:
    """J_{nu+1}(x)/J_nu(x); raises PoleError within ~1e-12 of a zero of J_nu."""
    value = ratio_j_raw(order, x)
    if abs(value) > _RATIO_POLE_THRESHOLD:
        raise PoleError("x=%r is within ~1e-12 of a zero of J_nu" % x)
    return value


def ratio_i(order, x: float) -> float:
    """I_{nu+1}(x)/I_nu(x) for x > 0, nu > -1; strictly positive."""
    nu = _nu_of(order)
    _require_bessel_order(nu)
    if not x > 0:
        raise DomainError("ratio_i needs x > 0, got %r" % x)
    return _lentz_ratio(nu, x, +1)


_HN_DEGREE_CAP = 60  # coefficients leave double range not far beyond


def _hn_int_coeffs(n: int) -> list[int]:
    """Exact integer coefficients of the degree-n Macdonald polynomial."""
    if n < 0:
        raise DomainError("polynomial degree must be non-negative, got %r" % n)
    if n > _HN_DEGREE_CAP:
        raise RangeError("degree %d exceeds the supported cap %d" % (n, _HN_DEGREE_CAP))
    coeffs = []
    for k in range(n + 1):
        numerator = math.factorial(2 * n - k)
        denominator = math.factorial(n - k) * math.factorial(k)
        value, remainder = divmod(numerator, denominator << (n - k))
        if remainder:
            raise InvariantViolation("coefficient of z^%d is not integral" % k)
        coeffs.append(value)
    return coeffs


def hn_coeffs(n: int) -> PolyCoeffs:
    """Coefficients of the degree-n monic polynomial behind K_{n+1/2}:
    coefficient of z^k is (2n-k)! / ((n-k)! k! 2^(n-k)), an exact integer
    (these are the reverse Bessel polynomials)."""
    return PolyCoeffs(degree=n, coeffs=tuple(float(c) for c in _hn_int_coeffs(n)))


def hn_eval(p: PolyCoeffs, z: complex) -> complex:
    """Horner evaluation; exact at z=0."""
    result = 0.0 + 0.0j
    for c in reversed(p.coeffs):
        result = result * z + c
    return result


def hn_eval_deriv(p: PolyCoeffs, z: complex) -> complex:
    """Horner evaluation of the derivative."""
    result = 0.0 + 0.0j
    for k in range(p.degree, 0, -1):
        result = result * z + k * p.coeffs[k]
    return result
