"""Zeros of J_nu and Struve H_nu on the positive axis, complex zeros of the
Macdonald half-integer polynomials, and a JSON cache for all of them.

Bessel zeros are refined by Newton on the logarithmic derivative, which
needs only the machine-precision continued-fraction ratio; Struve zeros are
bracketed by a sign scan and polished by bisection plus Newton on the
extended-precision series values. Every accepted real zero is certified by
a sign change of the function across [z - abs_tol, z + abs_tol].
"""

from __future__ import annotations

import cmath
import json
import math
import os
import tempfile
from dataclasses import dataclass

from .errors import (
    CacheParseError,
    DomainError,
    InvariantViolation,
    NumericalFailure,
    OrderingError,
    StaleCacheError,
)
from .numkernel import ExtReal
from .specfun import (
    Order,
    _hn_int_coeffs,
    _nu_of,
    bessel_j,
    hn_coeffs,
    hn_eval,
    hn_eval_deriv,
    ratio_j_raw,
    struve_h,
)

FAMILY_BESSEL_J = "BesselJ"
FAMILY_STRUVE_H = "StruveH"
FAMILY_MACDONALD_K = "MacdonaldK"

DEFAULT_REAL_ABS_TOL = 1e-12
DEFAULT_COMPLEX_ABS_TOL = 1e-11

_CACHE_VERSION = 1

_SIGN_CHECK_DIGITS = 16

_STRUVE_SCAN_START = 0.1
_STRUVE_SCAN_STEP = math.pi / 4.0  # zero spacing approaches pi, so a pi/4
                                   # grid cannot step over two zeros at once


@dataclass(frozen=True)
class ZeroTable:
    """Ordered positive zeros of one function family at one order."""

    family: str
    nu: float
    zeros: tuple[float, ...]
    abs_tol: float

    @property
    def count(self) -> int:
        return len(self.zeros)

    def zero(self, n: int) -> float:
        """n-th positive zero, 1-based."""
        if not 1 <= n <= len(self.zeros):
            raise DomainError("zero index %d outside table of %d" % (n, len(self.zeros)))
        return self.zeros[n - 1]


@dataclass(frozen=True)
class ComplexZeroSet:
    """The n left-half-plane zeros of the degree-n Macdonald polynomial,
    closed under conjugation."""

    n: int
    zeros: tuple[complex, ...]
    abs_tol: float

    @property
    def nu(self) -> float:
        return self.n + 0.5


def mcmahon_guess(order, n: int) -> float:
    """First-order large-zero approximation for j_{nu,n}:
    beta - (4 nu^2 - 1)/(8 beta) with beta = (n + nu/2 - 1/4) pi.

    Exact for nu = +-1/2; for moderate nu it lands within the same
    inter-zero hill as the true zero, which is all Newton needs.
    """
    nu = _nu_of(order)
    if not nu > -1.0:
        raise DomainError("mcmahon_guess needs nu > -1, got %r" % nu)
    if n < 1:
        raise DomainError("zero index must be >= 1, got %r" % n)
    beta = (n + 0.5 * nu - 0.25) * math.pi
    return beta - (4.0 * nu * nu - 1.0) / (8.0 * beta)


def _verify_sign_change(value_fn, z: float, abs_tol: float):
    """Check f(z-abs_tol) * f(z+abs_tol) <= 0; return the endpoint values."""
    lo = value_fn(z - abs_tol)
    hi = value_fn(z + abs_tol)
    if lo == 0.0 or hi == 0.0:
        return lo, hi
    if math.copysign(1.0, lo) == math.copysign(1.0, hi):
        raise NumericalFailure(
            "no sign change across [%.17g +- %g]; refined point is not a zero"
            % (z, abs_tol)
        )
    return lo, hi


def find_bessel_zeros(order, count: int, abs_tol: float = DEFAULT_REAL_ABS_TOL) -> ZeroTable:
    """First `count` positive zeros of J_nu.

    Newton iteration on x -> x - 1/(nu/x - J_{nu+1}/J_nu) from the McMahon
    guess; each zero certified by a sign change of the series evaluation.
    """
    nu = _nu_of(order)
    if not nu > -1.0:
        raise DomainError("find_bessel_zeros needs nu > -1, got %r" % nu)
    if count < 1:
        raise DomainError("count must be >= 1, got %r" % count)
    zeros = []
    for n in range(1, count + 1):
        guess = mcmahon_guess(nu, n)
        x = guess
        lo_wall = max(guess - 0.9, 0.25 * abs(guess))
        hi_wall = guess + 0.9
        converged = False
        for _ in range(50):
            slope = nu / x - ratio_j_raw(nu, x)  # = J_nu'/J_nu
            if slope == 0.0:
                raise NumericalFailure(
                    "flat logarithmic derivative at x=%r (nu=%r, n=%d)" % (x, nu, n)
                )
            step = -1.0 / slope
            x += step
            if not lo_wall < x < hi_wall:
                raise NumericalFailure(
                    "Newton escaped the expected bracket (nu=%r, n=%d)" % (nu, n)
                )
            if abs(step) <= max(0.25 * abs_tol, 4.0 * math.ulp(x)):
                converged = True
                break
        if not converged:
            raise NumericalFailure(
                "Newton did not converge in 50 steps (nu=%r, n=%d)" % (nu, n)
            )
        _verify_sign_change(
            lambda t: bessel_j(nu, t, _SIGN_CHECK_DIGITS), x, abs_tol
        )
        if zeros and x <= zeros[-1] + abs_tol:
            raise OrderingError(
                "zeros %d and %d of J_%r collided or crossed" % (n - 1, n, nu)
            )
        zeros.append(x)
    return ZeroTable(FAMILY_BESSEL_J, nu, tuple(zeros), abs_tol)


def find_struve_zeros(order, count: int, abs_tol: float = DEFAULT_REAL_ABS_TOL) -> ZeroTable:
    """First `count` positive zeros of Struve H_nu for |nu| < 1/2.

    Sign scan with step pi/4 from x = 0.1 up to the cap 1.3 pi (count+2),
    then bisection to a narrow bracket and Newton with the recurrence
    derivative.
    """
    nu = _nu_of(order)
    if not -0.5 < nu < 0.5:
        raise DomainError("find_struve_zeros needs |nu| < 1/2, got %r" % nu)
    if count < 1:
        raise DomainError("count must be >= 1, got %r" % count)

    def h_value(t: float) -> float:
        return struve_h(nu, t, _SIGN_CHECK_DIGITS)

    cap = 1.3 * math.pi * (count + 2)
    brackets = []
    x_prev = _STRUVE_SCAN_START
    f_prev = h_value(x_prev)
    x_cur = x_prev
    while len(brackets) < count:
        x_cur = x_prev + _STRUVE_SCAN_STEP
        if x_cur > cap:
            raise NumericalFailure(
                "found only %d of %d sign changes of H_%r below the scan cap %g"
                % (len(brackets), count, nu, cap)
            )
        f_cur = h_value(x_cur)
        if f_cur == 0.0 or math.copysign(1.0, f_prev) != math.copysign(1.0, f_cur):
            brackets.append((x_prev, f_prev, x_cur, f_cur))
        x_prev, f_prev = x_cur, f_cur

    zeros = []
    for index, (a, fa, b, fb) in enumerate(brackets, start=1):
        for _ in range(4):  # shrink to ~0.05 before trusting Newton
            mid = 0.5 * (a + b)
            fm = h_value(mid)
            if fm == 0.0:
                a = b = mid
                break
            if math.copysign(1.0, fm) == math.copysign(1.0, fa):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        x = 0.5 * (a + b)
        converged = a == b
        for _ in range(50):
            if converged:
                break
            value = h_value(x)
            slope = struve_h(nu - 1.0, x, _SIGN_CHECK_DIGITS) - (nu / x) * value
            if slope == 0.0:
                raise NumericalFailure(
                    "flat derivative while refining zero %d of H_%r" % (index, nu)
                )
            step = -value / slope
            x += step
            if not a - 0.5 < x < b + 0.5:
                raise NumericalFailure(
                    "Newton escaped the bracket for zero %d of H_%r" % (index, nu)
                )
            if abs(step) <= max(0.25 * abs_tol, 4.0 * math.ulp(x)):
                converged = True
        if not converged:
            raise NumericalFailure(
                "refinement did not converge for zero %d of H_%r" % (index, nu)
            )
        _verify_sign_change(h_value, x, abs_tol)
        if zeros and x <= zeros[-1] + abs_tol:
            raise OrderingError(
                "zeros %d and %d of H_%r collided or crossed" % (index - 1, index, nu)
            )
        zeros.append(x)
    return ZeroTable(FAMILY_STRUVE_H, nu, tuple(zeros), abs_tol)


def _aberth_roots(coeffs, n: int):
    """Aberth-Ehrlich simultaneous iteration for all roots of the monic
    polynomial with the given ascending coefficients, to roughly the
    accuracy double-precision evaluation noise allows."""
    # Conjugate-symmetric start: left-half-plane arc scaled with degree.
    radius = 0.75 * (n + 1)
    roots = []
    for i in range(n):
        angle = math.pi * (0.5 + (i + 0.5) / n)
        roots.append(radius * cmath.exp(1j * angle) - 0.25)
    poly = coeffs

    def p_over_dp(z):
        value = 0j
        deriv = 0j
        spread = 0.0  # sum |c_k| |z|^k, the evaluation-noise scale
        az = abs(z)
        for c in reversed(poly[1:]):
            deriv = deriv * z + value
            value = value * z + c
            spread = spread * az + abs(c)
        deriv = deriv * z + value
        value = value * z + poly[0]
        spread = spread * az + abs(poly[0])
        return value, deriv, spread

    goal = 1e-9 * n
    for _ in range(200):
        all_settled = True
        for i in range(n):
            z = roots[i]
            value, deriv, spread = p_over_dp(z)
            if deriv == 0:
                roots[i] = z + (1e-6 + 1e-6j)
                all_settled = False
                continue
            newton = value / deriv
            repulsion = 0j
            for j, w in enumerate(roots):
                if j != i:
                    repulsion += 1.0 / (z - w)
            denom = 1.0 - newton * repulsion
            step = newton / denom if denom != 0 else newton
            roots[i] = z - step
            # Double-precision Horner noise keeps |p/p'| bouncing around
            # eps*spread/|p'|; the extended-precision polish removes it.
            floor = 16.0 * 2.3e-16 * spread / abs(deriv)
            if abs(step) > max(goal, floor):
                all_settled = False
        if all_settled:
            return roots
    raise NumericalFailure(
        "simultaneous root iteration did not converge in 200 sweeps (n=%d)" % n
    )


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _cdiv(a, b):
    denom = b[0] * b[0] + b[1] * b[1]
    if denom.is_zero():
        return None
    return (
        (a[0] * b[0] + a[1] * b[1]) / denom,
        (a[1] * b[0] - a[0] * b[1]) / denom,
    )


def _cmag2(a) -> int:
    return max(a[0].magnitude_exponent(), a[1].magnitude_exponent())


def _newton_step_ext(coeffs, z, prec: int):
    """Complex Newton correction p(z)/p'(z) in ExtReal arithmetic."""
    zero = ExtReal.zero(prec)
    value = (zero, zero)
    deriv = (zero, zero)
    for c in reversed(coeffs[1:]):
        deriv = _cadd(_cmul(deriv, z), value)
        value = _cadd(_cmul(value, z), (c, zero))
    deriv = _cadd(_cmul(deriv, z), value)
    value = _cadd(_cmul(value, z), (coeffs[0], zero))
    return _cdiv(value, deriv)


def _aberth_polish(ext_coeffs, starts, prec: int, max_sweeps: int = 40):
    """Aberth sweeps in ExtReal arithmetic from double-precision starts.

    The repulsion term keeps the iterates on distinct roots, which a plain
    per-root Newton polish cannot guarantee when the double-precision
    stage only localized them to its own noise floor.
    """
    one = ExtReal.from_int(1, prec)
    zero = ExtReal.zero(prec)
    roots = [
        (ExtReal.from_float(z.real, prec), ExtReal.from_float(z.imag, prec))
        for z in starts
    ]
    goal_drop = (2 * prec) // 3
    for _ in range(max_sweeps):
        settled = True
        for i, z in enumerate(roots):
            newton = _newton_step_ext(ext_coeffs, z, prec)
            if newton is None:
                settled = False
                continue
            repulsion = (zero, zero)
            for j, w in enumerate(roots):
                if j == i:
                    continue
                inv = _cdiv((one, zero), _csub(z, w))
                if inv is None:
                    raise NumericalFailure("root iterates collided during polish")
                repulsion = _cadd(repulsion, inv)
            denom = _csub((one, zero), _cmul(newton, repulsion))
            step = _cdiv(newton, denom)
            if step is None:
                step = newton
            new_z = _csub(z, step)
            roots[i] = new_z
            if _cmag2(step) >= _cmag2(new_z) - goal_drop:
                settled = False
        if settled:
            return [complex(zr.to_float(), zi.to_float()) for zr, zi in roots]
    raise NumericalFailure(
        "extended-precision root polish did not settle in %d sweeps" % max_sweeps
    )


def find_hn_zeros(n: int, abs_tol: float = DEFAULT_COMPLEX_ABS_TOL) -> ComplexZeroSet:
    """All n zeros of the degree-n Macdonald polynomial, conjugate-paired."""
    if not 1 <= n <= 60:
        raise DomainError("supported degree range is 1..60, got %r" % n)
    poly = hn_coeffs(n)
    int_coeffs = _hn_int_coeffs(n)
    roots = _aberth_roots(poly.coeffs, n)
    polish_prec = 128 + int_coeffs[0].bit_length()
    ext_coeffs = [ExtReal.from_int(c, polish_prec) for c in int_coeffs]
    roots = _aberth_polish(ext_coeffs, roots, polish_prec)

    # Structural conjugate pairing: real coefficients force symmetric roots,
    # so rebuild each pair as (w, conj(w)) and flatten near-real roots.
    ordered = sorted(roots, key=lambda z: (round(z.imag, 6) == 0, z.imag))
    paired = []
    uppers = [z for z in ordered if z.imag > 1e-6 * (1.0 + abs(z))]
    lowers = [z for z in ordered if z.imag < -1e-6 * (1.0 + abs(z))]
    reals = [z for z in ordered if abs(z.imag) <= 1e-6 * (1.0 + abs(z))]
    if len(uppers) != len(lowers):
        raise InvariantViolation("conjugate pairing failed for degree %d" % n)
    lowers_left = list(lowers)
    for z in uppers:
        match = min(lowers_left, key=lambda w: abs(w.conjugate() - z))
        lowers_left.remove(match)
        mean = 0.5 * (z + match.conjugate())
        paired.append(mean)
        paired.append(mean.conjugate())
    for z in reals:
        paired.append(complex(z.real, 0.0))

    for z in paired:
        if not z.real < 0:
            raise InvariantViolation(
                "root %r of degree-%d polynomial has re >= 0" % (z, n)
            )
        # |p(z)/p'(z)| at the stored root estimates its distance to the
        # true root; evaluated in ExtReal because the coefficients are far
        # too large for a meaningful double-precision residual.
        step = _newton_step_ext(
            ext_coeffs,
            (
                ExtReal.from_float(z.real, polish_prec),
                ExtReal.from_float(z.imag, polish_prec),
            ),
            polish_prec,
        )
        if step is not None:
            distance = math.hypot(step[0].to_float(), step[1].to_float())
            if distance > abs_tol:
                raise NumericalFailure(
                    "root %r sits %g from the true root at degree %d (tol %g)"
                    % (z, distance, n, abs_tol)
                )

    vieta = sum(paired)
    target = -0.5 * n * (n + 1)
    if abs(vieta.real - target) > 1e-9 * n * n or abs(vieta.imag) > 1e-9 * n * n:
        raise InvariantViolation(
            "root sum %r deviates from %r at degree %d" % (vieta, target, n)
        )
    ordered_final = tuple(sorted(paired, key=lambda z: (z.imag, z.real)))
    return ComplexZeroSet(n=n, zeros=ordered_final, abs_tol=abs_tol)


# -- persistent cache ---------------------------------------------------------


def _format_real(x: float) -> str:
    # 20 significant digits: more than a double carries, so load/store
    # round-trips are byte-stable.
    return "%.19e" % x


def cache_store(table, path) -> None:
    """Write a zero table atomically (temp file + rename)."""
    if isinstance(table, ZeroTable):
        doc = {
            "version": _CACHE_VERSION,
            "family": table.family,
            "nu": _format_real(table.nu),
            "abs_tol": _format_real(table.abs_tol),
            "zeros": [_format_real(z) for z in table.zeros],
        }
    elif isinstance(table, ComplexZeroSet):
        doc = {
            "version": _CACHE_VERSION,
            "family": FAMILY_MACDONALD_K,
            "n": table.n,
            "nu": _format_real(table.nu),
            "abs_tol": _format_real(table.abs_tol),
            "zeros": [
                {"re": _format_real(z.real), "im": _format_real(z.imag)}
                for z in table.zeros
            ],
        }
    else:
        raise DomainError("cannot cache object of type %s" % type(table).__name__)
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(doc, handle, indent=1)
            handle.write("\n")
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def cache_load(family: str, key, min_count: int, path):
    """Load a table if the file matches (family, nu or n) and holds at
    least min_count zeros; return None otherwise.

    Raises CacheParseError for malformed files and StaleCacheError for
    version mismatches.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        return None
    with open(path, "r") as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CacheParseError(
            "cache file %s is not valid JSON at offset %d: %s"
            % (path, exc.pos, exc.msg),
            path=path,
            offset=exc.pos,
        ) from exc
    if not isinstance(doc, dict):
        raise CacheParseError("cache file %s holds no object" % path, path=path, offset=0)
    version = doc.get("version")
    if version != _CACHE_VERSION:
        raise StaleCacheError(
            "cache file %s has version %r, expected %d" % (path, version, _CACHE_VERSION)
        )
    try:
        if doc["family"] != family:
            return None
        if family == FAMILY_MACDONALD_K:
            if int(doc["n"]) != int(key):
                return None
            zeros = tuple(
                complex(float(entry["re"]), float(entry["im"]))
                for entry in doc["zeros"]
            )
            if len(zeros) < min_count:
                return None
            return ComplexZeroSet(
                n=int(doc["n"]), zeros=zeros, abs_tol=float(doc["abs_tol"])
            )
        if float(doc["nu"]) != float(key):
            return None
        zeros = tuple(float(z) for z in doc["zeros"])
        if len(zeros) < min_count:
            return None
        return ZeroTable(
            family=doc["family"],
            nu=float(doc["nu"]),
            zeros=zeros,
            abs_tol=float(doc["abs_tol"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheParseError(
            "cache file %s misses or corrupts a required field: %s" % (path, exc),
            path=path,
            offset=None,
        ) from exc
