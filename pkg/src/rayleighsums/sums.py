"""Reciprocal-power sums over zero families.

Two independent evaluation routes are kept deliberately separate:

* the direct route truncates the series over a computed zero table and
  extrapolates the tail by polynomial Richardson extrapolation in 1/N
  (partial sums of these series expand in integer powers of 1/N for both
  the Bessel and the Struve family, so no zero asymptotic is assumed);
* the closed route rewrites the sum through a Mittag-Leffler expansion as
  a continued-fraction ratio of special functions.

Identity verification relies on the two routes never sharing their
dominant computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateSpacingError, DomainError, PoleError, RangeError
from .specfun import _nu_of, ratio_i, ratio_j, struve_h
from .zeros import ZeroTable

SIGN_MINUS = "minus"
SIGN_PLUS = "plus"

DEFAULT_N_P2 = 200
DEFAULT_N_P4 = 60

_LADDER_POINTS = 9
_NOISE_FLOOR = 2e-13  # extrapolation weights amplify ~1e-16 partial-sum noise


@dataclass(frozen=True)
class SumSpec:
    """One reciprocal-power sum over a zero family.

    The center is either the k-th zero of the table (center_index, the
    identity use case, where the minus-sums exclude n = k) or an explicit
    off-zero abscissa (center_x, the dual-path use case).
    """

    family: str
    nu: float
    power: int
    shift_sign: str
    center_index: Optional[int] = None
    exclude_index: Optional[int] = None
    center_x: Optional[float] = None

    def __post_init__(self):
        if self.power not in (2, 4):
            raise DomainError("power must be 2 or 4, got %r" % self.power)
        if self.shift_sign not in (SIGN_MINUS, SIGN_PLUS):
            raise DomainError("shift_sign must be minus or plus")
        if (self.center_index is None) == (self.center_x is None):
            raise DomainError("exactly one of center_index / center_x is required")
        if self.exclude_index is not None and self.exclude_index != self.center_index:
            raise DomainError("an excluded term must be the center term")


@dataclass(frozen=True)
class SumResult:
    value: float
    truncation_N: int
    tail_bound: float
    method: str
    warning: Optional[str] = None


class CompensatedSum:
    """Neumaier-compensated accumulator."""

    __slots__ = ("total", "compensation")

    def __init__(self):
        self.total = 0.0
        self.compensation = 0.0

    def add(self, value: float) -> None:
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.compensation += (self.total - t) + value
        else:
            self.compensation += (value - t) + self.total
        self.total = t

    def value(self) -> float:
        return self.total + self.compensation


def _center_of(spec: SumSpec, table: ZeroTable) -> float:
    if spec.center_x is not None:
        return spec.center_x
    return table.zero(spec.center_index)


def _terms(spec: SumSpec, table: ZeroTable, upto: int):
    """Yield the summands for n = 1..upto (0.0 at the excluded index)."""
    center = _center_of(spec, table)
    cp = center ** spec.power
    sign = 1.0 if spec.shift_sign == SIGN_PLUS else -1.0
    for n in range(1, upto + 1):
        if spec.exclude_index is not None and n == spec.exclude_index:
            yield 0.0
            continue
        denom = table.zeros[n - 1] ** spec.power + sign * cp
        if abs(denom) < 1e-14 * cp:
            raise DegenerateSpacingError(
                "denominator collapses at n=%d (center %r)" % (n, center)
            )
        yield 1.0 / denom


def partial_sum(spec: SumSpec, table: ZeroTable, N: int) -> float:
    """Compensated sum of the first N terms."""
    if N < 0 or N > table.count:
        raise RangeError("N=%d outside the table of %d zeros" % (N, table.count))
    if spec.center_index is not None and spec.center_index > table.count:
        raise RangeError("center index %d not in table" % spec.center_index)
    acc = CompensatedSum()
    for term in _terms(spec, table, N):
        acc.add(term)
    return acc.value()


def _ladder(N: int, lowest: int) -> list[int]:
    """Even extrapolation nodes ending at (even) N.

    Even nodes only: Struve zeros carry a tiny alternating displacement,
    so same-parity partial sums keep that component smooth in 1/N.
    """
    top = N if N % 2 == 0 else N - 1
    lowest = max(4, lowest + (lowest % 2))
    if top <= lowest + 2 * (_LADDER_POINTS - 1):
        nodes = list(range(max(4, top - 2 * (_LADDER_POINTS - 1)), top + 1, 2))
        return [m for m in nodes if m >= 4]
    nodes = []
    for i in range(1, _LADDER_POINTS + 1):
        m = lowest + (top - lowest) * i // (_LADDER_POINTS)
        nodes.append(m - (m % 2))
    nodes[-1] = top
    return sorted(set(nodes))


def _neville_to_zero(nodes, values):
    """Polynomial extrapolation of values(1/M) to M = infinity.

    Returns (limit, last_correction, previous_correction).
    """
    t = [1.0 / m for m in nodes]
    table = list(values)
    count = len(table)
    previous = table[-1]
    last_corr = 0.0
    prev_corr = math.inf
    for level in range(1, count):
        for i in range(count - level):
            table[i] = (t[i + level] * table[i] - t[i] * table[i + 1]) / (
                t[i + level] - t[i]
            )
        del table[count - level:]
        prev_corr = last_corr if level > 1 else math.inf
        last_corr = abs(table[0] - previous)
        previous = table[0]
    return table[0], last_corr, prev_corr


def tail_extrapolate(spec: SumSpec, table: ZeroTable, N: int) -> SumResult:
    """Truncate at N and extrapolate the tail over a ladder of partial sums.

    tail_bound covers the extrapolation error (4x the last correction plus
    the rounding floor), not any inaccuracy of the zeros themselves.
    """
    if N < 20:
        raise RangeError("tail extrapolation needs N >= 20, got %d" % N)
    if N > table.count:
        raise RangeError("N=%d outside the table of %d zeros" % (N, table.count))
    center = _center_of(spec, table)
    if spec.shift_sign == SIGN_MINUS:
        # 1/M expansion of the tail needs the truncated zeros well past the
        # center; put the lowest ladder node beyond 1.7x the center.
        spacing = (table.zeros[-1] - table.zeros[0]) / max(1, table.count - 1)
        lowest = max(N // _LADDER_POINTS, int(1.7 * center / spacing) + 1)
    else:
        lowest = N // _LADDER_POINTS
    nodes = _ladder(N, lowest)
    if len(nodes) < 3:
        raise RangeError(
            "table too short for a tail ladder (N=%d, lowest node %d)" % (N, lowest)
        )

    acc = CompensatedSum()
    node_sums = []
    node_set = set(nodes)
    for n, term in enumerate(_terms(spec, table, nodes[-1]), start=1):
        acc.add(term)
        if n in node_set:
            node_sums.append(acc.value())
    value, last_corr, prev_corr = _neville_to_zero(nodes, node_sums)
    warning = None
    if last_corr > max(4.0 * prev_corr, 1e-11 * max(1.0, abs(value))):
        warning = "extrapolation corrections are not contracting"
    tail_bound = 4.0 * last_corr + _NOISE_FLOOR
    return SumResult(
        value=value,
        truncation_N=nodes[-1],
        tail_bound=tail_bound,
        method="direct_tail",
        warning=warning,
    )


def sum_with_tail(spec: SumSpec, table: ZeroTable, tolerance: float) -> SumResult:
    """Adaptive front end: raise N from the power-specific default until
    tail_bound clears the requested tolerance or the table is exhausted."""
    N = DEFAULT_N_P2 if spec.power == 2 else DEFAULT_N_P4
    N = min(N, table.count)
    while True:
        result = tail_extrapolate(spec, table, N)
        if result.tail_bound < tolerance or N >= table.count:
            return result
        N = min(2 * N, table.count)


# -- closed forms --------------------------------------------------------------


def closed_minus_sum(order, x: float) -> float:
    """Sum over all zeros of 1/(j^2 - x^2) via the ratio J_{nu+1}/J_nu."""
    nu = _nu_of(order)
    if not x > 0:
        raise DomainError("closed_minus_sum needs x > 0, got %r" % x)
    return ratio_j(nu, x) / (2.0 * x)


def closed_plus_sum(order, x: float) -> float:
    """Sum over all zeros of 1/(j^2 + x^2) via the ratio I_{nu+1}/I_nu."""
    nu = _nu_of(order)
    if not x > 0:
        raise DomainError("closed_plus_sum needs x > 0, got %r" % x)
    return ratio_i(nu, x) / (2.0 * x)


def closed_quartic_sum(order, x: float) -> float:
    """Sum over all zeros of 1/(j^4 - x^4) from the two ratios."""
    nu = _nu_of(order)
    if not x > 0:
        raise DomainError("closed_quartic_sum needs x > 0, got %r" % x)
    return (ratio_j(nu, x) - ratio_i(nu, x)) / (4.0 * x ** 3)


def struve_ml_sum(order, x: float, target_digits: int = 15) -> float:
    """Sum over Struve zeros of 1/(h^2 - x^2), from the Mittag-Leffler
    expansion of H_{nu-1}/H_nu."""
    nu = _nu_of(order)
    if not -0.5 < nu < 0.5:
        raise DomainError("struve_ml_sum needs |nu| < 1/2, got %r" % nu)
    if not x > 0:
        raise DomainError("struve_ml_sum needs x > 0, got %r" % x)
    h_same = struve_h(nu, x, target_digits)
    if h_same == 0.0:
        raise PoleError("x=%r is a zero of H_nu" % x)
    h_lower = struve_h(nu - 1.0, x, target_digits)
    ratio = h_lower / h_same
    if abs(ratio) > 1e12:
        raise PoleError("x=%r is too close to a zero of H_nu" % x)
    return ((2.0 * nu + 1.0) / x - ratio) / (2.0 * x)


def vignat_split(values, k: int):
    """Both sides of the finite quartic-difference decomposition
    sum_{n!=k} 1/(a_n^4 - a_k^4)
        = (1/2 a_k^2) [ sum_{n!=k} 1/(a_n^2 - a_k^2)
                        - sum_{n!=k} 1/(a_n^2 + a_k^2) ],
    valid for any numbers with distinct squares; k is 1-based."""
    seq = [float(v) for v in values]
    if not 1 <= k <= len(seq):
        raise DomainError("index k=%d outside the list of %d values" % (k, len(seq)))
    ak = seq[k - 1]
    ak2 = ak * ak
    ak4 = ak2 * ak2
    lhs = CompensatedSum()
    minus = CompensatedSum()
    plus = CompensatedSum()
    for i, a in enumerate(seq, start=1):
        if i == k:
            continue
        a2 = a * a
        if abs(a2 * a2 - ak4) <= 1e-14 * max(ak4, a2 * a2):
            raise DegenerateSpacingError(
                "values at positions %d and %d share the same fourth power" % (i, k)
            )
        lhs.add(1.0 / (a2 * a2 - ak4))
        minus.add(1.0 / (a2 - ak2))
        plus.add(1.0 / (a2 + ak2))
    rhs = (minus.value() - plus.value()) / (2.0 * ak2)
    return lhs.value(), rhs
