"""Exact integrals and certified suprema for piecewise power formulas.

Everything here is closed form where possible: power and moment integrals of
a parameter reduce to antiderivatives of pure powers (with binomial
expansions when an offset meets an integer exponent), and suprema of
two-term power expressions have a closed-form interior critical point.  For
products that admit no closed form there is a certified bracketing routine
exploiting monotonicity.
"""

from __future__ import annotations

import heapq
import math
from math import comb
from typing import Callable

from .errors import HardyError, ValidationError
from .params import Parameter

__all__ = [
    "NonElementaryIntegral",
    "power_integral",
    "moment_integral",
    "power_with_limits",
    "sup_two_power",
    "limit_two_power",
    "bracketed_sup",
]

_INF = math.inf

#: Largest integer exponent unfolded by binomial expansion.
_BINOMIAL_CAP = 60


class NonElementaryIntegral(HardyError):
    """The requested integral has no closed form in this piece family."""


def power_with_limits(t: float, p: float) -> float:
    """t**p with the limit conventions 0**0 = inf**0 = 1."""
    if p == 0.0:
        return 1.0
    if t == 0.0:
        return 0.0 if p > 0 else _INF
    if math.isinf(t):
        return _INF if p > 0 else 0.0
    return t**p


def _antiderivative(u: float, g1: float) -> float:
    """Antiderivative of u**(g1-1) evaluated at u, with limit conventions."""
    if g1 == 0.0:
        if u == 0.0:
            return -_INF
        return math.log(u) if not math.isinf(u) else _INF
    return power_with_limits(u, g1) / g1


def _base_power_integral(s: float, g: float, sig: float, lo: float, hi: float) -> float:
    """Integral of (sig*(x+s))**g over [lo, hi], possibly infinite."""
    if sig > 0:
        return _antiderivative(hi + s, g + 1.0) - _antiderivative(lo + s, g + 1.0)
    return _antiderivative(-(lo + s), g + 1.0) - _antiderivative(-(hi + s), g + 1.0)


def _piece_power_integral(row, q: float, lo: float, hi: float) -> float:
    """Integral of f(x)**q over [lo, hi] for one piece formula f."""
    a, c, s, e, sig = row
    if not hi > lo:
        return 0.0
    if c == 0.0:
        if a == 0.0:
            return 0.0
        v = power_with_limits(a, q) if not math.isinf(a) else _INF
        if v == 0.0:
            return 0.0
        return v * (hi - lo) if math.isfinite(hi) else _INF
    if a == 0.0:
        cq = c**q
        return cq * _base_power_integral(s, q * e, sig, lo, hi)
    if math.isinf(hi) and a > 0:
        # f tends to a > 0, so the integral diverges.
        return _INF
    if q == round(q) and 1 <= q <= _BINOMIAL_CAP:
        qi = int(q)
        total = 0.0
        for k in range(qi + 1):
            total += (
                comb(qi, k)
                * a ** (qi - k)
                * c**k
                * _base_power_integral(s, e * k, sig, lo, hi)
            )
        return total
    raise NonElementaryIntegral(
        f"f**{q} with offset {a} has no elementary antiderivative"
    )


def power_integral(b: Parameter, q: float, lo: float = 0.0, hi: float = _INF) -> float:
    """The integral of b(x)**q over [lo, hi], exact or infinite.

    Raises :class:`NonElementaryIntegral` when some contributing piece mixes
    a nonzero offset with a non-integer exponent q.
    """
    if not q > 0:
        raise ValidationError(f"power integrals need q > 0, got {q}")
    if not 0.0 <= lo < hi:
        return 0.0
    edges = list(b.x) + [_INF]
    total = 0.0
    for i in range(b.piece_count):
        seg_lo = max(lo, edges[i])
        seg_hi = min(hi, edges[i + 1])
        row = (float(b.a[i]), float(b.c[i]), float(b.s[i]), float(b.e[i]), float(b.sig[i]))
        total += _piece_power_integral(row, q, seg_lo, seg_hi)
    return total


def _piece_moment_integral(row, m: float, lo: float, hi: float) -> float:
    """Integral of x**(m-1) * f(x) over [lo, hi] for one piece formula f."""
    a, c, s, e, sig = row
    if not hi > lo:
        return 0.0
    total = 0.0
    if a != 0.0:
        if math.isinf(a):
            return _INF
        part = (power_with_limits(hi, m) - power_with_limits(lo, m)) / m
        total += a * part
    if c == 0.0:
        return total
    if s == 0.0 and sig > 0:
        total += c * (_antiderivative(hi, m + e) - _antiderivative(lo, m + e))
        return total
    if m == round(m) and 1 <= m <= _BINOMIAL_CAP:
        mi = int(m)
        acc = 0.0
        for j in range(mi):
            acc += (
                comb(mi - 1, j)
                * sig**j
                * (-s) ** (mi - 1 - j)
                * _base_power_integral(s, e + j, sig, lo, hi)
            )
        return total + c * acc
    if e == round(e) and 0 <= e <= _BINOMIAL_CAP:
        ei = int(e)
        acc = 0.0
        for k in range(ei + 1):
            part = (power_with_limits(hi, m + k) - power_with_limits(lo, m + k)) / (m + k)
            acc += comb(ei, k) * s ** (ei - k) * part
        return total + c * sig**ei * acc
    raise NonElementaryIntegral(
        f"x**{m - 1} against a shifted power has no elementary antiderivative"
    )


def moment_integral(b: Parameter, m: float, lo: float = 0.0, hi: float = _INF) -> float:
    """The integral of x**(m-1) * b(x) over [lo, hi], exact or infinite.

    Raises :class:`NonElementaryIntegral` when a shifted piece meets a
    non-integer moment order m.
    """
    if not m > 0:
        raise ValidationError(f"moment integrals need m > 0, got {m}")
    if not 0.0 <= lo < hi:
        return 0.0
    edges = list(b.x) + [_INF]
    total = 0.0
    for i in range(b.piece_count):
        seg_lo = max(lo, edges[i])
        seg_hi = min(hi, edges[i + 1])
        row = (float(b.a[i]), float(b.c[i]), float(b.s[i]), float(b.e[i]), float(b.sig[i]))
        total += _piece_moment_integral(row, m, seg_lo, seg_hi)
    return total


def limit_two_power(A: float, eta: float, B: float, gamma: float, at_zero: bool) -> float:
    """Limit of A*t**eta + B*t**(eta+gamma) as t -> 0+ or t -> inf."""
    terms = [(A, eta), (B, eta + gamma)]
    terms = [(coef, ex) for coef, ex in terms if coef != 0.0]
    if not terms:
        return 0.0
    if len(terms) == 2 and terms[0][1] == terms[1][1]:
        terms = [(terms[0][0] + terms[1][0], terms[0][1])]
    if len(terms) == 2:
        # The dominant term has the smaller exponent at 0, larger at inf.
        key = min if at_zero else max
        terms = [key(terms, key=lambda it: it[1])]
    coef, ex = terms[0]
    if coef == 0.0:
        return 0.0
    scale = power_with_limits(0.0 if at_zero else _INF, ex)
    if math.isinf(scale):
        return math.copysign(_INF, coef)
    return coef * scale


def sup_two_power(A: float, eta: float, B: float, gamma: float, lo: float, hi: float) -> float:
    """Supremum of A*t**eta + B*t**(eta+gamma) over t in [lo, hi].

    Endpoints at 0 or inf contribute their limits.  The only interior
    critical point of a two-term power expression is closed form.
    """
    if not lo <= hi:
        raise ValidationError(f"empty interval [{lo}, {hi}]")

    def value(t: float) -> float:
        if t == 0.0:
            return limit_two_power(A, eta, B, gamma, at_zero=True)
        if math.isinf(t):
            return limit_two_power(A, eta, B, gamma, at_zero=False)
        return A * t**eta + B * t ** (eta + gamma)

    cands = [value(lo), value(hi)]
    if A != 0.0 and B != 0.0 and gamma != 0.0 and eta != 0.0 and eta + gamma != 0.0:
        ratio = -A * eta / (B * (eta + gamma))
        if ratio > 0.0:
            t_star = ratio ** (1.0 / gamma)
            if lo < t_star < hi:
                cands.append(value(t_star))
    return max(cands)


def bracketed_sup(
    dec: Callable[[float], float],
    inc: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = 1e-6,
    max_iter: int = 200_000,
) -> tuple[float, float]:
    """Certified bracket for sup of dec(x) * inc(x) over [lo, hi].

    dec must be non-increasing and inc non-decreasing, both nonnegative; on
    any subinterval [u, v] the product is then at most dec(u) * inc(v) and at
    least its value at any sample point.  Adaptive refinement returns
    (lower, upper) with lower <= sup <= upper; the loop stops once they agree
    to rtol or the iteration budget runs out.  The envelope gap shrinks only
    linearly with interval width, so the work grows like rtol**-0.5; keep
    rtol modest.

    hi may be inf when inc stays bounded there; otherwise the upper bound
    stays infinite and is returned as such.
    """
    if not 0.0 <= lo < hi:
        raise ValidationError(f"bad interval [{lo}, {hi}]")

    def midpoint(u: float, v: float) -> float:
        if math.isinf(v):
            return 2.0 * u if u > 0 else 1.0
        if u > 0 and v / u > 4.0:
            return math.sqrt(u * v)
        return 0.5 * (u + v)

    def sample(t: float) -> float:
        return dec(t) * inc(t)

    best = max(sample(midpoint(lo, hi)), sample(lo) if lo > 0 else 0.0)
    if math.isfinite(hi):
        best = max(best, sample(hi))
    counter = 0
    heap: list[tuple[float, int, float, float]] = []

    def push(u: float, v: float) -> None:
        nonlocal counter
        up = dec(u) * inc(v)
        if math.isnan(up):
            up = _INF
        counter += 1
        heapq.heappush(heap, (-up, counter, u, v))

    push(lo, hi)
    for _ in range(max_iter):
        neg_up, _, u, v = heapq.heappop(heap)
        upper = -neg_up
        if upper <= best * (1.0 + rtol) + 1e-300:
            heapq.heappush(heap, (neg_up, 0, u, v))
            break
        m = midpoint(u, v)
        if not u < m < v:
            heapq.heappush(heap, (neg_up, 0, u, v))
            break
        best = max(best, sample(m))
        push(u, m)
        push(m, v)
    upper = max(-heap[0][0], best) if heap else best
    return best, upper
