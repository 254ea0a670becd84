"""Compactness decisions and finite-rank approximation.

For 1 < p <= q < inf the operator is compact exactly when the pointwise
quantity b(x)**(1/p') x**(1/q) tends to 0 at both ends of (0, inf).  Both
limits are evaluated symbolically from the head and tail pieces, so the
verdict carries no tolerance.  The finite-rank side builds the dyadic step
approximant b_n below b and certifies the operator-norm gap through the
pointwise criterion of the rearranged difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import criterion_A0
from .errors import NotRepresentableError, ValidationError
from .params import PIECE_CAP, Exponents, Parameter, rearranged_difference

__all__ = [
    "CompactnessReport",
    "is_compact",
    "finite_rank_approx",
]

_INF = math.inf

APPROX_CAP = 20


def _json_real(v: float | None):
    if v is None:
        return None
    if math.isinf(v):
        return "inf"
    return float(v)


@dataclass(frozen=True)
class CompactnessReport:
    """Verdict together with the exact boundary limits that decide it.

    ``verdict`` is ``compact``, ``not-compact``, or ``not-applicable`` when
    the index pair falls outside 1 < p <= q < inf.  ``approximants`` holds
    optional (n, b_n, gap) triples from :func:`finite_rank_approx`.
    """

    verdict: str
    limit_at_zero: float | None
    limit_at_inf: float | None
    approximants: tuple[tuple[int, Parameter, float], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def compact(self) -> bool | None:
        if self.verdict == "not-applicable":
            return None
        return self.verdict == "compact"

    def as_dict(self) -> dict:
        return {
            "compact": self.compact,
            "limits": {
                "zero": _json_real(self.limit_at_zero),
                "inf": _json_real(self.limit_at_inf),
            },
            "approximants": [
                {"n": n, "gap": _json_real(gap)} for n, _, gap in self.approximants
            ],
        }


def is_compact(b: Parameter, e: Exponents) -> CompactnessReport:
    """Exact compactness verdict for 1 < p <= q < inf.

    The two limits of b(x)**(1/p') x**(1/q) come from the head and tail
    piece exponents in closed form; the verdict is ``compact`` exactly when
    both vanish.  Index pairs outside the regime get ``not-applicable``.
    """
    if e.regime != "upper-triangle":
        return CompactnessReport(
            "not-applicable",
            None,
            None,
            notes=(f"no compactness criterion for (p, q) = ({e.p}, {e.q})",),
        )
    if b.is_zero():
        return CompactnessReport("compact", 0.0, 0.0)
    res = criterion_A0(b, e)
    at_zero = float(res.at_zero)
    at_inf = float(res.at_inf)
    verdict = "compact" if (at_zero == 0.0 and at_inf == 0.0) else "not-compact"
    return CompactnessReport(verdict, at_zero, at_inf)


def finite_rank_approx(
    b: Parameter, e: Exponents, n: int
) -> tuple[Parameter, float]:
    """Dyadic step approximant b_n below b and a certified norm gap.

    b_n samples the generalized inverse at the levels k 2**-n for
    k = 1..n 2**n, so b_n has at most n 2**n steps, sits below b, and grows
    towards b as n increases.  The returned gap is the pointwise-criterion
    upper bound on the norm of the rearranged difference, hence a certified
    upper bound on the operator-norm distance between b and b_n.
    """
    if e.regime != "upper-triangle":
        raise ValidationError(
            f"the norm gap needs 1 < p <= q < inf, got ({e.p}, {e.q})"
        )
    if not (isinstance(n, int) and n >= 1):
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if n > APPROX_CAP:
        raise ValidationError(f"n is capped at {APPROX_CAP}, got {n}")
    if math.isinf(b.a[0]):
        raise ValidationError("the approximant needs a finite-valued parameter")
    if b.is_zero():
        return Parameter.zero(), 0.0
    m = n * 2**n
    if m + 2 > PIECE_CAP:
        raise NotRepresentableError(
            f"the approximant at n = {n} needs {m} pieces, above the cap {PIECE_CAP}"
        )
    step = 2.0**-n
    levels = step * np.arange(1, m + 1, dtype=float)
    xs = np.asarray(b.inverse()(levels), dtype=float)
    xs = xs[xs > 0.0]
    flat = step * float(np.isinf(xs).sum())
    fin = xs[np.isfinite(xs)]
    if fin.size == 0:
        b_n = Parameter.constant(flat) if flat > 0.0 else Parameter.zero()
    else:
        edges, counts = np.unique(fin, return_counts=True)
        after = fin.size - np.cumsum(counts)
        breaks = np.concatenate(([0.0], edges))
        values = step * np.concatenate(([float(fin.size)], after)) + flat
        b_n = Parameter.steps(breaks, values)
    diff = rearranged_difference(b, b_n)
    gap = criterion_A0(diff, e).upper
    return b_n, float(gap)
