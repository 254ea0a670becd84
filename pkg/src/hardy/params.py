"""Piecewise power parameters and exponent pairs.

A parameter is a non-increasing, right-continuous function
``b : (0, inf) -> [0, inf]`` stored as finitely many pieces.  On the piece
``[x[i], x[i+1])`` (the last piece extends to infinity) the value is

    b(x) = a[i] + c[i] * (sig[i] * (x + s[i])) ** e[i]

with ``sig[i]`` in ``{+1, -1}``.  Constant pieces have ``c = 0``.  The only
admissible infinite value is a constant first piece (``a[0] = inf``); it is
treated as a flag and never enters arithmetic.

This family is closed under the generalized inverse

    b^{-1}(y) = sup {x > 0 : y < b(x)},       sup of the empty set = 0,

and under dilation ``x -> gamma * b(delta * x)``, which is what the rest of
the package relies on.  Pieces are kept as parallel numpy arrays so that
parameters with many steps (up to ``PIECE_CAP``) stay cheap to evaluate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotRepresentableError, ValidationError

__all__ = [
    "PIECE_CAP",
    "COEFF_RTOL",
    "Exponents",
    "conjugate",
    "Parameter",
    "generalized_inverse",
    "dilate",
    "truncated_power",
    "TRUNCATION_KINDS",
    "rearranged_difference",
    "parameter_to_json",
    "parameter_from_json",
]

_INF = math.inf

#: Hard cap on the number of pieces a single parameter may hold.
PIECE_CAP = 1_000_000

#: Relative tolerance used when deciding that two parameters coincide.
COEFF_RTOL = 1e-12


def conjugate(t: float) -> float:
    """Holder conjugate t' = t/(t-1), with 1' = inf and inf' = 1.

    For t < 1 the same formula gives a negative conjugate, which is the
    convention the lower-triangle bounds use.
    """
    if t == 1.0:
        return _INF
    if t == _INF:
        return 1.0
    return t / (t - 1.0)


@dataclass(frozen=True)
class Exponents:
    """A Lebesgue index pair (p, q) with its derived quantities.

    The regime tag partitions index pairs by which machinery applies:
    ``upper-triangle`` is 1 < p <= q < inf, ``lower-triangle`` is
    0 < q < p < inf with p > 1, and everything else is ``endpoint``.
    """

    p: float
    q: float

    def __post_init__(self) -> None:
        for name, v in (("p", self.p), ("q", self.q)):
            if not isinstance(v, (int, float)) or math.isnan(v) or not v > 0:
                raise ValidationError(f"{name} must be a positive number, got {v!r}")

    @property
    def p_conj(self) -> float:
        return conjugate(self.p)

    @property
    def q_conj(self) -> float:
        return conjugate(self.q)

    @property
    def r(self) -> float:
        """1/r = 1/q - 1/p; defined for q < p."""
        if not self.q < self.p:
            raise ValidationError(f"r requires q < p, got p={self.p}, q={self.q}")
        if self.p == _INF:
            return self.q
        return 1.0 / (1.0 / self.q - 1.0 / self.p)

    @property
    def s(self) -> float:
        """1/s = 1/p - 1/q; defined for p < q."""
        if not self.p < self.q:
            raise ValidationError(f"s requires p < q, got p={self.p}, q={self.q}")
        if self.q == _INF:
            return self.p
        return 1.0 / (1.0 / self.p - 1.0 / self.q)

    @property
    def regime(self) -> str:
        p, q = self.p, self.q
        if 1.0 < p <= q < _INF:
            return "upper-triangle"
        if 1.0 < p < _INF and q < p:
            return "lower-triangle"
        return "endpoint"

    @property
    def dual(self) -> "Exponents":
        """The pair (q', p'), the indices of the adjoint problem."""
        return Exponents(self.q_conj, self.p_conj)


# ---------------------------------------------------------------------------
# piece-level helpers (raw array arithmetic)
# ---------------------------------------------------------------------------


def _formula_values(a, c, s, e, sig, x):
    """Evaluate a + c * (sig*(x+s))**e elementwise.

    Entries with c == 0 return a, so an inf flag never meets arithmetic.
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    const = c == 0.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        u = np.asarray(sig, dtype=float) * (np.asarray(x, dtype=float) + np.asarray(s, dtype=float))
        powed = np.where(const, 1.0, u) ** np.where(const, 0.0, e)
        vals = np.where(const, a, a + c * powed)
    return vals


def _invert_formula(a: float, c: float, s: float, e: float, sig: float):
    """Coefficients of the inverse of one strictly monotone piece formula.

    Solving y = a + c*(sig*(x+s))**e for x gives another family member:

        x = -s + sig * |c|**(-1/e) * (sign(c) * (y - a)) ** (1/e),

    i.e. (a', c', s', e', sig') = (-s, sig*|c|**(-1/e), -a, 1/e, sign(c)).
    Applying the map twice returns the original coefficients.
    """
    if c == 0.0 or e == 0.0:
        raise ValueError("constant pieces have no formula inverse")
    return (-s, sig * abs(c) ** (-1.0 / e), -a, 1.0 / e, 1.0 if c > 0 else -1.0)


def _formula_root(a: float, c: float, s: float, e: float, sig: float, y: float) -> float:
    """The x solving a + c*(sig*(x+s))**e == y on a strictly monotone piece."""
    ai, ci, si, ei, sgi = _invert_formula(a, c, s, e, sig)
    u = sgi * (y + si)
    return ai + ci * u**ei


def _dust_profile(x_eval, a, c, s, e):
    """Rounding scale of each piece formula evaluated at the given points.

    Vectorized counterpart of :func:`_value_dust`, used by validation.
    """
    out = np.abs(np.asarray(a, dtype=float))
    live = np.asarray(c) != 0.0
    if live.any():
        xs = np.asarray(x_eval, dtype=float)[live]
        u = np.abs(xs + s[live])
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            term = np.where(
                u > 0.0,
                np.abs(c[live]) * np.where(u > 0.0, u, 1.0) ** e[live],
                np.where(e[live] > 0.0, 0.0, _INF),
            )
            amp = np.where(
                (term > 0.0) & (u > 0.0),
                1.0 + np.abs(e[live]) * (np.abs(xs) + np.abs(s[live])) / np.where(u > 0.0, u, 1.0),
                0.0,
            )
            out[live] = out[live] + np.where(term > 0.0, term, 0.0) * amp
            out[live] = np.where(np.isnan(out[live]), _INF, out[live])
    return out


def _normalize(x, a, c, s, e, sig):
    """Canonicalize raw piece arrays: fold constants, validate, merge."""
    x = np.asarray(x, dtype=float).copy()
    a = np.asarray(a, dtype=float).copy()
    c = np.asarray(c, dtype=float).copy()
    s = np.asarray(s, dtype=float).copy()
    e = np.asarray(e, dtype=float).copy()
    sig = np.asarray(sig, dtype=float).copy()
    m = x.size
    if m == 0:
        raise ValidationError("a parameter needs at least one piece")
    for name, arr in (("a", a), ("c", c), ("s", s), ("e", e), ("sig", sig)):
        if arr.size != m:
            raise ValidationError(f"piece array {name!r} has size {arr.size}, expected {m}")
    if m > PIECE_CAP:
        raise ValidationError(f"{m} pieces exceeds the cap of {PIECE_CAP}")

    # Degenerate powers are constants in disguise.
    flat = (c != 0.0) & (e == 0.0)
    a[flat] += c[flat]
    c[flat] = 0.0
    const = c == 0.0
    s[const] = 0.0
    e[const] = 0.0
    sig[const] = 1.0

    if np.isnan(x).any() or np.isinf(x).any():
        raise ValidationError("breakpoints must be finite")
    if x[0] != 0.0:
        raise ValidationError(f"first breakpoint must be 0, got {x[0]}")
    if m > 1 and not (np.diff(x) > 0).all():
        raise ValidationError("breakpoints must be strictly increasing")
    for name, arr in (("a", a), ("c", c), ("s", s), ("e", e)):
        if np.isnan(arr).any():
            raise ValidationError(f"piece array {name!r} contains NaN")
    if not np.isin(sig, (-1.0, 1.0)).all():
        raise ValidationError("sig entries must be +1 or -1")
    if np.isinf(c).any() or np.isinf(s).any() or np.isinf(e).any():
        raise ValidationError("only the leading constant may be infinite")
    inf_mask = np.isinf(a)
    if inf_mask.any():
        bad = np.flatnonzero(inf_mask)
        if bad[0] != 0 or bad.size > 1 or c[0] != 0.0 or a[0] < 0:
            raise ValidationError("infinity is only allowed as a constant first piece")

    live = ~const
    if (c[live] * e[live] * sig[live] > 0).any():
        raise ValidationError("each piece must be non-increasing (need c*e*sig <= 0)")

    hi = np.append(x[1:], _INF)
    for i in np.flatnonzero(live):
        # The power base must stay positive on the piece interior.
        if sig[i] > 0:
            base_lo = x[i] + s[i]
            if base_lo < 0 or (base_lo == 0.0 and e[i] < 0 and x[i] != 0.0):
                raise ValidationError(
                    f"piece {i}: base x+s is not positive on [{x[i]}, {hi[i]})"
                )
        else:
            if hi[i] == _INF:
                raise ValidationError(f"piece {i}: reflected base cannot reach infinity")
            base_hi = -(hi[i] + s[i])
            if base_hi < 0 or (base_hi == 0.0 and e[i] < 0):
                raise ValidationError(
                    f"piece {i}: base -(x+s) is not positive on [{x[i]}, {hi[i]})"
                )
        if hi[i] == _INF and e[i] > 0:
            raise ValidationError(f"piece {i}: diverges at infinity")

    # Values must be nonnegative; monotone pieces take their minimum at the
    # right end, so checking there is enough.  Tiny negative float dust from
    # closed-form roots is tolerated here and clamped at evaluation time.
    # The allowance scales with each piece's own rounding profile, since a
    # nearly cancelled base x + s amplifies evaluation error without bound.
    bottoms = _piece_bottoms(x, a, c, s, e, sig)
    tops = _piece_tops(x, a, c, s, e, sig)
    hi = np.append(x[1:], _INF)
    bot_dust = _dust_profile(hi, a, c, s, e)
    top_dust = _dust_profile(x, a, c, s, e)
    if (bottoms < -1e-9 * bot_dust).any():
        i = int(np.argmin(bottoms))
        raise ValidationError(f"piece {i} takes negative values (min {bottoms[i]:.3g})")
    if m > 1:
        drop = np.where(np.isinf(bottoms[:-1]), _INF, bottoms[:-1] - tops[1:])
        allow = 1e-9 * (bot_dust[:-1] + top_dust[1:])
        if (drop < -allow).any():
            i = int(np.argmin(drop + np.where(np.isinf(allow), _INF, allow)))
            raise ValidationError(
                f"value increases across breakpoint x={x[i + 1]} "
                f"({bottoms[i]:.6g} -> {tops[i + 1]:.6g})"
            )

    # Merge adjacent pieces carrying the identical formula.
    if m > 1:
        same = (
            (a[1:] == a[:-1])
            & (c[1:] == c[:-1])
            & (s[1:] == s[:-1])
            & (e[1:] == e[:-1])
            & (sig[1:] == sig[:-1])
        )
        if same.any():
            keep = np.concatenate(([True], ~same))
            x, a, c, s, e, sig = (arr[keep] for arr in (x, a, c, s, e, sig))
    return x, a, c, s, e, sig


def _value_dust(a: float, c: float, s: float, e: float, x: float) -> float:
    """Magnitude scale of float rounding in a + c*(sig*(x+s))**e at x.

    The base x + s may cancel severely; the relative error of the power term
    is then amplified by |e| * (|x| + |s|) / |x + s|.
    """
    if c == 0.0:
        return abs(a)
    u = abs(x + s)
    if u == 0.0:
        term = 0.0 if e > 0 else _INF
    else:
        term = abs(c) * u**e
    if term == 0.0:
        return abs(a)
    if math.isinf(term):
        return _INF
    return abs(a) + term * (1.0 + abs(e) * (abs(x) + abs(s)) / u)


def _meaningfully_above(u: float, v: float, dust: float) -> bool:
    """True when u exceeds v by more than the given rounding allowance."""
    if not u > v:
        return False
    if math.isinf(u):
        return True
    return u - v > dust


def _piece_tops(x, a, c, s, e, sig):
    """Right-continuous value of each piece at its left endpoint (may be inf)."""
    return np.asarray(_formula_values(a, c, s, e, sig, x), dtype=float)


def _piece_bottoms(x, a, c, s, e, sig):
    """Left limit of each piece at its right endpoint; tail limit for the last.

    A valid non-constant last piece has e < 0, so its tail limit is ``a``.
    """
    hi = np.append(x[1:], 0.0)
    vals = np.asarray(_formula_values(a, c, s, e, sig, hi), dtype=float)
    vals[-1] = a[-1]
    return vals


class Parameter:
    """A non-increasing, right-continuous piecewise power function on (0, inf).

    Instances are immutable; all constructors go through validation and
    canonicalization.  Call the instance to evaluate it.
    """

    __slots__ = ("x", "a", "c", "s", "e", "sig")

    def __init__(self, x, a, c, s, e, sig):
        x, a, c, s, e, sig = _normalize(x, a, c, s, e, sig)
        for name, arr in (("x", x), ("a", a), ("c", c), ("s", s), ("e", e), ("sig", sig)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __setattr__(self, name, value):
        raise AttributeError("Parameter is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_pieces(cls, pieces: Iterable[dict]) -> "Parameter":
        """Build from dicts with key lo and any of a, c, s, e, sig."""
        rows = list(pieces)
        if not rows:
            raise ValidationError("empty piece list")
        return cls(
            [float(r["lo"]) for r in rows],
            [float(r.get("a", 0.0)) for r in rows],
            [float(r.get("c", 0.0)) for r in rows],
            [float(r.get("s", 0.0)) for r in rows],
            [float(r.get("e", 0.0)) for r in rows],
            [float(r.get("sig", 1.0)) for r in rows],
        )

    @classmethod
    def steps(cls, breaks: Sequence[float], values: Sequence[float]) -> "Parameter":
        """Step function: values[i] on [breaks[i], breaks[i+1]), last to inf."""
        breaks = np.asarray(breaks, dtype=float)
        values = np.asarray(values, dtype=float)
        z = np.zeros_like(values)
        return cls(breaks, values, z, z, z, np.ones_like(values))

    @classmethod
    def zero(cls) -> "Parameter":
        return cls.steps([0.0], [0.0])

    @classmethod
    def constant(cls, v: float) -> "Parameter":
        return cls.steps([0.0], [v])

    @classmethod
    def power(cls, coeff: float, exponent: float) -> "Parameter":
        """The pure power coeff * x**exponent on all of (0, inf)."""
        return cls([0.0], [0.0], [coeff], [0.0], [exponent], [1.0])

    # -- basic queries -----------------------------------------------------

    @property
    def piece_count(self) -> int:
        return self.x.size

    def __call__(self, x):
        """Evaluate b(x); x may be a scalar or an array with entries in (0, inf)."""
        xa = np.asarray(x, dtype=float)
        scalar = xa.ndim == 0
        xa = np.atleast_1d(xa)
        if (xa <= 0).any() or np.isnan(xa).any():
            raise ValidationError("evaluation points must lie in (0, inf)")
        idx = np.searchsorted(self.x, xa, side="right") - 1
        vals = _formula_values(
            self.a[idx], self.c[idx], self.s[idx], self.e[idx], self.sig[idx], xa
        )
        vals = np.maximum(vals, 0.0)
        return float(vals[0]) if scalar else vals

    def left_limit(self, x):
        """Left limit b(x-); x may be a scalar or an array with entries in (0, inf)."""
        xa = np.asarray(x, dtype=float)
        scalar = xa.ndim == 0
        xa = np.atleast_1d(xa)
        if (xa <= 0).any() or np.isnan(xa).any():
            raise ValidationError("evaluation points must lie in (0, inf)")
        idx = np.maximum(np.searchsorted(self.x, xa, side="left") - 1, 0)
        vals = _formula_values(
            self.a[idx], self.c[idx], self.s[idx], self.e[idx], self.sig[idx], xa
        )
        vals = np.maximum(vals, 0.0)
        return float(vals[0]) if scalar else vals

    def value_at_zero(self) -> float:
        """The limit of b at 0+, possibly inf."""
        return float(self.piece_tops()[0])

    def tail_limit(self) -> float:
        """The limit of b at infinity."""
        return float(self.a[-1])

    def piece_tops(self) -> np.ndarray:
        """Value of each piece at its left endpoint (right-continuous)."""
        return _piece_tops(self.x, self.a, self.c, self.s, self.e, self.sig)

    def piece_bottoms(self) -> np.ndarray:
        """Left limit of each piece at its right endpoint (tail limit last)."""
        return _piece_bottoms(self.x, self.a, self.c, self.s, self.e, self.sig)

    def is_zero(self) -> bool:
        return bool((self.c == 0.0).all() and (self.a == 0.0).all())

    def support_end(self) -> float:
        """sup of the support: inf if b is positive arbitrarily far out."""
        zero_piece = (self.c == 0.0) & (self.a == 0.0)
        i = self.piece_count
        while i > 0 and zero_piece[i - 1]:
            i -= 1
        if i == self.piece_count:
            return _INF
        return float(self.x[i])

    def pieces(self) -> list[dict]:
        """Pieces as dicts with lo/hi/a/c/s/e/sig (hi of the last is inf)."""
        hi = np.append(self.x[1:], _INF)
        return [
            {
                "lo": float(self.x[i]),
                "hi": float(hi[i]),
                "a": float(self.a[i]),
                "c": float(self.c[i]),
                "s": float(self.s[i]),
                "e": float(self.e[i]),
                "sig": float(self.sig[i]),
            }
            for i in range(self.piece_count)
        ]

    def __repr__(self) -> str:
        return (
            f"<Parameter: {self.piece_count} pieces, b(0+)={self.value_at_zero():g}, "
            f"support_end={self.support_end():g}>"
        )

    def equivalent(self, other: "Parameter", rtol: float = COEFF_RTOL) -> bool:
        """Coefficientwise comparison of normalized piece lists."""
        if self.piece_count != other.piece_count:
            return False
        for mine, theirs in zip(
            (self.x, self.a, self.c, self.s, self.e, self.sig),
            (other.x, other.a, other.c, other.s, other.e, other.sig),
        ):
            if (np.isinf(mine) != np.isinf(theirs)).any():
                return False
            finite = np.isfinite(mine)
            scale = max(
                1.0,
                float(np.max(np.abs(mine[finite]), initial=0.0)),
                float(np.max(np.abs(theirs[finite]), initial=0.0)),
            )
            if not np.allclose(mine[finite], theirs[finite], rtol=rtol, atol=rtol * scale):
                return False
        return True

    # -- algebra -----------------------------------------------------------

    def inverse(self) -> "Parameter":
        """The generalized inverse, again a Parameter.

        For right-continuous non-increasing b the operation is an involution,
        and y < b(x) holds iff x < b^{-1}(y).
        """
        if (self.c == 0.0).all():
            return self._inverse_of_steps()

        m = self.piece_count
        const = self.c == 0.0
        tops = self.piece_tops()
        bottoms = self.piece_bottoms()
        out: list[tuple[float, float, float, float, float, float]] = []  # lo,a,c,s,e,sig

        # Levels below the tail limit have unbounded superlevel sets.
        tail_limit = float(bottoms[-1])
        ycur = 0.0
        ycur_dust = 0.0
        if tail_limit > 0.0:
            out.append((0.0, _INF, 0.0, 0.0, 0.0, 1.0))
            ycur = tail_limit
            ycur_dust = abs(float(self.a[-1]))
        if const[-1]:
            xright = float(self.x[-1])
        else:
            ai, ci, si, ei, sgi = _invert_formula(
                float(self.a[-1]), float(self.c[-1]), float(self.s[-1]),
                float(self.e[-1]), float(self.sig[-1]),
            )
            out.append((ycur, ai, ci, si, ei, sgi))
            ycur = float(tops[-1])
            ycur_dust = _value_dust(
                float(self.a[-1]), float(self.c[-1]), float(self.s[-1]),
                float(self.e[-1]), float(self.x[-1]),
            )
            xright = float(self.x[-1])

        for i in range(m - 2, -1, -1):
            v_bot = float(bottoms[i])
            v_top = float(tops[i])
            row = (float(self.a[i]), float(self.c[i]), float(self.s[i]), float(self.e[i]))
            bot_dust = _value_dust(*row, float(self.x[i + 1]))
            if _meaningfully_above(v_bot, ycur, 1e-12 * (bot_dust + ycur_dust)):
                # Jump across the breakpoint: constant stretch of the inverse.
                out.append((ycur, xright, 0.0, 0.0, 0.0, 1.0))
                ycur = v_bot
                ycur_dust = bot_dust
            lo_dust = _value_dust(*row, float(self.x[i]))
            if not const[i] and _meaningfully_above(v_top, ycur, 1e-12 * (lo_dust + ycur_dust)):
                ai, ci, si, ei, sgi = _invert_formula(
                    float(self.a[i]), float(self.c[i]), float(self.s[i]),
                    float(self.e[i]), float(self.sig[i]),
                )
                out.append((ycur, ai, ci, si, ei, sgi))
                ycur = v_top
                ycur_dust = lo_dust
            xright = float(self.x[i])

        if not math.isinf(ycur):
            out.append((ycur, 0.0, 0.0, 0.0, 0.0, 1.0))
        cols = list(zip(*out))
        return Parameter(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5])

    def _inverse_of_steps(self) -> "Parameter":
        """Vectorized inverse for pure step parameters.

        After normalization a step parameter has strictly decreasing values
        v[0] > ... > v[m-1], so b^{-1}(y) = x[i] for y in [v[i], v[i-1]).
        """
        v, x = self.a, self.x
        breaks = [v[:0:-1]]
        values = [x[:0:-1]]
        if v[-1] > 0.0:
            breaks.insert(0, [0.0])
            values.insert(0, [_INF])
        elif v.size == 1:
            return Parameter.zero()
        if math.isfinite(v[0]):
            breaks.append([v[0]])
            values.append([0.0])
        b = np.concatenate(breaks)
        w = np.concatenate(values)
        z = np.zeros_like(w)
        return Parameter(b, w, z, z, z, np.ones_like(w))

    def dilate(self, gamma: float, delta: float) -> "Parameter":
        """The parameter x -> gamma * b(delta * x)."""
        if not (gamma > 0 and delta > 0 and math.isfinite(gamma) and math.isfinite(delta)):
            raise ValidationError(f"dilation needs finite gamma, delta > 0, got {gamma}, {delta}")
        x = self.x / delta
        a = np.where(np.isinf(self.a), self.a, gamma * self.a)
        c = gamma * self.c * delta**self.e
        s = self.s / delta
        return Parameter(x, a, c, s, self.e.copy(), self.sig.copy())


def generalized_inverse(b: Parameter) -> Parameter:
    """b^{-1}(y) = sup{x > 0 : y < b(x)}, as a Parameter."""
    return b.inverse()


def dilate(b: Parameter, gamma: float, delta: float) -> Parameter:
    """The parameter x -> gamma * b(delta * x)."""
    return b.dilate(gamma, delta)


TRUNCATION_KINDS = ("sharp-cut", "cap", "lower-shift", "argument-shift")


def truncated_power(p: float, q: float, kind: str, y: float) -> Parameter:
    """Truncations of the critical power x**(-p'/q), all with norm K_{p,q}.

    kind selects the truncation at level/point y > 0:

    - ``sharp-cut``:      x**(-p'/q) on (0, y), then 0
    - ``cap``:            min(x**(-p'/q), y)
    - ``lower-shift``:    max(x**(-p'/q) - y, 0)
    - ``argument-shift``: (x + y)**(-p'/q)
    """
    ex = Exponents(p, q)
    if not (1.0 < p < _INF) or not (0.0 < q < _INF):
        raise ValidationError(f"truncated powers need 1 < p < inf and 0 < q < inf, got {p}, {q}")
    if not (y > 0 and math.isfinite(y)):
        raise ValidationError(f"truncation level must be positive and finite, got {y}")
    beta = ex.p_conj / q
    if kind == "sharp-cut":
        return Parameter([0.0, y], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [-beta, 0.0], [1.0, 1.0])
    if kind == "cap":
        x0 = y ** (-1.0 / beta)
        return Parameter([0.0, x0], [y, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, -beta], [1.0, 1.0])
    if kind == "lower-shift":
        x0 = y ** (-1.0 / beta)
        return Parameter([0.0, x0], [-y, 0.0], [1.0, 0.0], [0.0, 0.0], [-beta, 0.0], [1.0, 1.0])
    if kind == "argument-shift":
        return Parameter([0.0], [0.0], [1.0], [y], [-beta], [1.0])
    raise ValidationError(f"unknown truncation kind {kind!r}; expected one of {TRUNCATION_KINDS}")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def parameter_to_json(b: Parameter) -> list[dict]:
    """Piece list with keys lo, hi, c, s, e (optional a, sig); tail hi is None.

    Constants are emitted through the c slot with e = 0; the infinite head
    constant is the string "inf".  Round-trips exactly through
    :func:`parameter_from_json`.
    """
    hi = np.append(b.x[1:], _INF)
    out = []
    for i in range(b.piece_count):
        row: dict = {"lo": float(b.x[i]), "hi": None if math.isinf(hi[i]) else float(hi[i])}
        if b.c[i] == 0.0:
            row["c"] = "inf" if math.isinf(b.a[i]) else float(b.a[i])
            row["s"] = 0.0
            row["e"] = 0.0
        else:
            row["c"] = float(b.c[i])
            row["s"] = float(b.s[i])
            row["e"] = float(b.e[i])
            if b.a[i] != 0.0:
                row["a"] = float(b.a[i])
            if b.sig[i] != 1.0:
                row["sig"] = int(b.sig[i])
        out.append(row)
    return out


def parameter_from_json(rows: Sequence[dict]) -> Parameter:
    """Inverse of :func:`parameter_to_json`; validates shape and contiguity."""
    if not isinstance(rows, Sequence) or isinstance(rows, (str, bytes)) or not rows:
        raise ValidationError("parameter JSON must be a non-empty list of pieces")
    lo, a, c, s, e, sig = [], [], [], [], [], []
    for k, row in enumerate(rows):
        if not isinstance(row, dict) or "lo" not in row:
            raise ValidationError(f"piece {k} must be an object with a 'lo' key")
        try:
            lo_k = float(row["lo"])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"piece {k}: bad 'lo' value {row['lo']!r}") from exc
        hi_k = row.get("hi")
        if k + 1 < len(rows):
            nxt = rows[k + 1].get("lo") if isinstance(rows[k + 1], dict) else None
            if hi_k is None or nxt is None or float(hi_k) != float(nxt):
                raise ValidationError(
                    f"piece {k}: hi={hi_k!r} must equal the next piece's lo={nxt!r}"
                )
        elif hi_k is not None:
            raise ValidationError("the last piece must have hi = null")
        cv = row.get("c", 0.0)
        ev = float(row.get("e", 0.0))
        sv = float(row.get("s", 0.0))
        av = float(row.get("a", 0.0))
        gv = float(row.get("sig", 1.0))
        if cv == "inf":
            if ev != 0.0 or av != 0.0:
                raise ValidationError(f"piece {k}: 'inf' is only valid as a bare constant")
            av, cv, ev, sv, gv = _INF, 0.0, 0.0, 0.0, 1.0
        else:
            try:
                cv = float(cv)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"piece {k}: bad 'c' value {row.get('c')!r}") from exc
            if ev == 0.0:
                av, cv = av + cv, 0.0
        lo.append(lo_k)
        a.append(av)
        c.append(cv)
        s.append(sv)
        e.append(ev)
        sig.append(gv)
    return Parameter(lo, a, c, s, e, sig)


# ---------------------------------------------------------------------------
# non-increasing rearrangement of |a - b|
# ---------------------------------------------------------------------------


class _Cell:
    """|f_a - f_b| on one interval where it reduces to a single family formula.

    ``coeffs`` holds (a, c, s, e, sig) of |g|; endpoint values, level roots
    and superlevel measures are all closed form.  ``coeffs`` may describe an
    increasing formula: cells are not parameters, just monotone arcs.
    """

    __slots__ = ("lo", "hi", "coeffs", "v_lo", "v_hi")

    def __init__(self, lo, hi, coeffs, v_lo, v_hi):
        self.lo = float(lo)
        self.hi = float(hi)
        self.coeffs = coeffs
        self.v_lo = float(v_lo)
        self.v_hi = float(v_hi)

    @property
    def top(self) -> float:
        return max(self.v_lo, self.v_hi)

    def measure_above(self, lam: float) -> float:
        """Length of {x in [lo, hi) : |g|(x) > lam}, for lam > 0."""
        if lam >= self.top:
            return 0.0
        if lam < min(self.v_lo, self.v_hi):
            return self.hi - self.lo
        root = _formula_root(*self.coeffs, lam)
        root = min(max(root, self.lo), self.hi)
        if self.v_lo >= self.v_hi:
            return root - self.lo
        return self.hi - root


class _SampledCell:
    """A monotone arc of |f_a - f_b| known only through samples.

    Used when the two formulas share no base; superlevel measures are
    interpolated, so results that pass through such cells are approximate.
    """

    __slots__ = ("lo", "hi", "xs", "gs", "v_lo", "v_hi")

    def __init__(self, xs, gs):
        self.xs = np.asarray(xs, dtype=float)
        self.gs = np.asarray(gs, dtype=float)
        self.lo = float(xs[0])
        self.hi = float(xs[-1])
        self.v_lo = float(gs[0])
        self.v_hi = float(gs[-1])

    @property
    def top(self) -> float:
        return float(self.gs.max())

    def measure_above(self, lam: float) -> float:
        above = self.gs > lam
        if not above.any():
            return 0.0
        widths = np.diff(self.xs)
        frac = 0.5 * (above[:-1].astype(float) + above[1:].astype(float))
        return float(np.sum(widths * frac))


def _difference_formula(ra, rb):
    """Single-family coefficients of f_a - f_b on a common interval, or None.

    Works when either side is constant or both share the same power base.
    """
    aa, ca, sa, ea, ga = ra
    ab, cb, sb, eb, gb = rb
    if ca == 0.0 and cb == 0.0:
        return (aa - ab, 0.0, 0.0, 0.0, 1.0)
    if cb == 0.0:
        return (aa - ab, ca, sa, ea, ga)
    if ca == 0.0:
        return (aa - ab, -cb, sb, eb, gb)
    if sa == sb and ea == eb and ga == gb:
        return (aa - ab, ca - cb, sa, ea, ga)
    return None


def _signed_cells(diff, lo, hi, tail_limit):
    """Split one signed difference formula into |g| cells at its zero crossing."""
    ad, cd, sd, ed, gd = diff
    if cd == 0.0:
        v = abs(ad)
        return [_Cell(lo, hi, (v, 0.0, 0.0, 0.0, 1.0), v, v)]
    if lo == 0.0 and sd == 0.0 and ed < 0:
        v_lo = math.copysign(_INF, cd)
    else:
        v_lo = float(_formula_values(ad, cd, sd, ed, gd, lo))
    v_hi = tail_limit if math.isinf(hi) else float(_formula_values(ad, cd, sd, ed, gd, hi))
    cells = []
    if min(v_lo, v_hi) < 0.0 < max(v_lo, v_hi):
        root = _formula_root(ad, cd, sd, ed, gd, 0.0)
        parts = [(lo, root, v_lo, 0.0), (root, hi, 0.0, v_hi)]
    else:
        parts = [(lo, hi, v_lo, v_hi)]
    for plo, phi, pvlo, pvhi in parts:
        if not phi > plo:
            continue
        if min(pvlo, pvhi) >= 0.0:
            co = (ad, cd, sd, ed, gd)
        else:
            co = (-ad, -cd, sd, ed, gd)
        cells.append(_Cell(plo, phi, co, abs(pvlo), abs(pvhi)))
    return cells


def _numeric_cells(ra, rb, lo, hi):
    """Monotone sampled arcs for a heterogeneous difference on a finite interval."""
    left = lo if lo > 0.0 else hi * 1e-12
    xs = np.linspace(left, hi, 129)
    va = np.maximum(_formula_values(*ra, xs), 0.0)
    vb = np.maximum(_formula_values(*rb, xs), 0.0)
    g = np.abs(va - vb)
    if np.isinf(g).any():
        raise NotRepresentableError(
            "|a - b| is unbounded on an interval where the formulas share no base"
        )
    turn = np.flatnonzero(np.diff(np.sign(np.diff(g)))) + 1
    edges = np.concatenate(([0], turn, [xs.size - 1]))
    cells = []
    for j in range(edges.size - 1):
        i0, i1 = int(edges[j]), int(edges[j + 1])
        if i1 > i0:
            cells.append(_SampledCell(xs[i0:i1 + 1], g[i0:i1 + 1]))
    return cells


def rearranged_difference(pa: Parameter, pb: Parameter, levels: int = 512) -> Parameter:
    """The non-increasing rearrangement of |a - b|, as a Parameter.

    The result is exact when |a - b| is piecewise constant (two step
    parameters) and also at the two ends whenever the difference near 0 or on
    the unbounded tail reduces to a single family formula: those stretches of
    the rearrangement are emitted as exact formula pieces.  In between, the
    exact distribution function is evaluated on ``levels`` refined levels and
    a step majorant is returned, so the true rearrangement never exceeds the
    result; downstream certified bounds rely on exactly that.

    Raises :class:`NotRepresentableError` when |a - b| is infinite on a set of
    positive measure, is unbounded with no closed-form head, or has an
    unbounded tail that no single formula describes.
    """
    if levels < 2:
        raise ValidationError(f"levels must be at least 2, got {levels}")
    grid = np.union1d(pa.x, pb.x)
    ia = np.searchsorted(pa.x, grid, side="right") - 1
    ib = np.searchsorted(pb.x, grid, side="right") - 1

    cells: list = []
    for k in range(grid.size):
        lo = float(grid[k])
        hi = float(grid[k + 1]) if k + 1 < grid.size else _INF
        ra = (
            float(pa.a[ia[k]]), float(pa.c[ia[k]]), float(pa.s[ia[k]]),
            float(pa.e[ia[k]]), float(pa.sig[ia[k]]),
        )
        rb = (
            float(pb.a[ib[k]]), float(pb.c[ib[k]]), float(pb.s[ib[k]]),
            float(pb.e[ib[k]]), float(pb.sig[ib[k]]),
        )
        if math.isinf(ra[0]) or math.isinf(rb[0]):
            if ra == rb:
                continue
            raise NotRepresentableError(
                "|a - b| is infinite on an interval: rearrangement is not representable"
            )
        diff = _difference_formula(ra, rb)
        if diff is None:
            if math.isinf(hi):
                raise NotRepresentableError(
                    "the difference tail mixes formulas with no common base"
                )
            cells.extend(_numeric_cells(ra, rb, lo, hi))
        else:
            tail = diff[0] if math.isinf(hi) else 0.0
            cells.extend(_signed_cells(diff, lo, hi, tail))

    cells = [cl for cl in cells if cl.top > 0.0]
    if not cells:
        return Parameter.zero()

    if (
        len(cells) == 1
        and isinstance(cells[0], _Cell)
        and cells[0].lo == 0.0
        and math.isinf(cells[0].hi)
        and cells[0].v_lo >= cells[0].v_hi
    ):
        # One decreasing arc covering all of (0, inf): it is its own
        # rearrangement.
        ad, cd, sd, ed, gd = cells[0].coeffs
        return Parameter([0.0], [ad], [cd], [sd], [ed], [gd])

    tail_cell = None
    const_tail = None
    if math.isinf(cells[-1].hi):
        tail_cell = cells.pop()
        if tail_cell.v_hi != 0.0:
            # |a - b| has a positive limit: the rearrangement eventually sits
            # at the constant |limit| and every downstream criterion diverges.
            const_tail = abs(tail_cell.v_hi)
    head_cell = None
    if cells and math.isinf(cells[0].v_lo):
        head_cell = cells.pop(0)
        if not isinstance(head_cell, _Cell):
            raise NotRepresentableError(
                "|a - b| is unbounded near 0 with no closed-form head"
            )
    if any(math.isinf(cl.top) for cl in cells):
        raise NotRepresentableError("|a - b| is unbounded away from 0")

    if (
        head_cell is None
        and tail_cell is None
        and all(isinstance(cl, _Cell) and cl.coeffs[1] == 0.0 for cl in cells)
    ):
        return _exact_step_rearrangement(cells)

    return _assemble_rearrangement(cells, tail_cell, head_cell, levels, const_tail)


def _exact_step_rearrangement(cells) -> Parameter:
    """Sort piecewise constant cells by value and chain their lengths."""
    vals = np.array([cl.v_lo for cl in cells])
    lens = np.array([cl.hi - cl.lo for cl in cells])
    keep = vals > 0.0
    vals, lens = vals[keep], lens[keep]
    if vals.size == 0:
        return Parameter.zero()
    order = np.argsort(-vals, kind="stable")
    vals, lens = vals[order], lens[order]
    breaks = np.concatenate(([0.0], np.cumsum(lens)))
    return Parameter.steps(breaks, np.append(vals, 0.0))


def _assemble_rearrangement(cells, tail_cell, head_cell, levels, const_tail):
    """Build [exact head formula] + [step majorant] + [exact tail] pieces.

    The key inequalities: with C the start of a single-formula tail arc D that
    decays to 0, every other cell lives in (0, C), so mu(lam) is at most
    C + (D^{-1}(lam) - C) = D^{-1}(lam) for lam below the arc's top; hence
    d*(t) <= D(t) for t >= C.  Symmetrically, above every other cell's top
    the head arc H is alone, so d* = H exactly near 0.
    """
    pieces: list[tuple[float, float, float, float, float, float]] = []
    mu_cells = list(cells)
    other_top = max((cl.top for cl in mu_cells), default=0.0)
    if tail_cell is not None:
        other_top = max(other_top, tail_cell.top)

    def mu(lam: float) -> float:
        total = sum(cl.measure_above(lam) for cl in mu_cells)
        if tail_cell is not None:
            total += _tail_measure(tail_cell, lam)
        return total

    t_cursor = 0.0
    if head_cell is not None:
        # d* equals the head arc exactly while it exceeds everything else.
        mu_cells.append(head_cell)
        step_top = other_top if other_top > 0.0 else max(head_cell.v_hi, 0.0)
        if step_top > 0.0:
            t_join = head_cell.measure_above(step_top)
        else:
            t_join = head_cell.hi - head_cell.lo
        if t_join > 0.0:
            # The arc starts at x = head_cell.lo = 0 by construction.
            pieces.append((0.0, *head_cell.coeffs))
            t_cursor = t_join
    else:
        step_top = other_top

    if step_top > 0.0:
        if const_tail is not None:
            floor = min(const_tail * (1.0 + 1e-9), step_top)
        elif tail_cell is not None:
            floor = tail_cell.v_lo
        else:
            floor = step_top * 1e-9
        floor = min(max(floor, step_top * 1e-15), step_top)
        lam = np.geomspace(floor, step_top, num=max(levels, 2))
        ends = [cl.v_lo for cl in mu_cells] + [cl.v_hi for cl in mu_cells]
        lam = np.concatenate((lam, [v for v in ends if floor <= v <= step_top]))
        lam = np.unique(np.clip(lam, floor, step_top))
        lam = lam[lam > 0.0]
        mus = np.array([mu(v) for v in lam])
        # Majorant: d*(t) <= lam[k] once t >= mu(lam[k]), so level lam[k]
        # covers [mus[k], mus[k-1]); the final level lam[0] is closed out by
        # the tail handling below.
        for k in range(lam.size - 1, 0, -1):
            t_next = float(mus[k - 1])
            if t_next > t_cursor:
                pieces.append((t_cursor, float(lam[k]), 0.0, 0.0, 0.0, 1.0))
                t_cursor = t_next

    if const_tail is not None:
        level = floor if step_top > 0.0 else const_tail
        pieces.append((t_cursor, level, 0.0, 0.0, 0.0, 1.0))
    elif tail_cell is not None:
        # Beyond C the rearrangement is majorized by the tail arc itself.
        start = max(t_cursor, tail_cell.lo)
        if start > t_cursor:
            pieces.append((t_cursor, max(float(tail_cell.v_lo), 0.0), 0.0, 0.0, 0.0, 1.0))
        pieces.append((start, *tail_cell.coeffs))
    else:
        # |a - b| is supported in a bounded set: close with the residual level
        # out to the total support length, then zero.
        support = sum(cl.hi - cl.lo for cl in mu_cells)
        if support > t_cursor and step_top > 0.0:
            pieces.append((t_cursor, floor, 0.0, 0.0, 0.0, 1.0))
            t_cursor = support
        pieces.append((t_cursor, 0.0, 0.0, 0.0, 0.0, 1.0))

    cols = list(zip(*pieces))
    return Parameter(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5])


def _tail_measure(tail_cell, lam: float) -> float:
    """|{x >= C : D(x) > lam}| for the unbounded single-formula tail arc."""
    if lam >= tail_cell.v_lo:
        return 0.0
    if tail_cell.coeffs[1] == 0.0:
        # Constant arc below the queried level: the caller keeps lam at or
        # above the tail constant, so this is unreachable except by float
        # dust right at that constant.
        return 0.0
    root = _formula_root(*tail_cell.coeffs, lam)
    return max(root - tail_cell.lo, 0.0)
