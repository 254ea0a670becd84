"""Transitions from discrete, half-line, and measure problems to normal form.

Each routine maps a source problem to the parameter b of the averaging
operator in normal form.  When the source data is finite the map is exact.
Infinite discrete data described by a power tail is handled with certified
envelopes: the result carries a minorant and a majorant parameter whose gap
shrinks as the resolution window grows.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import NotRepresentableError, ValidationError
from .params import PIECE_CAP, Parameter, _formula_root, conjugate

__all__ = [
    "NormalForm",
    "from_discrete",
    "from_halfline",
    "from_measures",
]

_INF = math.inf


@dataclass(frozen=True)
class NormalForm:
    """Result of a transition: b with a certified bracket around it.

    lower <= b_true <= upper pointwise.  When exact is True the bracket is
    tight (lower and upper are the same parameter) and b_true is represented
    exactly up to float rounding.
    """

    lower: Parameter
    upper: Parameter
    exact: bool
    meta: dict = field(default_factory=dict)

    @property
    def b(self) -> Parameter:
        """Representative parameter; the minorant when the bracket is open."""
        return self.lower


# -- discrete problems -----------------------------------------------------


def _parse_tail(tail) -> tuple[float, float]:
    """Normalize a tail rule to (coeff, exponent); zero tail is coeff 0."""
    if tail is None or tail == "zero" or tail == ("zero",):
        return 0.0, 0.0
    if isinstance(tail, dict):
        kind = tail.get("kind")
        if kind == "zero":
            return 0.0, 0.0
        if kind == "power":
            coeff = float(tail.get("coeff", 1.0))
            expo = float(tail.get("exponent", 0.0))
            if coeff < 0 or not math.isfinite(coeff):
                raise ValidationError(f"tail coeff must be finite and >= 0, got {coeff}")
            if expo < 0 or not math.isfinite(expo):
                raise ValidationError(f"tail exponent must be finite and >= 0, got {expo}")
            return coeff, expo
        raise ValidationError(f"unknown tail kind {kind!r}")
    raise ValidationError(f"cannot interpret tail rule {tail!r}")


def _check_terms(terms, name: str) -> list[float]:
    out = [float(t) for t in terms]
    if any(t < 0 or not math.isfinite(t) for t in out):
        raise ValidationError(f"{name} terms must be finite and >= 0")
    return out


def _suffix_sums(terms: list[float], coeff: float, expo: float, n_max: int) -> np.ndarray:
    """S[i] = sum over k >= i+1 of the sequence, for i = 0..n_max."""
    L = len(terms)
    idx = np.arange(1, n_max + 2, dtype=float)
    if coeff == 0.0:
        tail = np.zeros(n_max + 1)
    elif expo > 1.0:
        tail = coeff * zeta(expo, np.maximum(idx, L + 1))
    else:
        return np.full(n_max + 1, _INF)
    listed = np.zeros(n_max + 1)
    if L:
        rev = np.cumsum(terms[::-1])[::-1]
        m = min(L, n_max + 1)
        listed[:m] = rev[:m]
    return listed + tail


def _prefix_sums(terms: list[float], coeff: float, expo: float, n_max: int) -> np.ndarray:
    """P[i] = sum over k <= i+1 of the sequence, for i = 0..n_max."""
    L = len(terms)
    per_term = np.zeros(n_max + 1)
    m = min(L, n_max + 1)
    per_term[:m] = terms[:m]
    if coeff > 0.0 and n_max + 1 > L:
        k = np.arange(L + 1, n_max + 2, dtype=float)
        per_term[L:] = coeff * k**-expo
    return np.cumsum(per_term)


def _steps_from_grid(edges: np.ndarray, values: np.ndarray) -> Parameter:
    """Steps with values[j] on [edges[j], edges[j+1]); drops empty cells."""
    edges = np.asarray(edges, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = np.append(np.diff(edges) > 0, True)
    return Parameter.steps(edges[keep], values[keep])


def _step_rows(edges: np.ndarray, values: np.ndarray) -> list[dict]:
    """Rows with values[j] on [edges[j], edges[j+1]); len(edges) = len+1."""
    rows = []
    for j in range(len(values)):
        lo = float(edges[j])
        hi = float(edges[j + 1]) if j + 1 < len(edges) else _INF
        if hi > lo:
            rows.append({"lo": lo, "a": float(values[j])})
    return rows


def _splice_head(head_rows: list[dict], head_hi: float, edges, values) -> Parameter:
    """Head formula on (0, head_hi) followed by the step grid beyond it."""
    k = max(int(np.searchsorted(edges, head_hi, side="right")) - 1, 0)
    out = list(head_rows)
    for j in range(k, len(values)):
        lo = float(head_hi) if j == k else float(edges[j])
        hi = float(edges[j + 1]) if j + 1 < len(edges) else _INF
        if hi > lo:
            out.append({"lo": lo, "a": float(values[j])})
    return Parameter.from_pieces(out)


def from_discrete(
    u,
    w,
    mode: str,
    u_tail=None,
    w_tail=None,
    window: int = 1000,
) -> NormalForm:
    """Normal form of a discrete Hardy problem with weights u and w.

    In upper-sum mode the parameter takes the suffix sums of w on the grid
    cut by the prefix sums of u: b = W_n on [U_(n-1), U_n).  Lower-sum mode
    is the mirror image, with U_n the suffix sums of u and W_n the prefix
    sums of w, and b = W_n on [U_(n+1), U_n).

    Terms beyond the listed ones follow the tail rules (zero, or
    coeff * k**-exponent).  Infinite tails yield a certified bracket whose
    window many leading pieces are exact; tail shapes whose partial sums
    leave the representable family raise NotRepresentableError.
    """
    if mode not in ("upper-sum", "lower-sum"):
        raise ValidationError(f"mode must be upper-sum or lower-sum, got {mode!r}")
    u = _check_terms(u, "u")
    w = _check_terms(w, "w")
    cu, au = _parse_tail(u_tail)
    cw, aw = _parse_tail(w_tail)
    window = max(int(window), len(u) + 2, len(w) + 2, 4)
    if window > PIECE_CAP - 4:
        raise ValidationError(f"window {window} exceeds the piece budget")
    if mode == "lower-sum":
        return _lower_sum(u, w, cu, au, cw, aw, window)
    return _upper_sum(u, w, cu, au, cw, aw, window)


def _lower_sum(u, w, cu, au, cw, aw, window) -> NormalForm:
    L_u, L_w = len(u), len(w)
    if cu > 0.0 and au <= 1.0:
        raise NotRepresentableError(
            "lower-sum needs summable u; its power tail must decay faster than 1/k"
        )
    if cu == 0.0:
        # u exhausts, so only finitely many pieces carry any length.
        n_top = max(L_u, 1)
        U = _suffix_sums(u, 0.0, 0.0, n_top)
        W = _prefix_sums(w, cw, aw, n_top - 1)
        edges = U[n_top::-1]
        values = np.append(W[::-1], 0.0)
        b = _steps_from_grid(edges, values)
        return NormalForm(b, b, True, {"mode": "lower-sum"})
    if cw == 0.0:
        # w exhausts: every piece below U_(n0) carries the full sum, exactly.
        n0 = max(L_w, 1)
        U = _suffix_sums(u, cu, au, n0 - 1)
        W = _prefix_sums(w, 0.0, 0.0, n0 - 1)
        edges = np.concatenate([[0.0], U[::-1]])
        if n0 > 1:
            values = np.concatenate([[W[-1]], W[n0 - 2 :: -1], [0.0]])
        else:
            values = np.array([W[0], 0.0])
        b = _steps_from_grid(edges, values)
        return NormalForm(b, b, True, {"mode": "lower-sum"})

    N = window
    U = _suffix_sums(u, cu, au, N)  # U_1..U_(N+1)
    W = _prefix_sums(w, cw, aw, N)  # W_1..W_(N+1)
    x_m = float(U[N])
    edges = U[N::-1]  # ascending: U_(N+1), ..., U_1
    values = np.append(W[N - 1 :: -1], 0.0)  # W_N..W_1, then 0
    W_listed = float(np.sum(w))
    if aw == 0.0:
        # W_n is affine in n beyond the listed terms.  The integral-test
        # sandwich on the u tail bounds the piece index n(x) both ways, and
        # feeding those bounds through W gives shifted-power envelopes.
        E = -1.0 / (au - 1.0)
        B = cw * ((au - 1.0) / cu) ** E
        A_hi = W_listed + cw * (0.5 - L_w)
        A_lo = W_listed + cw * (-1.0 - L_w)
        w_n = float(W[N - 1])
        if w_n > A_lo:
            xi = min(((w_n - A_lo) / B) ** (1.0 / E), x_m)
        else:
            xi = x_m
        b_hi = _splice_head([{"lo": 0.0, "a": A_hi, "c": B, "e": E}], x_m, edges, values)
        b_lo = _splice_head([{"lo": 0.0, "a": A_lo, "c": B, "e": E}], xi, edges, values)
    elif aw > 1.0:
        W_inf = W_listed + cw * float(zeta(aw, L_w + 1))
        b_hi = _splice_head([{"lo": 0.0, "a": W_inf}], x_m, edges, values)
        b_lo = _splice_head([{"lo": 0.0, "a": float(W[N])}], x_m, edges, values)
    else:
        raise NotRepresentableError(
            "prefix sums of a slowly decaying w tail are not representable"
        )
    return NormalForm(b_lo, b_hi, False, {"mode": "lower-sum", "window": N})


def _upper_sum(u, w, cu, au, cw, aw, window) -> NormalForm:
    L_u, L_w = len(u), len(w)
    if cw > 0.0 and aw <= 1.0:
        raise NotRepresentableError(
            "upper-sum needs summable w; its power tail must decay faster than 1/k"
        )
    exhaust = []
    if cu == 0.0:
        exhaust.append(L_u)
    if cw == 0.0:
        exhaust.append(L_w)
    if exhaust:
        n_top = max(min(exhaust), 1)
        U = _prefix_sums(u, cu, au, n_top - 1)
        W = _suffix_sums(w, cw, aw, n_top - 1)
        edges = np.concatenate([[0.0], U])
        values = np.append(W, 0.0)
        b = _steps_from_grid(edges, values)
        return NormalForm(b, b, True, {"mode": "upper-sum"})

    N = window
    U = _prefix_sums(u, cu, au, N - 1)  # U_1..U_N
    W = _suffix_sums(w, cw, aw, N)  # W_1..W_(N+1)
    U_listed = float(np.sum(u))
    u_n = float(U[N - 1])
    edges = np.concatenate([[0.0], U])  # U_0..U_N
    values = W[:N]  # W_1..W_N
    base_rows = _step_rows(edges, values)
    if au == 0.0:
        # U_n is affine in n, so the index bounds from the w-tail sandwich
        # become shifted-power envelopes in x.
        E = 1.0 - aw
        B = cw * cu ** (aw - 1.0) / (aw - 1.0)
        s_hi = cu * (L_u - 0.5) - U_listed
        s_lo = cu * (L_u + 1.0) - U_listed
        w_n = float(values[-1])
        xi = max(_formula_root(0.0, B, s_hi, E, 1.0, w_n), u_n)
        hi_rows = base_rows + [{"lo": xi, "c": B, "s": s_hi, "e": E}]
        lo_rows = base_rows + [{"lo": u_n, "c": B, "s": s_lo, "e": E}]
        b_hi = Parameter.from_pieces(hi_rows)
        b_lo = Parameter.from_pieces(lo_rows)
        return NormalForm(b_lo, b_hi, False, {"mode": "upper-sum", "window": N})
    if au > 1.0:
        U_inf = U_listed + cu * float(zeta(au, L_u + 1))
        hi_rows = base_rows + [{"lo": u_n, "a": float(W[N])}]
        if U_inf > u_n:
            hi_rows.append({"lo": U_inf})
        lo_rows = base_rows + [{"lo": u_n}]
        b_hi = Parameter.from_pieces(hi_rows)
        b_lo = Parameter.from_pieces(lo_rows)
        return NormalForm(b_lo, b_hi, False, {"mode": "upper-sum", "window": N})
    raise NotRepresentableError(
        "prefix sums of a slowly decaying u tail are not representable"
    )


# -- half-line problems ----------------------------------------------------


def _pwl(t: float, p: float) -> float:
    if p == 0.0:
        return 1.0
    if t == 0.0:
        return 0.0 if p > 0 else _INF
    if math.isinf(t):
        return _INF if p > 0 else 0.0
    return t**p


def _parse_weight_rows(rows, name: str) -> list[tuple]:
    """Validate piecewise weight rows: const or pure pieces, nonnegative."""
    if not rows:
        raise ValidationError(f"{name} needs at least one piece")
    parsed = []
    prev = None
    for r in rows:
        lo = float(r["lo"])
        a = float(r.get("a", 0.0))
        c = float(r.get("c", 0.0))
        s = float(r.get("s", 0.0))
        e = float(r.get("e", 0.0))
        sig = float(r.get("sig", 1.0))
        if prev is None and lo != 0.0:
            raise ValidationError(f"{name} must start at 0")
        if prev is not None and lo <= prev:
            raise ValidationError(f"{name} piece bounds must increase")
        if a != 0.0 and c != 0.0:
            raise NotRepresentableError(f"{name} pieces must be constant or a pure power")
        if a < 0 or c < 0:
            raise ValidationError(f"{name} must be nonnegative")
        if sig not in (1.0, -1.0):
            raise ValidationError(f"{name} sig must be +1 or -1")
        parsed.append((lo, a, c, s, e, sig))
        prev = lo
    out = []
    for i, (lo, a, c, s, e, sig) in enumerate(parsed):
        hi = parsed[i + 1][0] if i + 1 < len(parsed) else _INF
        if c != 0.0:
            if sig > 0 and lo + s < 0:
                raise ValidationError(f"{name} piece {i} has a negative base")
            if sig < 0 and (math.isinf(hi) or hi + s > 0):
                raise ValidationError(f"{name} piece {i} has a negative base")
        out.append((lo, hi, a, c, s, e, sig))
    return out


def _suffix_integral_parameter(rows, name: str) -> Parameter:
    """U(y) = integral of the weight over [y, inf) as a parameter."""
    n = len(rows)
    piece_mass = []
    for i, (lo, hi, a, c, s, e, sig) in enumerate(rows):
        if c == 0.0:
            if a == 0.0:
                mass = 0.0
            elif math.isinf(hi):
                mass = _INF
            else:
                mass = a * (hi - lo)
        else:
            g1 = e + 1.0
            if g1 == 0.0:
                raise NotRepresentableError(
                    f"{name} piece with exponent -1 integrates to a logarithm"
                )
            top = _pwl(sig * (hi + s), g1)
            bot = _pwl(sig * (lo + s), g1)
            mass = c * sig * (top - bot) / g1
        if mass < 0 or math.isnan(mass):
            raise ValidationError(f"{name} piece {i} has negative mass")
        if math.isinf(mass):
            head_pole = i == 0 and lo == 0.0 and c != 0.0 and s == 0.0 and sig > 0
            if i == n - 1:
                raise NotRepresentableError(f"{name} must have finite mass far out")
            if not head_pole:
                raise NotRepresentableError(
                    f"{name} is not integrable inside piece {i}"
                )
        piece_mass.append(mass)
    suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + piece_mass[i]
    out_rows = []
    for i, (lo, hi, a, c, s, e, sig) in enumerate(rows):
        if c == 0.0:
            if a == 0.0:
                out_rows.append({"lo": lo, "a": suffix[i + 1]})
            else:
                # U(y) = suffix beyond + a*(hi - y): affine with slope -a.
                out_rows.append({"lo": lo, "a": suffix[i + 1] + a * hi, "c": -a, "e": 1.0})
        else:
            g1 = e + 1.0
            top = _pwl(sig * (hi + s), g1)
            out_rows.append(
                {
                    "lo": lo,
                    "a": suffix[i + 1] + c * sig * top / g1,
                    "c": -c * sig / g1,
                    "s": s,
                    "e": g1,
                    "sig": sig,
                }
            )
    return Parameter.from_pieces(out_rows)


class _Increasing:
    """Piecewise-power representation of an increasing map s -> value.

    Segments are (s_lo, A, B, s0, m, sig): value A + B*(sig*(s+s0))**m on
    [s_lo, next s_lo); atoms add their mass to every value strictly above
    their location, or also at it when evaluated with closed=True.
    """

    def __init__(self, segments, atoms, total):
        self.segments = segments
        self.seg_los = [seg[0] for seg in segments]
        self.atoms = sorted(atoms)
        self.total = total

    def atom_mass_through(self, v: float, include_at: bool) -> float:
        tot = 0.0
        for y, m in self.atoms:
            if y < v or (include_at and y == v):
                tot += m
        return tot

    def density_value(self, v: float) -> float:
        if not self.segments:
            return 0.0
        if math.isinf(v):
            lo, A, B, s0, m, sig = self.segments[-1]
            return A + B * _pwl(_INF, m) if B else A
        i = max(bisect.bisect_right(self.seg_los, v) - 1, 0)
        lo, A, B, s0, m, sig = self.segments[i]
        if B == 0.0:
            return A
        return A + B * _pwl(sig * (v + s0), m)

    def value(self, v: float, closed: bool) -> float:
        if v <= 0.0:
            return 0.0
        return self.density_value(v) + self.atom_mass_through(v, closed)

    def breakpoints_in(self, bot: float, top: float) -> list[float]:
        pts = {lo for lo in self.seg_los if bot < lo < top}
        pts.update(y for y, _ in self.atoms if bot < y < top)
        return sorted(pts, reverse=True)


def _prefix_increasing(rows, power: float, name: str) -> _Increasing:
    """Prefix integral of weight**power as an increasing piecewise map."""
    segments = []
    acc = 0.0
    for lo, hi, a, c, s, e, sig in rows:
        if math.isinf(acc):
            break
        if c == 0.0:
            val = _pwl(a, power)
            if math.isinf(val):
                segments.append((lo, _INF, 0.0, 0.0, 0.0, 1.0))
                acc = _INF
                continue
            segments.append((lo, acc - val * lo, val, 0.0, 1.0, 1.0))
            acc += val * (hi - lo) if math.isfinite(hi) or val == 0.0 else _INF
        else:
            kc = c**power
            g1 = e * power + 1.0
            if g1 == 0.0:
                raise NotRepresentableError(
                    f"{name} integrates to a logarithm; not representable"
                )
            f_lo = kc * sig * _pwl(sig * (lo + s), g1) / g1
            if math.isinf(f_lo) or math.isinf(kc):
                if lo == 0.0:
                    raise NotRepresentableError(
                        f"{name} is not integrable at 0; the transform degenerates"
                    )
                segments.append((lo, _INF, 0.0, 0.0, 0.0, 1.0))
                acc = _INF
                continue
            segments.append((lo, acc - f_lo, kc * sig / g1, s, g1, sig))
            f_hi = kc * sig * _pwl(sig * (hi + s), g1) / g1
            acc = acc - f_lo + f_hi
    return _Increasing(segments, [], acc)


def _compose_one(outer: _Increasing, s_bot: float, g_row, x_lo: float) -> dict:
    """Row for outer(g(x)) on a stretch where g stays just above s_bot."""
    a_g, c_g, s_g, e_g, sig_g = g_row
    add = outer.atom_mass_through(s_bot, include_at=True)
    if not outer.segments:
        return {"lo": x_lo, "a": add}
    probe = max(s_bot, 0.0)
    i = max(bisect.bisect_right(outer.seg_los, probe) - 1, 0)
    _, A, B, s0, m, sig_w = outer.segments[i]
    if math.isinf(A):
        return {"lo": x_lo, "a": _INF}
    if B == 0.0:
        return {"lo": x_lo, "a": A + add}
    if m == 0.0:
        return {"lo": x_lo, "a": A + B + add}
    shift = a_g + s0
    if m == 1.0:
        return {
            "lo": x_lo,
            "a": A + add + B * sig_w * shift,
            "c": B * sig_w * c_g,
            "s": s_g,
            "e": e_g,
            "sig": sig_g,
        }
    if shift == 0.0 or abs(shift) <= 1e-12 * (abs(a_g) + abs(s0)):
        base = sig_w * c_g
        if base <= 0:
            raise NotRepresentableError("composition leaves the piece family")
        return {
            "lo": x_lo,
            "a": A + add,
            "c": B * base**m,
            "s": s_g,
            "e": e_g * m,
            "sig": sig_g,
        }
    raise NotRepresentableError(
        "composed transform leaves the representable piece family"
    )


def _compose_increasing(outer: _Increasing, inner: Parameter, closed: bool) -> Parameter:
    """The parameter x -> outer(inner(x)), exact within the piece family."""
    rows_out = []
    tops = inner.piece_tops()
    bots = inner.piece_bottoms()
    for i, pc in enumerate(inner.pieces()):
        if pc["c"] == 0.0:
            rows_out.append({"lo": pc["lo"], "a": outer.value(pc["a"], closed)})
            continue
        g_row = (pc["a"], pc["c"], pc["s"], pc["e"], pc["sig"])
        cur_x = pc["lo"]
        for lev in outer.breakpoints_in(float(bots[i]), float(tops[i])):
            rows_out.append(_compose_one(outer, lev, g_row, cur_x))
            cur_x = _formula_root(*g_row, lev)
        rows_out.append(_compose_one(outer, float(bots[i]), g_row, cur_x))
    return Parameter.from_pieces(rows_out)


def from_halfline(u_rows, v_rows, p: float) -> NormalForm:
    """Normal form of the weighted half-line problem with weights u and v.

    The reduction composes W with the inverse of U, where U(y) is the mass
    of u beyond y and W(s) the integral of v**(1-p') up to s.  Weight pieces
    must be constant or pure powers; compositions that leave the piece
    family raise NotRepresentableError.
    """
    if not 1.0 < p < _INF:
        raise ValidationError(f"p must lie in (1, inf), got {p}")
    u = _parse_weight_rows(u_rows, "u")
    v = _parse_weight_rows(v_rows, "v")
    U = _suffix_integral_parameter(u, "u")
    W = _prefix_increasing(v, 1.0 - conjugate(p), "v**(1-p')")
    b = _compose_increasing(W, U.inverse(), closed=False)
    return NormalForm(b, b, True, {"kind": "halfline"})


# -- measure problems ------------------------------------------------------


def _parse_measure(spec: dict, name: str):
    atoms = []
    for item in spec.get("atoms", []):
        y, mass = float(item[0]), float(item[1])
        if y < 0 or not math.isfinite(y):
            raise NotRepresentableError(f"{name} atoms must sit at finite y >= 0")
        if mass < 0 or not math.isfinite(mass):
            raise ValidationError(f"{name} atom masses must be finite and >= 0")
        if mass > 0:
            atoms.append((y, mass))
    density = spec.get("density") or []
    rows = _parse_weight_rows(density, f"{name} density") if density else []
    return atoms, rows


def _measure_suffix(atoms, rows) -> Parameter:
    """M(y) = mu[y, inf) as a parameter, right-continuous between atoms.

    The true M keeps an atom's mass at the atom itself and drops it just
    beyond; the right-continuous version used here differs at that single
    point, which the generalized inverse cannot see.
    """
    base = _suffix_integral_parameter(rows, "mu density") if rows else Parameter.zero()
    if not atoms:
        return base
    ys = sorted({y for y, _ in atoms if y > 0})
    breaks = [0.0] + ys
    suffix = [sum(m for y, m in atoms if y > br) for br in breaks]
    steps = Parameter.steps(breaks, suffix)
    return _add_parameters(base, steps)


def _add_parameters(pa: Parameter, pb: Parameter) -> Parameter:
    """Pointwise sum, valid when at least one summand is a step function."""
    if not (pb.c == 0.0).all():
        pa, pb = pb, pa
    if not (pb.c == 0.0).all():
        raise NotRepresentableError("cannot add two non-step parameters")
    grid = np.unique(np.concatenate([pa.x, pb.x]))
    rows = []
    for lo in grid:
        i = int(np.searchsorted(pa.x, lo, side="right") - 1)
        j = int(np.searchsorted(pb.x, lo, side="right") - 1)
        rows.append(
            {
                "lo": float(lo),
                "a": float(pa.a[i] + pb.a[j]),
                "c": float(pa.c[i]),
                "s": float(pa.s[i]),
                "e": float(pa.e[i]),
                "sig": float(pa.sig[i]),
            }
        )
    return Parameter.from_pieces(rows)


def from_measures(mu_spec: dict, lam_spec: dict, closure: str = "open") -> NormalForm:
    """Normal form of the two-measure problem.

    With M(y) the mu-mass of [y, inf) and L(s) the lam-mass below s, the
    parameter is L composed with the generalized inverse of M.  closure
    picks whether L counts an atom exactly at s ("closed") or not ("open");
    the two differ only along stretches where the inverse of M is constant
    at an atom location.  Supports must lie in [0, inf).
    """
    if closure not in ("open", "closed"):
        raise ValidationError(f"closure must be open or closed, got {closure!r}")
    mu_atoms, mu_rows = _parse_measure(mu_spec, "mu")
    lam_atoms, lam_rows = _parse_measure(lam_spec, "lam")
    if not mu_atoms and not mu_rows:
        b = Parameter.zero()
        return NormalForm(b, b, True, {"kind": "measure"})
    M = _measure_suffix(mu_atoms, mu_rows)
    if lam_rows:
        density = _prefix_increasing(lam_rows, 1.0, "lam density")
    else:
        density = _Increasing([], [], 0.0)
    lam_map = _Increasing(density.segments, lam_atoms, density.total)
    b = _compose_increasing(lam_map, M.inverse(), closed=(closure == "closed"))
    return NormalForm(b, b, True, {"kind": "measure"})
