"""Shared hypothesis strategies for building random parameters."""

import math

import numpy as np
from hypothesis import strategies as st

from hardy import Parameter

_vals = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def step_parameters(draw, max_pieces: int = 6, zero_tail: bool = False):
    """Random step parameters with strictly decreasing positive levels."""
    n = draw(st.integers(min_value=1, max_value=max_pieces))
    raw = draw(
        st.lists(_vals, min_size=n, max_size=n, unique_by=lambda v: round(v, 6))
    )
    levels = sorted(raw, reverse=True)
    gaps = draw(st.lists(_vals, min_size=n - 1, max_size=n - 1))
    breaks = [0.0] + list(np.cumsum(gaps))
    if zero_tail or draw(st.booleans()):
        breaks.append(breaks[-1] + draw(_vals))
        levels.append(0.0)
    return Parameter.steps(breaks, levels)


@st.composite
def piecewise_parameters(draw, max_pieces: int = 5):
    """Random mixed parameters: constants, powers, offsets, reflected pieces.

    Pieces are stacked left to right, each top pinned at or below the
    previous bottom, so the result is always a valid parameter.
    """
    n = draw(st.integers(min_value=1, max_value=max_pieces))
    gaps = draw(st.lists(_vals, min_size=n - 1, max_size=n - 1))
    breaks = [0.0] + list(np.cumsum(gaps))
    top = draw(st.floats(min_value=0.1, max_value=100.0))
    pieces = []
    for i in range(n):
        lo = breaks[i]
        hi = breaks[i + 1] if i + 1 < n else math.inf
        v_top = top * draw(st.floats(min_value=0.3, max_value=1.0))
        kind = draw(st.sampled_from(["const", "power", "offset", "reflected"]))
        if kind == "reflected" and math.isinf(hi):
            kind = "power"
        if v_top <= 0.0 or kind == "const":
            last = i + 1 == n and draw(st.booleans())
            pieces.append({"lo": lo, "a": 0.0 if last else v_top})
            top = 0.0 if last else v_top
            continue
        e = -draw(st.floats(min_value=0.2, max_value=2.5))
        if kind == "offset" and math.isfinite(hi):
            a = v_top * draw(st.floats(min_value=0.05, max_value=0.8))
        else:
            a = 0.0
        if kind == "reflected":
            # a + c*(-(x+s))**E with E > 0 and s < -hi: decreasing on [lo, hi).
            E = -e
            s = -(hi + draw(_vals))
            c = (v_top - a) * (-(lo + s)) ** -E
            pieces.append({"lo": lo, "a": a, "c": c, "s": s, "e": E, "sig": -1.0})
            top = a + c * (-(hi + s)) ** E
        else:
            s = draw(st.sampled_from([0.0, 0.0, 0.5, 2.0]))
            if lo + s == 0.0 and i > 0:
                s = 0.5
            c = (v_top - a) * (lo + s) ** (-e) if lo + s > 0 else (v_top - a)
            pieces.append({"lo": lo, "a": a, "c": c, "s": s, "e": e})
            top = a + c * (hi + s) ** e if math.isfinite(hi) else a
    return Parameter.from_pieces(pieces)
