"""Tests for compactness verdicts and finite-rank approximants."""

import json
import math

import numpy as np
import pytest

from hardy import (
    Exponents,
    NotRepresentableError,
    Parameter,
    ValidationError,
    finite_rank_approx,
    is_compact,
    truncated_power,
)

INF = math.inf

E22 = Exponents(2.0, 2.0)
CHI = Parameter.steps([0.0, 1.0], [1.0, 0.0])
XINV_CUT = Parameter.from_pieces([{"lo": 0.0, "c": 1.0, "e": -1.0}, {"lo": 1.0}])
SQRT_CUT = Parameter.from_pieces([{"lo": 0.0, "c": 1.0, "e": -0.5}, {"lo": 1.0}])


class TestVerdicts:
    def test_critical_power_is_not_compact(self):
        for p, q in [(2.0, 2.0), (2.0, 4.0), (1.5, 2.5)]:
            e = Exponents(p, q)
            rep = is_compact(Parameter.power(1.0, -e.p_conj / q), e)
            assert rep.verdict == "not-compact"
            assert rep.limit_at_zero == pytest.approx(1.0, rel=1e-12)
            assert rep.limit_at_inf == pytest.approx(1.0, rel=1e-12)

    def test_indicator_is_compact(self):
        for p, q in [(2.0, 2.0), (2.0, 4.0), (1.5, 2.5)]:
            rep = is_compact(CHI, Exponents(p, q))
            assert rep.verdict == "compact"
            assert rep.limit_at_zero == 0.0
            assert rep.limit_at_inf == 0.0

    def test_critical_head_on_a_cut_is_not_compact(self):
        # the head piece x^{-1} matches the critical exponent at p = q = 2,
        # so the limit at zero is 1 and clause-honest compactness fails even
        # though the support is finite
        rep = is_compact(XINV_CUT, E22)
        assert rep.verdict == "not-compact"
        assert rep.limit_at_zero == pytest.approx(1.0, rel=1e-12)
        assert rep.limit_at_inf == 0.0

    def test_cap_is_not_compact_at_infinity(self):
        rep = is_compact(truncated_power(2.0, 2.0, "cap", 1.0), E22)
        assert rep.verdict == "not-compact"
        assert rep.limit_at_zero == 0.0
        assert rep.limit_at_inf == pytest.approx(1.0, rel=1e-12)

    def test_subcritical_head_with_supercritical_tail_is_compact(self):
        # piecewise-power stand-in for a critical power with slow damping:
        # flatter than critical near zero, steeper than critical at infinity
        e = Exponents(2.0, 3.0)
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "c": 1.0, "e": -0.5},
                {"lo": 1.0, "c": 1.0, "e": -0.8},
            ]
        )
        rep = is_compact(b, e)
        assert rep.verdict == "compact"
        assert rep.limit_at_zero == 0.0
        assert rep.limit_at_inf == 0.0

    def test_zero_parameter_is_compact(self):
        rep = is_compact(Parameter.zero(), E22)
        assert rep.verdict == "compact"

    def test_positive_tail_is_not_compact(self):
        rep = is_compact(Parameter.constant(1.0), E22)
        assert rep.verdict == "not-compact"
        assert rep.limit_at_inf == INF

    def test_out_of_regime_is_not_applicable(self):
        for p, q in [(3.0, 2.0), (2.0, 1.0), (1.0, 2.0), (2.0, INF)]:
            rep = is_compact(CHI, Exponents(p, q))
            assert rep.verdict == "not-applicable"
            assert rep.limit_at_zero is None
            assert rep.compact is None
            assert rep.notes


class TestFiniteRank:
    def test_indicator_first_approximant(self):
        b1, gap = finite_rank_approx(CHI, E22, 1)
        assert b1.equivalent(Parameter.steps([0.0, 1.0], [0.5, 0.0]))
        assert gap == pytest.approx(math.sqrt(2.0), rel=1e-9)

    def test_indicator_gap_is_dyadic(self):
        for n in (1, 2, 3, 4):
            _, gap = finite_rank_approx(CHI, E22, n)
            assert gap == pytest.approx(2.0 * 2.0 ** (-n / 2.0), rel=1e-9)

    def test_gap_decreases_on_compact_cases(self):
        for b in (CHI, SQRT_CUT):
            gaps = [finite_rank_approx(b, E22, n)[1] for n in range(1, 7)]
            assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:])), gaps

    def test_gap_stalls_on_the_critical_head(self):
        gaps = [finite_rank_approx(XINV_CUT, E22, n)[1] for n in range(1, 7)]
        assert min(gaps) >= 1.9

    def test_approximant_sits_below_and_grows(self):
        grid = np.geomspace(1e-3, 10.0, 200)
        prev = None
        for n in (1, 2, 3):
            b_n, _ = finite_rank_approx(SQRT_CUT, E22, n)
            vals = b_n(grid)
            assert np.all(vals <= SQRT_CUT(grid) + 1e-12)
            if prev is not None:
                assert np.all(prev <= vals + 1e-12)
            prev = vals

    def test_zero_parameter(self):
        b_n, gap = finite_rank_approx(Parameter.zero(), E22, 3)
        assert b_n.is_zero()
        assert gap == 0.0

    def test_positive_tail_value_approaches_from_below(self):
        # the level grid meets the tail value 0.5 only through levels
        # strictly below it, so the approximant tail is the dyadic floor
        b = Parameter.steps([0.0, 1.0], [2.0, 0.5])
        b2, gap = finite_rank_approx(b, E22, 2)
        assert b2(100.0) == pytest.approx(0.25)
        b3, _ = finite_rank_approx(b, E22, 3)
        assert b3(100.0) == pytest.approx(0.375)
        assert math.isinf(gap)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValidationError):
            finite_rank_approx(CHI, Exponents(3.0, 2.0), 1)
        with pytest.raises(ValidationError):
            finite_rank_approx(CHI, E22, 0)
        with pytest.raises(ValidationError):
            finite_rank_approx(CHI, E22, 21)
        inf_head = Parameter.steps([0.0, 1.0, 2.0], [INF, 1.0, 0.0])
        with pytest.raises(ValidationError):
            finite_rank_approx(inf_head, E22, 1)

    def test_piece_cap(self):
        with pytest.raises(NotRepresentableError):
            finite_rank_approx(CHI, E22, 16)


class TestReport:
    def test_json_shape(self):
        rep = is_compact(CHI, E22)
        b1, gap = finite_rank_approx(CHI, E22, 1)
        from dataclasses import replace

        rep = replace(rep, approximants=((1, b1, gap),))
        data = json.loads(json.dumps(rep.as_dict()))
        assert data["compact"] is True
        assert data["limits"] == {"zero": 0.0, "inf": 0.0}
        assert data["approximants"] == [{"n": 1, "gap": pytest.approx(math.sqrt(2.0))}]

    def test_infinite_limit_serializes(self):
        rep = is_compact(Parameter.constant(1.0), E22)
        assert rep.as_dict()["limits"]["inf"] == "inf"
