"""Tests for exact integrals and certified suprema."""

import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings

from hardy.errors import ValidationError
from hardy.integrals import (
    NonElementaryIntegral,
    bracketed_sup,
    limit_two_power,
    moment_integral,
    power_integral,
    power_with_limits,
    sup_two_power,
)
from hardy.params import Parameter, truncated_power

from conftest import piecewise_parameters, step_parameters

INF = math.inf


def quad(f, lo, hi):
    val, _ = scipy.integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val


class TestPowerIntegral:
    def test_indicator(self):
        b = Parameter.steps([0.0, 1.0], [1.0, 0.0])
        for q in (0.5, 1.0, 2.0, 3.7):
            assert power_integral(b, q) == 1.0

    def test_constant_segment(self):
        b = Parameter.steps([0.0, 2.0], [3.0, 0.0])
        assert power_integral(b, 2.0) == 18.0
        assert power_integral(b, 2.0, lo=1.0, hi=1.5) == 4.5

    def test_positive_constant_diverges(self):
        b = Parameter.constant(3.0)
        assert power_integral(b, 2.0) == INF
        assert power_integral(b, 2.0, hi=1.0) == 9.0

    def test_pure_power_window(self):
        b = Parameter.power(1.0, -0.5)
        assert power_integral(b, 2.0, lo=1.0, hi=4.0) == pytest.approx(
            math.log(4.0), rel=1e-14
        )
        assert power_integral(b, 2.0) == INF

    def test_pure_power_tail(self):
        b = Parameter.power(1.0, -2.0)
        assert power_integral(b, 1.0, lo=1.0) == pytest.approx(1.0, rel=1e-14)
        assert power_integral(b, 1.0, hi=1.0) == INF

    def test_capped_power(self):
        b = truncated_power(2.0, 2.0, "cap", 1.0)
        assert power_integral(b, 2.0) == pytest.approx(2.0, rel=1e-14)

    def test_shifted_pure_power(self):
        b = Parameter([0.0], [0.0], [1.0], [1.0], [-1.0], [1.0])
        assert power_integral(b, 2.0) == pytest.approx(1.0, rel=1e-14)

    def test_offset_with_integer_exponent(self):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "a": 1.0, "c": 1.0, "s": 0.0, "e": -1.0 / 3.0, "sig": 1.0},
                {"lo": 1.0},
            ]
        )
        assert power_integral(b, 2.0) == pytest.approx(7.0, rel=1e-13)

    def test_offset_non_integer_exponent_raises(self):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "a": 1.0, "c": 1.0, "s": 0.0, "e": -1.0 / 3.0, "sig": 1.0},
                {"lo": 1.0},
            ]
        )
        with pytest.raises(NonElementaryIntegral):
            power_integral(b, 2.5)

    def test_offset_tail_diverges_without_expansion(self):
        b = Parameter.from_pieces(
            [{"lo": 0.0, "a": 1.0, "c": 1.0, "s": 1.0, "e": -1.0, "sig": 1.0}]
        )
        assert power_integral(b, 2.5) == INF

    def test_reflected_piece(self):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "a": 0.0, "c": 1.0, "s": -2.0, "e": 0.5, "sig": -1.0},
                {"lo": 2.0},
            ]
        )
        assert power_integral(b, 2.0) == pytest.approx(2.0, rel=1e-14)

    def test_infinite_head(self):
        b = Parameter.from_pieces(
            [{"lo": 0.0, "a": INF}, {"lo": 1.0}]
        )
        assert power_integral(b, 1.0) == INF

    def test_against_quadrature(self):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "a": 0.0, "c": 2.0, "s": 0.5, "e": -1.5, "sig": 1.0},
                {"lo": 1.0, "a": 0.0, "c": 2.0 * 1.5**-1.5, "s": 0.0, "e": -1.5, "sig": 1.0},
            ]
        )
        got = power_integral(b, 1.3, lo=0.2, hi=5.0)
        want = quad(lambda x: b(x) ** 1.3, 0.2, 1.0) + quad(
            lambda x: b(x) ** 1.3, 1.0, 5.0
        )
        assert got == pytest.approx(want, rel=1e-10)

    def test_rejects_nonpositive_q(self):
        with pytest.raises(ValidationError):
            power_integral(Parameter.constant(1.0), 0.0)

    @given(step_parameters(max_pieces=6))
    @settings(max_examples=150, deadline=None)
    def test_steps_match_direct_sum(self, b):
        q = 1.7
        edges = list(b.x) + [INF]
        expect = 0.0
        for i, v in enumerate(b.piece_tops()):
            if v > 0 and math.isinf(edges[i + 1]):
                expect = INF
                break
            if v > 0:
                expect += v**q * (edges[i + 1] - edges[i])
        assert power_integral(b, q) == pytest.approx(expect, rel=1e-12)

    @given(piecewise_parameters(max_pieces=4))
    @settings(max_examples=150, deadline=None)
    def test_additive_in_the_interval(self, b):
        try:
            whole = power_integral(b, 2.0, lo=0.1, hi=9.0)
            left = power_integral(b, 2.0, lo=0.1, hi=1.3)
            right = power_integral(b, 2.0, lo=1.3, hi=9.0)
        except NonElementaryIntegral:
            return
        assert whole == pytest.approx(left + right, rel=1e-10, abs=1e-12)


class TestFubiniIdentity:
    """The area under min(b, T) equals the integral of the inverse up to T."""

    @staticmethod
    def both_sides(b, T):
        binv = b.inverse()
        x_t = binv(T)
        lhs = T * x_t + power_integral(b, 1.0, lo=x_t)
        rhs = power_integral(binv, 1.0, hi=T)
        return lhs, rhs

    @pytest.mark.parametrize("T", [0.25, 1.0, 3.0])
    def test_reciprocal_head(self, T):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "c": 1.0, "e": -1.0},
                {"lo": 1.0},
            ]
        )
        lhs, rhs = self.both_sides(b, T)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_divergent_case_agrees(self):
        b = Parameter.power(1.0, -0.5)
        lhs, rhs = self.both_sides(b, 2.0)
        assert lhs == INF and rhs == INF

    @pytest.mark.parametrize("kind", ["sharp-cut", "cap", "lower-shift", "argument-shift"])
    def test_truncated_powers(self, kind):
        b = truncated_power(2.0, 4.0, kind, 1.0)
        for T in (0.3, 0.9, 2.0):
            try:
                lhs, rhs = self.both_sides(b, T)
            except NonElementaryIntegral:
                continue
            if math.isinf(rhs):
                assert math.isinf(lhs)
            else:
                assert lhs == pytest.approx(rhs, rel=1e-10)

    @given(step_parameters(max_pieces=6, zero_tail=True))
    @settings(max_examples=200, deadline=None)
    def test_steps(self, b):
        for T in (0.4, 1.1):
            lhs, rhs = self.both_sides(b, T)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


class TestMomentIntegral:
    def test_indicator(self):
        b = Parameter.steps([0.0, 1.0], [1.0, 0.0])
        assert moment_integral(b, 2.0) == pytest.approx(0.5, rel=1e-14)

    def test_reciprocal_head(self):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "c": 1.0, "e": -1.0},
                {"lo": 1.0},
            ]
        )
        assert moment_integral(b, 2.0) == pytest.approx(1.0, rel=1e-14)
        assert moment_integral(b, 2.0, hi=0.5) == pytest.approx(0.5, rel=1e-14)

    def test_integer_moment_with_shift(self):
        b = Parameter([0.0], [0.0], [1.0], [1.0], [-3.0], [1.0])
        got = moment_integral(b, 3.0, hi=1.0)
        assert got == pytest.approx(math.log(2.0) - 0.625, rel=1e-12)
        assert moment_integral(b, 3.0) == INF

    def test_integer_exponent_with_fractional_moment(self):
        b = Parameter.from_pieces(
            [
                {"lo": 0.0, "c": 1.0, "s": -2.0, "e": 2.0, "sig": -1.0},
                {"lo": 2.0},
            ]
        )
        got = moment_integral(b, 2.5)
        want = quad(lambda x: x**1.5 * (2.0 - x) ** 2, 0.0, 2.0)
        assert got == pytest.approx(want, rel=1e-10)

    def test_fractional_moment_with_shift_raises(self):
        b = Parameter([0.0], [0.0], [1.0], [1.0], [-3.0], [1.0])
        with pytest.raises(NonElementaryIntegral):
            moment_integral(b, 2.5)

    def test_divergent_head(self):
        b = Parameter.power(1.0, -3.0)
        assert moment_integral(b, 2.0, hi=1.0) == INF

    def test_rejects_nonpositive_m(self):
        with pytest.raises(ValidationError):
            moment_integral(Parameter.constant(1.0), 0.0)

    @given(step_parameters(max_pieces=5, zero_tail=True))
    @settings(max_examples=100, deadline=None)
    def test_steps_match_direct_sum(self, b):
        m = 2.3
        edges = list(b.x) + [INF]
        expect = 0.0
        for i, v in enumerate(b.piece_tops()):
            if v > 0:
                hi = edges[i + 1]
                expect += v * (hi**m - edges[i] ** m) / m
        assert moment_integral(b, m) == pytest.approx(expect, rel=1e-12, abs=1e-15)


class TestSupTwoPower:
    def test_single_power(self):
        assert sup_two_power(1.0, -0.5, 0.0, 0.0, 1.0, 4.0) == 1.0
        assert sup_two_power(1.0, -0.5, 0.0, 0.0, 0.0, 4.0) == INF

    def test_interior_maximum(self):
        got = sup_two_power(1.0, 0.5, -1.0, 0.5, 0.0, INF)
        assert got == pytest.approx(0.25, rel=1e-14)

    def test_endpoint_wins_on_shifted_window(self):
        got = sup_two_power(1.0, 0.5, -1.0, 0.5, 1.0, 2.0)
        assert got == pytest.approx(0.0, abs=1e-14)

    def test_constant_plus_power(self):
        got = sup_two_power(2.0, 0.0, 3.0, -1.0, 1.0, INF)
        assert got == pytest.approx(5.0, rel=1e-14)

    def test_matches_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            A = rng.uniform(-2, 2)
            B = rng.uniform(-2, 2)
            eta = rng.uniform(-2, 2)
            gamma = rng.uniform(-2, 2)
            lo, hi = sorted(rng.uniform(0.05, 20.0, size=2))
            if hi <= lo:
                continue
            got = sup_two_power(A, eta, B, gamma, lo, hi)
            t = np.geomspace(lo, hi, 4001)
            grid = (A * t**eta + B * t ** (eta + gamma)).max()
            assert got >= grid - 1e-9 * (1.0 + abs(grid))
            assert got <= grid + 1e-3 * (1.0 + abs(grid))


class TestLimitTwoPower:
    def test_dominant_term_at_zero(self):
        assert limit_two_power(1.0, -1.0, -1.0, 0.5, at_zero=True) == INF
        assert limit_two_power(-2.0, -1.0, 5.0, 2.0, at_zero=True) == -INF

    def test_dominant_term_at_inf(self):
        assert limit_two_power(1.0, -1.0, -1.0, 0.5, at_zero=False) == 0.0
        assert limit_two_power(-1.0, 1.0, 1.0, 0.5, at_zero=False) == INF

    def test_merged_exponents(self):
        assert limit_two_power(2.0, 0.0, 3.0, 0.0, at_zero=True) == 5.0
        assert limit_two_power(2.0, 1.0, -2.0, 0.0, at_zero=False) == 0.0

    def test_power_with_limits_conventions(self):
        assert power_with_limits(0.0, 0.0) == 1.0
        assert power_with_limits(INF, 0.0) == 1.0
        assert power_with_limits(0.0, -1.0) == INF
        assert power_with_limits(INF, -1.0) == 0.0


class TestBracketedSup:
    def test_known_maximum(self):
        lo, hi = bracketed_sup(
            lambda x: 1.0 / (1.0 + x), lambda x: math.sqrt(x), 0.01, 100.0
        )
        assert lo <= 0.5 <= hi
        assert hi - lo <= 1e-5

    def test_infinite_right_end(self):
        lo, hi = bracketed_sup(
            lambda x: 1.0 / x,
            lambda x: 1.0 if math.isinf(x) else x / (1.0 + x),
            1.0,
            INF,
        )
        assert lo <= 0.5 <= hi
        assert hi - lo <= 1e-5

    def test_disjoint_supports_refine_to_zero(self):
        dec = lambda x: max(0.0, 1.0 - x)
        inc = lambda x: 0.0 if math.isinf(x) else max(0.0, x - 2.0)
        lo, hi = bracketed_sup(dec, inc, 0.5, 4.0)
        assert lo == 0.0
        assert hi <= 1e-9

    def test_bracket_is_certified(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            p = rng.uniform(0.2, 3.0)
            r = rng.uniform(0.2, 3.0)
            dec = lambda x: (1.0 + x) ** -p
            inc = lambda x: 0.0 if x == 0 else (x / (1.0 + x)) ** r if math.isfinite(x) else 1.0
            lo, hi = bracketed_sup(dec, inc, 0.05, INF)
            t = np.geomspace(0.05, 1e4, 2001)
            grid = ((1.0 + t) ** -p * (t / (1.0 + t)) ** r).max()
            # The grid maximum undershoots the true sup, which the bracket
            # must contain, so only one-sided comparisons are legitimate.
            assert hi >= grid * (1.0 - 1e-12)
            assert lo <= hi
            assert hi - lo <= 1e-4 * max(1.0, hi)
