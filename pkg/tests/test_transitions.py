"""Tests for transitions into normal form."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import zeta

from hardy import (
    NotRepresentableError,
    Parameter,
    ValidationError,
    from_discrete,
    from_halfline,
    from_measures,
)

INF = math.inf


def power_tail(coeff, exponent):
    return {"kind": "power", "coeff": coeff, "exponent": exponent}


class TestDiscreteExact:
    def test_single_term_upper_sum(self):
        nf = from_discrete([1.0], [1.0], "upper-sum")
        assert nf.exact
        assert nf.lower is nf.upper
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0], [1.0, 0.0]))

    def test_single_term_lower_sum(self):
        nf = from_discrete([1.0], [1.0], "lower-sum")
        assert nf.exact
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0], [1.0, 0.0]))

    def test_two_terms_upper_sum(self):
        # W_1 = 3, W_2 = 1 on the grid cut at U_1 = 1, U_2 = 2.
        nf = from_discrete([1.0, 1.0], [2.0, 1.0], "upper-sum")
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0, 2.0], [3.0, 1.0, 0.0]))

    def test_two_terms_lower_sum(self):
        # W_1 = 2, W_2 = 3 on the grid cut at U_2 = 1, U_1 = 2.
        nf = from_discrete([1.0, 1.0], [2.0, 1.0], "lower-sum")
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0, 2.0], [3.0, 2.0, 0.0]))

    def test_zero_u_terms_make_empty_cells(self):
        nf = from_discrete([1.0, 0.0, 1.0], [1.0, 2.0, 3.0], "upper-sum")
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0, 2.0], [6.0, 3.0, 0.0]))

    def test_all_zero_weights(self):
        nf = from_discrete([0.0, 0.0], [0.0], "upper-sum")
        assert nf.b.is_zero()
        nf = from_discrete([0.0], [0.0, 0.0], "lower-sum")
        assert nf.b.is_zero()

    def test_upper_sum_value_tail_on_finite_grid(self):
        # u exhausts after three cells; the zeta tail fills in W_n exactly.
        nf = from_discrete([1.0, 1.0, 1.0], [], "upper-sum", w_tail=power_tail(1.0, 2.0))
        assert nf.exact
        for n in (1, 2, 3):
            assert nf.b(n - 0.5) == pytest.approx(float(zeta(2.0, n)), rel=1e-14)
        assert nf.b(3.5) == 0.0

    def test_lower_sum_u_exhausts_despite_heavy_w_tail(self):
        # Only W_1 and W_2 are ever used, so the divergent tail is harmless.
        nf = from_discrete([1.0, 2.0], [], "lower-sum", w_tail=power_tail(1.0, 0.5))
        assert nf.exact
        w2 = 1.0 + 2.0**-0.5
        assert nf.b.equivalent(Parameter.steps([0.0, 2.0, 3.0], [w2, 1.0, 0.0]))

    def test_lower_sum_w_exhausts_with_infinite_u_tail(self):
        # Every piece below U_1 = zeta(2) carries the full sum of w.
        nf = from_discrete([], [5.0], "lower-sum", u_tail=power_tail(1.0, 2.0))
        assert nf.exact
        u1 = float(zeta(2.0, 1.0))
        assert nf.b.equivalent(Parameter.steps([0.0, u1], [5.0, 0.0]), rtol=1e-14)

    def test_upper_sum_u_tail_exhausted_by_w(self):
        # w has one term, so only U_1 matters even though u goes on forever.
        nf = from_discrete([], [1.0], "upper-sum", u_tail=power_tail(1.0, 2.0))
        assert nf.exact
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0], [1.0, 0.0]))


class TestDiscreteEnvelopes:
    def test_lower_sum_window_interior_is_exact(self):
        nf = from_discrete(
            [],
            [],
            "lower-sum",
            u_tail=power_tail(1.0, 2.0),
            w_tail=power_tail(1.0, 0.0),
            window=50,
        )
        assert not nf.exact
        assert nf.meta["window"] == 50
        for n in range(1, 48):
            x = 0.5 * float(zeta(2.0, n + 1) + zeta(2.0, n))
            assert nf.lower(x) == float(n)
            assert nf.upper(x) == float(n)

    def test_lower_sum_head_bracket(self):
        # Beyond the window b(x) = n on [zeta(2, n+1), zeta(2, n)); the
        # envelopes must straddle it with gap at most 1.5 per tail term.
        nf = from_discrete(
            [],
            [],
            "lower-sum",
            u_tail=power_tail(1.0, 2.0),
            w_tail=power_tail(1.0, 0.0),
            window=50,
        )
        for n in range(51, 4000, 13):
            x = 0.5 * float(zeta(2.0, n + 1) + zeta(2.0, n))
            lo, hi = nf.lower(x), nf.upper(x)
            assert lo <= n <= hi
            assert hi - lo <= 1.5 + 1e-9

    def test_upper_sum_tail_bracket(self):
        # b(x) = zeta(2, floor(x) + 1); the envelopes bracket it with
        # relative gap that stays small beyond the window.
        nf = from_discrete(
            [],
            [],
            "upper-sum",
            u_tail=power_tail(1.0, 0.0),
            w_tail=power_tail(1.0, 2.0),
            window=50,
        )
        assert not nf.exact
        for n in range(1, 48):
            want = float(zeta(2.0, n))
            assert nf.lower(n - 0.5) == pytest.approx(want, rel=1e-13)
            assert nf.upper(n - 0.5) == pytest.approx(want, rel=1e-13)
        for n in range(51, 4000, 13):
            want = float(zeta(2.0, n))
            lo, hi = nf.lower(n - 0.5), nf.upper(n - 0.5)
            assert lo <= want <= hi
            assert hi - lo <= 0.05 * want

    def test_wider_window_extends_exact_region(self):
        kwargs = dict(
            u_tail=power_tail(1.0, 0.0), w_tail=power_tail(1.0, 2.0)
        )
        coarse = from_discrete([], [], "upper-sum", window=50, **kwargs)
        fine = from_discrete([], [], "upper-sum", window=500, **kwargs)
        x = 100.5
        assert coarse.upper(x) - coarse.lower(x) > 0
        assert fine.upper(x) == fine.lower(x) == pytest.approx(
            float(zeta(2.0, 101.0)), rel=1e-13
        )

    def test_lower_sum_bounded_values_bracket(self):
        # Decaying w tail: the head is squeezed between the partial sum at
        # the window and the full sum.
        nf = from_discrete(
            [],
            [],
            "lower-sum",
            u_tail=power_tail(1.0, 2.0),
            w_tail=power_tail(1.0, 2.0),
            window=30,
        )
        total = float(zeta(2.0, 1.0))
        x = 1e-9
        assert nf.lower(x) <= total <= nf.upper(x)
        assert nf.upper(x) == pytest.approx(total, rel=1e-12)
        assert nf.upper(x) - nf.lower(x) <= float(zeta(2.0, 31.0))

    def test_upper_sum_bounded_extent_bracket(self):
        # Summable u tail: lengths converge, so the envelopes disagree only
        # on a short stretch before the total extent zeta(2).
        nf = from_discrete(
            [],
            [],
            "upper-sum",
            u_tail=power_tail(1.0, 2.0),
            w_tail=power_tail(1.0, 2.0),
            window=30,
        )
        u_inf = float(zeta(2.0, 1.0))
        assert nf.lower.support_end() < u_inf
        assert nf.upper.support_end() == pytest.approx(u_inf, rel=1e-12)
        for x in (0.3, 0.9, 1.2, 1.5):
            assert nf.lower(x) <= nf.upper(x)

    def test_listed_terms_prepend_to_tail(self):
        # Listed terms override the tail rule for leading indices.
        nf = from_discrete(
            [4.0],
            [],
            "upper-sum",
            u_tail=power_tail(1.0, 0.0),
            w_tail=power_tail(1.0, 2.0),
            window=40,
        )
        want = float(zeta(2.0, 1.0))
        assert nf.lower(0.5) == pytest.approx(want, rel=1e-13)
        assert nf.lower(3.9) == pytest.approx(want, rel=1e-13)
        assert nf.lower(4.5) == pytest.approx(float(zeta(2.0, 2.0)), rel=1e-13)


class TestDiscreteValidation:
    def test_bad_mode(self):
        with pytest.raises(ValidationError):
            from_discrete([1.0], [1.0], "sideways-sum")

    def test_negative_terms(self):
        with pytest.raises(ValidationError):
            from_discrete([-1.0], [1.0], "upper-sum")

    def test_bad_tail(self):
        with pytest.raises(ValidationError):
            from_discrete([1.0], [1.0], "upper-sum", u_tail={"kind": "geometric"})
        with pytest.raises(ValidationError):
            from_discrete([1.0], [1.0], "upper-sum", u_tail=power_tail(-1.0, 2.0))

    def test_lower_sum_heavy_u_tail(self):
        with pytest.raises(NotRepresentableError):
            from_discrete([], [1.0], "lower-sum", u_tail=power_tail(1.0, 1.0))

    def test_lower_sum_slow_w_tail(self):
        with pytest.raises(NotRepresentableError):
            from_discrete(
                [],
                [],
                "lower-sum",
                u_tail=power_tail(1.0, 2.0),
                w_tail=power_tail(1.0, 0.5),
            )

    def test_upper_sum_heavy_w_tail(self):
        with pytest.raises(NotRepresentableError):
            from_discrete([1.0], [], "upper-sum", w_tail=power_tail(1.0, 1.0))

    def test_upper_sum_slow_u_tail(self):
        with pytest.raises(NotRepresentableError):
            from_discrete(
                [],
                [],
                "upper-sum",
                u_tail=power_tail(1.0, 0.5),
                w_tail=power_tail(1.0, 2.0),
            )


class TestHalfline:
    def test_power_density_gives_reciprocal(self):
        nf = from_halfline(
            [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "e": -2.0}],
            [{"lo": 0.0, "a": 1.0}],
            2.0,
        )
        assert nf.exact
        want = Parameter.from_pieces([{"lo": 0.0, "c": 1.0, "e": -1.0}, {"lo": 1.0}])
        assert nf.b.equivalent(want)

    def test_indicator_gives_linear(self):
        nf = from_halfline(
            [{"lo": 0.0, "a": 1.0}, {"lo": 1.0}],
            [{"lo": 0.0, "a": 1.0}],
            2.0,
        )
        for x in (0.1, 0.4, 0.9):
            assert nf.b(x) == pytest.approx(1.0 - x, abs=1e-14)
        assert nf.b(1.5) == 0.0

    def test_faster_decay_gives_square_root(self):
        nf = from_halfline(
            [{"lo": 0.0}, {"lo": 1.0, "c": 2.0, "e": -3.0}],
            [{"lo": 0.0, "a": 1.0}],
            2.0,
        )
        want = Parameter.from_pieces([{"lo": 0.0, "c": 1.0, "e": -0.5}, {"lo": 1.0}])
        assert nf.b.equivalent(want)

    def test_constant_v_scales_by_conjugate_power(self):
        # v = 4 at p = 2 divides the composed parameter by 4.
        nf = from_halfline(
            [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "e": -2.0}],
            [{"lo": 0.0, "a": 4.0}],
            2.0,
        )
        for x in (0.1, 0.5, 0.9):
            assert nf.b(x) == pytest.approx(0.25 / x, rel=1e-14)

    def test_head_pole_gives_shifted_power(self):
        # u = y**-2 near 0 has infinite mass; U = 1/y - 1 inverts to a
        # shifted power and v = 1 passes it through.
        nf = from_halfline(
            [{"lo": 0.0, "c": 1.0, "e": -2.0}, {"lo": 1.0}],
            [{"lo": 0.0, "a": 1.0}],
            2.0,
        )
        for x in (0.01, 0.5, 3.0, 100.0):
            assert nf.b(x) == pytest.approx(1.0 / (x + 1.0), rel=1e-12)

    def test_pure_v_power_composes(self):
        # v = y**0.5 at p = 2 integrates to 2*sqrt, and composing with
        # U-inverse = x**-0.5 gives 2*x**-0.25 on (0, 1).
        nf = from_halfline(
            [{"lo": 0.0}, {"lo": 1.0, "c": 2.0, "e": -3.0}],
            [{"lo": 0.0, "c": 1.0, "e": 0.5}],
            2.0,
        )
        for x in (0.1, 0.5, 0.9):
            assert nf.b(x) == pytest.approx(2.0 * x**-0.25, rel=1e-12)
        assert nf.b(1.5) == 0.0

    def test_all_zero_u(self):
        nf = from_halfline([{"lo": 0.0}], [{"lo": 0.0, "a": 1.0}], 2.0)
        assert nf.b.is_zero()

    def test_log_integral_raises(self):
        # v = y at p = 2 makes v**(1-p') = 1/y, whose integral is a log.
        with pytest.raises(NotRepresentableError):
            from_halfline(
                [{"lo": 0.0, "a": 1.0}, {"lo": 1.0}],
                [{"lo": 0.0, "c": 1.0, "e": 1.0}],
                2.0,
            )

    def test_u_exponent_minus_one_raises(self):
        with pytest.raises(NotRepresentableError):
            from_halfline(
                [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "e": -1.0}],
                [{"lo": 0.0, "a": 1.0}],
                2.0,
            )

    def test_interior_pole_raises(self):
        # u blows up at y = 1 from the right via a shifted base.
        with pytest.raises(NotRepresentableError):
            from_halfline(
                [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "s": -1.0, "e": -2.0}, {"lo": 2.0}],
                [{"lo": 0.0, "a": 1.0}],
                2.0,
            )

    def test_infinite_mass_far_out_raises(self):
        with pytest.raises(NotRepresentableError):
            from_halfline([{"lo": 0.0, "a": 1.0}], [{"lo": 0.0, "a": 1.0}], 2.0)

    def test_shifted_composition_raises(self):
        # U-inverse = 1/x - 1 carries an additive constant, which cannot
        # pass through the nonlinear map from v = y**0.5.
        with pytest.raises(NotRepresentableError):
            from_halfline(
                [{"lo": 0.0, "c": 1.0, "s": 1.0, "e": -2.0}],
                [{"lo": 0.0, "c": 1.0, "e": 0.5}],
                2.0,
            )

    def test_mixed_piece_raises(self):
        with pytest.raises(NotRepresentableError):
            from_halfline(
                [{"lo": 0.0, "a": 1.0, "c": 1.0, "e": -2.0}, {"lo": 1.0}],
                [{"lo": 0.0, "a": 1.0}],
                2.0,
            )

    def test_bad_p_raises(self):
        with pytest.raises(ValidationError):
            from_halfline([{"lo": 0.0, "a": 1.0}, {"lo": 1.0}], [{"lo": 0.0, "a": 1.0}], 1.0)


class TestMeasures:
    def test_atom_pair_gives_indicator(self):
        nf = from_measures({"atoms": [[1.0, 1.0]]}, {"atoms": [[0.0, 1.0]]})
        assert nf.exact
        assert nf.b.equivalent(Parameter.steps([0.0, 1.0], [1.0, 0.0]))

    def test_closure_flag(self):
        mu = {"atoms": [[1.0, 1.0]]}
        lam = {"atoms": [[1.0, 1.0]]}
        assert from_measures(mu, lam, closure="open").b.is_zero()
        closed = from_measures(mu, lam, closure="closed").b
        assert closed.equivalent(Parameter.steps([0.0, 1.0], [1.0, 0.0]))

    def test_density_pair_gives_reciprocal(self):
        nf = from_measures(
            {"density": [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "e": -2.0}]},
            {"density": [{"lo": 0.0, "a": 1.0}]},
        )
        want = Parameter.from_pieces([{"lo": 0.0, "c": 1.0, "e": -1.0}, {"lo": 1.0}])
        assert nf.b.equivalent(want)

    def test_atom_against_lebesgue(self):
        nf = from_measures(
            {"atoms": [[2.0, 3.0]]}, {"density": [{"lo": 0.0, "a": 1.0}]}
        )
        assert nf.b.equivalent(Parameter.steps([0.0, 3.0], [2.0, 0.0]))

    def test_lam_atom_splits_density_inverse(self):
        # M-inverse is 1/x on (0, 1); the atom at height 2 turns on exactly
        # below x = 1/2.
        nf = from_measures(
            {"density": [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "e": -2.0}]},
            {"atoms": [[2.0, 1.0]]},
        )
        assert nf.b.equivalent(Parameter.steps([0.0, 0.5], [1.0, 0.0]))
        closed = from_measures(
            {"density": [{"lo": 0.0}, {"lo": 1.0, "c": 1.0, "e": -2.0}]},
            {"atoms": [[2.0, 1.0]]},
            closure="closed",
        )
        assert closed.b.equivalent(Parameter.steps([0.0, 0.5], [1.0, 0.0]))

    def test_empty_mu_gives_zero(self):
        assert from_measures({}, {"atoms": [[1.0, 1.0]]}).b.is_zero()

    def test_mu_atom_at_origin_is_invisible(self):
        nf = from_measures(
            {"atoms": [[0.0, 5.0]]}, {"density": [{"lo": 0.0, "a": 1.0}]}
        )
        assert nf.b.is_zero()

    def test_negative_atom_location_raises(self):
        with pytest.raises(NotRepresentableError):
            from_measures({"atoms": [[-1.0, 1.0]]}, {"atoms": [[0.0, 1.0]]})

    def test_bad_closure_raises(self):
        with pytest.raises(ValidationError):
            from_measures({"atoms": [[1.0, 1.0]]}, {"atoms": [[0.0, 1.0]]}, closure="half")

    @given(
        mu=st.lists(
            st.tuples(
                st.floats(0.125, 8.0, allow_nan=False),
                st.floats(0.125, 4.0, allow_nan=False),
            ),
            min_size=1,
            max_size=5,
        ),
        lam=st.lists(
            st.tuples(
                st.floats(0.0, 8.0, allow_nan=False),
                st.floats(0.125, 4.0, allow_nan=False),
            ),
            min_size=1,
            max_size=5,
        ),
        closed=st.booleans(),
    )
    def test_atoms_match_brute_force(self, mu, lam, closed):
        nf = from_measures(
            {"atoms": [[y, m] for y, m in mu]},
            {"atoms": [[z, m] for z, m in lam]},
            closure="closed" if closed else "open",
        )

        def m_of(y):
            return sum(m for yy, m in mu if yy >= y)

        def lam_of(s):
            if s <= 0.0:
                return 0.0
            if closed:
                return sum(m for zz, m in lam if zz <= s)
            return sum(m for zz, m in lam if zz < s)

        levels = sorted({m_of(y) for y, _ in mu} | {0.0})
        xs = [0.5 * (a + b) for a, b in zip(levels, levels[1:])]
        xs += [levels[-1] + 1.0]
        for x in xs:
            minv = max([y for y, _ in mu if m_of(y) > x], default=0.0)
            assert nf.b(x) == pytest.approx(lam_of(minv), rel=1e-12, abs=1e-12)
