from __future__ import annotations

from fractions import Fraction as F

import pytest

from rootstack_gw import (
    Divisor,
    DivisorArrangement,
    RootData,
    SectorFoldWarning,
    base_j_function,
    i_infinity_extended,
    i_infinity_extended_h0,
    i_infinity_nonextended,
    i_local,
    i_relative_extended_h0,
    i_relative_smooth,
    i_root_extended,
    i_root_nonextended,
)
from rootstack_gw.ifunctions import ConfigurationError, ExtendedDataTooSmall


class TestRootNonextended:
    def test_degree_zero_term(self, p2, line_conic):
        series = i_root_nonextended(p2, line_conic, RootData((3, 5)), 3)
        slice0 = series.beta_slice((0,))
        ((key, c),) = slice0.ordered_terms()
        assert c == 1 and key.zpow == 1 and key.sector == (0, 0)

    def test_line_conic_at_three_five(self, p2, line_conic):
        # degree 1: single fractional step per divisor leaves 15 * (z^-1 - P z^-2)
        # in the sector of residues (-1 mod 3, -2 mod 5) = (2, 3)
        series = i_root_nonextended(p2, line_conic, RootData((3, 5)), 3)
        got = {
            (k.zpow, k.mono, k.sector): c
            for k, c in series.beta_slice((1,)).terms.items()
        }
        assert got == {
            (-1, (0,), (2, 3)): F(15),
            (-2, (1,), (2, 3)): F(-15),
        }

    def test_non_coprime_rejected(self, p2, line_conic):
        with pytest.raises(ConfigurationError, match="coprime"):
            i_root_nonextended(p2, line_conic, RootData((2, 4)), 3)

    def test_non_nef_rejected(self, p2):
        bad = DivisorArrangement((Divisor("B", (-1,)),))
        with pytest.raises(ValueError, match="not nef"):
            i_root_nonextended(p2, bad, RootData((5,)), 3)

    def test_small_order_ladder(self, p2):
        # single line at order 2, degree 2: ladder has the single step k = 2,
        # so the weight is 2 * J_2 * (P+z)(P+2z) / (P+2z) = 2 * J_2 * (P+z)
        line = DivisorArrangement((Divisor("L", (1,)),))
        series = i_root_nonextended(p2, line, RootData((2,)), 6)
        ctx = series.ctx
        j2 = base_j_function(p2, (2,), ctx)
        factor = ctx.ring
        from rootstack_gw.algebra import CohClass, GradedSeries

        p = GradedSeries.from_class(ctx, CohClass.generator(factor, 0))
        z = GradedSeries.z_power(ctx, 1)
        want = (j2 * (p + z)).scale(2) * GradedSeries.term(ctx, 1, sector=(0,))
        assert series.beta_slice((2,)) == want

    def test_trivial_orders_recover_target_series(self, p2, line_conic):
        # all orders 1: the root construction is trivial and every ladder
        # cancels the full ascending product
        series = i_root_nonextended(p2, line_conic, RootData((1, 1)), 6)
        ctx = series.ctx
        for beta in ((0,), (1,), (2,)):
            assert series.beta_slice(beta) == base_j_function(p2, beta, ctx)

    def test_fold_warning_when_order_divides_degree(self, p2, line_conic):
        with pytest.warns(SectorFoldWarning):
            i_root_nonextended(p2, line_conic, RootData((3, 5)), 9)


class TestHomogeneity:
    def test_finite_order_weights(self, p2, line_conic):
        # z-degree + class degree + orbifold Novikov degree + age = 1 per term
        roots = (3, 5)
        series = i_root_nonextended(p2, line_conic, RootData(roots), 6)
        for key, _ in series.terms.items():
            degs = line_conic.degrees(key.beta)
            novikov = 3 * key.beta[0] - sum(
                F(r - 1, r) * d for r, d in zip(roots, degs)
            )
            age = sum(F(s, r) for s, r in zip(key.sector, roots))
            total = key.zpow + sum(key.mono) + novikov + age
            assert total == 1, key

    def test_limit_weights(self, p2, line_conic):
        series = i_infinity_nonextended(p2, line_conic, 9)
        for key, _ in series.terms.items():
            novikov = 3 * key.beta[0] - line_conic.total_degree(key.beta)
            active = sum(1 for s in key.sector if s)
            assert key.zpow + sum(key.mono) + novikov + active == 1, key

    def test_finite_order_extended_weights(self, p2, line_conic):
        # contact variables weigh 1 - j/r_i, sectors weigh their age s_i/r_i
        roots = (11, 13)
        series = i_root_extended(p2, line_conic, RootData(roots), 3, 6, z_floor=-4)
        for key, _ in series.terms.items():
            degs = line_conic.degrees(key.beta)
            novikov = 3 * key.beta[0] - sum(
                F(r - 1, r) * d for r, d in zip(roots, degs)
            )
            age = sum(F(s, r) for s, r in zip(key.sector, roots))
            xdeg = sum(e * (1 - F(j, roots[i])) for i, j, e in key.xexp)
            assert key.zpow + sum(key.mono) + novikov + age + xdeg == 1, key


class TestInfinityNonextended:
    def test_line_conic_degree_one_frozen(self, p2, line_conic):
        series = i_infinity_nonextended(p2, line_conic, 9)
        got = {
            (k.zpow, k.mono, k.sector): c
            for k, c in series.beta_slice((1,)).terms.items()
        }
        assert got == {
            (-1, (0,), (-1, -2)): F(1),
            (-2, (1,), (-1, -2)): F(-1),
        }

    def test_degree_zero(self, p2, line_conic):
        series = i_infinity_nonextended(p2, line_conic, 3)
        ((key, c),) = series.beta_slice((0,)).ordered_terms()
        assert key.zpow == 1 and key.sector == (0, 0) and c == 1

    def test_empty_intersection_kills_terms(self, p2):
        three_lines = DivisorArrangement(
            tuple(Divisor(f"L{i}", (1,)) for i in range(3))
        )
        series = i_infinity_nonextended(p2, three_lines, 6)
        assert series.beta_slice((1,)).is_zero
        assert series.beta_slice((2,)).is_zero
        assert not series.beta_slice((0,)).is_zero

    def test_missed_divisor_gives_plain_slice(self, p1p1):
        # a fiber class misses a divisor pulled from the other ruling, so the
        # weight is the empty product and only the tangency label changes
        fiber = DivisorArrangement((Divisor("F", (0, 2)),))
        series = i_infinity_nonextended(p1p1, fiber, 4)
        ctx = series.ctx
        want = base_j_function(p1p1, (1, 0), ctx) * ctx_unit(ctx, (0,))
        assert series.beta_slice((1, 0)) == want

    def test_matches_relative_for_single_divisor(self, p2, conic_only, cubic_only):
        for arr in (conic_only, cubic_only):
            assert i_infinity_nonextended(p2, arr, 9) == i_relative_smooth(p2, arr, 9)


def ctx_unit(ctx, sector):
    from rootstack_gw.algebra import GradedSeries

    return GradedSeries.term(ctx, 1, sector=sector)


class TestRootExtended:
    def test_contact_free_slice_is_nonextended(self, p2, line_conic):
        roots = RootData((7, 11))
        extended = i_root_extended(p2, line_conic, roots, 3, 6, z_floor=-6)
        plain = i_root_nonextended(p2, line_conic, roots, 6)
        assert extended.coefficient(xexp=()) == plain.in_context(extended.ctx)

    def test_degree_zero_single_contact_term(self, p2, line_conic):
        # the degree-zero z cancels the 1/z contact weight: x_{11} lands at z^0
        series = i_root_extended(p2, line_conic, RootData((7, 11)), 2, 3, z_floor=-3)
        got = series.beta_slice((0,)).coefficient(xexp=((0, 1, 1),))
        ((key, c),) = got.ordered_terms()
        assert c == 1 and key.zpow == 0 and key.sector == (1, 0)

    def test_contact_order_must_stay_below_orders(self, p2, line_conic):
        with pytest.raises(ConfigurationError, match="below every root order"):
            i_root_extended(p2, line_conic, RootData((3, 5)), 3, 6, z_floor=-2)

    def test_limit_of_extended_contact_block(self, p2, line_conic):
        # coefficient of x_{11} x_{21}^2 at degree 1, rescaled by the orders of
        # the divisors with negative net tangency (none here), matches the
        # untwisted limit block
        roots = RootData((7, 11))
        extended = i_root_extended(p2, line_conic, roots, 3, 3, z_floor=-4)
        got = extended.beta_slice((1,)).coefficient(
            xexp=((0, 1, 1), (1, 1, 2)), sector=(0, 0)
        )
        h0 = i_infinity_extended_h0(p2, line_conic, 3, 3)
        want = h0.beta_slice((1,)).coefficient(
            xexp=((0, 1, 1), (1, 1, 2)), sector=(0, 0)
        )
        assert got == want.in_context(extended.ctx)


class TestInfinityExtended:
    def test_untwisted_slice_matches_direct_builder(self, p2, line_conic):
        full = i_infinity_extended(p2, line_conic, 6, 9, z_floor=-1)
        h0 = i_infinity_extended_h0(p2, line_conic, 6, 9)
        for key, c in full.terms.items():
            if not any(key.sector):
                assert h0.terms.get(key) == c, key

    def test_h0_maximal_tangency_coefficient(self, p2, line_conic):
        # x_{1d} x_{2,2d} coefficient carries (2d)!/(d!)^2 z^-1 on the unit
        from math import factorial

        h0 = i_infinity_extended_h0(p2, line_conic, 8, 12)
        for d in (1, 2, 3, 4):
            got = h0.beta_slice((d,)).coefficient(
                xexp=((0, d, 1), (1, 2 * d, 1)), beta=(d,)
            )
            coeff = got.coefficient(zpow=-1, mono=(0,), sector=(0, 0), lam=(0, 0))
            assert coeff.scalar() == F(factorial(2 * d), factorial(d) ** 2)

    def test_h0_contact_one_coefficient(self, p2, line_conic):
        # x_11 x_21^2 at degree 1: J * (P+z)(2P+z)(2P+2z) / (2 z^3) has
        # untwisted point part z^-2
        h0 = i_infinity_extended_h0(p2, line_conic, 2, 3)
        got = h0.beta_slice((1,)).coefficient(
            xexp=((0, 1, 1), (1, 1, 2)), beta=(1,)
        )
        assert got.coefficient(zpow=-2, mono=(0,), sector=(0, 0), lam=(0, 0)).scalar() == 1

    def test_bound_must_reach_largest_tangency(self, p2, line_conic):
        with pytest.raises(ExtendedDataTooSmall, match=r"beta=\(2,\)"):
            i_infinity_extended_h0(p2, line_conic, 3, 6)

    def test_degree_zero_block(self, p2, line_conic):
        h0 = i_infinity_extended_h0(p2, line_conic, 4, 6)
        ((key, c),) = h0.beta_slice((0,)).ordered_terms()
        assert key.zpow == 1 and c == 1 and not key.xexp


class TestRelative:
    def test_degree_zero(self, p2, conic_only):
        series = i_relative_smooth(p2, conic_only, 6)
        ((key, c),) = series.beta_slice((0,)).ordered_terms()
        assert key.zpow == 1 and key.sector == (0,) and c == 1

    def test_cubic_degree_one_frozen(self, p2, cubic_only):
        # J * (3P+z)(3P+2z) = 2 + 3P z^-1 - 6P^2 z^-2 in sector (-3)
        series = i_relative_smooth(p2, cubic_only, 3)
        got = {(k.zpow, k.mono): c for k, c in series.beta_slice((1,)).terms.items()}
        assert got == {
            (0, (0,)): F(2),
            (-1, (1,)): F(3),
            (-2, (2,)): F(-6),
        }
        assert all(k.sector == (-3,) for k in series.beta_slice((1,)).terms)

    def test_extended_single_contact_coefficient(self, p2, conic_only):
        # x_2 coefficient at degree 1: J * (2P+z)(2P+2z) / z = 2 z^-1 - 2 P^2 z^-3
        series = i_relative_extended_h0(p2, conic_only, 4, 3)
        got = series.beta_slice((1,)).coefficient(xexp=((0, 2, 1),), beta=(1,))
        flat = {(k.zpow, k.mono): c for k, c in got.terms.items()}
        assert flat == {(-1, (0,)): F(2), (-3, (2,)): F(-2)}


class TestLocal:
    def test_degree_zero(self, p2, line_conic):
        series = i_local(p2, line_conic, 3)
        ((key, c),) = series.beta_slice((0,)).ordered_terms()
        assert key.zpow == 1 and c == 1 and not any(key.lam)

    def test_line_conic_equivariant_leading_term(self, p2, line_conic):
        # lam1 lam2^2 multiplies the bare degree-one slice of the target series
        series = i_local(p2, line_conic, 3)
        got = series.beta_slice((1,)).coefficient(lam=(1, 2))
        ctx = series.ctx
        assert got == base_j_function(p2, (1,), ctx).beta_slice((1,))

    def test_line_conic_nonequivariant_part_frozen(self, p2, line_conic):
        # (-P)(-2P)(-2P-z) = -2 P^2 z, so the bare part of the slice is -2 P^2 z^-1
        series = i_local(p2, line_conic, 3)
        got = series.beta_slice((1,)).without_lambda()
        flat = {(k.zpow, k.mono): c for k, c in got.terms.items()}
        assert flat == {(-1, (2,)): F(-2)}

    def test_cubic_nonequivariant_part_frozen(self, p2, cubic_only):
        # [(-3P)(-3P-z)(-3P-2z)] J = -9 P^2 z^-1 - 6 P
        series = i_local(p2, cubic_only, 3)
        got = series.beta_slice((1,)).without_lambda()
        flat = {(k.zpow, k.mono): c for k, c in got.terms.items()}
        assert flat == {(-1, (2,)): F(-9), (0, (1,)): F(-6)}
