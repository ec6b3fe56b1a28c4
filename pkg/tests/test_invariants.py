from __future__ import annotations

from fractions import Fraction as F
from math import factorial

import pytest

from rootstack_gw import (
    Divisor,
    DivisorArrangement,
    RootData,
    UnsupportedMirrorMapError,
    extract_invariants,
    i_infinity_extended,
    i_infinity_extended_h0,
    i_infinity_nonextended,
    i_root_nonextended,
    mirror_map,
    n_orb,
    stabilization_check,
)
from rootstack_gw.algebra import ContractError


class TestMirrorMap:
    def test_line_conic_extended_is_trivial(self, p2, line_conic):
        series = i_infinity_extended(p2, line_conic, 6, 9, z_floor=-1)
        report = mirror_map(series)
        assert report.trivial
        # one contact unit per divisor and order
        assert len(report.contact_units) == 12

    def test_two_diagonals_extended_is_trivial(self, p1p1, two_diagonals):
        series = i_infinity_extended(p1p1, two_diagonals, 4, 8, z_floor=-1)
        assert mirror_map(series).trivial

    def test_single_cubic_is_nontrivial(self, p2, cubic_only):
        series = i_infinity_nonextended(p2, cubic_only, 9)
        report = mirror_map(series)
        assert not report.trivial
        # the offending degree-one constant is the 2 [1]_{-3} term
        flat = {
            (k.beta, k.sector): c for k, c in report.z_zero_extra.terms.items()
        }
        assert flat[((1,), (-3,))] == 2

    def test_cap_below_first_degree_is_trivial(self, p2, cubic_only):
        series = i_infinity_nonextended(p2, cubic_only, 2)
        assert mirror_map(series).trivial

    def test_extraction_refuses_nontrivial(self, p2, cubic_only):
        series = i_infinity_nonextended(p2, cubic_only, 9)
        with pytest.raises(UnsupportedMirrorMapError, match="Birkhoff"):
            extract_invariants(series, p2, cubic_only)


class TestExtraction:
    def test_maximal_tangency_values(self, p2, line_conic):
        h0 = i_infinity_extended_h0(p2, line_conic, 6, 9)
        table = extract_invariants(h0, p2, line_conic)
        for d in (1, 2, 3):
            got = table.value(
                (d,),
                xexp=((0, d, 1), (1, 2 * d, 1)),
                insertion=(2,),
                psi=0,
                sector=(0, 0),
            )
            assert got == F(factorial(2 * d), factorial(d) ** 2)

    def test_contact_one_block_undoes_multinomials(self, p2, line_conic):
        h0 = i_infinity_extended_h0(p2, line_conic, 6, 9)
        table = extract_invariants(h0, p2, line_conic)
        # d_i contact-one markings: stored coefficient is divided by d_1! d_2!,
        # extraction multiplies it back
        got = table.value(
            (1,), xexp=((0, 1, 1), (1, 1, 2)), insertion=(2,), psi=1, sector=(0, 0)
        )
        assert got == 2

    def test_tangency_block_pairs_through_divisor_product(self, p2, line_conic):
        series = i_infinity_nonextended(p2, line_conic, 6)
        table = extract_invariants(series, p2, line_conic)
        # coefficient 1 * z^-1 [1]_{-1,-2}; pairing inserts D1 D2 = 2 P^2
        got = table.value((1,), xexp=(), insertion=(0,), psi=0, sector=(-1, -2))
        assert got == 2

    def test_reinsertion_reproduces_series(self, p2, line_conic):
        h0 = i_infinity_extended_h0(p2, line_conic, 6, 9)
        table = extract_invariants(h0, p2, line_conic)
        ctx = h0.ctx
        rebuilt = {}
        for entry, value in table.entries.items():
            if any(entry.sector):
                continue
            coeff = value
            for _, _, e in entry.xexp:
                coeff /= factorial(e)
            key = ctx.zero_key()._replace(
                beta=entry.beta,
                zpow=-entry.psi - 1,
                xexp=entry.xexp,
                mono=ctx.ring.dual_mono(entry.insertion),
            )
            rebuilt[key] = coeff
        negative = {k: c for k, c in h0.terms.items() if k.zpow < 0}
        assert rebuilt == negative

    def test_ruling_swap_symmetry(self, p1p1, two_diagonals):
        h0 = i_infinity_extended_h0(p1p1, two_diagonals, 4, 8)
        table = extract_invariants(h0, p1p1, two_diagonals)
        for d1 in range(3):
            for d2 in range(3):
                if not 0 < d1 + d2 <= 4:
                    continue
                e = d1 + d2
                a = table.value(
                    (d1, d2), ((0, e, 1), (1, e, 1)), (1, 1), 0, (0, 0)
                )
                b = table.value(
                    (d2, d1), ((0, e, 1), (1, e, 1)), (1, 1), 0, (0, 0)
                )
                assert a == b


class TestContactOneCounts:
    def test_line_conic_degree_one(self, p2, line_conic):
        assert n_orb(p2, line_conic, (1,)) == 2

    def test_line_conic_degree_two(self, p2, line_conic):
        assert n_orb(p2, line_conic, (2,)) == 6

    def test_two_diagonals_unit(self, p1p1, two_diagonals):
        assert n_orb(p1p1, two_diagonals, (1, 0)) == 1

    def test_degenerate_total_contact(self, p2):
        line = DivisorArrangement((Divisor("L", (1,)),))
        with pytest.raises(ValueError, match="total contact"):
            n_orb(p2, line, (1,))


class TestStabilization:
    def test_plane_line_conic(self, p2, line_conic):
        roots = [RootData(r) for r in ((7, 11), (11, 13), (13, 17))]
        report = stabilization_check(p2, line_conic, roots, 9)
        assert report.ok
        assert len(report.cases) == 3 * 4

    def test_degree_zero_case_trivially_equal(self, p2, line_conic):
        report = stabilization_check(p2, line_conic, [RootData((7, 11))], 3)
        zero = [c for c in report.cases if c.beta == (0,)][0]
        assert zero.ok
        ((key, c),) = zero.limit.ordered_terms()
        assert key.zpow == 1 and c == 1

    def test_quadric_choices(self, p1p1, two_diagonals):
        roots = [RootData(r) for r in ((3, 5), (4, 9))]
        report = stabilization_check(p1p1, two_diagonals, roots, 4)
        assert report.ok

    def test_rescaled_values_are_order_free(self, p2, line_conic):
        # the same limit slice arises from any admissible choice of orders
        roots = [RootData((7, 11)), RootData((13, 17))]
        report = stabilization_check(p2, line_conic, roots, 6)
        by_beta = {}
        for case in report.cases:
            by_beta.setdefault(case.beta, set()).add(
                tuple(sorted(case.rescaled.terms.items()))
            )
        assert all(len(v) == 1 for v in by_beta.values())

    def test_order_too_small_rejected(self, p2, line_conic):
        with pytest.raises(ContractError, match="must exceed"):
            stabilization_check(p2, line_conic, [RootData((7, 5))], 9)

    def test_non_coprime_rejected(self, p2, line_conic):
        with pytest.raises(ContractError, match="coprime"):
            stabilization_check(p2, line_conic, [RootData((4, 6))], 3)


def test_extended_series_stabilizes_to_limit(p2, line_conic):
    # the full extended limit series is the stabilized form of the finite-order
    # extended series: divide by r_i exactly for divisors with positive net
    # shift and rekey residue sectors to integer shifts
    from math import prod

    from rootstack_gw import i_infinity_extended, i_root_extended

    m, cap, floor = 3, 6, -4
    limit = i_infinity_extended(p2, line_conic, m, cap, z_floor=floor)
    for roots in ((101, 103), (103, 107)):
        finite = i_root_extended(
            p2, line_conic, RootData(roots), m, cap, z_floor=floor
        )
        rescaled = {}
        for key, c in finite.terms.items():
            degs = line_conic.degrees(key.beta)
            shifts = [
                degs[i] - sum(j * e for ii, j, e in key.xexp if ii == i)
                for i in range(2)
            ]
            factor = prod(r for r, s in zip(roots, shifts) if s > 0)
            assert key.sector == tuple(
                (-s) % r for s, r in zip(shifts, roots)
            ), key
            rescaled[key._replace(sector=tuple(-s for s in shifts))] = c / factor
        assert rescaled == limit.terms


def test_finite_order_residue_terms_are_flagged(p2, line_conic):
    # extraction does not guess the orbifold pairing normalization at finite
    # order: residue-sector terms are reported for review, not valued
    series = i_root_nonextended(p2, line_conic, RootData((7, 11)), 3)
    table = extract_invariants(series, p2, line_conic)
    assert table.flagged
    assert all(not any(e.sector) for e in table.entries)
