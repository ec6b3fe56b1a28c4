"""Mirror-map analysis and extraction of genus-zero invariants.

A generating series equals the one-point descendant series only when its
mirror map is trivial, meaning the z^0 part consists of nothing but the bare
contact-variable insertions and no positive z powers survive beyond the
dilaton term.  When that holds, the coefficient of z^{-a-1} against a basis
direction encodes a one-point invariant with a psi-power a, and the
multinomial weights of the contact variables are undone by multiplying with
the factorials of their exponents.

Nontrivial mirror maps are detected and rejected with a precise diagnostic;
no resummation is ever attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod

from .algebra import ContractError, GradedSeries, TermKey
from .ifunctions import i_infinity_nonextended, i_root_nonextended
from .targets import (
    DivisorArrangement,
    RootData,
    TargetSpace,
    check_coprime,
    enumerate_curve_classes,
)


class UnsupportedMirrorMapError(ValueError):
    """The mirror map is nontrivial; resummation is out of scope here."""


@dataclass(frozen=True)
class MirrorMapReport:
    """Split of a series by z-degree around the dilaton term."""

    dilaton_ok: bool
    contact_units: tuple[TermKey, ...]
    z_zero_extra: GradedSeries
    z_positive_extra: GradedSeries

    @property
    def trivial(self) -> bool:
        return (
            self.dilaton_ok
            and self.z_zero_extra.is_zero
            and self.z_positive_extra.is_zero
        )

    def explain(self) -> str:
        if self.trivial:
            return "mirror map is trivial"
        bits = []
        if not self.dilaton_ok:
            bits.append("dilaton term z is missing or has coefficient != 1")
        for key, c in self.z_zero_extra.ordered_terms()[:3]:
            bits.append(f"z^0 term {c} at {key}")
        for key, c in self.z_positive_extra.ordered_terms()[:3]:
            bits.append(f"positive-z term {c} at {key}")
        return "mirror map nontrivial: " + "; ".join(bits)


def _is_contact_unit(ctx, key: TermKey) -> bool:
    """A beta=0 term x_{ij} z^0 sitting in the sector the contact order shifts to."""
    if any(key.beta) or key.zpow != 0 or any(key.lam):
        return False
    if key.mono != ctx.ring.zero_mono or len(key.xexp) != 1:
        return False
    i, j, e = key.xexp[0]
    if e != 1:
        return False
    expected = [0] * ctx.divisors
    expected[i] = j % ctx.roots[i] if ctx.roots is not None else j
    return key.sector == tuple(expected)


def mirror_map(series: GradedSeries) -> MirrorMapReport:
    """Split the series by z-degree and test the trivial form."""
    ctx = series.ctx
    dilaton_key = ctx.zero_key()._replace(zpow=1)
    dilaton_ok = series.terms.get(dilaton_key, Fraction(0)) == 1
    units = []
    zero_extra = {}
    positive_extra = {}
    for key, c in series.terms.items():
        if key.zpow < 0 or key == dilaton_key:
            continue
        if key.zpow == 0 and c == 1 and _is_contact_unit(ctx, key):
            units.append(key)
            continue
        if key.zpow == 0:
            zero_extra[key] = c
        else:
            positive_extra[key] = c
    return MirrorMapReport(
        dilaton_ok=dilaton_ok,
        contact_units=tuple(sorted(units)),
        z_zero_extra=GradedSeries(ctx, zero_extra),
        z_positive_extra=GradedSeries(ctx, positive_extra),
    )


# ---------------------------------------------------------------------------
# Invariant tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableEntry:
    beta: tuple[int, ...]
    xexp: tuple[tuple[int, int, int], ...]
    insertion: tuple[int, ...]
    psi: int
    sector: tuple[int, ...]


@dataclass
class InvariantTable:
    """Extracted one-point invariants, exact values, immutable once built."""

    entries: dict[TableEntry, Fraction] = field(default_factory=dict)
    flagged: list[TermKey] = field(default_factory=list)

    def value(
        self,
        beta: tuple[int, ...],
        xexp: tuple[tuple[int, int, int], ...] = (),
        insertion: tuple[int, ...] = (),
        psi: int = 0,
        sector: tuple[int, ...] | None = None,
    ) -> Fraction:
        sector = sector if sector is not None else tuple()
        key = TableEntry(tuple(beta), tuple(xexp), tuple(insertion), psi, tuple(sector))
        return self.entries.get(key, Fraction(0))

    def ordered(self) -> list[tuple[TableEntry, Fraction]]:
        return sorted(
            self.entries.items(),
            key=lambda kv: (kv[0].beta, kv[0].xexp, kv[0].psi, kv[0].insertion, kv[0].sector),
        )


def extract_invariants(
    series: GradedSeries,
    X: TargetSpace,
    arrangement: DivisorArrangement | None = None,
) -> InvariantTable:
    """Read one-point invariants off a series with trivial mirror map.

    Untwisted terms are recorded against the Poincare dual of their monomial,
    after undoing the multinomial weights (multiply by the factorials of the
    contact exponents).  Integer-tangency terms without contact variables are
    paired through the ambient ring with the product of their active divisor
    classes inserted.  Anything else (finite-order residues, mixed blocks) is
    flagged for manual review rather than guessed at.
    """
    report = mirror_map(series)
    if not report.trivial:
        raise UnsupportedMirrorMapError(
            report.explain() + "; Birkhoff factorization unsupported"
        )
    ctx = series.ctx
    ring = ctx.ring
    table = InvariantTable()

    def add(entry: TableEntry, value: Fraction) -> None:
        if value:
            table.entries[entry] = table.entries.get(entry, Fraction(0)) + value

    for key, c in series.terms.items():
        if key.zpow >= 0:
            continue
        if any(key.lam):
            table.flagged.append(key)
            continue
        psi = -key.zpow - 1
        weight = c
        for _, _, e in key.xexp:
            weight *= factorial(e)
        if not any(key.sector):
            add(
                TableEntry(key.beta, key.xexp, ring.dual_mono(key.mono), psi, key.sector),
                weight,
            )
            continue
        if ctx.roots is not None or key.xexp or arrangement is None:
            table.flagged.append(key)
            continue
        support = tuple(i for i, s in enumerate(key.sector) if s)
        paired = arrangement.intersection_class(X, support) * _mono_class(ring, key.mono)
        if paired.is_zero:
            table.flagged.append(key)
            continue
        for mono, coeff in paired.items():
            add(
                TableEntry(key.beta, (), ring.dual_mono(mono), psi, key.sector),
                weight * coeff,
            )
    return table


def _mono_class(ring, mono):
    from .algebra import CohClass

    return CohClass(ring, {mono: Fraction(1)})


def n_orb(
    X: TargetSpace,
    arrangement: DivisorArrangement,
    beta: tuple[int, ...],
    table: InvariantTable | None = None,
) -> Fraction:
    """Count with d_i contact-order-one markings on each divisor and one
    interior point insertion carrying psi^(d-2).

    Looked up at the contact monomial prod_i x_{i1}^{d_i}; the extraction
    contract already multiplied the raw coefficient by prod_i d_i!.
    """
    beta = tuple(beta)
    degs = arrangement.degrees(beta)
    d = sum(degs)
    if d < 2:
        raise ValueError("total contact below 2 has no interior psi insertion")
    if table is None:
        from .ifunctions import i_infinity_extended_h0
        from .targets import check_assumption

        cap = sum(w * b for w, b in zip(X.anticanonical_weights, beta))
        assumption = check_assumption(X, arrangement, cap)
        if not assumption.holds:
            raise UnsupportedMirrorMapError(
                f"two-positive-pairings condition fails at {assumption.violations[0]}"
            )
        h0 = i_infinity_extended_h0(X, arrangement, max(degs), cap)
        table = extract_invariants(h0, X, arrangement)
    xexp = tuple((i, 1, d_i) for i, d_i in enumerate(degs) if d_i)
    return table.value(
        beta,
        xexp=xexp,
        insertion=X.ring.top_mono,
        psi=d - 2,
        sector=(0,) * arrangement.n,
    )


# ---------------------------------------------------------------------------
# Large-order stabilization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilizationCase:
    roots: tuple[int, ...]
    beta: tuple[int, ...]
    ok: bool
    rescaled: GradedSeries
    limit: GradedSeries

    def first_mismatch(self) -> TermKey | None:
        if self.ok:
            return None
        keys = set(self.rescaled.terms) | set(self.limit.terms)
        for key in sorted(keys):
            if self.rescaled.terms.get(key) != self.limit.terms.get(key):
                return key
        return None


@dataclass(frozen=True)
class StabilizationReport:
    cases: tuple[StabilizationCase, ...]

    @property
    def ok(self) -> bool:
        return all(case.ok for case in self.cases)


def rescale_to_limit(
    slice_series: GradedSeries,
    X: TargetSpace,
    arrangement: DivisorArrangement,
    beta: tuple[int, ...],
    limit_ctx,
) -> GradedSeries:
    """Identify a finite-order degree slice with its limit normal form.

    Divides out the product of the root orders of the divisors the class
    actually meets and rekeys residue sectors to integer tangencies.
    """
    roots = slice_series.ctx.roots
    if roots is None:
        raise ContractError("series does not carry finite root orders")
    degs = arrangement.degrees(beta)
    factor = prod(r for r, d in zip(roots, degs) if d > 0)
    expected = tuple((-d) % r for d, r in zip(degs, roots))
    target = tuple(-d for d in degs)
    out = {}
    for key, c in slice_series.terms.items():
        if key.xexp:
            raise ContractError("only non-extended slices stabilize by this rule")
        if key.sector != expected:
            raise ContractError(
                f"sector {key.sector} does not match residues {expected} at beta={beta}"
            )
        out[key._replace(sector=target)] = c / factor
    return GradedSeries(limit_ctx, out)


def stabilization_check(
    X: TargetSpace,
    arrangement: DivisorArrangement,
    roots_list: list[RootData],
    cap: int,
) -> StabilizationReport:
    """Bit-exact large-order stabilization over every class in the cap.

    Requires each supplied order vector to be pairwise coprime and to exceed
    every relevant intersection number, so that each divisor's fractional
    ladder is the single step that carries the whole order dependence.
    """
    betas = enumerate_curve_classes(X, cap)
    max_degs = [
        max((arrangement.divisors[i].degree(b) for b in betas), default=0)
        for i in range(arrangement.n)
    ]
    limit = i_infinity_nonextended(X, arrangement, cap)
    cases = []
    for roots in roots_list:
        if not check_coprime(roots.orders):
            raise ContractError(f"orders {roots.orders} are not pairwise coprime")
        for r, dmax in zip(roots.orders, max_degs):
            if dmax > 0 and r <= dmax:
                raise ContractError(
                    f"order {r} must exceed the largest intersection number {dmax}"
                )
        finite = i_root_nonextended(X, arrangement, roots, cap)
        for beta in betas:
            rescaled = rescale_to_limit(
                finite.beta_slice(beta), X, arrangement, beta, limit.ctx
            )
            expected = limit.beta_slice(beta)
            cases.append(
                StabilizationCase(
                    roots=roots.orders,
                    beta=beta,
                    ok=rescaled == expected,
                    rescaled=rescaled,
                    limit=expected,
                )
            )
    return StabilizationReport(cases=tuple(cases))
