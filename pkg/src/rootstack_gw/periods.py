"""Quantum periods, their regularization, and classical periods of the
mirror superpotential computed from tangency counts.

The quantum period collects the one-point descendant invariants of the Fano
target by anticanonical degree.  Its regularization multiplies degree m by
m!.  On the mirror side the superpotential is the sum of one theta function
per divisor component of an anticanonical arrangement; the degree-d constant
term of its d-th power expands into multinomially weighted counts with
contact order one, which this module takes from the extended tangency
series.  A Laurent-polynomial constant-term period is provided as a fully
independent cross-check oracle.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .algebra import rat
from .ifunctions import ConfigurationError, i_infinity_extended_h0
from .invariants import extract_invariants, n_orb
from .targets import (
    DivisorArrangement,
    TargetSpace,
    base_j_function,
    check_assumption,
    enumerate_curve_classes,
)

logger = logging.getLogger(__name__)


class PeriodError(ValueError):
    """Hypotheses of the period pipeline fail."""


@dataclass(frozen=True)
class PeriodSequence:
    """Coefficients c_0 .. c_cap of a period series, exact rationals."""

    kind: str
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.kind not in {"quantum", "regularized", "classical", "laurent"}:
            raise ValueError(f"unknown period kind {self.kind!r}")
        if self.kind == "quantum" and len(self.coeffs) >= 2:
            if self.coeffs[0] != 1 or self.coeffs[1] != 0:
                raise ValueError("quantum period must start 1, 0")

    @property
    def cap(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, m: int) -> Fraction:
        return self.coeffs[m]


def quantum_period(X: TargetSpace, cap: int) -> PeriodSequence:
    """Degree-m coefficients: point insertions against psi^(m-2), summed over
    classes of anticanonical degree m; degree 0 and 1 are pinned to 1 and 0.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    coeffs = [Fraction(0)] * (cap + 1)
    coeffs[0] = Fraction(1)
    ctx = X.context(0, cap)
    for beta in enumerate_curve_classes(X, cap):
        if not any(beta):
            continue
        m = ctx.beta_degree(beta)
        if m < 2:
            continue
        j_slice = base_j_function(X, beta, ctx)
        coeffs[m] += j_slice.coefficient(
            beta=beta, zpow=1 - m, mono=X.ring.zero_mono, sector=(), lam=()
        ).scalar()
    return PeriodSequence("quantum", tuple(coeffs))


def regularize(period: PeriodSequence) -> PeriodSequence:
    """Multiply the degree-m coefficient by m!."""
    if period.kind != "quantum":
        raise ValueError("only quantum periods regularize")
    return PeriodSequence(
        "regularized",
        tuple(c * factorial(m) for m, c in enumerate(period.coeffs)),
    )


@dataclass(frozen=True)
class ClassicalPeriod:
    """Classical period plus its mixed-grading breakdown.

    ``contributions`` keeps each class's contact tuple and count before the
    Novikov specialization to the single degree variable, for debugging.
    """

    sequence: PeriodSequence
    contributions: tuple[tuple[tuple[int, ...], tuple[int, ...], Fraction], ...]
    skipped_tuples: tuple[tuple[int, tuple[int, ...]], ...]


def classical_period_orbifold(
    X: TargetSpace, arrangement: DivisorArrangement, cap: int
) -> ClassicalPeriod:
    """Constant-term coefficients of powers of the superpotential.

    Degree d collects d!/(d_1! ... d_n!) times the count with d_i
    contact-order-one markings per divisor, over classes beta whose
    intersection numbers realize the contact tuple; formal tuples realized
    by no class carry no defined count and are skipped (and reported).
    Requires the arrangement to be anticanonical and to satisfy the
    two-positive-pairings condition, which makes the mirror map trivial.
    """
    arrangement.validate_on(X)
    if not arrangement.is_anticanonical(X):
        raise ConfigurationError("arrangement must sum to the anticanonical class")
    assumption = check_assumption(X, arrangement, cap)
    if not assumption.holds:
        raise PeriodError(
            "two-positive-pairings condition fails at "
            f"{assumption.violations[0]}; the mirror map is not trivial"
        )
    betas = enumerate_curve_classes(X, cap)
    m_bound = max(
        (max(arrangement.degrees(b), default=0) for b in betas), default=1
    )
    h0 = i_infinity_extended_h0(X, arrangement, max(1, m_bound), cap)
    table = extract_invariants(h0, X, arrangement)
    coeffs = [Fraction(0)] * (cap + 1)
    coeffs[0] = Fraction(1)
    realized: dict[int, set[tuple[int, ...]]] = {}
    contributions = []
    for beta in betas:
        if not any(beta):
            continue
        degs = arrangement.degrees(beta)
        d = sum(degs)
        if d < 2 or d > cap:
            continue
        realized.setdefault(d, set()).add(degs)
        weight = Fraction(factorial(d))
        for d_i in degs:
            weight /= factorial(d_i)
        count = n_orb(X, arrangement, beta, table)
        contributions.append((beta, degs, count))
        coeffs[d] += weight * count
    skipped = []
    for d in range(2, cap + 1):
        seen = realized.get(d, set())
        for combo in _compositions(d, arrangement.n):
            if combo not in seen:
                skipped.append((d, combo))
                logger.debug(
                    "degree %d tuple %s matches no effective class; skipped", d, combo
                )
    return ClassicalPeriod(
        sequence=PeriodSequence("classical", tuple(coeffs)),
        contributions=tuple(contributions),
        skipped_tuples=tuple(skipped),
    )


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


@dataclass(frozen=True)
class PeriodComparison:
    regularized: PeriodSequence
    classical: PeriodSequence
    skipped_tuples: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def ok(self) -> bool:
        return self.regularized.coeffs == self.classical.coeffs

    def first_mismatch(self) -> int | None:
        for m, (a, b) in enumerate(zip(self.regularized.coeffs, self.classical.coeffs)):
            if a != b:
                return m
        return None


def compare_periods(
    X: TargetSpace, arrangement: DivisorArrangement, cap: int
) -> PeriodComparison:
    """Coefficientwise exact comparison of the regularized quantum period
    with the classical period, two independent pipelines."""
    classical = classical_period_orbifold(X, arrangement, cap)
    regularized = regularize(quantum_period(X, cap))
    return PeriodComparison(
        regularized=regularized,
        classical=classical.sequence,
        skipped_tuples=classical.skipped_tuples,
    )


# ---------------------------------------------------------------------------
# Laurent-polynomial cross-check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentPolynomial:
    """Finitely supported map from integer exponent vectors to rationals."""

    variables: tuple[str, ...]
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    @staticmethod
    def from_dict(
        variables: tuple[str, ...], data: dict[tuple[int, ...], Fraction]
    ) -> LaurentPolynomial:
        clean = {k: rat(v) for k, v in data.items() if rat(v)}
        return LaurentPolynomial(
            tuple(variables), tuple(sorted(clean.items()))
        )

    @staticmethod
    def parse(text: str) -> LaurentPolynomial:
        """Parse sums of monomial terms like ``x + y + 1/(x*y)`` or
        ``2*x^2*y^-1 - 3/2``."""
        stripped = text.replace(" ", "")
        if not stripped:
            raise ValueError("empty Laurent polynomial")
        # protect exponent signs from the top-level term split
        stripped = stripped.replace("^-", "^~")
        pieces = re.findall(r"[+-]?[^+-]+", stripped)
        raw: list[tuple[Fraction, dict[str, int]]] = []
        names: list[str] = []
        for piece in pieces:
            coeff, exps = _parse_laurent_term(piece)
            for name in exps:
                if name not in names:
                    names.append(name)
            raw.append((coeff, exps))
        names.sort()
        data: dict[tuple[int, ...], Fraction] = {}
        for coeff, exps in raw:
            key = tuple(exps.get(name, 0) for name in names)
            data[key] = data.get(key, Fraction(0)) + coeff
        return LaurentPolynomial.from_dict(tuple(names), data)

    def constant_term(self) -> Fraction:
        width = len(self.variables)
        zero = (0,) * width
        for key, c in self.terms:
            if key == zero:
                return c
        return Fraction(0)

    def __mul__(self, other: LaurentPolynomial) -> LaurentPolynomial:
        if self.variables != other.variables:
            raise ValueError("Laurent polynomials use different variables")
        out: dict[tuple[int, ...], Fraction] = {}
        for ka, ca in self.terms:
            for kb, cb in other.terms:
                key = tuple(a + b for a, b in zip(ka, kb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return LaurentPolynomial.from_dict(self.variables, out)


def _parse_laurent_term(piece: str) -> tuple[Fraction, dict[str, int]]:
    sign = Fraction(1)
    if piece.startswith("+"):
        piece = piece[1:]
    elif piece.startswith("-"):
        sign = Fraction(-1)
        piece = piece[1:]
    coeff = sign
    exps: dict[str, int] = {}

    def absorb(mono_text: str, orientation: int) -> None:
        for name, power in _parse_monomial(mono_text):
            exps[name] = exps.get(name, 0) + orientation * power

    recip = re.search(r"/\(([^)]*)\)", piece)
    if recip:
        absorb(recip.group(1), -1)
        piece = piece[: recip.start()] + piece[recip.end():]
    for token in filter(None, piece.split("*")):
        if "/" in token:
            left, right = token.split("/", 1)
            if right and right[0].isalpha():
                # numeric/monomial shorthand, e.g. 1/x or 3/x^2
                coeff *= Fraction(left) if left else Fraction(1)
                absorb(right, -1)
                continue
            coeff *= Fraction(token)
            continue
        if re.fullmatch(r"\d+", token):
            coeff *= Fraction(token)
            continue
        absorb(token, +1)
    return coeff, exps


def _parse_monomial(text: str) -> list[tuple[str, int]]:
    text = text.replace("~", "-")
    out = []
    for match in re.finditer(r"([a-zA-Z]\w*)(?:\^(-?\d+))?", text):
        out.append((match.group(1), int(match.group(2) or 1)))
    if not out and text not in {"", "1"}:
        raise ValueError(f"cannot parse monomial {text!r}")
    return out


def laurent_classical_period(f: LaurentPolynomial, cap: int) -> PeriodSequence:
    """Constant terms of the powers of f, by exact expansion."""
    coeffs = [Fraction(0)] * (cap + 1)
    coeffs[0] = Fraction(1)
    power = None
    for d in range(1, cap + 1):
        power = f if power is None else power * f
        coeffs[d] = power.constant_term()
    return PeriodSequence("laurent", tuple(coeffs))
