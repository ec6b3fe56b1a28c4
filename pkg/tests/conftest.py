from __future__ import annotations

import random
from fractions import Fraction

import pytest

from rootstack_gw import Divisor, DivisorArrangement, TargetSpace
from rootstack_gw.algebra import GradedSeries, SeriesContext, TermKey


@pytest.fixture
def p2() -> TargetSpace:
    return TargetSpace((2,))


@pytest.fixture
def p1p1() -> TargetSpace:
    return TargetSpace((1, 1))


@pytest.fixture
def line_conic() -> DivisorArrangement:
    return DivisorArrangement((Divisor("L", (1,)), Divisor("C", (2,))))


@pytest.fixture
def conic_only() -> DivisorArrangement:
    return DivisorArrangement((Divisor("C", (2,)),))


@pytest.fixture
def cubic_only() -> DivisorArrangement:
    return DivisorArrangement((Divisor("E", (3,)),))


@pytest.fixture
def two_diagonals() -> DivisorArrangement:
    return DivisorArrangement((Divisor("L1", (1, 1)), Divisor("L2", (1, 1))))


def random_series(
    rng: random.Random, ctx: SeriesContext, max_terms: int = 4
) -> GradedSeries:
    """Small random series in the given context, exact rational coefficients."""
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        beta = tuple(rng.randint(0, 1) for _ in ctx.beta_weights)
        mono = tuple(rng.randint(0, c) for c in ctx.ring.caps)
        key = TermKey(
            beta=beta,
            zpow=rng.randint(-3, 3),
            xexp=tuple(
                [(rng.randint(0, max(0, ctx.divisors - 1)), rng.randint(1, 2), 1)]
                if ctx.divisors and rng.random() < 0.3
                else []
            ),
            sector=(0,) * ctx.divisors,
            mono=mono,
            lam=tuple(
                rng.randint(0, 1) if rng.random() < 0.3 else 0
                for _ in range(ctx.divisors)
            ),
        )
        terms[key] = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    return GradedSeries(ctx, terms)
