"""Exact sparse arithmetic for multigraded series over a nilpotent cohomology ring.

Every generating series in this package is a finite rational linear
combination of terms

    Q^beta * z^p * prod_{i,j} x_{ij}^{e_{ij}} * prod_i lam_i^{l_i} * mono * [sector]

where ``mono`` is a monomial in the hyperplane generators of a product of
projective spaces and ``sector`` is an integer tangency vector tagging the
component of the state space the term lives in.  The generators are
nilpotent, so every geometric expansion is finite and all coefficients stay
exact ``fractions.Fraction`` values.  There is no floating point anywhere.

Truncation is part of a series' identity: a context fixes the ring, the
number of tangency slots, the curve-class cap (measured in anticanonical
degree) and an optional lowest retained z-power.  Two series combine only
when their contexts agree, and structural equality of the stored maps is
mathematical equality within the truncation because zero coefficients are
never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple


class ContractError(ValueError):
    """Operands disagree on ring or truncation context."""


class NotInvertibleError(ValueError):
    """The factor has no z part, so it has no geometric-series inverse here."""


class DivisibilityError(ValueError):
    """Exact division failed: the claimed polynomial identity does not hold."""


def rat(value: int | str | Fraction) -> Fraction:
    """Coerce to an exact rational."""
    return value if isinstance(value, Fraction) else Fraction(value)


# ---------------------------------------------------------------------------
# The ambient cohomology ring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmbientRing:
    """Monomial-truncation model of H^*(prod_k P^{n_k}).

    One degree-two generator per projective factor, with exponent cap
    ``caps[k] = n_k``; any monomial exceeding a cap is zero.  Integration is
    the coefficient of the top monomial, so Poincare pairing of complementary
    monomials is 1.
    """

    caps: tuple[int, ...]
    names: tuple[str, ...]

    @staticmethod
    def for_product(caps: Iterable[int]) -> AmbientRing:
        caps = tuple(int(c) for c in caps)
        if not caps or any(c < 1 for c in caps):
            raise ValueError("each projective factor needs dimension >= 1")
        if len(caps) == 1:
            names = ("P",)
        else:
            names = tuple(f"P{k + 1}" for k in range(len(caps)))
        return AmbientRing(caps, names)

    @property
    def rank(self) -> int:
        return len(self.caps)

    @property
    def zero_mono(self) -> tuple[int, ...]:
        return (0,) * len(self.caps)

    @property
    def top_mono(self) -> tuple[int, ...]:
        return self.caps

    def mono_ok(self, mono: tuple[int, ...]) -> bool:
        return len(mono) == len(self.caps) and all(
            0 <= e <= c for e, c in zip(mono, self.caps)
        )

    def mul_mono(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...] | None:
        """Product of monomials, or None once any exponent passes its cap."""
        out = tuple(ea + eb for ea, eb in zip(a, b))
        if any(e > c for e, c in zip(out, self.caps)):
            return None
        return out

    def mono_degree(self, mono: tuple[int, ...]) -> int:
        """Complex degree (each generator counts 1)."""
        return sum(mono)

    def dual_mono(self, mono: tuple[int, ...]) -> tuple[int, ...]:
        """Poincare-complementary monomial."""
        return tuple(c - e for e, c in zip(mono, self.caps))

    def render_mono(self, mono: tuple[int, ...]) -> str:
        parts = []
        for name, e in zip(self.names, mono):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


class CohClass:
    """A cohomology class: finite rational combination of ring monomials."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: AmbientRing, coeffs: dict[tuple[int, ...], Fraction]):
        self.ring = ring
        clean: dict[tuple[int, ...], Fraction] = {}
        for mono, c in coeffs.items():
            if not ring.mono_ok(mono):
                raise ValueError(f"monomial {mono} outside ring caps {ring.caps}")
            c = rat(c)
            if c:
                clean[mono] = c
        self.coeffs = clean

    @staticmethod
    def zero(ring: AmbientRing) -> CohClass:
        return CohClass(ring, {})

    @staticmethod
    def one(ring: AmbientRing) -> CohClass:
        return CohClass(ring, {ring.zero_mono: Fraction(1)})

    @staticmethod
    def generator(ring: AmbientRing, k: int) -> CohClass:
        mono = tuple(1 if i == k else 0 for i in range(ring.rank))
        return CohClass(ring, {mono: Fraction(1)})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        return iter(sorted(self.coeffs.items()))

    def __add__(self, other: CohClass) -> CohClass:
        if self.ring != other.ring:
            raise ContractError("classes live in different rings")
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return CohClass(self.ring, out)

    def __neg__(self) -> CohClass:
        return self.scale(Fraction(-1))

    def __sub__(self, other: CohClass) -> CohClass:
        return self + (-other)

    def scale(self, q: Fraction | int) -> CohClass:
        q = rat(q)
        return CohClass(self.ring, {m: c * q for m, c in self.coeffs.items()})

    def __mul__(self, other: CohClass) -> CohClass:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.ring != other.ring:
            raise ContractError("classes live in different rings")
        out: dict[tuple[int, ...], Fraction] = {}
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                mono = self.ring.mul_mono(ma, mb)
                if mono is None:
                    continue
                out[mono] = out.get(mono, Fraction(0)) + ca * cb
        return CohClass(self.ring, out)

    __rmul__ = __mul__

    def power(self, e: int) -> CohClass:
        out = CohClass.one(self.ring)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CohClass)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = [
            f"{c}*{self.ring.render_mono(m)}" for m, c in sorted(self.coeffs.items())
        ]
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Series terms and contexts
# ---------------------------------------------------------------------------


class TermKey(NamedTuple):
    """Exponent data of one stored term.

    ``xexp`` is a sorted tuple of (divisor index, contact order, exponent)
    triples with positive exponents; ``sector`` holds the tangency labels
    (residues mod the root orders when the context carries roots, plain
    integers otherwise); ``lam`` holds equivariant-parameter exponents.
    """

    beta: tuple[int, ...]
    zpow: int
    xexp: tuple[tuple[int, int, int], ...]
    sector: tuple[int, ...]
    mono: tuple[int, ...]
    lam: tuple[int, ...]


def merge_xexp(
    a: tuple[tuple[int, int, int], ...], b: tuple[tuple[int, int, int], ...]
) -> tuple[tuple[int, int, int], ...]:
    if not a:
        return b
    if not b:
        return a
    acc: dict[tuple[int, int], int] = {(i, j): e for i, j, e in a}
    for i, j, e in b:
        acc[(i, j)] = acc.get((i, j), 0) + e
    return tuple(sorted((i, j, e) for (i, j), e in acc.items() if e))


def xexp_from_dict(exps: dict[tuple[int, int], int]) -> tuple[tuple[int, int, int], ...]:
    return tuple(sorted((i, j, e) for (i, j), e in exps.items() if e))


@dataclass(frozen=True)
class SeriesContext:
    """Ring plus truncation data shared by all series of one computation.

    ``beta_weights`` are the anticanonical degrees of the curve-class basis,
    so the cap test is sum(w_k * beta_k) <= beta_cap.  ``z_floor`` is the
    lowest retained z-power (None keeps everything; all series here are
    finite anyway).  ``roots`` marks sector entries as residues mod the given
    orders; None means integer tangency labels.
    """

    ring: AmbientRing
    divisors: int
    beta_weights: tuple[int, ...]
    beta_cap: int | None = None
    z_floor: int | None = None
    roots: tuple[int, ...] | None = None

    def beta_degree(self, beta: tuple[int, ...]) -> int:
        return sum(w * b for w, b in zip(self.beta_weights, beta))

    def keeps(self, key: TermKey) -> bool:
        """Truncation test: dropped keys are never an error, just absent."""
        if self.beta_cap is not None and self.beta_degree(key.beta) > self.beta_cap:
            return False
        if self.z_floor is not None and key.zpow < self.z_floor:
            return False
        return True

    def check_key(self, key: TermKey) -> None:
        if len(key.beta) != len(self.beta_weights):
            raise ContractError("curve-class length mismatch")
        if len(key.sector) != self.divisors or len(key.lam) != self.divisors:
            raise ContractError("sector/equivariant slot mismatch")
        if not self.ring.mono_ok(key.mono):
            raise ContractError(f"monomial {key.mono} exceeds ring caps")
        if any(b < 0 for b in key.beta):
            raise ContractError("curve classes must be effective")
        if any(e < 0 for e in key.lam):
            raise ContractError("equivariant exponents must be nonnegative")

    def zero_key(self) -> TermKey:
        return TermKey(
            beta=(0,) * len(self.beta_weights),
            zpow=0,
            xexp=(),
            sector=(0,) * self.divisors,
            mono=self.ring.zero_mono,
            lam=(0,) * self.divisors,
        )

    def with_roots(self, roots: tuple[int, ...] | None) -> SeriesContext:
        return SeriesContext(
            self.ring, self.divisors, self.beta_weights, self.beta_cap, self.z_floor, roots
        )


_UNSET = object()


class GradedSeries:
    """Immutable sparse series: a finite map TermKey -> Fraction.

    All operations are pure; results never store zero coefficients, so two
    series are equal exactly when their stored maps agree.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: SeriesContext, terms: dict[TermKey, Fraction]):
        clean: dict[TermKey, Fraction] = {}
        for key, c in terms.items():
            c = rat(c)
            if not c:
                continue
            ctx.check_key(key)
            if ctx.keeps(key):
                clean[key] = c
        self.ctx = ctx
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ctx: SeriesContext) -> GradedSeries:
        return cls(ctx, {})

    @classmethod
    def term(
        cls,
        ctx: SeriesContext,
        coeff: Fraction | int,
        *,
        beta: tuple[int, ...] | None = None,
        zpow: int = 0,
        xexp: tuple[tuple[int, int, int], ...] = (),
        sector: tuple[int, ...] | None = None,
        mono: tuple[int, ...] | None = None,
        lam: tuple[int, ...] | None = None,
    ) -> GradedSeries:
        base = ctx.zero_key()
        key = TermKey(
            beta=base.beta if beta is None else tuple(beta),
            zpow=zpow,
            xexp=tuple(xexp),
            sector=base.sector if sector is None else tuple(sector),
            mono=base.mono if mono is None else tuple(mono),
            lam=base.lam if lam is None else tuple(lam),
        )
        return cls(ctx, {key: rat(coeff)})

    @classmethod
    def one(cls, ctx: SeriesContext) -> GradedSeries:
        return cls.term(ctx, 1)

    @classmethod
    def z_power(cls, ctx: SeriesContext, p: int) -> GradedSeries:
        return cls.term(ctx, 1, zpow=p)

    @classmethod
    def from_class(cls, ctx: SeriesContext, value: CohClass) -> GradedSeries:
        if value.ring != ctx.ring:
            raise ContractError("class ring differs from series ring")
        base = ctx.zero_key()
        return cls(ctx, {base._replace(mono=m): c for m, c in value.coeffs.items()})

    # -- basic structure ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def ordered_terms(self) -> list[tuple[TermKey, Fraction]]:
        """Fixed print order: beta lex, z descending, then remaining keys."""
        return sorted(
            self.terms.items(),
            key=lambda kv: (
                kv[0].beta,
                -kv[0].zpow,
                kv[0].mono,
                kv[0].xexp,
                kv[0].sector,
                kv[0].lam,
            ),
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GradedSeries)
            and self.ctx == other.ctx
            and self.terms == other.terms
        )

    def _require_same_ctx(self, other: GradedSeries) -> None:
        if self.ctx != other.ctx:
            raise ContractError("series have different ring or truncation contexts")

    def in_context(self, ctx: SeriesContext) -> GradedSeries:
        """Reinterpret the stored terms under another compatible context.

        The ring, slot count and curve-class grading must agree; a tighter
        truncation in the new context simply drops terms.
        """
        if (
            ctx.ring != self.ctx.ring
            or ctx.divisors != self.ctx.divisors
            or ctx.beta_weights != self.ctx.beta_weights
        ):
            raise ContractError("contexts disagree on ring shape")
        return GradedSeries(ctx, self.terms)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: GradedSeries) -> GradedSeries:
        self._require_same_ctx(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + c
        return GradedSeries(self.ctx, out)

    def __neg__(self) -> GradedSeries:
        return self.scale(-1)

    def __sub__(self, other: GradedSeries) -> GradedSeries:
        return self + (-other)

    def scale(self, q: Fraction | int) -> GradedSeries:
        q = rat(q)
        if not q:
            return GradedSeries.zero(self.ctx)
        return GradedSeries(self.ctx, {k: c * q for k, c in self.terms.items()})

    def __mul__(self, other: GradedSeries | Fraction | int) -> GradedSeries:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._require_same_ctx(other)
        ring = self.ctx.ring
        out: dict[TermKey, Fraction] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                if any(ka.sector) and any(kb.sector):
                    raise ContractError(
                        "product of two twisted-sector terms is outside this engine"
                    )
                mono = ring.mul_mono(ka.mono, kb.mono)
                if mono is None:
                    continue
                key = TermKey(
                    beta=tuple(a + b for a, b in zip(ka.beta, kb.beta)),
                    zpow=ka.zpow + kb.zpow,
                    xexp=merge_xexp(ka.xexp, kb.xexp),
                    sector=ka.sector if any(ka.sector) else kb.sector,
                    mono=mono,
                    lam=tuple(a + b for a, b in zip(ka.lam, kb.lam)),
                )
                if not self.ctx.keeps(key):
                    continue
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return GradedSeries(self.ctx, out)

    __rmul__ = __mul__

    # -- cheap special multiplications --------------------------------------

    def times_class(self, value: CohClass) -> GradedSeries:
        return self * GradedSeries.from_class(self.ctx, value)

    def shift_z(self, p: int) -> GradedSeries:
        out = {}
        for key, c in self.terms.items():
            key = key._replace(zpow=key.zpow + p)
            if self.ctx.keeps(key):
                out[key] = c
        return GradedSeries(self.ctx, out)

    # -- selection ----------------------------------------------------------

    def coefficient(
        self,
        *,
        beta=_UNSET,
        zpow=_UNSET,
        xexp=_UNSET,
        sector=_UNSET,
        mono=_UNSET,
        lam=_UNSET,
    ) -> GradedSeries:
        """Sub-series of keys matching the fixed components, components removed.

        The empty result is the zero series.
        """
        base = self.ctx.zero_key()
        out: dict[TermKey, Fraction] = {}
        for key, c in self.terms.items():
            if beta is not _UNSET and key.beta != tuple(beta):
                continue
            if zpow is not _UNSET and key.zpow != zpow:
                continue
            if xexp is not _UNSET and key.xexp != tuple(xexp):
                continue
            if sector is not _UNSET and key.sector != tuple(sector):
                continue
            if mono is not _UNSET and key.mono != tuple(mono):
                continue
            if lam is not _UNSET and key.lam != tuple(lam):
                continue
            new = TermKey(
                beta=base.beta if beta is not _UNSET else key.beta,
                zpow=0 if zpow is not _UNSET else key.zpow,
                xexp=() if xexp is not _UNSET else key.xexp,
                sector=base.sector if sector is not _UNSET else key.sector,
                mono=base.mono if mono is not _UNSET else key.mono,
                lam=base.lam if lam is not _UNSET else key.lam,
            )
            out[new] = out.get(new, Fraction(0)) + c
        return GradedSeries(self.ctx, out)

    def beta_slice(self, beta: tuple[int, ...]) -> GradedSeries:
        """Terms of one curve class, with the class kept in the keys."""
        beta = tuple(beta)
        return GradedSeries(
            self.ctx, {k: c for k, c in self.terms.items() if k.beta == beta}
        )

    def scalar(self) -> Fraction:
        """The coefficient of the neutral key (constant term)."""
        return self.terms.get(self.ctx.zero_key(), Fraction(0))

    def betas(self) -> list[tuple[int, ...]]:
        return sorted({k.beta for k in self.terms})

    # -- equivariant parameters ---------------------------------------------

    def lambda_degree(self, index: int) -> int:
        return max((k.lam[index] for k in self.terms), default=0)

    def lambda_coefficient(self, index: int, power: int) -> GradedSeries:
        """Coefficient of lam_index^power, that exponent removed."""
        out = {}
        for key, c in self.terms.items():
            if key.lam[index] != power:
                continue
            lam = list(key.lam)
            lam[index] = 0
            out[key._replace(lam=tuple(lam))] = c
        return GradedSeries(self.ctx, out)

    def times_lambda(self, index: int) -> GradedSeries:
        out = {}
        for key, c in self.terms.items():
            lam = list(key.lam)
            lam[index] += 1
            out[key._replace(lam=tuple(lam))] = c
        return GradedSeries(self.ctx, out)

    def without_lambda(self) -> GradedSeries:
        """Drop every key carrying an equivariant parameter (set all lam_i = 0)."""
        return GradedSeries(
            self.ctx, {k: c for k, c in self.terms.items() if not any(k.lam)}
        )

    def __repr__(self) -> str:
        if self.is_zero:
            return "GradedSeries(0)"
        bits = []
        for key, c in self.ordered_terms()[:8]:
            bits.append(f"{c}*{key}")
        more = "" if len(self.terms) <= 8 else f" ... ({len(self.terms)} terms)"
        return "GradedSeries(" + "; ".join(bits) + more + ")"


def series_sum(ctx: SeriesContext, parts: Iterable[GradedSeries]) -> GradedSeries:
    acc: dict[TermKey, Fraction] = {}
    for part in parts:
        if part.ctx != ctx:
            raise ContractError("series have different ring or truncation contexts")
        for key, c in part.terms.items():
            acc[key] = acc.get(key, Fraction(0)) + c
    return GradedSeries(ctx, acc)


def series_prod(ctx: SeriesContext, parts: Iterable[GradedSeries]) -> GradedSeries:
    out = GradedSeries.one(ctx)
    for part in parts:
        out = out * part
    return out


# ---------------------------------------------------------------------------
# Inversion and exact division
# ---------------------------------------------------------------------------


def invert_z_linear(
    ctx: SeriesContext, zcoeff: Fraction | int, cls: CohClass
) -> GradedSeries:
    """Inverse of the linear factor (zcoeff*z + cls) as a finite expansion.

    Nilpotency of ``cls`` makes the geometric series

        (c z)^{-1} sum_{k>=0} (-cls / (c z))^k

    terminate.  A vanishing z-coefficient would require inverting a ring
    element, which this engine does not do.
    """
    c = rat(zcoeff)
    if not c:
        raise NotInvertibleError("factor has no z part; only z-linear factors invert")
    out = GradedSeries.zero(ctx)
    power = CohClass.one(ctx.ring)
    sign = Fraction(1)
    k = 0
    while not power.is_zero:
        piece = GradedSeries.from_class(ctx, power.scale(sign / c ** (k + 1)))
        out = out + piece.shift_z(-k - 1)
        power = power * cls
        sign = -sign
        k += 1
    return out


def exact_divide_linear(num: GradedSeries, cls: CohClass, index: int) -> GradedSeries:
    """Exact quotient num / (lam_index + cls).

    Synthetic division in the equivariant parameter, top degree down.  A
    nonzero remainder means the claimed divisibility is false and raises
    DivisibilityError: that signals a wrong identity, never a rounding issue.
    """
    if num.is_zero:
        return num
    top = num.lambda_degree(index)
    coeffs = [num.lambda_coefficient(index, k) for k in range(top + 1)]
    cls_series = GradedSeries.from_class(num.ctx, cls)
    quotient: list[GradedSeries] = [GradedSeries.zero(num.ctx)] * (top + 1)
    carry = GradedSeries.zero(num.ctx)
    for k in range(top, 0, -1):
        q = coeffs[k] - carry
        quotient[k - 1] = q
        carry = cls_series * q
    remainder = coeffs[0] - carry
    if not remainder.is_zero:
        raise DivisibilityError(
            f"series is not divisible by (lam_{index} + {cls!r}); "
            f"remainder has {len(remainder)} terms"
        )
    out = GradedSeries.zero(num.ctx)
    for k, q in enumerate(quotient):
        acc = {}
        for key, c in q.terms.items():
            lam = list(key.lam)
            lam[index] += k
            acc[key._replace(lam=tuple(lam))] = c
        out = out + GradedSeries(num.ctx, acc)
    return out


def set_lambda_zero(series: GradedSeries) -> GradedSeries:
    """Specialize every equivariant parameter to zero."""
    return series.without_lambda()
