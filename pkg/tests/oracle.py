"""Independent mini-implementations used as oracles.

Nothing here imports the package under test.  Series live in
Q[P]/(P^(dim+1)) tensor Laurent z, stored as {(p_exp, z_exp): Fraction};
inversion is degree-by-degree synthetic division in P, a different
algorithm from the package's geometric expansion.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial


def mul2(a: dict, b: dict, dim: int) -> dict:
    out: dict[tuple[int, int], Fraction] = {}
    for (pa, za), ca in a.items():
        for (pb, zb), cb in b.items():
            p = pa + pb
            if p > dim:
                continue
            key = (p, za + zb)
            out[key] = out.get(key, Fraction(0)) + ca * cb
    return {k: c for k, c in out.items() if c}


def hyper_slice(n_exp: int, d: int, dim: int) -> dict:
    """z / prod_{0<a<=d} (P + a z)^n_exp, exact, by synthetic inversion."""
    f = {(0, 0): Fraction(1)}
    for a in range(1, d + 1):
        for _ in range(n_exp):
            f = mul2(f, {(1, 0): Fraction(1), (0, 1): Fraction(a)}, dim)
    f_by_p: list[dict[int, Fraction]] = [dict() for _ in range(dim + 1)]
    for (p, zp), c in f.items():
        f_by_p[p][zp] = c
    assert len(f_by_p[0]) == 1, "leading z-part must be a monomial"
    ((zp0, c0),) = f_by_p[0].items()
    g_by_p: list[dict[int, Fraction]] = [dict() for _ in range(dim + 1)]
    g_by_p[0][-zp0] = 1 / c0
    for p in range(1, dim + 1):
        acc: dict[int, Fraction] = {}
        for j in range(1, p + 1):
            for z1, c1 in f_by_p[j].items():
                for z2, c2 in g_by_p[p - j].items():
                    acc[z1 + z2] = acc.get(z1 + z2, Fraction(0)) + c1 * c2
        for zp, c in acc.items():
            val = -c / c0
            if val:
                g_by_p[p][zp - zp0] = val
    out = {}
    for p in range(dim + 1):
        for zp, c in g_by_p[p].items():
            out[(p, zp + 1)] = c
    return out


def trinomial_constant_term(power: int) -> int:
    """Constant term of (x + y + 1/(xy))^power by the multinomial theorem."""
    if power % 3:
        return 0
    d = power // 3
    return factorial(power) // (factorial(d) ** 3)


def binomial_constant_term(power: int) -> int:
    """Constant term of (x + 1/x)^power."""
    if power % 2:
        return 0
    return comb(power, power // 2)


def square_lattice_constant_term(power: int) -> int:
    """Constant term of (x + 1/x + y + 1/y)^power."""
    if power % 2:
        return 0
    return comb(power, power // 2) ** 2


def product_point_degree(d1: int, d2: int) -> Fraction:
    """Leading point coefficient of the degree-(d1,d2) slice on P1 x P1."""
    return Fraction(1, factorial(d1) ** 2 * factorial(d2) ** 2)
