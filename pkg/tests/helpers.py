"""Shared generators and independent oracles for the test suite.

The bracket and Jacobiator here are written directly against Poly so they
stay independent of the Schouten/star machinery they are used to check.
"""

from __future__ import annotations

import random
from fractions import Fraction

from starquant.linalg import mat_inv
from starquant.poly import Poly
from starquant.polyvector import Bivector, transform_bivector


def oracle_bracket(gamma: Bivector, f: Poly, g: Poly) -> Poly:
    """{f, g} from the entry table alone: sum over i<j of
    gamma^ij (d_i f d_j g - d_j f d_i g)."""
    acc = Poly.zero(gamma.nvars)
    for (i, j), entry in gamma.entries.items():
        acc = acc + entry * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i))
    return acc


def oracle_jacobiator(gamma: Bivector, f: Poly, g: Poly, h: Poly) -> Poly:
    """{{f,g},h} + {{g,h},f} + {{h,f},g}, the brute-force Poisson test."""
    br = lambda a, b: oracle_bracket(gamma, a, b)
    return br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)


def oracle_jacobi_on_coordinates(gamma: Bivector) -> dict:
    """Jacobiator on every strictly increasing coordinate triple."""
    n = gamma.nvars
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                out[(i, j, k)] = oracle_jacobiator(
                    gamma, Poly.variable(n, i), Poly.variable(n, j), Poly.variable(n, k))
    return out


def rand_poly(rng: random.Random, nvars: int, max_degree: int,
              max_terms: int = 3, coef_range: int = 2) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exponent = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            exponent[rng.randrange(nvars)] += 1
        coef = Fraction(rng.randint(-coef_range, coef_range))
        if coef:
            key = tuple(exponent)
            terms[key] = terms.get(key, Fraction(0)) + coef
    return Poly(nvars, terms)


def rand_bivector(rng: random.Random, nvars: int, max_degree: int,
                  density: float = 0.8) -> Bivector:
    entries = {}
    for i in range(nvars):
        for j in range(i + 1, nvars):
            if rng.random() < density:
                poly = rand_poly(rng, nvars, max_degree)
                if not poly.is_zero():
                    entries[(i, j)] = poly
    return Bivector(nvars, entries)


def rand_constant_bivector(rng: random.Random, nvars: int,
                           nonzero_entries: int | None = None) -> Bivector:
    pairs = [(i, j) for i in range(nvars) for j in range(i + 1, nvars)]
    if nonzero_entries is not None:
        rng.shuffle(pairs)
        pairs = pairs[:nonzero_entries]
    entries = {}
    for key in pairs:
        value = Fraction(rng.randint(-3, 3))
        if not value:
            value = Fraction(rng.choice([1, -1]), rng.choice([1, 2]))
        entries[key] = Poly.const(nvars, value)
    return Bivector(nvars, entries)


def rand_unimodular(rng: random.Random, n: int, shears: int = 3):
    """Product of integer shears and swaps; always invertible over Q."""
    mat = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]

    def shear(a, b, c):
        for col in range(n):
            mat[a][col] += c * mat[b][col]

    for _ in range(shears):
        a, b = rng.sample(range(n), 2)
        shear(a, b, Fraction(rng.choice([-2, -1, 1, 2])))
    if rng.random() < 0.5:
        a, b = rng.sample(range(n), 2)
        mat[a], mat[b] = mat[b], mat[a]
    assert mat_inv(mat) is not None
    return mat


def rand_quadratic_poisson(rng: random.Random, n: int) -> Bivector:
    """Random homogeneous quadratic Poisson bivector.

    Seeded with the multiplicative family {x_i, x_j} = c_ij x_i x_j (always
    Poisson) and densified by a random unimodular change of coordinates,
    which preserves both the Jacobi identity and the quadratic grading.
    """
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = Fraction(rng.randint(-2, 2))
            if c:
                exponent = [0] * n
                exponent[i] += 1
                exponent[j] += 1
                entries[(i, j)] = Poly.monomial(n, exponent, c)
    gamma = Bivector(n, entries)
    return transform_bivector(gamma, rand_unimodular(rng, n))


def rand_deg2_poisson(rng: random.Random) -> Bivector:
    """Random Poisson bivector on 3 variables of coefficient degree <= 2,
    drawn from a few structurally Poisson families."""
    n = 3
    kind = rng.randrange(4)
    if kind == 0:     # constant
        return rand_constant_bivector(rng, n)
    if kind == 1:     # so(3)-type linear (Lie bracket)
        x1, x2, x3 = (Poly.variable(n, i) for i in range(n))
        c = Fraction(rng.choice([1, -1, 2]))
        return Bivector(n, {(0, 1): x3 * c, (1, 2): x1 * c, (0, 2): -x2 * c})
    if kind == 2:     # {x1,x2} = P(x3), x3 central
        coefs = [Fraction(rng.randint(-2, 2)) for _ in range(3)]
        poly = Poly(n, {(0, 0, d): c for d, c in enumerate(coefs) if c})
        return Bivector(n, {(0, 1): poly} if not poly.is_zero() else {})
    return rand_quadratic_poisson(rng, n)
