import random
from fractions import Fraction
from math import comb, factorial

import pytest

from starquant.bidiff import BiDiffOp
from starquant.poly import HSeries, Poly
from starquant.polyvector import Bivector, jacobi_check, schouten_square
from starquant.star import (AnsatzSpec, Obstruction, StarProduct, assoc_residual,
                            hkr_class, moyal, star_multiply, star_solve)
from helpers import rand_constant_bivector, rand_poly

HKR_CONSTANT = 2  # calibrated once in test_hkr_constant_symbolic below


def _vars(n):
    return tuple(Poly.variable(n, i) for i in range(n))


# -- Moyal ----------------------------------------------------------------------

def test_moyal_basic_products():
    gamma = Bivector(2, {(0, 1): Poly.one(2)})
    product = moyal(gamma, 2)
    x, y = _vars(2)
    assert star_multiply(product, x, y) == HSeries(2, [x * y, Poly.one(2), Poly.zero(2)])
    # x^2 * y^2 = x^2 y^2 + 4 h x y + 2 h^2
    assert product.multiply(x * x, y * y) == HSeries(
        2, [x * x * y * y, x * y * 4, Poly.const(2, 2)])
    assert product.commutator(x, y) == HSeries(2, [Poly.zero(2), Poly.const(2, 2),
                                                   Poly.zero(2)])


def test_moyal_zero_bivector_is_commutative():
    product = moyal(Bivector.zero(3), 4)
    assert all(op.is_zero() for op in product.ops[1:])
    rng = random.Random(0)
    f, g = rand_poly(rng, 3, 3), rand_poly(rng, 3, 3)
    assert product.multiply(f, g) == HSeries.from_poly(f * g, 4)


def test_moyal_requires_constant_entries():
    with pytest.raises(ValueError):
        moyal(Bivector(2, {(0, 1): Poly.variable(2, 0)}), 2)


def test_moyal_operator_coefficients():
    gamma = Bivector(2, {(0, 1): Poly.const(2, Fraction(1, 2))})
    product = moyal(gamma, 3)
    # B_k = P^k / k! with P = (1/2)(d1 x d2 - d2 x d1)
    for k in (2, 3):
        coef = product.ops[k].terms[((k, 0), (0, k))]
        assert coef == Poly.const(2, Fraction(1, 2) ** k / factorial(k))


def test_moyal_unit_laws_and_scalar_bilinearity():
    rng = random.Random(9)
    gamma = rand_constant_bivector(rng, 3)
    product = moyal(gamma, 3)
    f = rand_poly(rng, 3, 3)
    one = Poly.one(3)
    assert product.multiply(one, f) == HSeries.from_poly(f, 3)
    assert product.multiply(f, one) == HSeries.from_poly(f, 3)
    scalars = [Fraction(1), Fraction(-2), Fraction(0), Fraction(1, 3)]
    g = rand_poly(rng, 3, 3)
    lifted = HSeries.from_poly(g, 3).scale_series(scalars)
    assert product.multiply(f, lifted) == \
        product.multiply(f, g).scale_series(scalars)


def test_commutator_is_twice_bracket_to_second_order():
    rng = random.Random(31)
    for _ in range(10):
        n = rng.randint(2, 4)
        gamma = rand_constant_bivector(rng, n)
        product = moyal(gamma, 3)
        f, g = rand_poly(rng, n, 3), rand_poly(rng, n, 3)
        comm = product.commutator(f, g)
        assert comm.coeffs[0].is_zero()
        assert comm.coeffs[1] == gamma.bracket(f, g) * 2
        assert comm.coeffs[2].is_zero()  # O(hbar^3)


def test_order_zero_is_plain_multiplication():
    rng = random.Random(2)
    gamma = rand_constant_bivector(rng, 2)
    product = moyal(gamma, 2)
    f, g = rand_poly(rng, 2, 3), rand_poly(rng, 2, 3)
    assert product.multiply(f, g).coeffs[0] == f * g


def test_series_order_mismatch_rejected():
    product = moyal(Bivector.zero(2), 2)
    with pytest.raises(ValueError):
        product.multiply(HSeries.from_poly(Poly.one(2), 3), Poly.one(2))


# -- associativity residual -------------------------------------------------------

def test_moyal_residual_vanishes():
    rng = random.Random(77)
    for _ in range(6):
        n = rng.randint(1, 3)
        gamma = rand_constant_bivector(rng, n)
        product = moyal(gamma, 6)
        assert all(assoc_residual(product, k).is_zero() for k in range(7))


def test_residual_fast_path_matches_generic():
    from starquant.star import _assoc_residual_generic
    rng = random.Random(13)
    gamma = rand_constant_bivector(rng, 3)
    product = moyal(gamma, 4)
    for k in range(5):
        assert assoc_residual(product, k) == _assoc_residual_generic(product, k)
    # a deliberately broken truncation has a nonzero residual in both paths
    broken = StarProduct(3, 2, [product.ops[0], product.ops[1], BiDiffOp.zero(3)])
    if not gamma.is_zero():
        k2 = assoc_residual(broken, 2)
        assert k2 == _assoc_residual_generic(broken, 2)
        assert not k2.is_zero()


def test_commutative_truncation_residual_zero():
    product = StarProduct(2, 3, [BiDiffOp.multiplication(2)] + [BiDiffOp.zero(2)] * 3)
    assert all(assoc_residual(product, k).is_zero() for k in range(1, 4))


def test_first_order_always_associative():
    # dH(B1) = 0 for any one-derivative-per-slot B1, so k=1 residual vanishes
    rng = random.Random(6)
    x3 = Poly.variable(3, 2)
    gamma = Bivector(3, {(0, 1): x3 * x3, (0, 2): Poly.variable(3, 0)})
    product = StarProduct(3, 1, [BiDiffOp.multiplication(3),
                                 BiDiffOp.bivector_pairing(gamma)])
    assert assoc_residual(product, 1).is_zero()


def test_residual_detects_non_jacobi():
    x1, _, x3 = _vars(3)
    gamma = Bivector(3, {(0, 1): x3 * x3, (0, 2): x1})
    product = StarProduct(3, 2, [BiDiffOp.multiplication(3),
                                 BiDiffOp.bivector_pairing(gamma),
                                 BiDiffOp.zero(3)])
    assert not assoc_residual(product, 2).is_zero()


# -- HKR extraction ----------------------------------------------------------------

def test_hkr_zero_cases():
    from starquant.bidiff import TriDiffOp
    assert hkr_class(TriDiffOp.zero(3)).is_zero()
    gamma = rand_constant_bivector(random.Random(4), 3)
    product = moyal(gamma, 3)
    assert hkr_class(assoc_residual(product, 2)).is_zero()


def test_hkr_constant_symbolic():
    """Calibrate the residual-to-Schouten constant on a generic instance.

    The three main variables carry a linear bivector whose nine coefficients
    are themselves fresh variables, so the comparison below is an identity of
    polynomials in all twelve variables: hkr(residual) = c [gamma,gamma]
    for the single rational constant c = 2.
    """
    n = 12  # x1,x2,x3 plus nine symbolic coefficients
    def lin(cvars):
        terms = {}
        for offset, c_index in enumerate(cvars):
            e = [0] * n
            e[offset] = 1      # multiplies x_{offset+1}
            e[c_index] = 1
            terms[tuple(e)] = Fraction(1)
        return Poly(n, terms)

    gamma = Bivector(n, {(0, 1): lin([3, 4, 5]),
                         (0, 2): lin([6, 7, 8]),
                         (1, 2): lin([9, 10, 11])})
    product = StarProduct(n, 2, [BiDiffOp.multiplication(n),
                                 BiDiffOp.bivector_pairing(gamma),
                                 BiDiffOp.zero(n)])
    residual = assoc_residual(product, 2)
    square = schouten_square(gamma)
    extracted = hkr_class(residual)
    # solve for c on one component, then demand the full identity
    key = (0, 1, 2)
    lead_num = extracted.component(key)
    lead_den = square.component(key)
    assert not lead_den.is_zero()
    ratio = next(iter(lead_num.terms.values())) / lead_den.terms[next(iter(lead_num.terms))]
    assert ratio == HKR_CONSTANT
    assert extracted == square.scale(HKR_CONSTANT)


def test_hkr_kills_hochschild_coboundaries():
    # adding dH(B) to a residual does not change its hkr class
    from starquant.bidiff import compose_first, compose_second
    rng = random.Random(8)
    n = 3
    b = BiDiffOp(n, {((1, 1, 0), (0, 0, 1)): rand_poly(rng, n, 2),
                     ((1, 0, 0), (0, 2, 0)): rand_poly(rng, n, 1)})
    mult = BiDiffOp.multiplication(n)
    coboundary = (compose_first(b, mult) - compose_second(b, mult)
                  + compose_first(mult, b) - compose_second(mult, b))
    assert hkr_class(coboundary).is_zero()


# -- the solver ---------------------------------------------------------------------

def test_star_solve_constant_matches_moyal_commutators():
    rng = random.Random(100)
    gamma = rand_constant_bivector(rng, 3)
    solved = star_solve(gamma, 3)
    assert isinstance(solved, StarProduct)
    reference = moyal(gamma, 3)
    for i in range(3):
        for j in range(3):
            xi, xj = Poly.variable(3, i), Poly.variable(3, j)
            assert solved.commutator(xi, xj) == reference.commutator(xi, xj)
            expected = HSeries(3, [Poly.zero(3), gamma.entry(i, j) * 2,
                                   Poly.zero(3), Poly.zero(3)])
            assert solved.commutator(xi, xj) == expected


def test_star_solve_linear_lowers_degree():
    x1, x2, x3 = _vars(3)
    gamma = Bivector(3, {(0, 1): x3, (1, 2): x1, (0, 2): -x2})
    solved = star_solve(gamma, 3)
    assert isinstance(solved, StarProduct)
    assert all(assoc_residual(solved, k).is_zero() for k in range(4))
    rng = random.Random(44)
    for k in range(1, 4):
        op = solved.ops[k]
        for _ in range(6):
            u = rand_poly(rng, 3, 3)
            v = rand_poly(rng, 3, 3)
            image = op.apply(u, v)
            if not image.is_zero():
                assert image.total_degree() <= max(u.total_degree()
                                                   + v.total_degree() - k, 0)


def test_star_solve_commutator_for_linear_bracket():
    # {x, y} = y, i.e. gamma^12 = y, gives x*y - y*x = 2 hbar y
    x, y = _vars(2)
    gamma = Bivector(2, {(0, 1): y})
    solved = star_solve(gamma, 3)
    assert isinstance(solved, StarProduct)
    assert solved.commutator(x, y) == HSeries(3, [Poly.zero(2), y * 2,
                                                  Poly.zero(2), Poly.zero(2)])


def test_star_solve_obstruction_class():
    x1, _, x3 = _vars(3)
    gamma = Bivector(3, {(0, 1): x3 * x3, (0, 2): x1})
    result = star_solve(gamma, 2)
    assert isinstance(result, Obstruction)
    assert result.order == 2
    assert not result.residual.is_zero()
    assert result.hkr == schouten_square(gamma).scale(HKR_CONSTANT)


def test_star_solve_scaling_equivariance():
    x1, x2, x3 = _vars(3)
    gamma = Bivector(3, {(0, 1): x1 * x2, (1, 2): x2 * x3})
    base = star_solve(gamma, 3)
    assert isinstance(base, StarProduct)
    for lam in (Fraction(2), Fraction(-1), Fraction(1, 3)):
        scaled = star_solve(gamma.scale(lam), 3)
        assert isinstance(scaled, StarProduct)
        for k in range(4):
            assert scaled.ops[k] == base.ops[k].scale(lam ** k)


def test_star_solve_quadratic_is_degree_preserving():
    rng = random.Random(123)
    from helpers import rand_quadratic_poisson
    gamma = rand_quadratic_poisson(rng, 3)
    solved = star_solve(gamma, 2, AnsatzSpec(homogeneous_only=True))
    assert isinstance(solved, StarProduct)
    for k in range(1, 3):
        for (alpha, beta), coef in solved.ops[k].terms.items():
            assert coef.is_homogeneous(sum(alpha) + sum(beta))


def _cubic_closed_form(order):
    n = 3
    p = Poly.variable(n, 2) ** 3
    ops = [BiDiffOp.multiplication(n)]
    for k in range(1, order + 1):
        coef = p ** k
        terms = {}
        for t in range(k + 1):
            alpha = (k - t, t, 0)
            beta = (t, k - t, 0)
            terms[(alpha, beta)] = coef * Fraction((-1) ** t * comb(k, t), factorial(k))
        ops.append(BiDiffOp(n, terms))
    return StarProduct(n, order, ops)


def test_cubic_central_closed_form_associative():
    product = _cubic_closed_form(6)
    assert all(assoc_residual(product, k).is_zero() for k in range(7))
    x1, x2, x3 = _vars(3)
    first = product.multiply(x1, x2).coeffs[1]
    assert first == x3 ** 3


def test_cubic_central_star_solve_succeeds():
    gamma = Bivector(3, {(0, 1): Poly.variable(3, 2) ** 3})
    solved = star_solve(gamma, 4)
    assert isinstance(solved, StarProduct)
    assert all(assoc_residual(solved, k).is_zero() for k in range(5))


def test_cubic_weighted_filtration_closure():
    # weights (2,2,1): the closed-form product respects the weight filtration,
    # so each filtration piece is a free truncated module on its monomials
    product = _cubic_closed_form(4)
    weights = (2, 2, 1)
    monos = [(a, b, c) for a in range(3) for b in range(3) for c in range(4)
             if 2 * a + 2 * b + c <= 5]
    for k in range(1, 5):
        op = product.ops[k]
        for ea in monos:
            for eb in monos:
                image = op.apply(Poly.monomial(3, ea), Poly.monomial(3, eb))
                wd = image.weighted_degree(weights)
                if wd is not None:
                    bound = sum(e * w for e, w in zip(ea, weights)) + \
                        sum(e * w for e, w in zip(eb, weights))
                    assert wd <= bound


def test_star_product_invariants_enforced():
    with pytest.raises(ValueError):
        StarProduct(2, 1, [BiDiffOp.zero(2), BiDiffOp.zero(2)])  # B_0 not mult
    with pytest.raises(ValueError):
        StarProduct(2, 1, [BiDiffOp.multiplication(2), BiDiffOp.multiplication(2)])
