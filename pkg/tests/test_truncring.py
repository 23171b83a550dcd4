import random
from fractions import Fraction

import pytest

from starquant.truncring import (TruncNum, tmat_identity, tmat_inverse, tmat_mul,
                                 tmat_vec, trunc_solve)


def _rand(rng, order):
    return TruncNum(order, [Fraction(rng.randint(-3, 3)) for _ in range(order + 1)])


def test_ring_axioms_random():
    rng = random.Random(555)
    for _ in range(40):
        order = rng.randint(0, 4)
        a, b, c = (_rand(rng, order) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == TruncNum.zero(order)
        assert a * TruncNum.one(order) == a


def test_truncation():
    a = TruncNum.hbar(2, 2)
    assert (a * a).is_zero()
    assert TruncNum.hbar(2, 3).is_zero()


def test_units_and_inverse():
    a = TruncNum(3, [Fraction(2), Fraction(1), Fraction(0), Fraction(-1)])
    assert a.is_unit()
    assert a * a.inverse() == TruncNum.one(3)
    nilpotent = TruncNum.hbar(3, 1)
    assert not nilpotent.is_unit()
    with pytest.raises(ZeroDivisionError):
        nilpotent.inverse()


def test_unit_iff_nonzero_constant_term():
    rng = random.Random(77)
    for _ in range(20):
        a = _rand(rng, 3)
        if a.is_unit():
            assert a * a.inverse() == TruncNum.one(3)
        else:
            assert a.coeffs[0] == 0


def test_hbar_substitution_scale():
    a = TruncNum(2, [Fraction(1), Fraction(2), Fraction(3)])
    assert a.substitute_hbar_scale(Fraction(1, 2)) == \
        TruncNum(2, [Fraction(1), Fraction(1), Fraction(3, 4)])


def test_order_mismatch():
    with pytest.raises(ValueError):
        TruncNum.one(2) + TruncNum.one(3)


def test_trunc_solve_and_inverse():
    rng = random.Random(42)
    order = 2
    for _ in range(10):
        n = rng.randint(1, 3)
        while True:
            matrix = [[_rand(rng, order) for _ in range(n)] for _ in range(n)]
            if tmat_inverse(matrix) is not None:
                break
        inverse = tmat_inverse(matrix)
        assert tmat_mul(matrix, inverse) == tmat_identity(n, order)
        rhs = [_rand(rng, order) for _ in range(n)]
        solution = trunc_solve(matrix, rhs)
        assert solution is not None
        assert tmat_vec(matrix, solution) == rhs


def test_trunc_solve_inconsistent():
    order = 1
    zero = TruncNum.zero(order)
    one = TruncNum.one(order)
    # 0 * x = 1 has no solution
    assert trunc_solve([[zero]], [one]) is None
    # hbar * x = 1 has no solution in the truncated ring
    assert trunc_solve([[TruncNum.hbar(order, 1)]], [one]) is None


def test_trunc_solve_overdetermined_membership():
    # membership of a vector in the span of column vectors with independent
    # constant terms (the regime the docstring promises completeness for)
    order = 2
    col = [TruncNum(order, [1, 2, 0]), TruncNum(order, [0, 1, 1])]
    target = [c * TruncNum(order, [3, -1, 2]) for c in col]
    matrix = [[c] for c in col]
    sol = trunc_solve(matrix, target)
    assert sol is not None and sol[0] == TruncNum(order, [3, -1, 2])
    bad = [target[0], target[1] + TruncNum.one(order)]
    assert trunc_solve(matrix, bad) is None
