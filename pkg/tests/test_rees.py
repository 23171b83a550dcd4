import random
from fractions import Fraction

import pytest

from starquant.poly import Poly
from starquant.polyvector import Bivector
from starquant.rees import (FilteredPresentation, UnbalancedRelationError,
                            filtration_compat_check, nc_term,
                            rees_from_filtration, verify_rees, weyl_presentation)
from helpers import rand_bivector


def test_weyl_rees_relation():
    base = weyl_presentation()
    rees, report = rees_from_filtration(base, degree_bound=6)
    assert report.ok
    assert report.words_checked == 2 + 4 + 8 + 16 + 32 + 64
    # the rebalanced rule: yx -> xy - t^2, i.e. xy - yx = t^2
    assert rees.normal_form(("y", "x")) == {("x", "y"): Fraction(1),
                                            ("t", "t"): Fraction(-1)}


def test_weyl_rees_t_central():
    base = weyl_presentation()
    rees, _ = rees_from_filtration(base)
    for g in ("x", "y"):
        assert rees.normal_form(("t", g)) == rees.normal_form((g, "t"))


def test_weyl_t_one_recovers_input():
    base = weyl_presentation()
    rees, _ = rees_from_filtration(base)
    for word in [("y", "x"), ("y", "y", "x"), ("y", "x", "y", "x")]:
        assert rees.set_t_one(rees.normal_form(word)) == base.normal_form(word)


def test_weyl_associated_graded_commutative():
    base = weyl_presentation()
    rees, _ = rees_from_filtration(base)
    nf = rees.normal_form(("y", "x", "y"))
    dropped = rees.drop_t(nf)
    assert dropped == {("x", "y", "y"): Fraction(1)}


def test_commutative_free_rees():
    base = FilteredPresentation(["a", "b"], {"a": 1, "b": 2}, commutative=True)
    rees, report = rees_from_filtration(base, degree_bound=4)
    assert report.ok
    assert rees.weights["t"] == 1
    assert rees.normal_form(("b", "a", "t")) == {("a", "b", "t"): Fraction(1)}


def test_unbalanced_relation_rejected():
    # xy - yx = x^3 raises weight (3 > 2): not a filtered relation
    with pytest.raises(UnbalancedRelationError):
        FilteredPresentation(
            ["x", "y"], {"x": 1, "y": 1},
            {("y", "x"): {("x", "y"): Fraction(1), ("x", "x", "x"): Fraction(-1)}})


def test_weighted_weyl_balances_differently():
    # with weights (1,2) the Weyl relation balances at weight 3: yx -> xy - t^3
    base = weyl_presentation(1, 2)
    rees, report = rees_from_filtration(base, degree_bound=4)
    assert report.ok
    assert rees.normal_form(("y", "x")) == {("x", "y"): Fraction(1),
                                            ("t", "t", "t"): Fraction(-1)}


def test_rewrites_confluent_both_strategies():
    base = weyl_presentation()
    ok, witness = base.spot_check_confluence(5)
    assert ok, witness


def test_normal_form_polynomial_input():
    base = weyl_presentation()
    p = nc_term(("y", "x"), 2)
    assert base.normal_form(p) == {("x", "y"): Fraction(2), (): Fraction(-2)}


# -- filtration versus bracket -------------------------------------------------------

def test_unit_weights_degree_two_compatible():
    x1, x2 = Poly.variable(3, 0), Poly.variable(3, 1)
    gamma = Bivector(3, {(0, 1): x1 * x2, (1, 2): x1 * x1})
    report = filtration_compat_check(gamma, [1, 1, 1], 6)
    assert report.level == "compatible"
    assert report.max_excess == 0


def test_unit_weights_degree_one_strong():
    x3 = Poly.variable(3, 2)
    gamma = Bivector(3, {(0, 1): x3})
    report = filtration_compat_check(gamma, [1, 1, 1], 6)
    assert report.level == "strong"
    assert report.max_excess == -1


def test_unit_weights_cubic_incompatible():
    x1 = Poly.variable(3, 0)
    gamma = Bivector(3, {(0, 1): x1 ** 3})
    report = filtration_compat_check(gamma, [1, 1, 1], 6)
    assert report.level == "incompatible"
    assert report.max_excess == 1
    assert report.witness is not None
    ea, eb, got, bound = report.witness
    # first violating pair in graded-lex order: {x1, x2} = x1^3
    assert sum(ea) + sum(eb) == 2 and got == 3


def test_monomial_excess_matches_degree_shift():
    # single-monomial brackets of degree d have excess exactly d - 2
    n = 2
    for d in range(4):
        for split in range(d + 1):
            exponent = (split, d - split)
            gamma = Bivector(n, {(0, 1): Poly.monomial(n, exponent)})
            report = filtration_compat_check(gamma, [1, 1], 6)
            assert report.max_excess == d - 2


def test_weighted_filtration_for_central_cubic():
    # {x1,x2} = x3^3 is weight-compatible for weights (2,2,1)
    x3 = Poly.variable(3, 2)
    gamma = Bivector(3, {(0, 1): x3 ** 3})
    report = filtration_compat_check(gamma, [2, 2, 1], 8)
    assert report.level in ("strong", "compatible")
    unit = filtration_compat_check(gamma, [1, 1, 1], 6)
    assert unit.level == "incompatible"


def test_zero_bracket_reports_strong():
    report = filtration_compat_check(Bivector.zero(2), [1, 1], 4)
    assert report.level == "strong"
    assert report.max_excess is None


def test_bad_weights_rejected():
    with pytest.raises(ValueError):
        filtration_compat_check(Bivector.zero(2), [1, 0], 4)
