import json
import random
from fractions import Fraction

import pytest

from starquant import serialize as ser
from starquant.algebroid import SimplicialComplex, scalar_unit_algebroid
from starquant.poly import Poly
from starquant.polyvector import Bivector, PolyVector
from starquant.rees import weyl_presentation
from starquant.star import moyal, star_solve, StarProduct
from starquant.truncring import TruncNum
from helpers import rand_bivector, rand_constant_bivector, rand_poly


def test_fraction_strings():
    assert ser.fraction_to_str(Fraction(-3, 7)) == "-3/7"
    assert ser.fraction_to_str(Fraction(5)) == "5/1"
    assert ser.fraction_from_str("5") == Fraction(5)
    assert ser.fraction_from_str("-3/7") == Fraction(-3, 7)
    with pytest.raises(ser.SchemaError):
        ser.fraction_from_str("1/0")
    with pytest.raises(ser.SchemaError):
        ser.fraction_from_str("x")


def test_poly_roundtrip_and_canonical_order():
    rng = random.Random(1)
    for _ in range(10):
        poly = rand_poly(rng, 3, 4)
        blob = ser.poly_to_json(poly)
        assert ser.poly_from_json(blob) == poly
        degrees = [sum(t["exp"]) for t in blob["terms"]]
        assert degrees == sorted(degrees, reverse=True)


def test_bivector_roundtrip():
    rng = random.Random(2)
    gamma = rand_bivector(rng, 3, 2)
    blob = ser.bivector_to_json(gamma)
    back, names = ser.bivector_from_json(blob)
    assert back == gamma
    assert names == ["x1", "x2", "x3"]


def test_bivector_schema_errors():
    with pytest.raises(ser.SchemaError):
        ser.bivector_from_json({"vars": ["x1", "x2"]})
    with pytest.raises(ser.SchemaError):
        ser.bivector_from_json({"vars": ["x1", "x2"],
                                "entries": [{"i": 1, "j": 0, "poly": {
                                    "vars": ["x1", "x2"], "terms": []}}]})


def test_star_product_roundtrip():
    gamma = rand_constant_bivector(random.Random(3), 3)
    product = moyal(gamma, 3)
    blob = ser.star_product_to_json(product)
    assert ser.star_product_from_json(blob) == product


def test_star_product_schema_guard():
    # B_0 must be the multiplication operator
    blob = {"vars": ["x1"], "order": 0, "ops": [{"k": 0, "summands": []}]}
    with pytest.raises(ser.SchemaError):
        ser.star_product_from_json(blob)


def test_obstruction_serialization():
    x1 = Poly.variable(3, 0)
    x3 = Poly.variable(3, 2)
    gamma = Bivector(3, {(0, 1): x3 * x3, (0, 2): x1})
    from starquant.star import Obstruction
    result = star_solve(gamma, 2)
    assert isinstance(result, Obstruction)
    blob = ser.obstruction_to_json(result)
    assert blob["order"] == 2
    assert blob["hkr"]["degree"] == 3
    assert blob["residual"]["summands"]


def test_truncnum_roundtrip():
    value = TruncNum(2, [Fraction(1, 2), Fraction(-3), Fraction(0)])
    assert ser.truncnum_from_json(ser.truncnum_to_json(value), 2) == value


def test_quadratic_data_roundtrip():
    from starquant.quadratic import quant_map
    x1, x2 = Poly.variable(2, 0), Poly.variable(2, 1)
    data = quant_map(Bivector(2, {(0, 1): x1 * x2}), 2)
    blob = ser.quadratic_data_to_json(data)
    back = ser.quadratic_data_from_json(blob)
    assert back.r2 == data.r2 and back.r3 == data.r3


def test_presentation_roundtrip():
    base = weyl_presentation()
    blob = ser.presentation_to_json(base)
    back = ser.presentation_from_json(blob)
    assert back.generators == base.generators
    assert back.weights == base.weights
    assert back.rules == base.rules


def test_complex_and_algebroid_roundtrip():
    complex_ = SimplicialComplex.full_simplex(3)
    assert ser.complex_from_json(ser.complex_to_json(complex_)).faces == complex_.faces
    data = scalar_unit_algebroid(complex_, {(0, 1, 2): Fraction(1, 3)}, 1)
    blob = ser.algebroid_to_json(data)
    back = ser.algebroid_from_json(blob)
    assert back.face_units == data.face_units
    assert back.edge_map(0, 1) == data.edge_map(0, 1)


def test_algebroid_schema_error_on_bad_table():
    complex_ = SimplicialComplex.full_simplex(2)
    data = scalar_unit_algebroid(complex_, {}, 1)
    blob = ser.algebroid_to_json(data)
    blob["algebras"][0]["table"][0][0] = blob["algebras"][0]["table"][0][1]
    with pytest.raises(ser.SchemaError):
        ser.algebroid_from_json(blob)


def test_serialization_deterministic_bytes():
    rng = random.Random(9)
    gamma = rand_bivector(rng, 3, 2)
    one = json.dumps(ser.bivector_to_json(gamma), sort_keys=True)
    two = json.dumps(ser.bivector_to_json(gamma), sort_keys=True)
    assert one == two
