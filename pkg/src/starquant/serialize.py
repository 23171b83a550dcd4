"""Canonical JSON encodings for every value the CLI reads or writes.

Rationals travel as strings "p/q" in lowest terms with q > 0 (a bare "p" is
accepted on input).  All emitters order their output canonically (graded-lex
terms, sorted faces, sorted keys), so serializing equal values gives equal
bytes.  Malformed input raises SchemaError, which the CLI maps to exit 2.
"""

from __future__ import annotations

from fractions import Fraction

from .algebroid import AlgebroidData, SCAlgebra, SimplicialComplex
from .bidiff import BiDiffOp, TriDiffOp
from .poly import HSeries, Poly, default_names, grlex_key
from .polyvector import Bivector, PolyVector
from .rees import FilteredPresentation, NCPoly
from .star import Obstruction, StarProduct
from .truncring import TruncNum


class SchemaError(ValueError):
    """Input JSON does not match the expected shape."""


def _need(obj: dict, key: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"field {key!r} has wrong type")
    return value


def fraction_to_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def fraction_from_str(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise SchemaError(f"expected rational string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {text!r}") from exc


# -- polynomials ----------------------------------------------------------------

def poly_to_json(poly: Poly, names: list[str] | None = None) -> dict:
    names = names or default_names(poly.nvars)
    return {
        "vars": list(names),
        "terms": [{"coef": fraction_to_str(c), "exp": list(e)}
                  for e, c in poly.sorted_terms()],
    }


def poly_from_json(obj: dict, names: list[str] | None = None) -> Poly:
    vars_ = _need(obj, "vars", list)
    if names is not None and list(names) != list(vars_):
        raise SchemaError("variable lists disagree")
    nvars = len(vars_)
    terms = {}
    for item in _need(obj, "terms", list):
        exp = _need(item, "exp", list)
        if len(exp) != nvars or any(not isinstance(e, int) or e < 0 for e in exp):
            raise SchemaError(f"bad exponent {exp}")
        terms[tuple(exp)] = terms.get(tuple(exp), Fraction(0)) + \
            fraction_from_str(_need(item, "coef"))
    return Poly(nvars, terms)


def hseries_to_json(series: HSeries, names=None) -> dict:
    return {"order": series.order,
            "coeffs": [poly_to_json(c, names) for c in series.coeffs]}


def bivector_to_json(gamma: Bivector, names=None) -> dict:
    names = names or default_names(gamma.nvars)
    return {
        "vars": list(names),
        "entries": [{"i": i, "j": j, "poly": poly_to_json(p, names)}
                    for (i, j), p in sorted(gamma.entries.items())],
    }


def bivector_from_json(obj: dict) -> tuple[Bivector, list[str]]:
    vars_ = _need(obj, "vars", list)
    nvars = len(vars_)
    entries = {}
    for item in _need(obj, "entries", list):
        i, j = _need(item, "i", int), _need(item, "j", int)
        if not 0 <= i < j < nvars:
            raise SchemaError(f"bad entry indices ({i},{j})")
        entries[(i, j)] = poly_from_json(_need(item, "poly", dict), vars_)
    return Bivector(nvars, entries), list(vars_)


def polyvector_to_json(pv: PolyVector, names=None) -> dict:
    names = names or default_names(pv.nvars)
    return {
        "vars": list(names),
        "degree": pv.degree,
        "components": [{"indices": list(k), "poly": poly_to_json(p, names)}
                       for k, p in sorted(pv.components.items())],
    }


# -- operators ------------------------------------------------------------------

def _summands_to_json(terms, names):
    out = []
    for key in sorted(terms, key=lambda k: tuple(grlex_key(x) for x in k)):
        entry = {"coef": poly_to_json(terms[key], names)}
        for label, multi in zip(("alpha", "beta", "delta"), key):
            entry[label] = list(multi)
        out.append(entry)
    return out


def bidiffop_to_json(op: BiDiffOp, names=None) -> dict:
    names = names or default_names(op.nvars)
    return {"vars": list(names), "summands": _summands_to_json(op.terms, names)}


def bidiffop_from_json(obj: dict, names=None) -> BiDiffOp:
    vars_ = _need(obj, "vars", list)
    nvars = len(vars_)
    terms = {}
    for item in _need(obj, "summands", list):
        alpha = tuple(_need(item, "alpha", list))
        beta = tuple(_need(item, "beta", list))
        poly = poly_from_json(_need(item, "coef", dict), vars_)
        key = (alpha, beta)
        terms[key] = terms.get(key, Poly.zero(nvars)) + poly
    return BiDiffOp(nvars, terms)


def tridiffop_to_json(op: TriDiffOp, names=None) -> dict:
    names = names or default_names(op.nvars)
    return {"vars": list(names), "summands": _summands_to_json(op.terms, names)}


def star_product_to_json(product: StarProduct, names=None) -> dict:
    names = names or default_names(product.nvars)
    return {
        "vars": list(names),
        "order": product.order,
        "ops": [{"k": k, "summands": _summands_to_json(op.terms, names)}
                for k, op in enumerate(product.ops)],
    }


def star_product_from_json(obj: dict) -> StarProduct:
    vars_ = _need(obj, "vars", list)
    order = _need(obj, "order", int)
    nvars = len(vars_)
    ops = [BiDiffOp.zero(nvars) for _ in range(order + 1)]
    for item in _need(obj, "ops", list):
        k = _need(item, "k", int)
        if not 0 <= k <= order:
            raise SchemaError(f"operator index {k} out of range")
        ops[k] = bidiffop_from_json({"vars": vars_, "summands": item.get("summands", [])})
    try:
        return StarProduct(nvars, order, ops)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def obstruction_to_json(obstruction: Obstruction, names=None) -> dict:
    return {
        "order": obstruction.order,
        "residual": tridiffop_to_json(obstruction.residual, names),
        "hkr": polyvector_to_json(obstruction.hkr, names),
    }


# -- truncated scalars and quadratic data ----------------------------------------

def truncnum_to_json(value: TruncNum) -> list[str]:
    return [fraction_to_str(c) for c in value.coeffs]


def truncnum_from_json(obj, order: int) -> TruncNum:
    if not isinstance(obj, list):
        raise SchemaError("truncated scalar must be a list of rationals")
    return TruncNum(order, [fraction_from_str(x) for x in obj])


def quadratic_data_to_json(data) -> dict:
    return {
        "dim": data.dim,
        "order": data.order,
        "r2": [[truncnum_to_json(x) for x in vec] for vec in data.r2],
        "r3": [[truncnum_to_json(x) for x in vec] for vec in data.r3],
        "containment": {
            "holds": data.containment.holds,
            "checked": data.containment.checked,
            "failure": list(data.containment.failure) if data.containment.failure else None,
        },
    }


def quadratic_data_from_json(obj: dict):
    from .quadratic import ContainmentReport, QuadraticData
    dim = _need(obj, "dim", int)
    order = _need(obj, "order", int)
    r2 = tuple(tuple(truncnum_from_json(x, order) for x in vec)
               for vec in _need(obj, "r2", list))
    r3 = tuple(tuple(truncnum_from_json(x, order) for x in vec)
               for vec in _need(obj, "r3", list))
    for vec in r2:
        if len(vec) != dim * dim:
            raise SchemaError("R2 vector has wrong length")
    for vec in r3:
        if len(vec) != dim ** 3:
            raise SchemaError("R3 vector has wrong length")
    cont = obj.get("containment") or {}
    report = ContainmentReport(bool(cont.get("holds", True)),
                               int(cont.get("checked", 0)), None)
    return QuadraticData(dim, order, r2, r3, report)


# -- presentations ----------------------------------------------------------------

def ncpoly_to_json(poly: NCPoly) -> list[dict]:
    return [{"coef": fraction_to_str(c), "word": list(w)}
            for w, c in sorted(poly.items())]


def ncpoly_from_json(obj) -> NCPoly:
    if not isinstance(obj, list):
        raise SchemaError("noncommutative polynomial must be a list of terms")
    out: NCPoly = {}
    for item in obj:
        word = tuple(_need(item, "word", list))
        out[word] = out.get(word, Fraction(0)) + fraction_from_str(_need(item, "coef"))
    return {w: c for w, c in out.items() if c}


def presentation_to_json(pres: FilteredPresentation) -> dict:
    return {
        "generators": list(pres.generators),
        "weights": {g: pres.weights[g] for g in pres.generators},
        "commutative": pres.commutative,
        "rules": [{"lhs": list(lhs), "rhs": ncpoly_to_json(rhs)}
                  for lhs, rhs in sorted(pres.rules.items())],
    }


def presentation_from_json(obj: dict) -> FilteredPresentation:
    generators = _need(obj, "generators", list)
    weights = _need(obj, "weights", dict)
    rules = {}
    for item in obj.get("rules", []):
        lhs = _need(item, "lhs", list)
        if len(lhs) != 2:
            raise SchemaError("rule left-hand side must be a two-letter word")
        rules[tuple(lhs)] = ncpoly_from_json(_need(item, "rhs", list))
    try:
        return FilteredPresentation(generators, {k: int(v) for k, v in weights.items()},
                                    rules, bool(obj.get("commutative", False)))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


# -- simplicial complexes and algebroid data --------------------------------------

def complex_to_json(complex_: SimplicialComplex) -> dict:
    return {
        "vertices": list(complex_.vertices),
        "edges": [list(e) for e in sorted(complex_.edges)],
        "faces": [list(f) for f in sorted(complex_.faces)],
        "cells": [list(c) for c in sorted(complex_.cells)],
    }


def complex_from_json(obj: dict) -> SimplicialComplex:
    try:
        return SimplicialComplex(
            _need(obj, "vertices", list),
            obj.get("edges", []),
            obj.get("faces", []),
            obj.get("cells", []))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def algebroid_to_json(data: AlgebroidData) -> dict:
    order = data.order
    out = {
        "order": order,
        "complex": complex_to_json(data.complex),
        "algebras": [],
        "edge_maps": [],
        "face_units": [],
    }
    for v in data.complex.vertices:
        alg = data.algebras[v]
        out["algebras"].append({
            "vertex": v,
            "rank": alg.rank,
            "unit": [truncnum_to_json(x) for x in alg.unit],
            "table": [[ [truncnum_to_json(x) for x in cell] for cell in row]
                      for row in alg.table],
        })
    for e in sorted(data.complex.edges):
        out["edge_maps"].append({
            "i": e[0], "j": e[1],
            "matrix": [[truncnum_to_json(x) for x in row] for row in data.edge_map(*e)],
        })
    for f in sorted(data.complex.faces):
        out["face_units"].append({
            "face": list(f),
            "element": [truncnum_to_json(x) for x in data.face_units[f]],
        })
    if data.oriented_units:
        out["oriented_units"] = [
            {"orientation": list(k), "element": [truncnum_to_json(x) for x in v]}
            for k, v in sorted(data.oriented_units.items())]
    return out


def algebroid_from_json(obj: dict) -> AlgebroidData:
    order = _need(obj, "order", int)
    complex_ = complex_from_json(_need(obj, "complex", dict))
    algebras = {}
    for item in _need(obj, "algebras", list):
        vertex = _need(item, "vertex", int)
        rank = _need(item, "rank", int)
        table = [[[truncnum_from_json(x, order) for x in cell] for cell in row]
                 for row in _need(item, "table", list)]
        unit = [truncnum_from_json(x, order) for x in _need(item, "unit", list)]
        try:
            algebras[vertex] = SCAlgebra(order, rank, table, unit)
        except ValueError as exc:
            raise SchemaError(f"algebra at vertex {vertex}: {exc}") from exc
    edge_maps = {}
    for item in _need(obj, "edge_maps", list):
        i, j = _need(item, "i", int), _need(item, "j", int)
        edge_maps[(i, j)] = [[truncnum_from_json(x, order) for x in row]
                             for row in _need(item, "matrix", list)]
    face_units = {}
    for item in _need(obj, "face_units", list):
        face = tuple(_need(item, "face", list))
        face_units[face] = [truncnum_from_json(x, order)
                            for x in _need(item, "element", list)]
    oriented = {}
    for item in obj.get("oriented_units", []):
        key = tuple(_need(item, "orientation", list))
        oriented[key] = [truncnum_from_json(x, order)
                         for x in _need(item, "element", list)]
    try:
        return AlgebroidData(complex_, algebras, edge_maps, face_units, oriented)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
