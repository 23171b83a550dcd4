"""Batch command-line front end.

Every verb reads JSON inputs, runs one library operation, and writes a
deterministic report (JSON by default, --text for a short human summary).
Exit codes: 0 when the computation succeeded and every requested check
passed; 1 when a verification failed or an obstruction was found (details
in the report); 2 for unknown verbs, malformed JSON, or schema violations.
Reports carry provenance: the sha256 of each input, the truncation order,
and the conventions string.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import CONVENTIONS, __version__
from . import serialize as ser
from .poly import Poly
from .polyvector import jacobi_check, schouten_square
from .quadratic import dequant_first_order, homogenize, quant_map
from .rees import filtration_compat_check, rees_from_filtration
from .star import (AnsatzSpec, AnsatzTooSmallError, Obstruction, assoc_residual,
                   moyal, star_solve)
from .tangency import divisor_tangency_check, pn_tangency_check
from .algebroid import (AlgebroidData, cech_cohomology, gauge_fix,
                        verify_algebroid)

VERBS = ("jacobi", "moyal", "star-solve", "star-check", "quad-relations",
         "quant", "dequant", "homogenize", "rees", "filtration-check",
         "tangency-pn", "tangency-divisor", "algebroid-verify",
         "algebroid-gauge", "cech", "explore-xy-guess")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_json(path: str) -> tuple[dict, str]:
    p = Path(path)
    try:
        text = p.read_bytes()
    except OSError as exc:
        raise ser.SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text), hashlib.sha256(text).hexdigest()
    except json.JSONDecodeError as exc:
        raise ser.SchemaError(f"malformed JSON in {path}: {exc}") from exc


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if getattr(args, "text", False):
        payload = "\n".join(text_lines) + "\n"
    else:
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _provenance(args, hashes: dict) -> dict:
    return {
        "tool": f"starquant {__version__}",
        "conventions": CONVENTIONS,
        "order": getattr(args, "order", None),
        "inputs": hashes,
    }


def _cmd_jacobi(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    result = jacobi_check(gamma)
    report = {
        "verdict": "pass" if result.passed else "fail",
        "identity": "[gamma,gamma] = 0",
        "witness": None if result.passed else ser.polyvector_to_json(result.witness, names),
        "provenance": _provenance(args, {"input": digest}),
    }
    lines = [f"jacobi: {report['verdict']}"]
    if not result.passed:
        lines.append("violated identity: [gamma,gamma] = 0")
        lines.append(f"witness trivector: {result.witness.to_str(names)}")
    _emit(args, report, lines)
    return 0 if result.passed else 1


def _cmd_moyal(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    try:
        product = moyal(gamma, args.order)
    except ValueError as exc:
        raise ser.SchemaError(str(exc)) from exc
    report = {
        "star_product": ser.star_product_to_json(product, names),
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"moyal product of order {args.order}: "
                         f"{sum(len(op.terms) for op in product.ops)} summands"])
    return 0


def _ansatz_from_args(args) -> AnsatzSpec:
    return AnsatzSpec(deriv_bound=args.ansatz_deriv_bound,
                      homogeneous_only=getattr(args, "homogeneous", False))


def _cmd_star_solve(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    try:
        result = star_solve(gamma, args.order, _ansatz_from_args(args))
    except AnsatzTooSmallError as exc:
        report = {
            "outcome": "ansatz-too-small",
            "order": exc.order,
            "detail": str(exc),
            "provenance": _provenance(args, {"input": digest}),
        }
        _emit(args, report, [f"star-solve: ansatz too small at order {exc.order}"])
        return 1
    if isinstance(result, Obstruction):
        report = {
            "outcome": "obstruction",
            "identity": "associativity residual = 0",
            "obstruction": ser.obstruction_to_json(result, names),
            "provenance": _provenance(args, {"input": digest}),
        }
        lines = [f"star-solve: obstruction at hbar-order {result.order}",
                 f"hkr trivector: {result.hkr.to_str(names)}"]
        _emit(args, report, lines)
        return 1
    report = {
        "outcome": "success",
        "star_product": ser.star_product_to_json(result, names),
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"star-solve: success to order {args.order}"])
    return 0


def _cmd_star_check(args) -> int:
    obj, digest = _load_json(args.input)
    product = ser.star_product_from_json(obj)
    hashes = {"input": digest}
    failures = []
    for k in range(1, product.order + 1):
        if not assoc_residual(product, k).is_zero():
            failures.append(f"associativity residual nonzero at hbar-order {k}")
            break
    if args.gamma:
        gobj, gdigest = _load_json(args.gamma)
        gamma, _ = ser.bivector_from_json(gobj)
        hashes["gamma"] = gdigest
        from .bidiff import BiDiffOp
        if product.order >= 1 and product.ops[1] != BiDiffOp.bivector_pairing(gamma):
            failures.append("B_1 differs from the gamma pairing")
    if args.seed is not None:
        rng = random.Random(args.seed)
        n = product.nvars
        for _ in range(3):
            f, g, h = (Poly(n, {tuple(rng.randint(0, 2) for _ in range(n)):
                                Fraction(rng.randint(-3, 3)) for _ in range(3)})
                       for _ in range(3))
            left = product.multiply(product.multiply(f, g), h)
            right = product.multiply(f, product.multiply(g, h))
            if left != right:
                failures.append("associativity fails on a random triple")
                break
    report = {
        "verdict": "pass" if not failures else "fail",
        "failures": failures,
        "provenance": _provenance(args, hashes),
    }
    _emit(args, report, [f"star-check: {report['verdict']}"] + failures)
    return 0 if not failures else 1


def _solved_product(args, gamma):
    result = star_solve(gamma, args.order, _ansatz_from_args(args))
    if isinstance(result, Obstruction):
        return None, result
    return result, None


def _cmd_quad_relations(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    from .quadratic import quad_relations
    product, obstruction = _solved_product(args, gamma)
    if obstruction is not None:
        report = {"outcome": "obstruction",
                  "obstruction": ser.obstruction_to_json(obstruction, names),
                  "provenance": _provenance(args, {"input": digest})}
        _emit(args, report, [f"quad-relations: obstruction at order {obstruction.order}"])
        return 1
    basis = quad_relations(product)
    report = {
        "rank": len(basis),
        "r2": [[ser.truncnum_to_json(x) for x in vec] for vec in basis],
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"quad-relations: rank {len(basis)}"])
    return 0


def _cmd_quant(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    if not gamma.is_homogeneous_quadratic():
        raise ser.SchemaError("quant requires homogeneous quadratic entries")
    check = jacobi_check(gamma)
    if not check.passed:
        report = {
            "verdict": "fail",
            "identity": "[gamma,gamma] = 0",
            "witness": ser.polyvector_to_json(check.witness, names),
            "provenance": _provenance(args, {"input": digest}),
        }
        _emit(args, report, ["quant: input is not Poisson ([gamma,gamma] != 0)"])
        return 1
    data = quant_map(gamma, args.order)
    report = {
        "quadratic_data": ser.quadratic_data_to_json(data),
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"quant: R2 rank {len(data.r2)}, R3 rank {len(data.r3)}, "
                         f"containment {'holds' if data.containment.holds else 'FAILS'}"])
    return 0 if data.containment.holds else 1


def _cmd_dequant(args) -> int:
    obj, digest = _load_json(args.input)
    payload = obj.get("quadratic_data", obj)
    data = ser.quadratic_data_from_json(payload)
    try:
        gamma = dequant_first_order(data)
    except ValueError as exc:
        raise ser.SchemaError(str(exc)) from exc
    report = {
        "bivector": ser.bivector_to_json(gamma),
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"dequant: {gamma.to_str()}"])
    return 0


def _cmd_homogenize(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    try:
        lifted = homogenize(gamma)
    except ValueError as exc:
        raise ser.SchemaError(str(exc)) from exc
    report = {
        "bivector": ser.bivector_to_json(lifted, list(names) + ["z"]),
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"homogenize: {lifted.to_str(list(names) + ['z'])}"])
    return 0


def _cmd_rees(args) -> int:
    obj, digest = _load_json(args.input)
    base = ser.presentation_from_json(obj)
    rees, report_data = rees_from_filtration(base, degree_bound=args.degree_bound)
    report = {
        "rees": ser.presentation_to_json(rees),
        "checks": {
            "degree_bound": report_data.degree_bound,
            "words_checked": report_data.words_checked,
            "graded": report_data.graded,
            "specializes_at_t_1": report_data.specializes,
            "graded_quotient_commutative": report_data.graded_quotient_commutative,
            "confluent": report_data.confluent,
        },
        "provenance": _provenance(args, {"input": digest}),
    }
    ok = report_data.ok
    _emit(args, report, [f"rees: {'pass' if ok else 'fail'} "
                         f"({report_data.words_checked} words to degree {report_data.degree_bound})"])
    return 0 if ok else 1


def _cmd_filtration_check(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, _ = ser.bivector_from_json(obj)
    weights = [int(w) for w in args.weights.split(",")] if args.weights else [1] * gamma.nvars
    result = filtration_compat_check(gamma, weights, args.degree_bound)
    report = {
        "level": result.level,
        "max_excess": result.max_excess,
        "witness": [list(result.witness[0]), list(result.witness[1]),
                    result.witness[2], result.witness[3]] if result.witness else None,
        "pairs_checked": result.pairs_checked,
        "identity": "{F_m1, F_m2} subset F_(m1+m2)",
        "provenance": _provenance(args, {"input": digest}),
    }
    lines = [f"filtration-check: {result.level} (max excess {result.max_excess})"]
    if result.witness:
        lines.append(f"violating pair: {result.witness[0]} , {result.witness[1]}")
    _emit(args, report, lines)
    return 0 if result.level != "incompatible" else 1


def _cmd_tangency_pn(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, _ = ser.bivector_from_json(obj)
    result = pn_tangency_check(gamma)
    report = {
        "quantizable": result.quantizable,
        "failed_condition": result.failed_condition,
        "max_coeff_degree": result.max_coeff_degree,
        "cohomology_vanishing": result.cohomology_vanishing,
        "boundary_ample": result.boundary_ample,
        "charts": [{"chart": c.chart, "extends": c.extends,
                    "tangent": c.tangent, "witness": c.witness}
                   for c in result.charts],
        "provenance": _provenance(args, {"input": digest}),
    }
    lines = [f"tangency-pn: {'quantizable' if result.quantizable else 'not quantizable'}"]
    if result.failed_condition:
        lines.append(f"failed condition: {result.failed_condition}")
    _emit(args, report, lines)
    return 0 if result.quantizable else 1


def _cmd_tangency_divisor(args) -> int:
    obj, digest = _load_json(args.input)
    gamma, names = ser.bivector_from_json(obj)
    pobj, pdigest = _load_json(args.divisor)
    divisor = ser.poly_from_json(pobj, names)
    if divisor.is_zero():
        raise ser.SchemaError("divisor polynomial must be nonzero")
    result = divisor_tangency_check(gamma, divisor)
    report = {
        "tangent": result.tangent,
        "identity": "{p, x_i} in (p) for every coordinate",
        "witness_coordinate": result.witness_coordinate,
        "remainder": ser.poly_to_json(result.remainder, names) if result.remainder else None,
        "provenance": _provenance(args, {"input": digest, "divisor": pdigest}),
    }
    lines = [f"tangency-divisor: {'tangent' if result.tangent else 'not tangent'}"]
    if not result.tangent:
        lines.append(f"witness coordinate index: {result.witness_coordinate}")
    _emit(args, report, lines)
    return 0 if result.tangent else 1


def _cmd_algebroid_verify(args) -> int:
    obj, digest = _load_json(args.input)
    data = ser.algebroid_from_json(obj)
    result = verify_algebroid(data)
    report = {
        "verdict": "pass" if result.ok else "fail",
        "constraint": result.constraint,
        "location": list(result.location) if result.location else None,
        "detail": result.detail,
        "provenance": _provenance(args, {"input": digest}),
    }
    lines = [f"algebroid-verify: {report['verdict']}"]
    if not result.ok:
        lines.append(f"violated identity: {result.constraint} at {result.location}")
    _emit(args, report, lines)
    return 0 if result.ok else 1


def _cmd_algebroid_gauge(args) -> int:
    obj, digest = _load_json(args.input)
    data = ser.algebroid_from_json(obj)
    result = gauge_fix(data, args.order)
    if isinstance(result, AlgebroidData):
        report = {
            "outcome": "success",
            "algebroid": ser.algebroid_to_json(result),
            "provenance": _provenance(args, {"input": digest}),
        }
        _emit(args, report, [f"algebroid-gauge: success to order {args.order}"])
        return 0
    report = {
        "outcome": "obstruction",
        "order": result.order,
        "cocycle": {",".join(map(str, k)): ser.fraction_to_str(v)
                    for k, v in sorted(result.cocycle.items())},
        "h2_rank": result.h2_rank,
        "cochain_dims": result.cochain_dims,
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"algebroid-gauge: obstruction at order {result.order} "
                         f"(H^2 rank {result.h2_rank})"])
    return 1


def _cmd_cech(args) -> int:
    obj, digest = _load_json(args.input)
    complex_ = ser.complex_from_json(obj)
    rank = cech_cohomology(complex_, args.q)
    report = {
        "q": args.q,
        "rank": rank,
        "provenance": _provenance(args, {"input": digest}),
    }
    _emit(args, report, [f"cech: rank H^{args.q} = {rank}"])
    return 0


def _cmd_explore_xy_guess(args) -> int:
    # report-only experiment: solve the two-variable bracket {x,y} = xy and
    # print the commutation relation of the generators in the solved gauge
    n = 2
    x, y = Poly.variable(n, 0), Poly.variable(n, 1)
    gamma_entry = x * y
    from .polyvector import Bivector
    gamma = Bivector(n, {(0, 1): gamma_entry})
    result = star_solve(gamma, args.order, AnsatzSpec(homogeneous_only=True))
    assert not isinstance(result, Obstruction)
    yx = result.multiply(y, x)
    xy = result.multiply(x, y)
    lines = [
        f"bracket {{x,y}} = xy, solved to hbar-order {args.order}",
        f"x*y = {xy.to_str(['x', 'y'])}",
        f"y*x = {yx.to_str(['x', 'y'])}",
        "note: the coefficients above are one gauge representative; other",
        "gauge choices change them, so no relation is asserted here.",
    ]
    report = {
        "order": args.order,
        "x_star_y": ser.hseries_to_json(xy, ["x", "y"]),
        "y_star_x": ser.hseries_to_json(yx, ["x", "y"]),
        "caveat": "gauge-dependent coefficients; report only, no assertion",
        "provenance": _provenance(args, {}),
    }
    _emit(args, report, lines)
    return 0


_HANDLERS = {
    "jacobi": _cmd_jacobi,
    "moyal": _cmd_moyal,
    "star-solve": _cmd_star_solve,
    "star-check": _cmd_star_check,
    "quad-relations": _cmd_quad_relations,
    "quant": _cmd_quant,
    "dequant": _cmd_dequant,
    "homogenize": _cmd_homogenize,
    "rees": _cmd_rees,
    "filtration-check": _cmd_filtration_check,
    "tangency-pn": _cmd_tangency_pn,
    "tangency-divisor": _cmd_tangency_divisor,
    "algebroid-verify": _cmd_algebroid_verify,
    "algebroid-gauge": _cmd_algebroid_gauge,
    "cech": _cmd_cech,
    "explore-xy-guess": _cmd_explore_xy_guess,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starquant",
        description="Exact batch verifications for star products, relation "
                    "modules, filtrations and algebra gluing data.")
    sub = parser.add_subparsers(dest="verb")

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", help="path to the JSON input")
        p.add_argument("--order", type=int, default=2,
                       help="hbar truncation order (default 2)")
        p.add_argument("--output", default=None, help="report path (default stdout)")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="text", action="store_false",
                         help="machine-readable report (default)")
        fmt.add_argument("--text", dest="text", action="store_true",
                         help="human-readable report")
        p.set_defaults(text=False)
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized spot checks")

    for verb in ("jacobi", "moyal", "homogenize"):
        common(sub.add_parser(verb))
    for verb in ("star-solve", "quad-relations", "quant"):
        p = sub.add_parser(verb)
        common(p)
        p.add_argument("--ansatz-deriv-bound", type=int, default=None,
                       help="absolute per-slot derivative bound")
        p.add_argument("--homogeneous", action="store_true",
                       help="restrict coefficients to the exact degree rule")
    p = sub.add_parser("star-check")
    common(p)
    p.add_argument("--gamma", default=None, help="bivector JSON to check B_1 against")
    common(sub.add_parser("dequant"))
    p = sub.add_parser("rees")
    common(p)
    p.add_argument("--degree-bound", type=int, default=6)
    p = sub.add_parser("filtration-check")
    common(p)
    p.add_argument("--weights", default=None, help="comma-separated positive weights")
    p.add_argument("--degree-bound", type=int, default=6)
    common(sub.add_parser("tangency-pn"))
    p = sub.add_parser("tangency-divisor")
    common(p)
    p.add_argument("--divisor", required=True, help="path to the divisor Poly JSON")
    common(sub.add_parser("algebroid-verify"))
    common(sub.add_parser("algebroid-gauge"))
    p = sub.add_parser("cech")
    common(p)
    p.add_argument("--q", type=int, default=2, help="cohomology degree")
    common(sub.add_parser("explore-xy-guess"), with_input=False)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.verb is None:
        parser.print_help()
        return 2
    if args.verb not in _HANDLERS:  # pragma: no cover - argparse screens this
        print(f"unknown verb {args.verb}", file=sys.stderr)
        return 2
    if getattr(args, "order", 0) is not None and getattr(args, "order", 0) < 0:
        print("order must be >= 0", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[args.verb](args)
    except ser.SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
