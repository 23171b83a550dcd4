"""Tangency criteria for compactifying polynomial Poisson structures.

pn_tangency_check moves a bivector on affine n-space into each standard
chart at infinity (coordinates u0 = 1/x_a, u_k = x_k/x_a) and tests that it
extends without poles in u0 and is tangent to the boundary divisor u0 = 0.
Entries are tracked as Laurent data (polynomial numerator, pole order in
u0); only u0 ever acquires poles.  divisor_tangency_check tests bracket
invariance of a principal ideal by exact polynomial division.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import Poly
from .polyvector import Bivector


@dataclass(frozen=True)
class ChartVerdict:
    """Extension/tangency verdicts for one chart at infinity."""
    chart: int                      # index a of the affine coordinate inverted
    extends: bool
    tangent: bool
    witness: str | None


@dataclass(frozen=True)
class TangencyReport:
    charts: tuple[ChartVerdict, ...]
    quantizable: bool
    failed_condition: str | None     # "extension" | "tangency" | None
    max_coeff_degree: int
    # These two hold automatically for the projective-space compactification
    # (rational variety, hyperplane boundary class); recorded for the verdict.
    cohomology_vanishing: bool = True
    boundary_ample: bool = True


def _laurent_substitute(poly: Poly, chart: int, slot_of: list[int]) -> tuple[Poly, int]:
    """gamma entry under x_i = u_i/u0 (i != a), x_a = 1/u0.

    Returns (numerator over the chart ring, pole order p) meaning num / u0^p.
    """
    n = poly.nvars
    d = max((sum(e) for e in poly.terms), default=0)
    acc: dict[tuple, object] = {}
    for e, c in poly.terms.items():
        exp = [0] * n
        exp[0] = d - sum(e)              # u0 fills the degree up to d
        for i, ei in enumerate(e):
            if i == chart:
                continue
            exp[slot_of[i]] = ei
        key = tuple(exp)
        acc[key] = acc.get(key, 0) + c
    return Poly(n, acc), d


def _u0_valuation(num: Poly, pole: int) -> int | None:
    """Order of vanishing along u0 = 0 (None for the zero entry)."""
    if num.is_zero():
        return None
    return min(e[0] for e in num.terms) - pole


def pn_tangency_check(gamma: Bivector) -> TangencyReport:
    """Decide whether the standard projective compactification works for gamma:
    in every chart the transformed bivector must extend (valuation >= 0 for
    all entries) and be tangent to the boundary (valuation >= 1 for entries
    pairing with u0)."""
    n = gamma.nvars
    charts = []
    any_pole = False
    any_transversal = False
    for a in range(n):
        slot_of = [0] * n
        pos = 1
        for i in range(n):
            if i != a:
                slot_of[i] = pos
                pos += 1
        # entries of the transformed bivector, as (numerator, pole order)
        extends = True
        tangent = True
        witness = None
        # pairing with u0: gtilde^{0k} = -u0^3 * gamma^{a, orig(k)}(x(u))
        for i in range(n):
            if i == a:
                continue
            num, pole = _laurent_substitute(gamma.entry(a, i), a, slot_of)
            val = _u0_valuation(num, pole - 3)
            if val is None:
                continue
            if val < 0:
                extends = False
                witness = witness or f"entry (u0, u[{slot_of[i]}]) has a pole of order {-val}"
            elif val < 1:
                tangent = False
                witness = witness or f"entry (u0, u[{slot_of[i]}]) is not divisible by u0"
        # remaining entries: gtilde^{kl} = u0^2 [gamma^{kl} - u_l gamma^{ka} - u_k gamma^{al}]
        for i in range(n):
            for j in range(i + 1, n):
                if a in (i, j):
                    continue
                num_ij, pole_ij = _laurent_substitute(gamma.entry(i, j), a, slot_of)
                num_ia, pole_ia = _laurent_substitute(gamma.entry(i, a), a, slot_of)
                num_aj, pole_aj = _laurent_substitute(gamma.entry(a, j), a, slot_of)
                ui = Poly.variable(n, slot_of[i])
                uj = Poly.variable(n, slot_of[j])
                pole = max(pole_ij, pole_ia, pole_aj)
                num = (num_ij * Poly.monomial(n, _u0_power(n, pole - pole_ij))
                       - uj * num_ia * Poly.monomial(n, _u0_power(n, pole - pole_ia))
                       - ui * num_aj * Poly.monomial(n, _u0_power(n, pole - pole_aj)))
                val = _u0_valuation(num, pole - 2)
                if val is not None and val < 0:
                    extends = False
                    witness = witness or (
                        f"entry (u[{slot_of[i]}], u[{slot_of[j]}]) has a pole of order {-val}")
        charts.append(ChartVerdict(a, extends, tangent, witness))
        any_pole = any_pole or not extends
        any_transversal = any_transversal or not tangent
    quantizable = not (any_pole or any_transversal)
    failed = "extension" if any_pole else ("tangency" if any_transversal else None)
    return TangencyReport(tuple(charts), quantizable, failed, gamma.max_coeff_degree())


def _u0_power(n: int, k: int) -> tuple:
    return (k,) + (0,) * (n - 1)


@dataclass(frozen=True)
class DivisorTangencyReport:
    tangent: bool
    witness_coordinate: int | None
    remainder: Poly | None


def divisor_tangency_check(gamma: Bivector, p: Poly) -> DivisorTangencyReport:
    """Tangency to the principal divisor p = 0: the ideal (p) is closed under
    the bracket iff {p, x_i} is divisible by p for every coordinate."""
    if p.is_zero():
        raise ValueError("divisor polynomial must be nonzero")
    if p.nvars != gamma.nvars:
        raise ValueError("nvars mismatch")
    if p.is_constant():
        return DivisorTangencyReport(True, None, None)  # unit ideal
    for i in range(gamma.nvars):
        bracket = gamma.bracket(p, Poly.variable(gamma.nvars, i))
        if bracket.is_zero():
            continue
        _, remainder = bracket.divmod_single(p)
        if not remainder.is_zero():
            return DivisorTangencyReport(False, i, remainder)
    return DivisorTangencyReport(True, None, None)
