"""Deformed quadratic and cubic relation modules, quantization of quadratic
Poisson structures, tangent-level dequantization, and homogenization.

For a degree-preserving star product the restriction to generators is a map
V* (x) V* (x) R -> Sym^2(V*) (x) R over the truncated ring R; its kernel R2
is computed by lifting the classical antisymmetric kernel order by order
(the constant-term map is onto, and R is local, so every layer solves).
R3 is the kernel of the triple product on V*^(x)3, and the containment
R2 (x) V* + V* (x) R2 in R3 is certified by exact membership solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from . import linalg
from .poly import Exponent, Poly, grlex_key
from .polyvector import Bivector, jacobi_check
from .star import AnsatzSpec, Obstruction, StarProduct, star_solve
from .truncring import TruncNum, TVec, tvec_from_layers, tvec_slice


class NotDegreePreservingError(ValueError):
    """The star product does not map Sym^a (x) Sym^b into Sym^(a+b)."""


def _sym_basis(n: int, degree: int) -> list[Exponent]:
    """Monomials of the given total degree, graded-lex descending."""
    out: list[Exponent] = []

    def rec(prefix: tuple[int, ...], remaining: int, budget: int):
        if remaining == 0:
            if budget == 0:
                out.append(prefix)
            return
        for e in range(budget + 1):
            rec(prefix + (e,), remaining - 1, budget - e)

    rec((), n, degree)
    out.sort(key=grlex_key, reverse=True)
    return out


def _tensor_basis(n: int, power: int) -> list[tuple[int, ...]]:
    return [idx for idx in iproduct(range(n), repeat=power)]


def _poly_to_vector(poly: Poly, basis: list[Exponent], degree: int) -> list[Fraction]:
    vec = []
    seen = dict(poly.terms)
    for e in basis:
        vec.append(seen.pop(e, Fraction(0)))
    if seen:
        raise NotDegreePreservingError(
            f"product has terms outside Sym^{degree}: {sorted(seen)}")
    return vec


def _mu_layers(star: StarProduct, power: int) -> list[list[list[Fraction]]]:
    """Per-hbar-order matrices of the p-fold star product on generators."""
    n = star.nvars
    target = _sym_basis(n, power)
    columns = []
    for idx in _tensor_basis(n, power):
        series = star._lift(Poly.variable(n, idx[-1]))
        for i in reversed(idx[:-1]):
            series = star.multiply(Poly.variable(n, i), series)
        col_layers = []
        for k in range(star.order + 1):
            poly = series.coeffs[k]
            if not poly.is_zero() and not poly.is_homogeneous(power):
                raise NotDegreePreservingError(
                    f"star product is not degree preserving at hbar^{k}")
            col_layers.append(_poly_to_vector(poly, target, power))
        columns.append(col_layers)
    return [[[col[k][r] for col in columns] for r in range(len(target))]
            for k in range(star.order + 1)]


def _lift_kernel(layers: list[list[list[Fraction]]],
                 base_kernel: list[list[Fraction]]) -> list[TVec]:
    """Lift rational kernel vectors of the hbar^0 layer through all orders."""
    order = len(layers) - 1
    lifted = []
    for v0 in base_kernel:
        v_layers = [list(v0)]
        for t in range(1, order + 1):
            rhs = [Fraction(0)] * len(layers[0])
            for s in range(1, t + 1):
                rhs = [a + b for a, b in
                       zip(rhs, linalg.mat_vec(layers[s], v_layers[t - s]))]
            vt = linalg.solve(layers[0], [-x for x in rhs])
            if vt is None:  # pragma: no cover - layer 0 map is onto
                raise RuntimeError("kernel lift failed: constant-term map not onto")
            v_layers.append(vt)
        lifted.append(tvec_from_layers(v_layers))
    return lifted


def quad_relations(star: StarProduct, order: int | None = None) -> list[TVec]:
    """Basis of the deformed quadratic relation module R2, free of rank
    n(n-1)/2; entries are coefficient vectors over the n^2 tensor basis."""
    if order is not None and order != star.order:
        raise ValueError("relation order must match the star product order")
    n = star.nvars
    layers = _mu_layers(star, 2)
    base = []
    for i in range(n):
        for j in range(i + 1, n):
            vec = [Fraction(0)] * (n * n)
            vec[i * n + j] = Fraction(1)
            vec[j * n + i] = Fraction(-1)
            base.append(vec)
    return _lift_kernel(layers, base)


@dataclass(frozen=True)
class ContainmentReport:
    """Result of checking R2 (x) V* + V* (x) R2 against R3 membership."""
    holds: bool
    checked: int
    failure: tuple[str, int, int] | None  # (side, relation index, generator index)


def cubic_relations(star: StarProduct, order: int | None = None,
                    r2: list[TVec] | None = None
                    ) -> tuple[list[TVec], ContainmentReport]:
    """Basis of R3 (rank n^3 - C(n+2,3)) plus the containment certificate."""
    if order is not None and order != star.order:
        raise ValueError("relation order must match the star product order")
    n = star.nvars
    layers = _mu_layers(star, 3)
    base = linalg.nullspace(layers[0])
    r3 = _lift_kernel(layers, base)
    if r2 is None:
        r2 = quad_relations(star)
    report = _check_containment(n, star.order, r2, r3)
    return r3, report


def _membership(columns: list[TVec], target: TVec) -> bool:
    from .truncring import trunc_solve
    matrix = [[col[r] for col in columns] for r in range(len(target))]
    return trunc_solve(matrix, target) is not None


def _check_containment(n: int, order: int, r2: list[TVec], r3: list[TVec]
                       ) -> ContainmentReport:
    checked = 0
    for ridx, rel in enumerate(r2):
        for g in range(n):
            left = [TruncNum.zero(order)] * (n ** 3)
            right = [TruncNum.zero(order)] * (n ** 3)
            for pos, value in enumerate(rel):
                if value.is_zero():
                    continue
                i, j = divmod(pos, n)
                left[(i * n + j) * n + g] = value     # rel (x) x_g
                right[(g * n + i) * n + j] = value    # x_g (x) rel
            for side, vec in (("R2*V", left), ("V*R2", right)):
                checked += 1
                if not _membership(r3, vec):
                    return ContainmentReport(False, checked, (side, ridx, g))
    return ContainmentReport(True, checked, None)


@dataclass(frozen=True)
class QuadraticData:
    """Point of the deformed quadratic-algebra moduli near the commutative one."""
    dim: int
    order: int
    r2: tuple
    r3: tuple
    containment: ContainmentReport

    def expected_r2_rank(self) -> int:
        return self.dim * (self.dim - 1) // 2

    def expected_r3_rank(self) -> int:
        n = self.dim
        return n ** 3 - (n + 2) * (n + 1) * n // 6

    def check_invariants(self) -> None:
        n = self.dim
        if len(self.r2) != self.expected_r2_rank():
            raise ValueError("R2 has wrong rank")
        if len(self.r3) != self.expected_r3_rank():
            raise ValueError("R3 has wrong rank")
        base = [tvec_slice(v, 0) for v in self.r2]
        antisym = []
        for i in range(n):
            for j in range(i + 1, n):
                vec = [Fraction(0)] * (n * n)
                vec[i * n + j] = Fraction(1)
                vec[j * n + i] = Fraction(-1)
                antisym.append(vec)
        if linalg.rank(base) != len(base) or linalg.rank(base + antisym) != len(base):
            raise ValueError("R2 does not reduce to the antisymmetric tensors at hbar=0")
        if not self.containment.holds:
            raise ValueError("R3 containment fails")


def quant_map(gamma: Bivector, order: int) -> QuadraticData:
    """Quantize a homogeneous quadratic Poisson bivector into its deformed
    relation modules (a gauge representative; see star_solve)."""
    if not gamma.is_homogeneous_quadratic():
        raise ValueError("quant_map requires homogeneous quadratic entries")
    if not jacobi_check(gamma).passed:
        raise ValueError("quant_map requires a Poisson bivector")
    result = star_solve(gamma, order, AnsatzSpec(homogeneous_only=True))
    if isinstance(result, Obstruction):  # pragma: no cover - Poisson input
        raise RuntimeError("unexpected obstruction while quantizing a Poisson bivector")
    r2 = quad_relations(result)
    r3, report = cubic_relations(result, r2=r2)
    data = QuadraticData(gamma.nvars, order,
                         tuple(tuple(v) for v in r2),
                         tuple(tuple(v) for v in r3), report)
    data.check_invariants()
    return data


def dequant_first_order(data: QuadraticData) -> Bivector:
    """Read the quadratic bivector back from the hbar^1 part of R2.

    Generators are first normalized so the hbar^0 part of the (i,j) one is
    x_i (x) x_j - x_j (x) x_i; the symmetric part of its hbar^1 term then
    determines {x_i, x_j} via the symmetric-lift convention, and the
    antisymmetric ambiguity of the normalization drops out.
    """
    n = data.dim
    base_cols = [tvec_slice(v, 0) for v in data.r2]
    matrix = [[col[r] for col in base_cols] for r in range(n * n)]
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            target = [Fraction(0)] * (n * n)
            target[i * n + j] = Fraction(1)
            target[j * n + i] = Fraction(-1)
            combo = linalg.solve(matrix, target)
            if combo is None:
                raise ValueError("R2 is not in normalized generator form")
            first = [Fraction(0)] * (n * n)
            for c, vec in zip(combo, data.r2):
                if c:
                    layer = tvec_slice(vec, 1)
                    first = [a + c * b for a, b in zip(first, layer)]
            poly = Poly.zero(n)
            for pos, value in enumerate(first):
                if value:
                    a, b = divmod(pos, n)
                    exp = [0] * n
                    exp[a] += 1
                    exp[b] += 1
                    poly = poly + Poly.monomial(n, exp, value)
            poly = poly * Fraction(-1, 2)
            if not poly.is_zero():
                entries[(i, j)] = poly
    return Bivector(n, entries)


def homogenize(gamma: Bivector) -> Bivector:
    """Make a degree<=2 bivector quadratic by adding one Poisson-central
    variable z of weight 1: each entry's degree-d part is multiplied by
    z^(2-d); z itself brackets to zero, and z=1 recovers the input."""
    n = gamma.nvars
    entries = {}
    for (i, j), poly in gamma.entries.items():
        if poly.total_degree() > 2:
            raise ValueError(f"entry ({i},{j}) has degree > 2")
        lifted = {}
        for e, c in poly.terms.items():
            lifted[e + (2 - sum(e),)] = c
        entries[(i, j)] = Poly(n + 1, lifted)
    return Bivector(n + 1, entries)


def dehomogenize(gamma: Bivector) -> Bivector:
    """Set the last variable to 1 and drop it (inverse of homogenize)."""
    n = gamma.nvars - 1
    entries = {}
    for (i, j), poly in gamma.entries.items():
        if j == n:
            continue
        entries[(i, j)] = poly.eval_var(n, 1).drop_var(n)
    return Bivector(n, entries)
