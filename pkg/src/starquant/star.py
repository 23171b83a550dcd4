"""Star products: truncated hbar-series of bidifferential operators.

Normalization, fixed throughout and documented in the README: the first
order operator is  B1 = sum_{i,j} gamma^{ij} d_i (x) d_j  over the full
antisymmetric matrix, so  f*g - g*f = 2 hbar {f,g} + O(hbar^3).  (Several
texts put hbar/2 in the exponent instead.)

star_solve replaces any universal formula by a per-instance solve: at each
hbar-order k >= 2 the associativity constraint is an affine linear system
for the unknown operator B_k over a finite ansatz.  The system splits into
independent blocks along the "net multidegree" of a summand,

    eta(c x^m d^alpha (x) d^beta) = m - alpha - beta  in Z^n,

which composition adds; only blocks present in the known part of the
residual can carry a nonzero B_k, so the blocks stay small.  Pivoting is
deterministic (graded-lex basis order, free variables zeroed), making the
output a reproducible gauge representative.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb, lcm

from .bidiff import BiDiffOp, TriDiffOp, compose_first, compose_second, _splits
from .poly import Exponent, HSeries, Poly, grlex_key
from .polyvector import Bivector, PolyVector


class StarProduct:
    """Operators B_0 .. B_N with B_0 = multiplication and B_k unital for k >= 1."""

    __slots__ = ("nvars", "order", "ops")

    def __init__(self, nvars: int, order: int, ops: list[BiDiffOp]):
        if len(ops) != order + 1:
            raise ValueError(f"need {order + 1} operators, got {len(ops)}")
        if any(op.nvars != nvars for op in ops):
            raise ValueError("operator nvars mismatch")
        if ops[0] != BiDiffOp.multiplication(nvars):
            raise ValueError("B_0 must be the multiplication operator")
        for k, op in enumerate(ops[1:], start=1):
            if not op.is_unital():
                raise ValueError(f"B_{k} must annihilate (1, .) and (., 1)")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "ops", tuple(ops))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("StarProduct is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, StarProduct):
            return NotImplemented
        return (self.nvars, self.order, self.ops) == (other.nvars, other.order, other.ops)

    def multiply(self, f: Poly | HSeries, g: Poly | HSeries) -> HSeries:
        """f * g = sum_k hbar^k sum_{i+j+l=k} B_i(f_j, g_l), truncated at the order."""
        f = self._lift(f)
        g = self._lift(g)
        n = self.nvars
        out = [Poly.zero(n) for _ in range(self.order + 1)]
        for i, op in enumerate(self.ops):
            if op.is_zero():
                continue
            for j, fj in enumerate(f.coeffs):
                if i + j > self.order or fj.is_zero():
                    continue
                for l, gl in enumerate(g.coeffs):
                    k = i + j + l
                    if k > self.order:
                        break
                    if gl.is_zero():
                        continue
                    out[k] = out[k] + op.apply(fj, gl)
        return HSeries(self.order, out)

    def commutator(self, f: Poly | HSeries, g: Poly | HSeries) -> HSeries:
        return self.multiply(f, g) - self.multiply(g, f)

    def _lift(self, f: Poly | HSeries) -> HSeries:
        if isinstance(f, Poly):
            if f.nvars != self.nvars:
                raise ValueError("nvars mismatch")
            return HSeries.from_poly(f, self.order)
        if isinstance(f, HSeries):
            if f.nvars != self.nvars:
                raise ValueError("nvars mismatch")
            if f.order != self.order:
                raise ValueError(f"series order {f.order} incompatible with product order {self.order}")
            return f
        raise TypeError("expected Poly or HSeries")

    def all_constant(self) -> bool:
        return all(op.all_constant() for op in self.ops)

    def __repr__(self) -> str:
        return f"StarProduct(nvars={self.nvars}, order={self.order})"


def star_multiply(product: StarProduct, f: Poly | HSeries, g: Poly | HSeries) -> HSeries:
    """Module-level alias for StarProduct.multiply."""
    return product.multiply(f, g)


# -- Moyal ------------------------------------------------------------------

def moyal(gamma: Bivector, order: int) -> StarProduct:
    """Exponential star product for a constant bivector: B_k = P^k / k! with
    P = sum gamma^{ij} d_i (x) d_j.  Exactly associative at every truncation."""
    n = gamma.nvars
    for poly in gamma.entries.values():
        if not poly.is_constant():
            raise ValueError("moyal requires constant bivector entries")
    zero = (0,) * n
    pairing: dict[tuple[Exponent, Exponent], Fraction] = {}
    for (i, j), poly in gamma.entries.items():
        c = poly.constant_value()
        ei = tuple(1 if v == i else 0 for v in range(n))
        ej = tuple(1 if v == j else 0 for v in range(n))
        pairing[(ei, ej)] = pairing.get((ei, ej), Fraction(0)) + c
        pairing[(ej, ei)] = pairing.get((ej, ei), Fraction(0)) - c
    pairing = {k: v for k, v in pairing.items() if v}

    ops = [BiDiffOp.multiplication(n)]
    current: dict[tuple[Exponent, Exponent], Fraction] = {(zero, zero): Fraction(1)}
    for k in range(1, order + 1):
        nxt: dict[tuple[Exponent, Exponent], Fraction] = {}
        for (a1, b1), c1 in current.items():
            for (a2, b2), c2 in pairing.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple(x + y for x, y in zip(b1, b2)))
                s = nxt.get(key, Fraction(0)) + c1 * c2
                if s:
                    nxt[key] = s
                else:
                    nxt.pop(key, None)
        current = {key: c / k for key, c in nxt.items()}
        ops.append(BiDiffOp(n, {key: Poly.const(n, c) for key, c in current.items()}))
    return StarProduct(n, order, ops)


# -- associativity residual ---------------------------------------------------

def assoc_residual(product: StarProduct, k: int) -> TriDiffOp:
    """sum_{i+j=k} [ B_i(B_j(.,.),.) - B_i(., B_j(.,.)) ]; zero for all
    k <= N exactly when the product is associative mod hbar^(N+1)."""
    if k > product.order:
        raise ValueError(f"order {k} exceeds product order {product.order}")
    if product.all_constant():
        return _assoc_residual_constant(product, k)
    n = product.nvars
    total = TriDiffOp.zero(n)
    for i in range(k + 1):
        j = k - i
        outer, inner = product.ops[i], product.ops[j]
        if outer.is_zero() or inner.is_zero():
            continue
        total = total + compose_first(outer, inner) - compose_second(outer, inner)
    return total


def _assoc_residual_constant(product: StarProduct, k: int) -> TriDiffOp:
    # Constant coefficients: compositions are symbol products in 3n variables.
    # Multi-indices are packed into ints (5 bits per field) and coefficients
    # scaled to integers, so the zero test runs on plain int dicts.
    n = product.nvars
    shift = 5
    if any(sum(a) > 15 or sum(b) > 15 for op in product.ops[:k + 1] for a, b in op.terms):
        return _assoc_residual_generic(product, k)

    denom = 1
    for op in product.ops[:k + 1]:
        for poly in op.terms.values():
            denom = lcm(denom, poly.constant_value().denominator)

    def pack(vec: Exponent, offset: int) -> int:
        out = 0
        for pos, e in enumerate(vec):
            out |= e << (shift * (offset + pos))
        return out

    split_cache: dict[tuple[Exponent, int, int], list[tuple[int, int]]] = {}

    def packed_splits(vec: Exponent, off1: int, off2: int) -> list[tuple[int, int]]:
        # packed (nu at off1) + (rho at off2) for all splits nu + rho = vec
        key = (vec, off1, off2)
        cached = split_cache.get(key)
        if cached is None:
            cached = [(pack(nu, off1) + pack(rho, off2), w)
                      for nu, rho, w in _splits(vec)]
            split_cache[key] = cached
        return cached

    b_int = []
    for op in product.ops[:k + 1]:
        b_int.append({(a, b): int(poly.constant_value() * denom)
                      for (a, b), poly in op.terms.items()})

    # first slot composition: b_i(y+z, w) against partner b_j(y, z);
    # second slot composition: b_i(y, z+w) against partner b_j(z, w)
    expand_first, partner_first = [], []
    expand_second, partner_second = [], []
    for bi in b_int:
        ef: dict[int, int] = {}
        es: dict[int, int] = {}
        for (a, b), c in bi.items():
            pb_w = pack(b, 2 * n)
            pa_y = pack(a, 0)
            for base, w in packed_splits(a, 0, n):
                key = base + pb_w
                ef[key] = ef.get(key, 0) + c * w
            for base, w in packed_splits(b, n, 2 * n):
                key = pa_y + base
                es[key] = es.get(key, 0) + c * w
        expand_first.append(ef)
        expand_second.append(es)
        partner_first.append({pack(a, 0) + pack(b, n): c for (a, b), c in bi.items()})
        partner_second.append({pack(a, n) + pack(b, 2 * n): c for (a, b), c in bi.items()})

    acc: dict[int, int] = {}
    acc_get = acc.get
    for i in range(k + 1):
        j = k - i
        for pairs in ((expand_first[i], partner_first[j], 1),
                      (expand_second[i], partner_second[j], -1)):
            expanded, partner, sign = pairs
            if not expanded or not partner:
                continue
            partner_items = list(partner.items())
            for ka, va in expanded.items():
                if sign < 0:
                    va = -va
                for kb, vb in partner_items:
                    key = ka + kb
                    acc[key] = acc_get(key, 0) + va * vb

    mask = (1 << shift) - 1
    scale = Fraction(1, denom * denom)
    terms = {}
    for key, val in acc.items():
        if not val:
            continue
        fields = [(key >> (shift * p)) & mask for p in range(3 * n)]
        alpha = tuple(fields[:n])
        beta = tuple(fields[n:2 * n])
        delta = tuple(fields[2 * n:])
        terms[(alpha, beta, delta)] = Poly.const(n, val * scale)
    return TriDiffOp(n, terms)


def _assoc_residual_generic(product: StarProduct, k: int) -> TriDiffOp:
    n = product.nvars
    total = TriDiffOp.zero(n)
    for i in range(k + 1):
        j = k - i
        outer, inner = product.ops[i], product.ops[j]
        if outer.is_zero() or inner.is_zero():
            continue
        total = total + compose_first(outer, inner) - compose_second(outer, inner)
    return total


# -- HKR extraction -----------------------------------------------------------

def hkr_class(residual: TriDiffOp) -> PolyVector:
    """Trivector read off the one-derivative-per-slot part of a 3-cochain:
    signed sum over slot permutations, no averaging factor.  Kills Hochschild
    coboundaries, so the value only depends on the obstruction class."""
    n = residual.nvars
    comps: dict[tuple[int, int, int], Poly] = {}
    for (alpha, beta, delta), poly in residual.terms.items():
        if sum(alpha) != 1 or sum(beta) != 1 or sum(delta) != 1:
            continue
        i, j, l = alpha.index(1), beta.index(1), delta.index(1)
        if len({i, j, l}) < 3:
            continue
        seq = (i, j, l)
        inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if seq[a] > seq[b])
        sign = -1 if inversions % 2 else 1
        key = tuple(sorted(seq))
        prev = comps.get(key)
        contrib = poly * sign
        comps[key] = contrib if prev is None else prev + contrib
    return PolyVector(n, 3, comps)


# -- the order-by-order solver ------------------------------------------------

@dataclass(frozen=True)
class AnsatzSpec:
    """Finite-dimensional search space for the solver.

    Per-slot derivative order at hbar-order k is bounded by `deriv_bound`
    (absolute) or by k when None; each slot differentiates at least once so
    unitality is built in.  Coefficients at order k are monomials of degree
    at most max(0, k(d-2) + |alpha| + |beta|) for input coefficient degree d,
    with equality required when homogeneous_only is set.
    """
    deriv_bound: int | None = None
    homogeneous_only: bool = False
    bump: int = 0

    def bound_at(self, k: int) -> int:
        base = k if self.deriv_bound is None else self.deriv_bound
        return base + self.bump

    def bumped(self) -> AnsatzSpec:
        return replace(self, bump=self.bump + 1)


@dataclass(frozen=True)
class Obstruction:
    """Failure of the associativity solve, with its trivector class."""
    order: int
    residual: TriDiffOp
    hkr: PolyVector


class AnsatzTooSmallError(RuntimeError):
    """The system became solvable after enlarging the derivative bound by one,
    so the failure was an ansatz artifact, not a genuine obstruction."""

    def __init__(self, order: int):
        super().__init__(
            f"ansatz too small at hbar-order {order}: enlarging the derivative "
            f"bound by 1 makes the system solvable")
        self.order = order


def _exponents_upto(n: int, lo: int, hi: int) -> list[Exponent]:
    out: list[Exponent] = []

    def rec(prefix: tuple[int, ...], remaining: int, budget: int):
        if remaining == 0:
            if sum(prefix) >= lo:
                out.append(prefix)
            return
        for e in range(budget + 1):
            rec(prefix + (e,), remaining - 1, budget - e)

    rec((), n, hi)
    out.sort(key=grlex_key)
    return out


def _class_unknowns(n: int, k: int, d: int, eta: tuple[int, ...], bound: int,
                    homogeneous_only: bool) -> list[tuple[Exponent, Exponent, Exponent]]:
    slots = _exponents_upto(n, 1, bound)
    unknowns = []
    for alpha in slots:
        for beta in slots:
            mono = tuple(e + a + b for e, a, b in zip(eta, alpha, beta))
            if any(m < 0 for m in mono):
                continue
            cap = max(0, k * (d - 2) + sum(alpha) + sum(beta))
            deg = sum(mono)
            if homogeneous_only:
                if deg != cap:
                    continue
            elif deg > cap:
                continue
            unknowns.append((alpha, beta, mono))
    unknowns.sort(key=lambda abm: (sum(abm[0]) + sum(abm[1]), abm[0], abm[1]))
    return unknowns


def _hochschild_columns(n: int, alpha: Exponent, beta: Exponent, mono: Exponent):
    """Row contributions of one ansatz element e = x^mono d^alpha (x) d^beta to
    sum_{(i,j) in {(k,0),(0,k)}} [B_i o1 B_j - B_i o2 B_j] with B_k := e."""
    zero = (0,) * n
    col: dict[tuple, Fraction] = {}

    def add(key, value):
        s = col.get(key, Fraction(0)) + value
        if s:
            col[key] = s
        else:
            col.pop(key, None)

    for nu, rho, w in _splits(alpha):         # e(fg, h)
        add((mono, nu, rho, beta), Fraction(w))
    for nu, rho, w in _splits(beta):          # -e(f, gh)
        add((mono, alpha, nu, rho), Fraction(-w))
    add((mono, alpha, beta, zero), Fraction(1))   # e(f,g) h
    add((mono, zero, alpha, beta), Fraction(-1))  # -f e(g,h)
    return col


def _known_residual(ops: list[BiDiffOp], k: int) -> TriDiffOp:
    n = ops[0].nvars
    total = TriDiffOp.zero(n)
    for i in range(1, k):
        j = k - i
        if ops[i].is_zero() or ops[j].is_zero():
            continue
        total = total + compose_first(ops[i], ops[j]) - compose_second(ops[i], ops[j])
    return total


def _solve_order(ops: list[BiDiffOp], k: int, spec: AnsatzSpec, d: int,
                 restrict: set | None = None
                 ) -> tuple[BiDiffOp, bool, set]:
    """Solve the order-k associativity system.

    Returns (B_k, consistent, failed_classes).  With `restrict`, only the
    listed net-multidegree classes are solved (used to re-test previously
    inconsistent blocks under a larger ansatz: enlarging the ansatz cannot
    break the blocks that were already consistent)."""
    from . import linalg

    n = ops[0].nvars
    known = _known_residual(ops, k)

    classes: dict[tuple[int, ...], dict[tuple, Fraction]] = {}
    for (alpha, beta, delta), poly in known.terms.items():
        for mono, coef in poly.terms.items():
            eta = tuple(m - a - b - dl for m, a, b, dl in zip(mono, alpha, beta, delta))
            rows = classes.setdefault(eta, {})
            key = (mono, alpha, beta, delta)
            s = rows.get(key, Fraction(0)) + coef
            if s:
                rows[key] = s
            else:
                rows.pop(key, None)

    bound = spec.bound_at(k)
    coeffs: dict[tuple[Exponent, Exponent], dict[Exponent, Fraction]] = {}
    failed: set = set()
    for eta in sorted(classes):
        if restrict is not None and eta not in restrict:
            continue
        rhs_rows = classes[eta]
        if not rhs_rows:
            continue
        unknowns = _class_unknowns(n, k, d, eta, bound, spec.homogeneous_only)
        columns = [_hochschild_columns(n, a, b, m) for (a, b, m) in unknowns]
        row_keys = set(rhs_rows)
        for col in columns:
            row_keys.update(col)
        row_index = {row: idx for idx, row in enumerate(sorted(row_keys))}
        sparse_rows: list[dict[int, Fraction]] = [{} for _ in row_index]
        for cidx, col in enumerate(columns):
            for row, value in col.items():
                sparse_rows[row_index[row]][cidx] = value
        rhs = [Fraction(0)] * len(row_index)
        for row, value in rhs_rows.items():
            rhs[row_index[row]] = -value
        solution, ok = linalg.solve_best_effort_sparse(sparse_rows, len(unknowns), rhs)
        if not ok:
            failed.add(eta)
        for (alpha, beta, mono), value in zip(unknowns, solution):
            if value:
                slot = coeffs.setdefault((alpha, beta), {})
                slot[mono] = slot.get(mono, Fraction(0)) + value

    bk = BiDiffOp(n, {key: Poly(n, monos) for key, monos in coeffs.items()})
    return bk, not failed, failed


def star_solve(gamma: Bivector, order: int, spec: AnsatzSpec | None = None
               ) -> StarProduct | Obstruction:
    """Build a star product for gamma by solving associativity order by order.

    B_0 and B_1 are fixed (multiplication and the full gamma pairing); each
    B_k for k >= 2 is the deterministic solution of an exact linear system.
    A genuine inconsistency is returned as an Obstruction carrying the
    residual of the best partial solution and its HKR trivector; if bumping
    the derivative bound by one would have fixed it, AnsatzTooSmallError is
    raised instead so ansatz artifacts are never mistaken for obstructions.
    """
    spec = spec or AnsatzSpec()
    n = gamma.nvars
    d = gamma.max_coeff_degree()
    ops = [BiDiffOp.multiplication(n)]
    if order >= 1:
        ops.append(BiDiffOp.bivector_pairing(gamma))
    for k in range(2, order + 1):
        bk, ok, failed = _solve_order(ops, k, spec, d)
        if not ok:
            _, retry_ok, _ = _solve_order(ops, k, spec.bumped(), d, restrict=failed)
            if retry_ok:
                raise AnsatzTooSmallError(k)
            partial = ops + [bk]
            residual = _full_residual(partial, k)
            return Obstruction(k, residual, hkr_class(residual))
        ops.append(bk)
        check = _full_residual(ops, k)
        if not check.is_zero():  # pragma: no cover - internal consistency
            raise RuntimeError(f"solver produced nonzero residual at order {k}")
    return StarProduct(n, order, ops)


def _full_residual(ops: list[BiDiffOp], k: int) -> TriDiffOp:
    n = ops[0].nvars
    total = TriDiffOp.zero(n)
    for i in range(k + 1):
        j = k - i
        if i >= len(ops) or j >= len(ops):
            continue
        if ops[i].is_zero() or ops[j].is_zero():
            continue
        total = total + compose_first(ops[i], ops[j]) - compose_second(ops[i], ops[j])
    return total
