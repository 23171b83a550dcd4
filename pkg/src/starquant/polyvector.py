"""Polyvector fields, bivectors, and the Schouten bracket.

A degree-k polyvector field is stored as a map from strictly increasing
k-tuples of variable indices to polynomial components.  Internally the
Schouten bracket is computed in odd coordinates: a polyvector corresponds
to a polynomial in anticommuting xi_i, and

    [P, Q] = P . Q - (-1)^((p-1)(q-1)) Q . P,
    P . Q  = sum_s (dP/dxi_s)(dQ/dx_s),

with dP/dxi_s the left derivative.  Sign convention, fixed and tested:
for a bivector g, [g, g](df, dg, dh) = 2 * Jacobiator(f, g, h) where the
Jacobiator is {{f,g},h} + {{g,h},f} + {{h,f},g}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .linalg import mat_inv
from .poly import Poly, as_fraction

IndexTuple = tuple[int, ...]


class PolyVector:
    """Antisymmetric polyvector field with polynomial components."""

    __slots__ = ("nvars", "degree", "components")

    def __init__(self, nvars: int, degree: int,
                 components: Mapping[IndexTuple, Poly] | None = None):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        if degree > nvars and components:
            # the exterior power vanishes above nvars; only zero lives there
            raise ValueError(f"degree {degree} exceeds nvars={nvars}")
        clean: dict[IndexTuple, Poly] = {}
        if components:
            for key, poly in components.items():
                key = tuple(key)
                if len(key) != degree:
                    raise ValueError(f"key {key} has wrong length for degree {degree}")
                if any(not 0 <= i < nvars for i in key):
                    raise ValueError(f"index out of range in {key}")
                if any(a >= b for a, b in zip(key, key[1:])):
                    raise ValueError(f"key {key} not strictly increasing")
                if poly.nvars != nvars:
                    raise ValueError("component nvars mismatch")
                if not poly.is_zero():
                    clean[key] = poly
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "components", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PolyVector is immutable")

    @staticmethod
    def zero(nvars: int, degree: int) -> PolyVector:
        return PolyVector(nvars, degree)

    def is_zero(self) -> bool:
        return not self.components

    def component(self, key: IndexTuple) -> Poly:
        return self.components.get(tuple(key), Poly.zero(self.nvars))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        return (self.nvars, self.degree, self.components) == \
               (other.nvars, other.degree, other.components)

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.components)))

    def __add__(self, other: PolyVector) -> PolyVector:
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise ValueError("polyvector shape mismatch")
        acc = dict(self.components)
        for key, poly in other.components.items():
            acc[key] = acc.get(key, Poly.zero(self.nvars)) + poly
        return PolyVector(self.nvars, self.degree, acc)

    def __neg__(self) -> PolyVector:
        return PolyVector(self.nvars, self.degree,
                          {k: -p for k, p in self.components.items()})

    def __sub__(self, other: PolyVector) -> PolyVector:
        return self + (-other)

    def scale(self, scalar) -> PolyVector:
        c = as_fraction(scalar)
        return PolyVector(self.nvars, self.degree,
                          {k: p * c for k, p in self.components.items()})

    def to_str(self, names=None) -> str:
        if not self.components:
            return "0"
        pieces = []
        for key in sorted(self.components):
            wedge = "^".join(f"d{i + 1}" for i in key)
            pieces.append(f"({self.components[key].to_str(names)}) {wedge}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"PolyVector(deg={self.degree}, {self.to_str()})"


def _wedge_key(left: IndexTuple, right: IndexTuple) -> tuple[IndexTuple, int] | None:
    """Merge two increasing index tuples; None when they share an index."""
    if set(left) & set(right):
        return None
    inversions = 0
    for a in left:
        for b in right:
            if b < a:
                inversions += 1
    merged = tuple(sorted(left + right))
    return merged, (-1 if inversions % 2 else 1)


def _dot_into(acc: dict[IndexTuple, Poly], first: PolyVector, second: PolyVector,
              factor: int) -> None:
    # sum_s (d first / d xi_s) * (d second / d x_s), accumulated with sign factor
    nvars = first.nvars
    for s in range(nvars):
        d_second = {key: poly.partial(s) for key, poly in second.components.items()}
        d_second = {k: p for k, p in d_second.items() if not p.is_zero()}
        if not d_second:
            continue
        for key, poly in first.components.items():
            if s not in key:
                continue
            pos = key.index(s)
            sgn = -1 if pos % 2 else 1
            reduced = key[:pos] + key[pos + 1:]
            for key2, dq in d_second.items():
                merged = _wedge_key(reduced, key2)
                if merged is None:
                    continue
                merged_key, wedge_sign = merged
                contrib = poly * dq * (factor * sgn * wedge_sign)
                prev = acc.get(merged_key)
                acc[merged_key] = contrib if prev is None else prev + contrib


def schouten(first: PolyVector, second: PolyVector) -> PolyVector:
    """Schouten-Nijenhuis bracket [first, second] (degree p+q-1)."""
    if first.nvars != second.nvars:
        raise ValueError("nvars mismatch")
    p, q = first.degree, second.degree
    degree = p + q - 1
    if degree > first.nvars:
        raise ValueError("degree overflow: bracket exceeds the number of variables")
    if degree < 0:
        return PolyVector.zero(first.nvars, 0)
    acc: dict[IndexTuple, Poly] = {}
    _dot_into(acc, first, second, 1)
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    _dot_into(acc, second, first, -sign)
    return PolyVector(first.nvars, degree, acc)


class Bivector:
    """Antisymmetric bivector field, stored as its strictly upper triangle."""

    __slots__ = ("nvars", "entries")

    def __init__(self, nvars: int, entries: Mapping[tuple[int, int], Poly] | None = None):
        clean: dict[tuple[int, int], Poly] = {}
        if entries:
            for (i, j), poly in entries.items():
                if not 0 <= i < j < nvars:
                    raise ValueError(f"entry index ({i},{j}) must satisfy 0 <= i < j < nvars")
                if poly.nvars != nvars:
                    raise ValueError("entry nvars mismatch")
                if not poly.is_zero():
                    clean[(i, j)] = poly
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Bivector is immutable")

    @staticmethod
    def zero(nvars: int) -> Bivector:
        return Bivector(nvars)

    @staticmethod
    def from_dict(nvars: int, entries: Mapping[tuple[int, int], Poly]) -> Bivector:
        """Accepts entries with arbitrary index order, folding in the sign."""
        acc: dict[tuple[int, int], Poly] = {}
        for (i, j), poly in entries.items():
            if i == j:
                if not poly.is_zero():
                    raise ValueError("diagonal entries must vanish")
                continue
            key, sgn = ((i, j), 1) if i < j else ((j, i), -1)
            acc[key] = acc.get(key, Poly.zero(nvars)) + poly * sgn
        return Bivector(nvars, acc)

    def entry(self, i: int, j: int) -> Poly:
        """Signed entry gamma^{ij}; gamma^{ji} = -gamma^{ij}, gamma^{ii} = 0."""
        if i == j:
            return Poly.zero(self.nvars)
        if i < j:
            return self.entries.get((i, j), Poly.zero(self.nvars))
        return -self.entries.get((j, i), Poly.zero(self.nvars))

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bivector):
            return NotImplemented
        return self.nvars == other.nvars and self.entries == other.entries

    def __hash__(self):
        return hash((self.nvars, frozenset(self.entries)))

    def scale(self, scalar) -> Bivector:
        c = as_fraction(scalar)
        return Bivector(self.nvars, {k: p * c for k, p in self.entries.items()})

    def __add__(self, other: Bivector) -> Bivector:
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        acc = dict(self.entries)
        for k, p in other.entries.items():
            acc[k] = acc.get(k, Poly.zero(self.nvars)) + p
        return Bivector(self.nvars, acc)

    def bracket(self, f: Poly, g: Poly) -> Poly:
        """{f, g} = sum_{i,j} gamma^{ij} d_i f d_j g over the full matrix."""
        if f.nvars != self.nvars or g.nvars != self.nvars:
            raise ValueError("nvars mismatch")
        acc = Poly.zero(self.nvars)
        for (i, j), poly in self.entries.items():
            acc = acc + poly * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i))
        return acc

    def to_polyvector(self) -> PolyVector:
        return PolyVector(self.nvars, 2, dict(self.entries))

    def max_coeff_degree(self) -> int:
        """Max total degree over entries (0 for the zero bivector)."""
        if not self.entries:
            return 0
        return max(p.total_degree() for p in self.entries.values())

    def is_homogeneous_quadratic(self) -> bool:
        return all(p.is_homogeneous(2) for p in self.entries.values())

    def to_str(self, names=None) -> str:
        if not self.entries:
            return "0"
        return "; ".join(f"g[{i + 1},{j + 1}] = {p.to_str(names)}"
                         for (i, j), p in sorted(self.entries.items()))

    def __repr__(self) -> str:
        return f"Bivector({self.to_str()})"


def schouten_square(gamma: Bivector) -> PolyVector:
    """[gamma, gamma] as a trivector; zero exactly when gamma is Poisson."""
    if gamma.nvars < 3:
        # the trivector module vanishes, so the square is identically zero
        return PolyVector.zero(gamma.nvars, 3)
    pv = gamma.to_polyvector()
    return schouten(pv, pv)


@dataclass(frozen=True)
class JacobiReport:
    """Outcome of the Poisson condition check."""
    passed: bool
    witness: PolyVector | None

    def __bool__(self) -> bool:
        return self.passed


def jacobi_check(gamma: Bivector) -> JacobiReport:
    """Pass iff [gamma, gamma] = 0; on failure the witness is the trivector."""
    square = schouten_square(gamma)
    if square.is_zero():
        return JacobiReport(True, None)
    return JacobiReport(False, square)


def transform_bivector(gamma: Bivector, matrix: list[list[Fraction]]) -> Bivector:
    """Push gamma through the substitution x = A y (A invertible, rational).

    The result is the same geometric bivector written in y-coordinates:
    gamma'^{pq}(y) = sum_{ij} gamma^{ij}(A y) (A^-1)_{pi} (A^-1)_{qj}.
    """
    n = gamma.nvars
    a = [[as_fraction(v) for v in row] for row in matrix]
    inv = mat_inv(a)
    if inv is None:
        raise ValueError("change-of-basis matrix is singular")
    substituted = {key: poly.compose_linear(a) for key, poly in gamma.entries.items()}
    acc: dict[tuple[int, int], Poly] = {}
    for p in range(n):
        for q in range(p + 1, n):
            total = Poly.zero(n)
            for (i, j), poly in substituted.items():
                # full-matrix sum over (i,j) and (j,i)
                c = inv[p][i] * inv[q][j] - inv[p][j] * inv[q][i]
                if c:
                    total = total + poly * c
            if not total.is_zero():
                acc[(p, q)] = total
    return Bivector(n, acc)
