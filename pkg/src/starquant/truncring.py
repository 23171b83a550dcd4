"""The truncated scalar ring k[hbar]/hbar^(N+1) and exact linear algebra over it.

Elements are length-(N+1) vectors of rationals (coefficients of hbar^0..hbar^N).
The ring is local: an element is a unit exactly when its constant term is
nonzero, and linear problems are solved order by order from their hbar^0 part.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from . import linalg
from .poly import as_fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


class TruncNum:
    """Element of the order-N truncated hbar ring."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable = ()):
        if order < 0:
            raise ValueError("order must be >= 0")
        vec = [as_fraction(c) for c in coeffs]
        if len(vec) > order + 1:
            raise ValueError("too many coefficients")
        vec += [_ZERO] * (order + 1 - len(vec))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(vec))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("TruncNum is immutable")

    @staticmethod
    def zero(order: int) -> TruncNum:
        return TruncNum(order)

    @staticmethod
    def one(order: int) -> TruncNum:
        return TruncNum(order, (1,))

    @staticmethod
    def scalar(order: int, value) -> TruncNum:
        return TruncNum(order, (as_fraction(value),))

    @staticmethod
    def hbar(order: int, power: int = 1, value=1) -> TruncNum:
        if power > order:
            return TruncNum(order)
        vec = [_ZERO] * (order + 1)
        vec[power] = as_fraction(value)
        return TruncNum(order, vec)

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] != 0

    def lowest_order(self) -> int | None:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncNum):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def _coerce(self, other) -> TruncNum:
        if isinstance(other, TruncNum):
            if other.order != self.order:
                raise ValueError("truncation order mismatch")
            return other
        return TruncNum.scalar(self.order, other)

    def __add__(self, other) -> TruncNum:
        other = self._coerce(other)
        return TruncNum(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> TruncNum:
        return TruncNum(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other) -> TruncNum:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TruncNum:
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> TruncNum:
        other = self._coerce(other)
        n = self.order
        out = [_ZERO] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return TruncNum(n, out)

    __rmul__ = __mul__

    def inverse(self) -> TruncNum:
        """Multiplicative inverse; requires a nonzero constant term."""
        if not self.is_unit():
            raise ZeroDivisionError("not a unit in the truncated ring")
        n = self.order
        inv = [_ZERO] * (n + 1)
        inv[0] = 1 / self.coeffs[0]
        for k in range(1, n + 1):
            acc = _ZERO
            for s in range(1, k + 1):
                acc += self.coeffs[s] * inv[k - s]
            inv[k] = -acc / self.coeffs[0]
        return TruncNum(n, inv)

    def substitute_hbar_scale(self, factor) -> TruncNum:
        """hbar -> factor * hbar."""
        f = as_fraction(factor)
        return TruncNum(self.order, tuple(c * f ** k for k, c in enumerate(self.coeffs)))

    def __str__(self) -> str:
        bits = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                bits.append(str(c))
            else:
                h = "h" if k == 1 else f"h^{k}"
                bits.append(h if c == 1 else f"{c}*{h}")
        return " + ".join(bits) if bits else "0"

    def __repr__(self) -> str:
        return f"TruncNum({self})"


# -- vectors and matrices with TruncNum entries --------------------------------

TVec = list[TruncNum]
TMat = list[TVec]


def tvec_order(vec: TVec) -> int:
    return vec[0].order


def tvec_add(a: TVec, b: TVec) -> TVec:
    return [x + y for x, y in zip(a, b)]


def tvec_scale(vec: TVec, scalar: TruncNum) -> TVec:
    return [scalar * x for x in vec]


def tvec_is_zero(vec: TVec) -> bool:
    return all(x.is_zero() for x in vec)


def tvec_slice(vec: TVec, k: int) -> list[Fraction]:
    """The order-k rational layer of a TruncNum vector."""
    return [x.coeffs[k] for x in vec]


def tvec_from_layers(layers: list[list[Fraction]]) -> TVec:
    order = len(layers) - 1
    width = len(layers[0])
    return [TruncNum(order, [layers[k][i] for k in range(order + 1)])
            for i in range(width)]


def tmat_vec(matrix: TMat, vec: TVec) -> TVec:
    order = tvec_order(vec)
    out = []
    for row in matrix:
        acc = TruncNum.zero(order)
        for a, x in zip(row, vec):
            acc = acc + a * x
        out.append(acc)
    return out


def tmat_mul(a: TMat, b: TMat) -> TMat:
    order = a[0][0].order
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = TruncNum.zero(order)
            for x, y in zip(row, col):
                acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def tmat_identity(n: int, order: int) -> TMat:
    return [[TruncNum.one(order) if i == j else TruncNum.zero(order)
             for j in range(n)] for i in range(n)]


def tmat_layer(matrix: TMat, k: int) -> list[list[Fraction]]:
    return [[entry.coeffs[k] for entry in row] for row in matrix]


def trunc_solve(matrix: TMat, rhs: TVec) -> TVec | None:
    """Solve A x = b over the truncated ring by order-by-order lifting.

    Each hbar layer is an exact rational solve against the constant-term
    matrix, with free variables zeroed, so the answer is deterministic.
    Complete (None iff genuinely unsolvable) when the hbar^0 layer of A has
    full column rank, which holds everywhere this is used: membership
    against a basis whose constant terms are independent, and inversion of
    elements/matrices whose constant term is invertible.
    """
    if not matrix:
        return [] if all(x.is_zero() for x in rhs) else None
    order = rhs[0].order
    ncols = len(matrix[0])
    layers_a = [tmat_layer(matrix, k) for k in range(order + 1)]
    x_layers: list[list[Fraction]] = []
    for t in range(order + 1):
        target = tvec_slice(rhs, t)
        for s in range(1, t + 1):
            correction = linalg.mat_vec(layers_a[s], x_layers[t - s])
            target = [b - c for b, c in zip(target, correction)]
        xt = linalg.solve(layers_a[0], target)
        if xt is None:
            return None
        x_layers.append(xt)
    return tvec_from_layers(x_layers) if ncols else []


def tmat_inverse(matrix: TMat) -> TMat | None:
    """Inverse of a square TruncNum matrix; None when hbar^0 layer is singular."""
    n = len(matrix)
    order = matrix[0][0].order
    base_inv = linalg.mat_inv(tmat_layer(matrix, 0))
    if base_inv is None:
        return None
    layers_a = [tmat_layer(matrix, k) for k in range(order + 1)]
    x_layers = [base_inv]
    for t in range(1, order + 1):
        acc = [[_ZERO] * n for _ in range(n)]
        for s in range(1, t + 1):
            prod = linalg.mat_mul(layers_a[s], x_layers[t - s])
            acc = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(acc, prod)]
        layer = linalg.mat_mul(base_inv, acc)
        x_layers.append([[-v for v in row] for row in layer])
    return [[TruncNum(order, [x_layers[k][i][j] for k in range(order + 1)])
             for j in range(n)] for i in range(n)]
