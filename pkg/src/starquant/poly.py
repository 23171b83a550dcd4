"""Exact sparse multivariate polynomials and truncated hbar-series.

A polynomial is a map from exponent multi-indices (one non-negative int per
variable) to rational coefficients (fractions.Fraction).  Zero coefficients
are never stored, so equality of dicts is equality of polynomials.  All
values are immutable after construction; every operation returns a fresh
object and is safe to call concurrently.

Canonical term order is graded lexicographic: higher total degree first,
ties broken by the exponent tuple itself (so x1 beats x2).  Printing,
serialization and solver pivoting all use this order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

Exponent = tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def grlex_key(exponent: Exponent) -> tuple:
    """Sort key for graded lexicographic order (use with reverse=True)."""
    return (sum(exponent), exponent)


def default_names(nvars: int) -> list[str]:
    return [f"x{i + 1}" for i in range(nvars)]


class Poly:
    """Multivariate polynomial over the rationals."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Fraction] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for exponent, coef in terms.items():
                if len(exponent) != nvars:
                    raise ValueError(f"exponent {exponent} does not match nvars={nvars}")
                if any(e < 0 for e in exponent):
                    raise ValueError(f"negative exponent in {exponent}")
                coef = as_fraction(coef)
                if coef:
                    clean[exponent] = coef
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> Poly:
        return Poly(nvars)

    @staticmethod
    def const(nvars: int, value) -> Poly:
        return Poly(nvars, {(0,) * nvars: as_fraction(value)})

    @staticmethod
    def one(nvars: int) -> Poly:
        return Poly.const(nvars, 1)

    @staticmethod
    def variable(nvars: int, index: int) -> Poly:
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for nvars={nvars}")
        exponent = [0] * nvars
        exponent[index] = 1
        return Poly(nvars, {tuple(exponent): ONE})

    @staticmethod
    def monomial(nvars: int, exponent: Iterable[int], coef=1) -> Poly:
        return Poly(nvars, {tuple(exponent): as_fraction(coef)})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, ZERO)

    def coefficient(self, exponent: Iterable[int]) -> Fraction:
        return self.terms.get(tuple(exponent), ZERO)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> int:
        if not self.terms:
            return -1
        return max(e[index] for e in self.terms)

    def weighted_degree(self, weights: Iterable[int]) -> int | None:
        """Max of sum(e_i * w_i) over terms, or None for zero."""
        w = tuple(weights)
        if not self.terms:
            return None
        return max(sum(ei * wi for ei, wi in zip(e, w)) for e in self.terms)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exponent = max(self.terms, key=grlex_key)
        return exponent, self.terms[exponent]

    def is_homogeneous(self, degree: int | None = None) -> bool:
        """True when all terms share one total degree (zero counts as homogeneous)."""
        if not self.terms:
            return True
        degrees = {sum(e) for e in self.terms}
        if len(degrees) > 1:
            return False
        return degree is None or degrees == {degree}

    def homogeneous_part(self, degree: int) -> Poly:
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == degree})

    def homogeneous_decomposition(self) -> dict[int, Poly]:
        out: dict[int, dict[Exponent, Fraction]] = {}
        for e, c in self.terms.items():
            out.setdefault(sum(e), {})[e] = c
        return {d: Poly(self.nvars, t) for d, t in sorted(out.items())}

    # -- arithmetic --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __neg__(self) -> Poly:
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            s = acc.get(e, ZERO) + c
            if s:
                acc[e] = s
            else:
                acc.pop(e, None)
        return Poly(self.nvars, acc)

    __radd__ = __add__

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> Poly:
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly(self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        acc: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = acc.get(e, ZERO) + c1 * c2
                if s:
                    acc[e] = s
                else:
                    acc.pop(e, None)
        return Poly(self.nvars, acc)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> Poly:
        c = as_fraction(scalar)
        if not c:
            raise ZeroDivisionError("division of Poly by zero scalar")
        return self * (1 / c)

    def __pow__(self, exponent: int) -> Poly:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.one(self.nvars)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.nvars, other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    # -- calculus ----------------------------------------------------------

    def partial(self, index: int) -> Poly:
        """Formal partial derivative with respect to variable `index`."""
        if not 0 <= index < self.nvars:
            raise IndexError(f"variable index {index} out of range")
        acc: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[index]
            if k == 0:
                continue
            e2 = e[:index] + (k - 1,) + e[index + 1:]
            s = acc.get(e2, ZERO) + c * k
            if s:
                acc[e2] = s
            else:
                acc.pop(e2, None)
        return Poly(self.nvars, acc)

    def partial_multi(self, alpha: Exponent) -> Poly:
        """Iterated derivative d^alpha, computed termwise with falling factorials."""
        acc: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            factor = 1
            ok = True
            for ev, av in zip(e, alpha):
                if ev < av:
                    ok = False
                    break
                for t in range(av):
                    factor *= ev - t
            if not ok:
                continue
            e2 = tuple(ev - av for ev, av in zip(e, alpha))
            s = acc.get(e2, ZERO) + c * factor
            if s:
                acc[e2] = s
            else:
                acc.pop(e2, None)
        return Poly(self.nvars, acc)

    # -- substitution ------------------------------------------------------

    def eval_var(self, index: int, value) -> Poly:
        """Substitute a rational constant for one variable (ring unchanged)."""
        value = as_fraction(value)
        acc: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            c2 = c * value ** e[index]
            e2 = e[:index] + (0,) + e[index + 1:]
            s = acc.get(e2, ZERO) + c2
            if s:
                acc[e2] = s
            else:
                acc.pop(e2, None)
        return Poly(self.nvars, acc)

    def drop_var(self, index: int) -> Poly:
        """Remove a variable that no term uses."""
        if any(e[index] for e in self.terms):
            raise ValueError(f"variable {index} still occurs")
        return Poly(self.nvars - 1,
                    {e[:index] + e[index + 1:]: c for e, c in self.terms.items()})

    def insert_var(self, index: int, nvars_after: int | None = None) -> Poly:
        """Reinterpret in a ring with one extra variable at position `index`."""
        return Poly(self.nvars + 1,
                    {e[:index] + (0,) + e[index:]: c for e, c in self.terms.items()})

    def compose_linear(self, matrix: list[list[Fraction]]) -> Poly:
        """Substitute x_i -> sum_j matrix[i][j] * x_j."""
        if len(matrix) != self.nvars:
            raise ValueError("matrix size does not match nvars")
        images = [Poly(self.nvars, {tuple(1 if j == k else 0 for k in range(self.nvars)):
                                    as_fraction(matrix[i][j])
                                    for j in range(self.nvars) if matrix[i][j]})
                  for i in range(self.nvars)]
        acc = Poly.zero(self.nvars)
        for e, c in self.terms.items():
            term = Poly.const(self.nvars, c)
            for i, ei in enumerate(e):
                for _ in range(ei):
                    term = term * images[i]
            acc = acc + term
        return acc

    # -- division ----------------------------------------------------------

    def divmod_single(self, divisor: Poly) -> tuple[Poly, Poly]:
        """Division by a single polynomial under graded-lex; exact for
        membership in the principal ideal (remainder 0 iff divisible)."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if divisor.nvars != self.nvars:
            raise ValueError("nvars mismatch")
        lt_e, lt_c = divisor.leading_term()
        quotient = Poly.zero(self.nvars)
        remainder: dict[Exponent, Fraction] = {}
        work = self
        while not work.is_zero():
            e, c = work.leading_term()
            if all(ev >= dv for ev, dv in zip(e, lt_e)):
                q = Poly.monomial(self.nvars, tuple(ev - dv for ev, dv in zip(e, lt_e)), c / lt_c)
                quotient = quotient + q
                work = work - q * divisor
            else:
                remainder[e] = c
                work = Poly(self.nvars, {k: v for k, v in work.terms.items() if k != e})
        return quotient, Poly(self.nvars, remainder)

    # -- printing ----------------------------------------------------------

    def to_str(self, names: list[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or default_names(self.nvars)
        pieces = []
        for e, c in self.sorted_terms():
            factors = []
            for i, ei in enumerate(e):
                if ei == 1:
                    factors.append(names[i])
                elif ei > 1:
                    factors.append(f"{names[i]}^{ei}")
            body = "*".join(factors)
            if not body:
                piece = str(c)
            elif c == 1:
                piece = body
            elif c == -1:
                piece = f"-{body}"
            else:
                piece = f"{c}*{body}"
            pieces.append(piece)
        out = pieces[0]
        for piece in pieces[1:]:
            out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.to_str()})"


def poly_mul(f: Poly, g: Poly) -> Poly:
    """Exact product of two polynomials sharing a variable set."""
    return f * g


def poly_partial(f: Poly, index: int) -> Poly:
    """Formal partial derivative d/dx_index."""
    return f.partial(index)


class HSeries:
    """Polynomial coefficients of hbar^0 .. hbar^N; arithmetic truncates at N."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Poly]):
        coeffs = tuple(coeffs)
        if order < 0:
            raise ValueError("order must be >= 0")
        if len(coeffs) != order + 1:
            raise ValueError(f"need {order + 1} coefficients, got {len(coeffs)}")
        nvars = coeffs[0].nvars
        if any(c.nvars != nvars for c in coeffs):
            raise ValueError("coefficients must share nvars")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("HSeries is immutable")

    @property
    def nvars(self) -> int:
        return self.coeffs[0].nvars

    @staticmethod
    def from_poly(f: Poly, order: int) -> HSeries:
        return HSeries(order, (f,) + tuple(Poly.zero(f.nvars) for _ in range(order)))

    @staticmethod
    def zero(nvars: int, order: int) -> HSeries:
        return HSeries(order, tuple(Poly.zero(nvars) for _ in range(order + 1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other: HSeries) -> HSeries:
        self._check(other)
        return HSeries(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: HSeries) -> HSeries:
        self._check(other)
        return HSeries(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> HSeries:
        return HSeries(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> HSeries:
        """Cauchy product truncated at the ambient order (commutative series)."""
        if isinstance(other, (int, Fraction)):
            return self.scale_scalar(other)
        self._check(other)
        n = self.nvars
        acc = [Poly.zero(n) for _ in range(self.order + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > self.order:
                    break
                if b.is_zero():
                    continue
                acc[i + j] = acc[i + j] + a * b
        return HSeries(self.order, acc)

    __rmul__ = __mul__

    def scale_scalar(self, scalar) -> HSeries:
        c = as_fraction(scalar)
        return HSeries(self.order, tuple(a * c for a in self.coeffs))

    def scale_series(self, scalars: Iterable[Fraction]) -> HSeries:
        """Multiply by a truncated hbar-scalar given as coefficient vector."""
        vec = [as_fraction(s) for s in scalars]
        if len(vec) != self.order + 1:
            raise ValueError("scalar vector length must be order+1")
        n = self.nvars
        acc = [Poly.zero(n) for _ in range(self.order + 1)]
        for i, s in enumerate(vec):
            if not s:
                continue
            for j, a in enumerate(self.coeffs):
                if i + j > self.order:
                    break
                acc[i + j] = acc[i + j] + a * s
        return HSeries(self.order, acc)

    def shift(self, power: int) -> HSeries:
        """Multiply by hbar^power (truncating)."""
        n = self.nvars
        acc = [Poly.zero(n) for _ in range(self.order + 1)]
        for i, a in enumerate(self.coeffs):
            if i + power <= self.order:
                acc[i + power] = a
        return HSeries(self.order, acc)

    def _check(self, other: HSeries):
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")

    def to_str(self, names: list[str] | None = None) -> str:
        pieces = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = c.to_str(names)
            if k == 0:
                pieces.append(body)
            else:
                h = "h" if k == 1 else f"h^{k}"
                pieces.append(f"{h}*({body})")
        return " + ".join(pieces) if pieces else "0"

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"HSeries(order={self.order}, {self})"

    def __iter__(self) -> Iterator[Poly]:
        return iter(self.coeffs)
