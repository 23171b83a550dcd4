"""Bi- and tridifferential operators with polynomial coefficients.

A BiDiffOp is a finite sum  c(x) d^alpha (x) d^beta  acting on pairs of
polynomials as  sum c * (d^alpha f) * (d^beta g); TriDiffOp is the
three-slot analogue (the carrier of associativity residuals).  Summands
with equal derivative multi-indices are merged and zero coefficients
dropped, so is_zero() is a faithful operator-zero test.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Mapping

from .poly import Exponent, Poly


def _merge(acc: dict, key, poly: Poly) -> None:
    prev = acc.get(key)
    total = poly if prev is None else prev + poly
    if total.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = total


def _splits(alpha: Exponent):
    """All (nu, rho) with nu + rho = alpha, with the binomial weight."""
    out = [((), (), 1)]
    for a in alpha:
        nxt = []
        for nu, rho, w in out:
            for t in range(a + 1):
                nxt.append((nu + (t,), rho + (a - t,), w * comb(a, t)))
        out = nxt
    return out


def _splits3(alpha: Exponent):
    """All (mu, nu, rho) with mu + nu + rho = alpha, with multinomial weight."""
    out = [((), (), (), 1)]
    for a in alpha:
        nxt = []
        for mu, nu, rho, w in out:
            for t in range(a + 1):
                c1 = comb(a, t)
                for s in range(a - t + 1):
                    nxt.append((mu + (t,), nu + (s,), rho + (a - t - s,),
                                w * c1 * comb(a - t, s)))
        out = nxt
    return out


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class BiDiffOp:
    """Bidifferential operator; keys are (alpha, beta) multi-index pairs."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[Exponent, Exponent], Poly] | None = None):
        clean: dict[tuple[Exponent, Exponent], Poly] = {}
        if terms:
            for (alpha, beta), poly in terms.items():
                alpha, beta = tuple(alpha), tuple(beta)
                if len(alpha) != nvars or len(beta) != nvars:
                    raise ValueError("multi-index length mismatch")
                if poly.nvars != nvars:
                    raise ValueError("coefficient nvars mismatch")
                if not poly.is_zero():
                    _merge(clean, (alpha, beta), poly)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("BiDiffOp is immutable")

    @staticmethod
    def zero(nvars: int) -> BiDiffOp:
        return BiDiffOp(nvars)

    @staticmethod
    def multiplication(nvars: int) -> BiDiffOp:
        z = (0,) * nvars
        return BiDiffOp(nvars, {(z, z): Poly.one(nvars)})

    @staticmethod
    def bivector_pairing(gamma) -> BiDiffOp:
        """sum_{i,j} gamma^{ij} d_i (x) d_j over the full antisymmetric matrix."""
        n = gamma.nvars
        acc: dict[tuple[Exponent, Exponent], Poly] = {}
        for (i, j), poly in gamma.entries.items():
            ei = tuple(1 if v == i else 0 for v in range(n))
            ej = tuple(1 if v == j else 0 for v in range(n))
            _merge(acc, (ei, ej), poly)
            _merge(acc, (ej, ei), -poly)
        return BiDiffOp(n, acc)

    def is_zero(self) -> bool:
        return not self.terms

    def all_constant(self) -> bool:
        return all(p.is_constant() for p in self.terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiDiffOp):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms)))

    def __add__(self, other: BiDiffOp) -> BiDiffOp:
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        acc = dict(self.terms)
        for key, poly in other.terms.items():
            _merge(acc, key, poly)
        return BiDiffOp(self.nvars, acc)

    def __neg__(self) -> BiDiffOp:
        return BiDiffOp(self.nvars, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other: BiDiffOp) -> BiDiffOp:
        return self + (-other)

    def scale(self, scalar) -> BiDiffOp:
        return BiDiffOp(self.nvars, {k: p * scalar for k, p in self.terms.items()})

    def apply(self, f: Poly, g: Poly) -> Poly:
        if f.nvars != self.nvars or g.nvars != self.nvars:
            raise ValueError("nvars mismatch")
        acc = Poly.zero(self.nvars)
        for (alpha, beta), poly in self.terms.items():
            df = f.partial_multi(alpha)
            if df.is_zero():
                continue
            dg = g.partial_multi(beta)
            if dg.is_zero():
                continue
            acc = acc + poly * df * dg
        return acc

    def max_order(self) -> tuple[int, int]:
        if not self.terms:
            return (0, 0)
        return (max(sum(a) for a, _ in self.terms),
                max(sum(b) for _, b in self.terms))

    def is_unital(self) -> bool:
        """No summand differentiates a slot zero times (so B(1,.) = B(.,1) = 0)."""
        return all(sum(a) >= 1 and sum(b) >= 1 for a, b in self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "BiDiffOp(0)"
        bits = [f"({p}) d{a} (x) d{b}" for (a, b), p in sorted(self.terms.items())]
        return "BiDiffOp(" + " + ".join(bits) + ")"


class TriDiffOp:
    """Tridifferential operator; keys are (alpha, beta, delta) triples."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int,
                 terms: Mapping[tuple[Exponent, Exponent, Exponent], Poly] | None = None):
        clean: dict[tuple[Exponent, Exponent, Exponent], Poly] = {}
        if terms:
            for key, poly in terms.items():
                key = tuple(tuple(k) for k in key)
                if any(len(k) != nvars for k in key):
                    raise ValueError("multi-index length mismatch")
                if poly.nvars != nvars:
                    raise ValueError("coefficient nvars mismatch")
                if not poly.is_zero():
                    _merge(clean, key, poly)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("TriDiffOp is immutable")

    @staticmethod
    def zero(nvars: int) -> TriDiffOp:
        return TriDiffOp(nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriDiffOp):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms)))

    def __add__(self, other: TriDiffOp) -> TriDiffOp:
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        acc = dict(self.terms)
        for key, poly in other.terms.items():
            _merge(acc, key, poly)
        return TriDiffOp(self.nvars, acc)

    def __neg__(self) -> TriDiffOp:
        return TriDiffOp(self.nvars, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other: TriDiffOp) -> TriDiffOp:
        return self + (-other)

    def apply(self, f: Poly, g: Poly, h: Poly) -> Poly:
        acc = Poly.zero(self.nvars)
        for (alpha, beta, delta), poly in self.terms.items():
            df = f.partial_multi(alpha)
            if df.is_zero():
                continue
            dg = g.partial_multi(beta)
            if dg.is_zero():
                continue
            dh = h.partial_multi(delta)
            if dh.is_zero():
                continue
            acc = acc + poly * df * dg * dh
        return acc

    def __repr__(self) -> str:
        if not self.terms:
            return "TriDiffOp(0)"
        bits = [f"({p}) d{a}|d{b}|d{d}" for (a, b, d), p in sorted(self.terms.items())]
        return "TriDiffOp(" + " + ".join(bits) + ")"


def apply_bidiffop(op: BiDiffOp, f: Poly, g: Poly) -> Poly:
    """Evaluate sum c * (d^alpha f)(d^beta g); bilinear in (f, g)."""
    return op.apply(f, g)


def compose_first(outer: BiDiffOp, inner: BiDiffOp) -> TriDiffOp:
    """The operator (f, g, h) -> outer(inner(f, g), h)."""
    if outer.nvars != inner.nvars:
        raise ValueError("nvars mismatch")
    n = outer.nvars
    acc: dict = {}
    for (ao, bo), po in outer.terms.items():
        for (ai, bi), pi in inner.terms.items():
            if pi.is_constant():
                # coefficient untouched: alpha_o Leibniz-splits over the two inner slots
                for nu, rho, w in _splits(ao):
                    key = (_add_exp(nu, ai), _add_exp(rho, bi), bo)
                    _merge(acc, key, po * pi * w)
            else:
                for mu, nu, rho, w in _splits3(ao):
                    dpi = pi.partial_multi(mu)
                    if dpi.is_zero():
                        continue
                    key = (_add_exp(nu, ai), _add_exp(rho, bi), bo)
                    _merge(acc, key, po * dpi * w)
    return TriDiffOp(n, acc)


def compose_second(outer: BiDiffOp, inner: BiDiffOp) -> TriDiffOp:
    """The operator (f, g, h) -> outer(f, inner(g, h))."""
    if outer.nvars != inner.nvars:
        raise ValueError("nvars mismatch")
    n = outer.nvars
    acc: dict = {}
    for (ao, bo), po in outer.terms.items():
        for (ai, bi), pi in inner.terms.items():
            if pi.is_constant():
                for nu, rho, w in _splits(bo):
                    key = (ao, _add_exp(nu, ai), _add_exp(rho, bi))
                    _merge(acc, key, po * pi * w)
            else:
                for mu, nu, rho, w in _splits3(bo):
                    dpi = pi.partial_multi(mu)
                    if dpi.is_zero():
                        continue
                    key = (ao, _add_exp(nu, ai), _add_exp(rho, bi))
                    _merge(acc, key, po * dpi * w)
    return TriDiffOp(n, acc)
