"""Filtered presentations, Rees constructions, and filtration/bracket checks.

Presentations come in two flavours: free commutative polynomial rings with
weighted generators, and small noncommutative rewrite systems whose rules
replace an out-of-order two-letter word by lower terms (Weyl-type).  The
Rees presentation adds a central degree-1 generator t and rebalances every
rule to homogeneous weight; specializing t=1 recovers the input and killing
t gives the associated graded presentation.  All identities are verified by
exhaustive normal-form comparison up to a degree bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poly import as_fraction
from .polyvector import Bivector

Word = tuple[str, ...]
NCPoly = dict[Word, Fraction]

_MAX_REWRITE_STEPS = 2_000_000


def nc_zero() -> NCPoly:
    return {}


def nc_term(word: Word, coef=1) -> NCPoly:
    coef = as_fraction(coef)
    return {tuple(word): coef} if coef else {}


def nc_add(a: NCPoly, b: NCPoly) -> NCPoly:
    out = dict(a)
    for w, c in b.items():
        s = out.get(w, Fraction(0)) + c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def nc_scale(a: NCPoly, coef) -> NCPoly:
    coef = as_fraction(coef)
    return {w: c * coef for w, c in a.items()} if coef else {}


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    out: NCPoly = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            w = w1 + w2
            s = out.get(w, Fraction(0)) + c1 * c2
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return out


class UnbalancedRelationError(ValueError):
    """A relation decreases filtration weight from left to right."""


class FilteredPresentation:
    """Weighted generators plus (optionally) two-letter rewrite rules."""

    def __init__(self, generators: list[str], weights: dict[str, int],
                 rules: dict[tuple[str, str], NCPoly] | None = None,
                 commutative: bool = False):
        self.generators = list(generators)
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator names")
        self.weights = dict(weights)
        for g in self.generators:
            w = self.weights.get(g)
            if w is None or w <= 0:
                raise ValueError(f"generator {g!r} needs a positive weight")
        self.commutative = commutative
        self.rules = {tuple(k): dict(v) for k, v in (rules or {}).items()}
        if commutative and self.rules:
            raise ValueError("commutative presentations are free: no rewrite rules")
        if not commutative:
            for (u, v), rhs in self.rules.items():
                if u not in self.weights or v not in self.weights:
                    raise ValueError(f"rule ({u},{v}) uses unknown generators")
                lhs_weight = self.weights[u] + self.weights[v]
                for w in rhs:
                    if self.word_weight(w) > lhs_weight:
                        raise UnbalancedRelationError(
                            f"rule {u}{v} -> ... raises weight: term {w}")

    def word_weight(self, word: Word) -> int:
        return sum(self.weights[g] for g in word)

    def max_weight(self, poly: NCPoly) -> int | None:
        if not poly:
            return None
        return max(self.word_weight(w) for w in poly)

    def _order_index(self, g: str) -> int:
        return self.generators.index(g)

    def _reduce_word_once(self, word: Word, rightmost: bool) -> NCPoly | None:
        positions = range(len(word) - 1)
        if rightmost:
            positions = reversed(positions)
        for pos in positions:
            pair = (word[pos], word[pos + 1])
            if self.commutative:
                if self._order_index(pair[0]) > self._order_index(pair[1]):
                    swapped = word[:pos] + (pair[1], pair[0]) + word[pos + 2:]
                    return {swapped: Fraction(1)}
                continue
            rhs = self.rules.get(pair)
            if rhs is not None:
                out: NCPoly = {}
                for w, c in rhs.items():
                    key = word[:pos] + w + word[pos + 2:]
                    s = out.get(key, Fraction(0)) + c
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
                return out
        return None

    def normal_form(self, poly: NCPoly | Word, rightmost: bool = False) -> NCPoly:
        """Rewrite to normal form (leftmost-first by default)."""
        if isinstance(poly, tuple):
            poly = nc_term(poly)
        result: NCPoly = {}
        work = list(poly.items())
        steps = 0
        while work:
            word, coef = work.pop()
            if not coef:
                continue
            reduced = self._reduce_word_once(word, rightmost)
            if reduced is None:
                s = result.get(word, Fraction(0)) + coef
                if s:
                    result[word] = s
                else:
                    result.pop(word, None)
                continue
            for w, c in reduced.items():
                work.append((w, c * coef))
            steps += 1
            if steps > _MAX_REWRITE_STEPS:
                raise RuntimeError("rewriting did not terminate")
        return result

    def spot_check_confluence(self, max_length: int) -> tuple[bool, Word | None]:
        """Leftmost and rightmost strategies must agree on all short words."""
        for word in _words_upto(self.generators, max_length):
            if self.normal_form(word) != self.normal_form(word, rightmost=True):
                return False, word
        return True, None


def _words_upto(alphabet: list[str], max_length: int):
    frontier: list[Word] = [()]
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for g in alphabet:
                nxt.append(w + (g,))
        yield from nxt
        frontier = nxt


class ReesPresentation(FilteredPresentation):
    """A filtered presentation made weight-graded by one central generator."""

    def __init__(self, base: FilteredPresentation, t_name: str = "t"):
        if t_name in base.generators:
            raise ValueError(f"generator name {t_name!r} already taken")
        self.base = base
        self.t_name = t_name
        generators = base.generators + [t_name]
        weights = dict(base.weights)
        weights[t_name] = 1
        if base.commutative:
            super().__init__(generators, weights, None, commutative=True)
            return
        rules: dict[tuple[str, str], NCPoly] = {}
        for (u, v), rhs in base.rules.items():
            lhs_weight = base.weights[u] + base.weights[v]
            graded: NCPoly = {}
            for w, c in rhs.items():
                pad = lhs_weight - base.word_weight(w)
                graded[w + (t_name,) * pad] = c
            rules[(u, v)] = graded
        for g in base.generators:
            rules[(t_name, g)] = {(g, t_name): Fraction(1)}
        super().__init__(generators, weights, rules, commutative=False)

    def drop_t(self, poly: NCPoly) -> NCPoly:
        """Quotient by (t): keep only t-free terms."""
        return {w: c for w, c in poly.items() if self.t_name not in w}

    def set_t_one(self, poly: NCPoly) -> NCPoly:
        """Specialize t = 1 (then words live in the base alphabet)."""
        out: NCPoly = {}
        for w, c in poly.items():
            key = tuple(g for g in w if g != self.t_name)
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return out


@dataclass(frozen=True)
class ReesReport:
    """Exhaustive verification of the Rees identities up to a degree bound."""
    degree_bound: int
    words_checked: int
    graded: bool
    specializes: bool
    graded_quotient_commutative: bool
    confluent: bool
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return (self.graded and self.specializes
                and self.graded_quotient_commutative and self.confluent)


def rees_from_filtration(base: FilteredPresentation, degree_bound: int = 6,
                         t_name: str = "t") -> tuple[ReesPresentation, ReesReport]:
    """Build the Rees presentation and verify its identities up to the bound."""
    rees = ReesPresentation(base, t_name)
    report = verify_rees(base, rees, degree_bound)
    if not report.ok:  # pragma: no cover - construction is weight-correct
        raise RuntimeError(f"Rees verification failed: {report.failure}")
    return rees, report


def verify_rees(base: FilteredPresentation, rees: ReesPresentation,
                degree_bound: int) -> ReesReport:
    graded = specializes = quotient_comm = True
    failure = None
    count = 0
    for word in _words_upto(base.generators, degree_bound):
        count += 1
        weight = base.word_weight(word)
        nf_rees = rees.normal_form(word)
        nf_base = base.normal_form(word)
        if any(rees.word_weight(w) != weight for w in nf_rees):
            graded = False
            failure = failure or f"non-graded normal form for {word}"
        if rees.set_t_one(nf_rees) != nf_base:
            specializes = False
            failure = failure or f"t=1 specialization differs for {word}"
        sorted_word = tuple(sorted(word, key=base.generators.index))
        if rees.drop_t(nf_rees) != rees.drop_t(rees.normal_form(sorted_word)):
            quotient_comm = False
            failure = failure or f"(t)-quotient not commutative on {word}"
    confluent, bad = rees.spot_check_confluence(min(degree_bound, 5))
    if not confluent:
        failure = failure or f"rewriting not confluent at {bad}"
    base_confluent, bad2 = base.spot_check_confluence(min(degree_bound, 5))
    if not base_confluent:
        confluent = False
        failure = failure or f"base rewriting not confluent at {bad2}"
    return ReesReport(degree_bound, count, graded, specializes,
                      quotient_comm, confluent, failure)


def weyl_presentation(weight_x: int = 1, weight_y: int = 1) -> FilteredPresentation:
    """Generators x, y with xy - yx = 1, i.e. the rewrite yx -> xy - 1."""
    rules = {("y", "x"): {("x", "y"): Fraction(1), (): Fraction(-1)}}
    return FilteredPresentation(["x", "y"], {"x": weight_x, "y": weight_y}, rules)


# -- filtration versus bracket -------------------------------------------------

@dataclass(frozen=True)
class FiltrationReport:
    """Classification of a weight filtration against a Poisson bracket."""
    level: str                      # "strong" | "compatible" | "incompatible"
    max_excess: int | None          # max of wt({u,v}) - wt(u) - wt(v); None if all brackets vanish
    witness: tuple | None           # first pair breaking compatibility
    degree_bound: int
    pairs_checked: int = 0


def filtration_compat_check(gamma: Bivector, weights: list[int],
                            degree_bound: int) -> FiltrationReport:
    """Check {F_m1, F_m2} against F_(m1+m2-1) / F_(m1+m2) on all monomial
    pairs with combined weight up to the bound; reports the worst excess and
    the first violating pair in graded-lex order."""
    n = gamma.nvars
    if len(weights) != n or any(w <= 0 for w in weights):
        raise ValueError("need one positive weight per variable")
    from .poly import Poly

    monomials = []

    def rec(prefix, remaining, budget):
        if remaining == 0:
            monomials.append(prefix)
            return
        w = weights[n - remaining]
        for e in range(budget // w + 1):
            rec(prefix + (e,), remaining - 1, budget - e * w)

    rec((), n, degree_bound)
    monomials.sort(key=lambda e: (sum(ei * wi for ei, wi in zip(e, weights)), e))

    max_excess: int | None = None
    witness = None
    checked = 0
    for a in range(len(monomials)):
        ea = monomials[a]
        wa = sum(ei * wi for ei, wi in zip(ea, weights))
        fa = Poly.monomial(n, ea)
        for b in range(a, len(monomials)):
            eb = monomials[b]
            wb = sum(ei * wi for ei, wi in zip(eb, weights))
            if wa + wb > degree_bound:
                continue
            checked += 1
            bracket = gamma.bracket(fa, Poly.monomial(n, eb))
            wd = bracket.weighted_degree(weights)
            if wd is None:
                continue
            excess = wd - wa - wb
            if max_excess is None or excess > max_excess:
                max_excess = excess
                if excess > 0 and witness is None:
                    witness = (ea, eb, wd, wa + wb)
    if max_excess is None or max_excess <= -1:
        level = "strong"
    elif max_excess == 0:
        level = "compatible"
    else:
        level = "incompatible"
    return FiltrationReport(level, max_excess, witness, degree_bound, checked)
