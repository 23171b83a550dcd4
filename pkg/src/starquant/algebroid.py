"""Gluing data for algebras on a simplicial complex, and its coherence checks.

The data attaches to every vertex an associative unital algebra (given by
structure constants over the truncated hbar ring), to every edge {i,j} an
algebra isomorphism g_ij (with g_ji its inverse), and to every 2-face an
invertible unit a_ijk in the algebra at the first vertex.  One representative
is stored per unordered face; other orientations are derived from

    a_ikj = a_ijk^-1            (odd permutations invert),
    a_jki = g_ij(a_ijk)         (even permutations transport).

Here Ad(u) denotes h -> u h u^-1, so the triangle holonomy constraint reads
g_ki . g_jk . g_ij = Ad(a_ijk), and the coherence identity across a 3-face is

    a_ikl * a_ijk = a_ijl * g_ji(a_jkl),

with all four factors living at vertex i.  (Transporting a_jkl from vertex j
to vertex i uses g_ji; building the data from explicit frames, below,
validates these index conventions.)

Gauge fixing modifies the implicit frames by central scalar units
1 + hbar^s b_ij, which leaves every g_ij unchanged and multiplies face units
by the Cech coboundary of b; it therefore kills the lowest hbar-order of the
face units exactly when that order's 2-cocycle is a coboundary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

from . import linalg
from .truncring import (TMat, TruncNum, TVec, tmat_identity, tmat_inverse,
                        tmat_mul, tmat_vec, tvec_is_zero)


# -- simplicial complexes ------------------------------------------------------

class SimplicialComplex:
    """Vertices plus faces of dimension <= 3, closed under taking subsets."""

    __slots__ = ("vertices", "edges", "faces", "cells")

    def __init__(self, vertices, edges=(), faces=(), cells=()):
        vertices = tuple(sorted(set(vertices)))
        edges = frozenset(tuple(sorted(e)) for e in edges)
        faces = frozenset(tuple(sorted(f)) for f in faces)
        cells = frozenset(tuple(sorted(c)) for c in cells)
        vset = set(vertices)
        for e in edges:
            if len(set(e)) != 2 or not set(e) <= vset:
                raise ValueError(f"bad edge {e}")
        for f in faces:
            if len(set(f)) != 3 or not set(f) <= vset:
                raise ValueError(f"bad 2-face {f}")
            for e in combinations(f, 2):
                if e not in edges:
                    raise ValueError(f"2-face {f} is missing edge {e}")
        for c in cells:
            if len(set(c)) != 4 or not set(c) <= vset:
                raise ValueError(f"bad 3-face {c}")
            for f in combinations(c, 3):
                if f not in faces:
                    raise ValueError(f"3-face {c} is missing 2-face {f}")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "cells", cells)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("SimplicialComplex is immutable")

    @staticmethod
    def full_simplex(dim: int) -> SimplicialComplex:
        """The full simplex on dim+1 vertices (faces recorded up to dim 3)."""
        verts = range(dim + 1)
        return SimplicialComplex(
            verts,
            combinations(verts, 2),
            combinations(verts, 3) if dim >= 2 else (),
            combinations(verts, 4) if dim >= 3 else ())

    @staticmethod
    def boundary_simplex(dim: int) -> SimplicialComplex:
        """The boundary of the (dim)-simplex: all proper faces."""
        verts = range(dim + 1)
        return SimplicialComplex(
            verts,
            combinations(verts, 2) if dim >= 2 else (),
            combinations(verts, 3) if dim >= 3 else (),
            combinations(verts, 4) if dim >= 4 else ())

    def has_edge(self, i: int, j: int) -> bool:
        return tuple(sorted((i, j))) in self.edges

    def simplices(self, q: int) -> list[tuple]:
        if q == 0:
            return [(v,) for v in self.vertices]
        if q == 1:
            return sorted(self.edges)
        if q == 2:
            return sorted(self.faces)
        if q == 3:
            return sorted(self.cells)
        return []

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for e in self.edges:
                if v in e:
                    w = e[0] if e[1] == v else e[1]
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
        return len(seen) == len(self.vertices)


def _coboundary_matrix(complex_: SimplicialComplex, q: int) -> list[list[Fraction]]:
    lower = complex_.simplices(q)
    upper = complex_.simplices(q + 1)
    index = {s: c for c, s in enumerate(lower)}
    rows = []
    for s in upper:
        row = [Fraction(0)] * len(lower)
        for t in range(len(s)):
            sub = s[:t] + s[t + 1:]
            row[index[sub]] += Fraction((-1) ** t)
        rows.append(row)
    return rows


def cech_cohomology(complex_: SimplicialComplex, q: int) -> int:
    """Rank of the degree-q simplicial cohomology with rational coefficients."""
    if q < 0:
        raise ValueError("q must be >= 0")
    dim_q = len(complex_.simplices(q))
    if dim_q == 0:
        return 0
    delta_q = _coboundary_matrix(complex_, q)
    rank_q = linalg.rank(delta_q) if delta_q else 0
    if q == 0:
        rank_prev = 0
    else:
        delta_prev = _coboundary_matrix(complex_, q - 1)
        rank_prev = linalg.rank(delta_prev) if delta_prev else 0
    return dim_q - rank_q - rank_prev


# -- structure-constant algebras -----------------------------------------------

class SCAlgebra:
    """Free-module algebra over the truncated hbar ring, with exact checks.

    table[i][j] is the coefficient vector of e_i * e_j; associativity and the
    two-sided unit law are verified on all basis triples at construction.
    """

    __slots__ = ("order", "rank", "table", "unit")

    def __init__(self, order: int, rank: int, table, unit):
        table = [[list(cell) for cell in row] for row in table]
        unit = list(unit)
        if len(table) != rank or any(len(row) != rank for row in table):
            raise ValueError("structure-constant table has wrong shape")
        for row in table:
            for cell in row:
                if len(cell) != rank:
                    raise ValueError("structure-constant vector has wrong length")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "unit", unit)
        self._validate()

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("SCAlgebra is immutable")

    def _validate(self):
        basis = [self.basis_vector(i) for i in range(self.rank)]
        for i in range(self.rank):
            if self.mul(self.unit, basis[i]) != basis[i] or \
               self.mul(basis[i], self.unit) != basis[i]:
                raise ValueError("unit law fails")
        for i in range(self.rank):
            for j in range(self.rank):
                left = self.mul(basis[i], basis[j])
                for k in range(self.rank):
                    if self.mul(left, basis[k]) != self.mul(basis[i], self.mul(basis[j], basis[k])):
                        raise ValueError(f"associativity fails on basis triple ({i},{j},{k})")

    def basis_vector(self, i: int) -> TVec:
        return [TruncNum.one(self.order) if j == i else TruncNum.zero(self.order)
                for j in range(self.rank)]

    def zero(self) -> TVec:
        return [TruncNum.zero(self.order) for _ in range(self.rank)]

    def scalar(self, value) -> TVec:
        s = value if isinstance(value, TruncNum) else TruncNum.scalar(self.order, value)
        return [s * u for u in self.unit]

    def mul(self, u: TVec, v: TVec) -> TVec:
        out = self.zero()
        for i, ui in enumerate(u):
            if ui.is_zero():
                continue
            for j, vj in enumerate(v):
                if vj.is_zero():
                    continue
                c = ui * vj
                cell = self.table[i][j]
                out = [o + c * t for o, t in zip(out, cell)]
        return out

    def inverse(self, u: TVec) -> TVec | None:
        """Two-sided inverse, or None; decided by the constant term."""
        from .truncring import trunc_solve
        columns = [self.mul(u, self.basis_vector(j)) for j in range(self.rank)]
        matrix = [[columns[j][r] for j in range(self.rank)] for r in range(self.rank)]
        x = trunc_solve(matrix, list(self.unit))
        if x is None:
            return None
        if self.mul(x, u) != list(self.unit):
            return None
        return x

    def is_central(self, u: TVec) -> bool:
        return all(self.mul(u, self.basis_vector(b)) == self.mul(self.basis_vector(b), u)
                   for b in range(self.rank))

    def scalar_of_unit(self, u: TVec) -> TruncNum | None:
        """The lambda with u = lambda * unit, when one exists."""
        for b, ub in enumerate(self.unit):
            if ub.is_unit():
                lam = u[b] * ub.inverse()
                if self.scalar(lam) == list(u):
                    return lam
                return None
        return None

    @staticmethod
    def matrix_algebra(size: int, order: int) -> SCAlgebra:
        """Full matrix algebra of the given size, basis E_ab row-major."""
        rank = size * size
        zero = TruncNum.zero(order)
        one = TruncNum.one(order)
        table = []
        for i in range(rank):
            a, b = divmod(i, size)
            row = []
            for j in range(rank):
                c, d = divmod(j, size)
                cell = [zero] * rank
                if b == c:
                    cell[a * size + d] = one
                row.append(cell)
            table.append(row)
        unit = [one if divmod(i, size)[0] == divmod(i, size)[1] else zero
                for i in range(rank)]
        return SCAlgebra(order, rank, table, unit)

    def __eq__(self, other):
        if not isinstance(other, SCAlgebra):
            return NotImplemented
        return (self.order, self.rank, self.table, self.unit) == \
               (other.order, other.rank, other.table, other.unit)


def _is_algebra_iso(matrix: TMat, src: SCAlgebra, dst: SCAlgebra) -> bool:
    if tmat_inverse(matrix) is None:
        return False
    images = [tmat_vec(matrix, src.basis_vector(b)) for b in range(src.rank)]
    if tmat_vec(matrix, src.unit) != list(dst.unit):
        return False
    for a in range(src.rank):
        for b in range(src.rank):
            if tmat_vec(matrix, src.mul(src.basis_vector(a), src.basis_vector(b))) != \
               dst.mul(images[a], images[b]):
                return False
    return True


# -- the decorated complex ------------------------------------------------------

CONSTRAINT_INVERSE = "a_ikj = a_ijk^-1"
CONSTRAINT_ROTATE = "a_jki = g_ij(a_ijk)"
CONSTRAINT_HOLONOMY = "g_ki.g_jk.g_ij = Ad(a_ijk)"
CONSTRAINT_TETRAHEDRON = "a_ikl.a_ijk = a_ijl.g_ji(a_jkl)"


class AlgebroidData:
    """Vertex algebras, edge isomorphisms and face units on a complex."""

    def __init__(self, complex_: SimplicialComplex, algebras: dict,
                 edge_maps: dict, face_units: dict, oriented_units: dict | None = None):
        self.complex = complex_
        self.algebras = dict(algebras)
        for v in complex_.vertices:
            if v not in self.algebras:
                raise ValueError(f"missing algebra at vertex {v}")
        self._maps: dict[tuple[int, int], TMat] = {}
        for (i, j), matrix in edge_maps.items():
            self._maps[(i, j)] = [list(row) for row in matrix]
        for e in complex_.edges:
            i, j = e
            if (i, j) not in self._maps and (j, i) not in self._maps:
                raise ValueError(f"missing edge map for {e}")
            if (i, j) not in self._maps:
                inv = tmat_inverse(self._maps[(j, i)])
                if inv is None:
                    raise ValueError(f"edge map {e} not invertible")
                self._maps[(i, j)] = inv
            if (j, i) not in self._maps:
                inv = tmat_inverse(self._maps[(i, j)])
                if inv is None:
                    raise ValueError(f"edge map {e} not invertible")
                self._maps[(j, i)] = inv
            if not _is_algebra_iso(self._maps[(i, j)], self.algebras[i], self.algebras[j]):
                raise ValueError(f"edge map g_{i}{j} is not an algebra isomorphism")
            product = tmat_mul(self._maps[(j, i)], self._maps[(i, j)])
            if product != tmat_identity(self.algebras[i].rank, self.order):
                raise ValueError(f"g_{j}{i} is not inverse to g_{i}{j}")
        self.face_units = {tuple(sorted(f)): list(u) for f, u in face_units.items()}
        for f in complex_.faces:
            if f not in self.face_units:
                raise ValueError(f"missing face unit for {f}")
            if self.algebras[f[0]].inverse(self.face_units[f]) is None:
                raise ValueError(f"face unit at {f} is not invertible")
        self.oriented_units = {tuple(k): list(v) for k, v in (oriented_units or {}).items()}
        self._hol_inv_cache: dict[tuple, TMat] = {}

    @property
    def order(self) -> int:
        return next(iter(self.algebras.values())).order

    def edge_map(self, i: int, j: int) -> TMat:
        if not self.complex.has_edge(i, j):
            raise ValueError(f"({i},{j}) is not an edge")
        return self._maps[(i, j)]

    def apply_edge(self, i: int, j: int, element: TVec) -> TVec:
        return tmat_vec(self.edge_map(i, j), element)

    def unit_for(self, i: int, j: int, k: int) -> TVec:
        """Face unit for an ordered face, derived from the sorted representative."""
        face = tuple(sorted((i, j, k)))
        if face not in self.face_units:
            raise ValueError(f"{(i, j, k)} is not a 2-face")
        s0, s1, s2 = face
        base = self.face_units[face]
        orient = (i, j, k)
        if orient == (s0, s1, s2):
            return list(base)
        if orient == (s1, s2, s0):
            return self.apply_edge(s0, s1, base)
        if orient == (s2, s0, s1):
            return self.apply_edge(s1, s2, self.apply_edge(s0, s1, base))
        # odd orientation: invert the even rotation starting at the same vertex
        start = orient[0]
        for rotation in ((s0, s1, s2), (s1, s2, s0), (s2, s0, s1)):
            if rotation[0] == start:
                inv = self.algebras[start].inverse(self.unit_for(*rotation))
                assert inv is not None
                return inv
        raise ValueError(f"bad orientation {orient}")  # pragma: no cover

    def with_face_units(self, face_units: dict) -> AlgebroidData:
        return AlgebroidData(self.complex, self.algebras,
                             {k: v for k, v in self._maps.items()},
                             face_units)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    constraint: str | None = None
    location: tuple | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_algebroid(data: AlgebroidData) -> VerifyReport:
    """Check the four constraint families exactly on every (oriented) face;
    the first violated identity is named together with its face."""
    # explicitly supplied oriented units against the derived convention
    for orient in sorted(data.oriented_units):
        face = tuple(sorted(orient))
        if face not in data.complex.faces:
            return VerifyReport(False, CONSTRAINT_INVERSE, orient, "not a 2-face")
        derived = data.unit_for(*orient)
        if data.oriented_units[orient] != derived:
            parity = _permutation_parity(orient)
            constraint = CONSTRAINT_ROTATE if parity == 1 else CONSTRAINT_INVERSE
            return VerifyReport(False, constraint, orient,
                                "supplied oriented unit differs from the derived one")
    # triangle holonomy
    for face in sorted(data.complex.faces):
        i, j, k = face
        holonomy_map = tmat_mul(data.edge_map(k, i),
                                tmat_mul(data.edge_map(j, k), data.edge_map(i, j)))
        alg = data.algebras[i]
        a = data.face_units[face]
        a_inv = alg.inverse(a)
        for b in range(alg.rank):
            lhs = tmat_vec(holonomy_map, alg.basis_vector(b))
            rhs = alg.mul(a, alg.mul(alg.basis_vector(b), a_inv))
            if lhs != rhs:
                return VerifyReport(False, CONSTRAINT_HOLONOMY, face,
                                    f"holonomy differs from Ad(a) on basis element {b}")
    # tetrahedron coherence
    for cell in sorted(data.complex.cells):
        i, j, k, l = cell
        alg = data.algebras[i]
        lhs = alg.mul(data.unit_for(i, k, l), data.unit_for(i, j, k))
        transported = data.apply_edge(j, i, data.unit_for(j, k, l))
        rhs = alg.mul(data.unit_for(i, j, l), transported)
        if lhs != rhs:
            return VerifyReport(False, CONSTRAINT_TETRAHEDRON, cell,
                                "tetrahedron identity fails")
    return VerifyReport(True)


def _permutation_parity(orient: tuple) -> int:
    inversions = sum(1 for a in range(3) for b in range(a + 1, 3)
                     if orient[a] > orient[b])
    return 1 if inversions % 2 == 0 else -1


def holonomy(data: AlgebroidData, path: tuple) -> TMat:
    """Composite edge isomorphism along a vertex path (identity when trivial)."""
    if not path:
        raise ValueError("path must contain at least one vertex")
    rank = data.algebras[path[0]].rank
    result = tmat_identity(rank, data.order)
    for i, j in zip(path, path[1:]):
        if not data.complex.has_edge(i, j):
            raise ValueError(f"({i},{j}) is not an edge")
        result = tmat_mul(data.edge_map(i, j), result)
    return result


def _holonomy_inverse(data: AlgebroidData, path: tuple) -> TMat:
    cached = data._hol_inv_cache.get(path)
    if cached is None:
        cached = tmat_inverse(holonomy(data, path))
        assert cached is not None  # edge maps are invertible
        data._hol_inv_cache[path] = cached
    return cached


def _neighbours(complex_: SimplicialComplex, v: int) -> list[int]:
    out = []
    for e in complex_.edges:
        if v in e:
            out.append(e[0] if e[1] == v else e[1])
    return sorted(out)


def _moves(data: AlgebroidData, path: tuple, max_len: int):
    """Elementary homotopy moves with their unit contribution at the start vertex.

    Yields (new_path, unit) where transport(path) = transport(new_path) o unit'
    and the accumulated comparison element is left-multiplied by `unit`.
    """
    complex_ = data.complex
    alg0 = data.algebras[path[0]]
    for t in range(len(path) - 2):
        i, j, k = path[t], path[t + 1], path[t + 2]
        if i == k and i != j:
            yield path[:t + 1] + path[t + 3:], list(alg0.unit)  # remove backtrack
        elif len({i, j, k}) == 3 and tuple(sorted((i, j, k))) in complex_.faces:
            unit = tmat_vec(_holonomy_inverse(data, path[:t + 1]), data.unit_for(i, j, k))
            yield path[:t + 1] + path[t + 2:], unit              # shrink across face
    if len(path) + 1 <= max_len:
        for t in range(len(path) - 1):
            i, k = path[t], path[t + 1]
            for j in _neighbours(complex_, i):
                if j == k:
                    continue
                if len({i, j, k}) == 3 and tuple(sorted((i, j, k))) in complex_.faces:
                    a_inv = data.algebras[i].inverse(data.unit_for(i, j, k))
                    unit = tmat_vec(_holonomy_inverse(data, path[:t + 1]), a_inv)
                    yield path[:t + 1] + (j,) + path[t + 1:], unit   # expand across face
        for t in range(len(path)):
            if len(path) + 2 > max_len:
                break
            i = path[t]
            for j in _neighbours(complex_, i):
                yield path[:t + 1] + (j, i) + path[t + 1:], list(alg0.unit)  # insert backtrack


def _validate_path(data: AlgebroidData, path: tuple):
    if not path:
        raise ValueError("empty path")
    for i, j in zip(path, path[1:]):
        if not data.complex.has_edge(i, j):
            raise ValueError(f"({i},{j}) is not an edge")


def path_compare(data: AlgebroidData, path1: tuple, path2: tuple,
                 max_extra: int = 3) -> TVec:
    """Invertible element u of the start-vertex algebra with
    transport(path1) = transport(path2) o u, found through a breadth-first
    search over elementary homotopy moves."""
    path1, path2 = tuple(path1), tuple(path2)
    _validate_path(data, path1)
    _validate_path(data, path2)
    if path1[0] != path2[0] or path1[-1] != path2[-1]:
        raise ValueError("paths must share both endpoints")
    alg0 = data.algebras[path1[0]]
    max_len = max(len(path1), len(path2)) + max_extra
    seen = {path1}
    queue = deque([(path1, list(alg0.unit))])
    while queue:
        path, unit = queue.popleft()
        if path == path2:
            return unit
        for new_path, move_unit in _moves(data, path, max_len):
            if new_path in seen or len(new_path) > max_len:
                continue
            seen.add(new_path)
            queue.append((new_path, alg0.mul(move_unit, unit)))
    raise ValueError("paths are not homotopic within the complex (or the bound)")


def path_compare_values(data: AlgebroidData, path1: tuple, path2: tuple,
                        max_moves: int = 5, max_extra: int = 3) -> list[tuple]:
    """All comparison elements reachable over distinct move sequences; a
    coherent data set yields exactly one value (exhaustive independence check)."""
    path1, path2 = tuple(path1), tuple(path2)
    _validate_path(data, path1)
    _validate_path(data, path2)
    alg0 = data.algebras[path1[0]]
    max_len = max(len(path1), len(path2)) + max_extra
    values = set()

    def dfs(path, unit, budget):
        if path == path2:
            values.add(tuple(unit))
        if budget == 0:
            return
        for new_path, move_unit in _moves(data, path, max_len):
            if len(new_path) > max_len:
                continue
            dfs(new_path, alg0.mul(move_unit, unit), budget - 1)

    dfs(path1, list(alg0.unit), max_moves)
    return sorted(values, key=repr)


# -- morphism spaces -------------------------------------------------------------

@dataclass(frozen=True)
class HomSpace:
    """Hom(x, y) presented on the underlying module of the algebra at x."""
    source: int
    target: int
    rank: int
    canonical_path: tuple


class HomCalculus:
    """Spanning-tree bookkeeping for morphism spaces on a connected complex."""

    def __init__(self, data: AlgebroidData):
        if not data.complex.is_connected():
            raise ValueError("complex is not connected")
        self.data = data
        root = data.complex.vertices[0]
        parent = {root: None}
        order = [root]
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in _neighbours(data.complex, v):
                if w not in parent:
                    parent[w] = v
                    order.append(w)
                    queue.append(w)
        self._parent = parent

    def _to_root(self, v: int) -> tuple:
        path = [v]
        while self._parent[path[-1]] is not None:
            path.append(self._parent[path[-1]])
        return tuple(path)

    def canonical_path(self, x: int, y: int) -> tuple:
        """Tree path from x to y (through the lowest common ancestor)."""
        up = self._to_root(x)
        down = self._to_root(y)
        common = {v: idx for idx, v in enumerate(down)}
        for idx, v in enumerate(up):
            if v in common:
                return up[:idx + 1] + tuple(reversed(down[:common[v]]))
        raise RuntimeError("tree is disconnected")  # pragma: no cover

    def hom_space(self, x: int, y: int) -> HomSpace:
        return HomSpace(x, y, self.data.algebras[x].rank, self.canonical_path(x, y))

    def compose(self, x: int, y: int, z: int, second: TVec, first: TVec) -> TVec:
        """Composition Hom(y,z) x Hom(x,y) -> Hom(x,z) in canonical coordinates.

        A morphism x -> y with coordinates u means transport(cp(x,y)) o u; the
        composite picks up the homotopy comparison between the concatenated
        canonical paths and cp(x,z)."""
        cp_xy = self.canonical_path(x, y)
        cp_yz = self.canonical_path(y, z)
        cp_xz = self.canonical_path(x, z)
        concatenated = cp_xy + cp_yz[1:]
        correction = path_compare(self.data, concatenated, cp_xz, max_extra=1)
        alg = self.data.algebras[x]
        transported = tmat_vec(_holonomy_inverse(self.data, cp_xy), second)
        return alg.mul(correction, alg.mul(transported, first))


def hom_space(data: AlgebroidData, x: int, y: int) -> HomSpace:
    """Morphism space presentation between two vertices (connected complex)."""
    return HomCalculus(data).hom_space(x, y)


# -- gauge fixing ----------------------------------------------------------------

@dataclass(frozen=True)
class GaugeObstruction:
    """Nonzero Cech class blocking the gauge fix at a given hbar order."""
    order: int
    cocycle: dict          # sorted 2-face -> Fraction
    h2_rank: int
    cochain_dims: dict     # sizes and ranks of the relevant Cech spaces

    def is_closed(self) -> bool:
        return bool(self.cochain_dims.get("delta_closed", False))


class NonCentralTermError(ValueError):
    """Lowest-order face-unit term is not a central scalar."""


def _scalar_cochain(data: AlgebroidData, order_s: int) -> dict:
    """Extract the order-s coefficient of every face unit as a scalar."""
    cochain = {}
    for face in sorted(data.complex.faces):
        alg = data.algebras[face[0]]
        u = data.face_units[face]
        layer = [x.coeffs[order_s] for x in u]
        vec = [TruncNum.scalar(data.order, c) for c in layer]
        if not alg.is_central(vec):
            raise NonCentralTermError(
                f"face {face}: order-{order_s} term is not central")
        lam = alg.scalar_of_unit(vec)
        if lam is None:
            raise NonCentralTermError(
                f"face {face}: order-{order_s} term is central but not scalar")
        cochain[face] = lam.coeffs[0]
    return cochain


def gauge_fix(data: AlgebroidData, target_order: int):
    """Make all face units 1 mod hbar^(target_order+1) by scalar edge units.

    Works order by order: the lowest nonvanishing hbar-term of the face
    units must be a central scalar cochain c; its delta-closedness is
    checked (the tetrahedron identity guarantees it), delta b = -c is solved
    exactly, and the face units are multiplied by the corresponding exact
    coboundary of units 1 + hbar^s b.  Returns the fixed AlgebroidData, or a
    GaugeObstruction carrying the first non-killable class.
    """
    report = verify_algebroid(data)
    if not report.ok:
        raise ValueError(f"gauge_fix needs verified data: {report.constraint} at {report.location}")
    faces = sorted(data.complex.faces)
    edges = sorted(data.complex.edges)
    edge_index = {e: i for i, e in enumerate(edges)}
    current = data
    while True:
        lowest = None
        for face in faces:
            u = current.face_units[face]
            alg = current.algebras[face[0]]
            diff = [a - b for a, b in zip(u, alg.unit)]
            orders = [x.lowest_order() for x in diff if x.lowest_order() is not None]
            if orders:
                lowest = min(orders) if lowest is None else min(lowest, min(orders))
        if lowest is None or lowest > target_order:
            return current.with_face_units(current.face_units)
        if lowest == 0:
            raise ValueError("face units must be 1 mod hbar")
        cochain = _scalar_cochain(current, lowest)
        # delta-closedness at this order (a consequence of the tetrahedron identity)
        closed = True
        for cell in sorted(current.complex.cells):
            i, j, k, l = cell
            value = (cochain[(j, k, l)] - cochain[(i, k, l)]
                     + cochain[(i, j, l)] - cochain[(i, j, k)])
            if value:
                closed = False
        if not closed:  # pragma: no cover - verified data is coherent
            raise RuntimeError("extracted cochain is not closed; data incoherent")
        delta1 = [[Fraction(0)] * len(edges) for _ in faces]
        for r, (i, j, k) in enumerate(faces):
            delta1[r][edge_index[(j, k)]] += 1
            delta1[r][edge_index[(i, k)]] -= 1
            delta1[r][edge_index[(i, j)]] += 1
        rhs = [-cochain[f] for f in faces]
        solution = linalg.solve(delta1, rhs)
        if solution is None:
            dims = {
                "edges": len(edges),
                "faces": len(faces),
                "rank_delta1": linalg.rank(delta1),
                "delta_closed": True,
            }
            return GaugeObstruction(lowest, dict(cochain),
                                    cech_cohomology(current.complex, 2), dims)
        # per-edge units u_ab = 1 + hbar^s b_ab with u_ba the exact inverse,
        # so coboundary factors telescope exactly in the tetrahedron identity
        edge_unit = {}
        for e in edges:
            u = TruncNum.one(current.order) + TruncNum.hbar(current.order, lowest,
                                                            solution[edge_index[e]])
            edge_unit[e] = u
            edge_unit[(e[1], e[0])] = u.inverse()
        new_units = {}
        for face in faces:
            i, j, k = face
            factor = edge_unit[(k, i)] * edge_unit[(j, k)] * edge_unit[(i, j)]
            alg = current.algebras[i]
            new_units[face] = alg.mul(alg.scalar(factor), current.face_units[face])
        current = current.with_face_units(new_units)


# -- example builders --------------------------------------------------------------

def algebroid_from_frames(complex_: SimplicialComplex, frames: dict,
                          size: int, order: int) -> AlgebroidData:
    """Gluing data from explicit invertible frame matrices f_ij (i < j).

    Vertex algebras are size x size matrix algebras; g_ij conjugates by f_ij
    and a_ijk = f_ki f_jk f_ij, so the result satisfies every constraint by
    construction.  Useful for building coherent nonabelian test data.
    """
    algebra = SCAlgebra.matrix_algebra(size, order)
    mats = {}
    for (i, j), f in frames.items():
        if i > j:
            raise ValueError("provide frames for i < j only")
        mats[(i, j)] = [[TruncNum.scalar(order, v) if not isinstance(v, TruncNum) else v
                         for v in row] for row in f]
    for e in complex_.edges:
        if e not in mats:
            raise ValueError(f"missing frame for edge {e}")
        inv = _matrix_inverse_small(mats[e], order)
        if inv is None:
            raise ValueError(f"frame for edge {e} is not invertible")
        mats[(e[1], e[0])] = inv

    def conj_map(f: TMat, f_inv: TMat) -> TMat:
        columns = []
        for b in range(size * size):
            a, c = divmod(b, size)
            basis = [[TruncNum.one(order) if (r, s) == (a, c) else TruncNum.zero(order)
                      for s in range(size)] for r in range(size)]
            image = _mat_mul_small(_mat_mul_small(f, basis), f_inv)
            columns.append([image[r][s] for r in range(size) for s in range(size)])
        return [[columns[b][r] for b in range(size * size)] for r in range(size * size)]

    edge_maps = {}
    for (i, j) in complex_.edges:
        edge_maps[(i, j)] = conj_map(mats[(i, j)], mats[(j, i)])
    face_units = {}
    for face in complex_.faces:
        i, j, k = face
        prod = _mat_mul_small(mats[(k, i)], _mat_mul_small(mats[(j, k)], mats[(i, j)]))
        face_units[face] = [prod[r][s] for r in range(size) for s in range(size)]
    algebras = {v: algebra for v in complex_.vertices}
    return AlgebroidData(complex_, algebras, edge_maps, face_units)


def _mat_mul_small(a: TMat, b: TMat) -> TMat:
    n = len(a)
    order = a[0][0].order
    return [[sum((a[i][k] * b[k][j] for k in range(n)), TruncNum.zero(order))
             for j in range(n)] for i in range(n)]


def _matrix_inverse_small(a: TMat, order: int) -> TMat | None:
    return tmat_inverse(a)


def scalar_unit_algebroid(complex_: SimplicialComplex, cochain: dict,
                          order: int, size: int = 2) -> AlgebroidData:
    """Identity edge maps and face units exp(hbar c) * 1 for a rational-valued
    2-cochain c; the tetrahedron identity holds exactly iff c is delta-closed."""
    algebra = SCAlgebra.matrix_algebra(size, order)
    rank = size * size
    edge_maps = {e: tmat_identity(rank, order) for e in complex_.edges}
    face_units = {}
    for face in complex_.faces:
        c = Fraction(cochain.get(tuple(sorted(face)), 0))
        exp = TruncNum(order, [c ** t / factorial(t) for t in range(order + 1)])
        face_units[tuple(sorted(face))] = algebra.scalar(exp)
    return AlgebroidData(complex_, {v: algebra for v in complex_.vertices},
                         edge_maps, face_units)
