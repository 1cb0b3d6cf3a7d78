"""Bicharacters on Z^n, generalized Dynkin diagrams and reflections.

A bicharacter is stored through its structure constants q_ij = chi(e_i, e_j)
with respect to the fixed ambient basis; bilinearity then determines the
value on arbitrary integer vectors.  The reflection calculus only ever reads
the "quadratic" data (vertex labels q_ii and symmetrized edge labels
q_ij*q_ji), which is exactly what a generalized Dynkin diagram records, so
diagrams can be reflected without any reference to a basis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .exponents import (
    ContextMismatchError,
    GroupContext,
    GroupElement,
    has_int_exponent,
    solve_min_exponent,
)
from . import lattice
from .lattice import Mat, Vec


class UndefinedMValueError(ValueError):
    """A reflection was requested where Eq.-style exponents do not exist."""

    def __init__(self, i: int, j: int):
        super().__init__(f"m-value undefined for vertex pair ({i}, {j})")
        self.pair = (i, j)


@dataclass(frozen=True, slots=True)
class Basis:
    """Ordered Z-basis of Z^n, vectors in ambient coordinates."""

    vectors: tuple[Vec, ...]

    def __post_init__(self) -> None:
        mat = lattice.mat_from_cols(self.vectors)
        if lattice.det(mat) not in (1, -1):
            raise ValueError("vectors do not form a Z-basis")

    @property
    def n(self) -> int:
        return len(self.vectors)

    def matrix(self) -> Mat:
        """Matrix with the basis vectors as columns (maps E onto this basis)."""
        return lattice.mat_from_cols(self.vectors)

    def as_set_key(self) -> tuple[Vec, ...]:
        return tuple(sorted(self.vectors))

    @staticmethod
    def standard(n: int) -> Basis:
        return Basis(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))


@dataclass(frozen=True, slots=True)
class Bicharacter:
    context: GroupContext
    n: int
    q: tuple[tuple[GroupElement, ...], ...]

    def __post_init__(self) -> None:
        if len(self.q) != self.n or any(len(row) != self.n for row in self.q):
            raise ValueError("structure constant matrix must be n x n")
        for row in self.q:
            for el in row:
                if el.context != self.context:
                    raise ContextMismatchError("structure constant in foreign context")

    def evaluate(self, a: Vec, b: Vec) -> GroupElement:
        """chi(a, b) by bilinear expansion: product of q_ij^(a_i * b_j)."""
        if len(a) != self.n or len(b) != self.n:
            raise ValueError("vectors must have length n")
        n_tor = self.context.torsion_order
        tor = 0
        free = [0] * self.context.free_rank
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.q[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                el = row[j]
                tor += c * el.tor
                if el.free != _ZERO_FREE.get(self.context.free_rank):
                    for k, f in enumerate(el.free):
                        free[k] += c * f
        return GroupElement(self.context, tuple(free), tor % n_tor)

    def sym(self, a: Vec, b: Vec) -> GroupElement:
        """chi(a,b) * chi(b,a), the symmetrized value."""
        return self.evaluate(a, b) * self.evaluate(b, a)

    def embed(self, target: GroupContext) -> Bicharacter:
        q = tuple(tuple(el.embed(target) for el in row) for row in self.q)
        return Bicharacter(target, self.n, q)

    def to_json(self) -> dict:
        return {
            "context": self.context.to_json(),
            "n": self.n,
            "q": [[el.to_json() for el in row] for row in self.q],
        }

    @staticmethod
    def from_json(data: dict) -> Bicharacter:
        ctx = GroupContext.from_json(data["context"])
        n = int(data["n"])
        q = tuple(
            tuple(GroupElement.from_json(cell, ctx) for cell in row)
            for row in data["q"]
        )
        return Bicharacter(ctx, n, q)


_ZERO_FREE: dict[int, tuple[int, ...]] = {r: (0,) * r for r in range(16)}


def m_from_labels(v: GroupElement, s: GroupElement) -> int | None:
    """m-value for a vertex labeled v against a symmetrized edge label s.

    Least m >= 0 with v^m * s = 1, or with v^(m+1) = 1 provided v != 1;
    None when neither exponent equation has a solution.  Only the diagram
    labels enter, never the splitting of s into q_ij and q_ji.
    """
    best = solve_min_exponent(v, s)
    if not v.is_one:
        d = v.order()
        if d is not None and (best is None or d - 1 < best):
            best = d - 1
    return best


def p_from_labels(v: GroupElement, s: GroupElement) -> GroupElement:
    """Twist factor used by the diagram-level reflection update.

    Equals 1 when v^m * s = 1 for some integer m (either sign), and
    v^-1 * s otherwise.
    """
    if has_int_exponent(v, s):
        return v.context.one()
    return v.inverse() * s


def m_value(chi: Bicharacter, basis: Basis, i: int, j: int) -> int | None:
    """m-value of the reflection at vertex i against vertex j of ``basis``.

    Returns -2 on the diagonal and None when undefined.
    """
    if i == j:
        return -2
    fi, fj = basis.vectors[i], basis.vectors[j]
    return m_from_labels(chi.evaluate(fi, fi), chi.sym(fi, fj))


def reflect_basis(chi: Bicharacter, basis: Basis, i: int) -> Basis:
    """Apply the reflection at vertex i: f_j -> f_j + m(f_i, f_j) * f_i."""
    fi = basis.vectors[i]
    vi = chi.evaluate(fi, fi)
    new_vectors = []
    for j, fj in enumerate(basis.vectors):
        if j == i:
            new_vectors.append(lattice.vec_neg(fi))
            continue
        m = m_from_labels(vi, chi.sym(fi, fj))
        if m is None:
            raise UndefinedMValueError(i, j)
        new_vectors.append(lattice.vec_add(fj, lattice.vec_scale(m, fi)))
    return Basis(tuple(new_vectors))


@dataclass(frozen=True)
class DynkinDiagram:
    """Labeled graph: vertex i carries q_ii, edge {i,j} carries q_ij*q_ji.

    An edge is present exactly when its label differs from 1; stored edges
    are keyed (i, j) with i < j.
    """

    context: GroupContext
    n: int
    vertex_labels: tuple[GroupElement, ...]
    edges: tuple[tuple[tuple[int, int], GroupElement], ...]

    def __post_init__(self) -> None:
        for (i, j), label in self.edges:
            if not 0 <= i < j < self.n:
                raise ValueError(f"bad edge ({i}, {j})")
            if label.is_one:
                raise ValueError("an edge may not carry label 1")

    @staticmethod
    def make(context: GroupContext, vertex_labels, edge_labels: dict) -> DynkinDiagram:
        """Build a diagram, dropping edges whose label is 1."""
        edges = []
        for (i, j), label in edge_labels.items():
            if i > j:
                i, j = j, i
            if not label.is_one:
                edges.append(((i, j), label))
        edges.sort(key=lambda e: e[0])
        return DynkinDiagram(context, len(tuple(vertex_labels)),
                             tuple(vertex_labels), tuple(edges))

    def edge_map(self) -> dict[tuple[int, int], GroupElement]:
        return dict(self.edges)

    def sym_label(self, i: int, j: int) -> GroupElement:
        """Symmetrized label of the pair {i,j} (1 when there is no edge)."""
        if i > j:
            i, j = j, i
        for (a, b), label in self.edges:
            if (a, b) == (i, j):
                return label
        return self.context.one()

    def m_matrix(self) -> tuple[tuple[int, ...], ...]:
        """All m-values at this diagram; raises when one is undefined."""
        rows = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                if i == j:
                    row.append(-2)
                    continue
                m = m_from_labels(self.vertex_labels[i], self.sym_label(i, j))
                if m is None:
                    raise UndefinedMValueError(i, j)
                row.append(m)
            rows.append(tuple(row))
        return tuple(rows)

    def reflect(self, i: int) -> DynkinDiagram:
        """Diagram of the reflected pair, computed from labels alone.

        Uses the update rules
            q'_ii = q_ii,
            q'_jj = p_ij^m_ij * q_jj,
            q'_ij q'_ji = p_ij^-2 * q_ij q_ji,
            q'_jl q'_lj = p_ij^m_il * p_il^m_ij * q_jl q_lj
        and agrees with reflecting a realizing basis directly.
        """
        vi = self.vertex_labels[i]
        m = {}
        p = {}
        for j in range(self.n):
            if j == i:
                continue
            s = self.sym_label(i, j)
            mj = m_from_labels(vi, s)
            if mj is None:
                raise UndefinedMValueError(i, j)
            m[j] = mj
            p[j] = p_from_labels(vi, s)
        new_vertices = list(self.vertex_labels)
        for j in range(self.n):
            if j != i:
                new_vertices[j] = p[j] ** m[j] * self.vertex_labels[j]
        new_edges: dict[tuple[int, int], GroupElement] = {}
        for a in range(self.n):
            for b in range(a + 1, self.n):
                s = self.sym_label(a, b)
                if a == i:
                    label = p[b] ** (-2) * s
                elif b == i:
                    label = p[a] ** (-2) * s
                else:
                    label = p[a] ** m[b] * p[b] ** m[a] * s
                new_edges[(a, b)] = label
        return DynkinDiagram.make(self.context, tuple(new_vertices), new_edges)

    def permuted(self, perm: tuple[int, ...]) -> DynkinDiagram:
        """Relabel vertices: new vertex k is old vertex perm[k]."""
        vertices = tuple(self.vertex_labels[perm[k]] for k in range(self.n))
        inv = [0] * self.n
        for k, pk in enumerate(perm):
            inv[pk] = k
        edges = {}
        for (i, j), label in self.edges:
            edges[(inv[i], inv[j]) if inv[i] < inv[j] else (inv[j], inv[i])] = label
        return DynkinDiagram.make(self.context, vertices, edges)

    def exact_key(self) -> tuple:
        """Hashable identity of the labeled diagram as-is (no permutation)."""
        return (
            tuple(v.key for v in self.vertex_labels),
            tuple((e, label.key) for e, label in self.edges),
        )

    def canonical_key(self) -> tuple:
        """Lexicographic minimum of exact keys over all vertex permutations."""
        return min(self.permuted(p).exact_key() for p in permutations(range(self.n)))

    def automorphisms(self) -> list[tuple[int, ...]]:
        """Vertex permutations that fix the labeled diagram."""
        key = self.exact_key()
        return [p for p in permutations(range(self.n)) if self.permuted(p).exact_key() == key]

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        adjacent = {k: set() for k in range(self.n)}
        for (i, j), _ in self.edges:
            adjacent[i].add(j)
            adjacent[j].add(i)
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            comp = []
            stack = [start]
            seen[start] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adjacent[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    @property
    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def embed(self, target: GroupContext) -> DynkinDiagram:
        return DynkinDiagram(
            target,
            self.n,
            tuple(v.embed(target) for v in self.vertex_labels),
            tuple((e, label.embed(target)) for e, label in self.edges),
        )

    def to_json(self) -> dict:
        return {
            "context": self.context.to_json(),
            "n": self.n,
            "vertices": [v.to_json() for v in self.vertex_labels],
            "edges": [
                {"i": i + 1, "j": j + 1, "label": label.to_json()}
                for (i, j), label in self.edges
            ],
        }

    @staticmethod
    def from_json(data: dict) -> DynkinDiagram:
        ctx = GroupContext.from_json(data["context"])
        vertices = tuple(GroupElement.from_json(v, ctx) for v in data["vertices"])
        edges = {}
        for e in data["edges"]:
            edges[(int(e["i"]) - 1, int(e["j"]) - 1)] = GroupElement.from_json(e["label"], ctx)
        return DynkinDiagram.make(ctx, vertices, edges)

    def to_dot(self) -> str:
        lines = ["graph dynkin {"]
        for i, v in enumerate(self.vertex_labels):
            lines.append(f'  v{i + 1} [label="{v.render()}"];')
        for (i, j), label in self.edges:
            lines.append(f'  v{i + 1} -- v{j + 1} [label="{label.render()}"];')
        lines.append("}")
        return "\n".join(lines)


def diagram(chi: Bicharacter, basis: Basis | None = None) -> DynkinDiagram:
    """Generalized Dynkin diagram of (chi, basis)."""
    if basis is None:
        basis = Basis.standard(chi.n)
    vs = tuple(chi.evaluate(f, f) for f in basis.vectors)
    edges = {}
    for i in range(chi.n):
        for j in range(i + 1, chi.n):
            edges[(i, j)] = chi.sym(basis.vectors[i], basis.vectors[j])
    return DynkinDiagram.make(chi.context, vs, edges)


def reflect_diagram(d: DynkinDiagram, i: int) -> DynkinDiagram:
    return d.reflect(i)


def connected_components(chi: Bicharacter) -> list[list[int]]:
    """Vertex partition induced by the edges q_ij*q_ji != 1."""
    return diagram(chi).components()


@dataclass(frozen=True)
class CartanVerdict:
    is_cartan: bool
    cartan_matrix: tuple[tuple[int, ...], ...] | None
    is_finite_type: bool
    reason: str = ""


def _is_finite_type(c: tuple[tuple[int, ...], ...], components: list[list[int]]) -> bool:
    """Finite-type test: positive-definite symmetrization per component.

    Looks for positive weights d_i with d_i*c_ij = d_j*c_ji (spanning-tree
    assignment, then consistency on all pairs) and checks that all leading
    principal minors of (d_i*c_ij) are positive.
    """
    for comp in components:
        d: dict[int, Fraction] = {comp[0]: Fraction(1)}
        queue = [comp[0]]
        while queue:
            i = queue.pop()
            for j in comp:
                if j in d or c[i][j] == 0:
                    continue
                d[j] = d[i] * Fraction(c[i][j], c[j][i])
                queue.append(j)
        if len(d) != len(comp):
            return False  # disconnected inside a component cannot happen
        for i in comp:
            for j in comp:
                if d[i] * c[i][j] != d[j] * c[j][i]:
                    return False
        sym = [[d[i] * c[i][j] for j in comp] for i in comp]
        for k in range(1, len(comp) + 1):
            sub = tuple(tuple(sym[a][b] for b in range(k)) for a in range(k))
            if _frac_det(sub) <= 0:
                return False
    return True


def _frac_det(a) -> Fraction:
    n = len(a)
    rows = [list(map(Fraction, row)) for row in a]
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            result = -result
        result *= rows[k][k]
        for i in range(k + 1, n):
            f = rows[i][k] / rows[k][k]
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return result


def cartan_verdict(chi: Bicharacter, basis: Basis | None = None) -> CartanVerdict:
    """Cartan-type test for (chi, basis) and finite-type decision.

    Cartan type means q_ii^m(i,j) * q_ij*q_ji = 1 for all pairs; the matrix
    C has 2 on the diagonal and -m(i,j) off it.
    """
    d = diagram(chi, basis)
    try:
        m = d.m_matrix()
    except UndefinedMValueError as exc:
        return CartanVerdict(False, None, False, f"undefined m-value at {exc.pair}")
    n = d.n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if not (d.vertex_labels[i] ** m[i][j] * d.sym_label(i, j)).is_one:
                return CartanVerdict(False, None, False,
                                     f"Cartan identity fails at ({i}, {j})")
    c = tuple(
        tuple(2 if i == j else -m[i][j] for j in range(n))
        for i in range(n)
    )
    finite = _is_finite_type(c, d.components())
    return CartanVerdict(True, c, finite)
