"""Breadth-first exploration of the Weyl groupoid of a bicharacter pair.

Starting from the standard basis, every defined reflection is applied; the
reachable bases (deduplicated as unordered vector sets) are the objects of
the groupoid.  Closure within the caps certifies an arithmetic root system;
an undefined exponent anywhere certifies that the groupoid is not full; a
cap breach is reported as such and never upgraded to a claim of infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lattice
from .bicharacter import Basis, Bicharacter, DynkinDiagram, diagram as make_diagram, m_from_labels, cartan_verdict
from .exponents import GroupElement
from .lattice import Vec


@dataclass(frozen=True, slots=True)
class Caps:
    """Exploration guards; defaults close every catalog instance comfortably
    while letting affine counterexamples breach the norm cap fast."""

    max_objects: int = 100_000
    max_root_norm: int = 60
    max_depth: int = 64

    def __post_init__(self) -> None:
        if min(self.max_objects, self.max_root_norm, self.max_depth) < 1:
            raise ValueError("all caps must be >= 1")


@dataclass(frozen=True)
class GroupoidObject:
    """A reachable basis F with bookkeeping transform T, T(E) = F."""

    basis: Basis
    transform: lattice.Mat
    diagram: DynkinDiagram
    depth: int


@dataclass(frozen=True)
class NotFullWitness:
    object_index: int
    basis: Basis
    pair: tuple[int, int]


@dataclass
class ExplorationResult:
    verdict: str  # "finite" | "not_full" | "exceeded"
    chi: Bicharacter
    objects: list[GroupoidObject] = field(default_factory=list)
    roots: tuple[Vec, ...] | None = None
    witness: NotFullWitness | None = None
    exceeded_cap: str | None = None

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"

    def object_index(self, basis: Basis) -> int | None:
        key = basis.as_set_key()
        for idx, obj in enumerate(self.objects):
            if obj.basis.as_set_key() == key:
                return idx
        return None


def _object_labels(chi: Bicharacter, vectors: tuple[Vec, ...]):
    n = chi.n
    verts = tuple(chi.evaluate(f, f) for f in vectors)
    syms = {}
    for i in range(n):
        for j in range(i + 1, n):
            syms[(i, j)] = chi.sym(vectors[i], vectors[j])
    return verts, syms


def explore(chi: Bicharacter, caps: Caps = Caps()) -> ExplorationResult:
    """BFS over reflections from the standard basis.

    Deterministic: levels are processed in order, each level sorted by the
    lexicographic key of the basis as an unordered vector set.
    """
    n = chi.n
    one = chi.context.one()
    m_cache: dict[tuple, int | None] = {}

    def m_of(v: GroupElement, s: GroupElement) -> int | None:
        key = (v.free, v.tor, s.free, s.tor)
        try:
            return m_cache[key]
        except KeyError:
            m = m_from_labels(v, s)
            m_cache[key] = m
            return m

    start = Basis.standard(n)
    objects: list[GroupoidObject] = []
    seen: set[tuple[Vec, ...]] = set()

    def add_object(vectors: tuple[Vec, ...], depth: int) -> GroupoidObject:
        verts, syms = _object_labels(chi, vectors)
        edges = {pair: s for pair, s in syms.items() if not s.is_one}
        diag = DynkinDiagram.make(chi.context, verts, edges)
        obj = GroupoidObject(Basis(vectors), lattice.mat_from_cols(vectors), diag, depth)
        objects.append(obj)
        return obj

    seen.add(start.as_set_key())
    add_object(start.vectors, 0)
    level = [0]
    depth = 0
    result = ExplorationResult(verdict="", chi=chi, objects=objects)

    while level:
        next_candidates: dict[tuple[Vec, ...], tuple[Vec, ...]] = {}
        for idx in level:
            obj = objects[idx]
            vectors = obj.basis.vectors
            verts = obj.diagram.vertex_labels
            sym = obj.diagram.sym_label
            m = [[0] * n for _ in range(n)]
            for i in range(n):
                vi = verts[i]
                for j in range(n):
                    if i == j:
                        m[i][j] = -2
                        continue
                    mij = m_of(vi, sym(i, j))
                    if mij is None:
                        result.verdict = "not_full"
                        result.witness = NotFullWitness(idx, obj.basis, (i, j))
                        return result
                    m[i][j] = mij
            for i in range(n):
                fi = vectors[i]
                new_vectors = []
                for j in range(n):
                    if j == i:
                        new_vectors.append(lattice.vec_neg(fi))
                    else:
                        v = tuple(a + m[i][j] * b for a, b in zip(vectors[j], fi))
                        new_vectors.append(v)
                for v in new_vectors:
                    if lattice.vec_norm_inf(v) > caps.max_root_norm:
                        result.verdict = "exceeded"
                        result.exceeded_cap = "max_root_norm"
                        return result
                key = tuple(sorted(new_vectors))
                if key not in seen and key not in next_candidates:
                    next_candidates[key] = tuple(new_vectors)
        if not next_candidates:
            break
        depth += 1
        if depth > caps.max_depth:
            result.verdict = "exceeded"
            result.exceeded_cap = "max_depth"
            return result
        level = []
        for key in sorted(next_candidates):
            if len(objects) >= caps.max_objects:
                result.verdict = "exceeded"
                result.exceeded_cap = "max_objects"
                return result
            seen.add(key)
            add_object(next_candidates[key], depth)
            level.append(len(objects) - 1)

    result.verdict = "finite"
    roots = set()
    for obj in objects:
        for v in obj.basis.vectors:
            roots.add(v)
            roots.add(lattice.vec_neg(v))
    result.roots = tuple(sorted(roots))
    return result


@dataclass(frozen=True)
class ArithmeticVerdict:
    kind: str  # "yes" | "no" | "indeterminate"
    roots: tuple[Vec, ...] | None
    reason: str
    exploration: ExplorationResult
    note: str = ""

    @property
    def is_yes(self) -> bool:
        return self.kind == "yes"


def is_arithmetic(chi: Bicharacter, caps: Caps = Caps()) -> ArithmeticVerdict:
    """Decide whether (chi, E) generates an arithmetic root system.

    yes when the groupoid closes (full and finite), no when some reflection
    exponent is undefined, indeterminate on a cap breach.
    """
    result = explore(chi, caps)
    if result.verdict == "finite":
        return ArithmeticVerdict("yes", result.roots, "", result)
    if result.verdict == "not_full":
        w = result.witness
        return ArithmeticVerdict(
            "no", None,
            f"undefined m-value at object {w.object_index}, pair {w.pair}",
            result,
        )
    note = ""
    cv = cartan_verdict(chi)
    if cv.is_cartan and not cv.is_finite_type:
        note = "Cartan type but not finite type; infinite by the Cartan criterion (advisory)"
    return ArithmeticVerdict("indeterminate", None,
                             f"cap breached: {result.exceeded_cap}", result, note)


def positive_roots(result: ExplorationResult, basis: Basis) -> tuple[Vec, ...]:
    """Roots lying in the N_0-span of an object basis.

    Asserts the decomposition Delta = Delta^+_F union -Delta^+_F.
    """
    if not result.is_finite:
        raise ValueError("positive roots require a finite exploration")
    if result.object_index(basis) is None:
        raise ValueError("basis is not an object of the groupoid")
    inv = lattice.unimodular_inverse(basis.matrix())
    positive = []
    negative = []
    for root in result.roots:
        coords = lattice.mat_vec(inv, root)
        if all(c >= 0 for c in coords):
            positive.append(root)
        elif all(c <= 0 for c in coords):
            negative.append(root)
    assert len(positive) + len(negative) == len(result.roots), \
        "Delta is not Delta+ union -Delta+ for this object"
    assert {lattice.vec_neg(v) for v in positive} == set(negative)
    return tuple(sorted(positive))
