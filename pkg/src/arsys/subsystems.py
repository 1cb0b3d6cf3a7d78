"""Restriction of an arithmetic root system to the span of chosen roots.

Intersecting the root set with a rational subspace H yields another
arithmetic root system; the restriction carries a unique basis E_H squeezed
between the positive roots in H and their nonnegative span.  E_H is found as
the set of indecomposable elements of Delta^+ ∩ H, verified against the
sandwich property, with a certified fallback that selects the object basis
made positive by a generic functional vanishing nowhere on Delta \\ H.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count, product

from . import lattice
from .bicharacter import Basis, Bicharacter
from .groupoid import ArithmeticVerdict, Caps, ExplorationResult, is_arithmetic
from .lattice import Mat, Vec


@dataclass(frozen=True)
class Subsystem:
    parent: ExplorationResult
    span_basis: tuple[Vec, ...]
    lattice_basis: tuple[Vec, ...]
    roots_in_h: tuple[Vec, ...]
    e_h: tuple[Vec, ...]
    restricted_chi: Bicharacter
    verdict: ArithmeticVerdict

    @property
    def rank(self) -> int:
        return len(self.e_h)


def _in_span(vectors: Mat, v: Vec) -> bool:
    rows = lattice.transpose(vectors)  # columns = span vectors
    return lattice.rational_solve(rows, v) is not None


def _nonneg_int_combination(generators: tuple[Vec, ...], target: Vec) -> tuple[int, ...] | None:
    """Exact coefficients c >= 0 with sum c_k * g_k = target, if any.

    The generators are linearly independent, so the rational solve is unique
    and only integrality/nonnegativity need checking.
    """
    rows = lattice.transpose(generators)
    sol = lattice.rational_solve(rows, target)
    if sol is None:
        return None
    coeffs = []
    for c in sol:
        if c.denominator != 1 or c < 0:
            return None
        coeffs.append(int(c))
    return tuple(coeffs)


def _indecomposables(positive_in_h: list[Vec]) -> list[Vec]:
    pos = set(positive_in_h)
    out = []
    for beta in positive_in_h:
        decomposable = any(
            tuple(b - a for a, b in zip(alpha, beta)) in pos
            for alpha in positive_in_h
            if alpha != beta
        )
        if not decomposable:
            out.append(beta)
    return sorted(out)


def _functional_basis(parent: ExplorationResult, span: Mat) -> list[Vec]:
    """Fallback construction of E_H via a generic separating functional.

    alpha is an integer functional vanishing on H but on no root outside H;
    eps a positive rational multiple of the all-ones functional small enough
    not to disturb signs off H.  The object basis made positive by
    alpha + eps intersected with H is E_H.
    """
    n = len(parent.roots[0])
    normal_rows = lattice.int_right_kernel(span)  # basis of H-perp
    outside = [r for r in parent.roots if not _in_span(span, r)]
    alpha = None
    for radius in count(1):
        for coeffs in product(range(-radius, radius + 1), repeat=len(normal_rows)):
            if not any(coeffs):
                continue
            cand = tuple(
                sum(c * row[k] for c, row in zip(coeffs, normal_rows))
                for k in range(n)
            )
            if all(lattice.vec_dot(cand, beta) != 0 for beta in outside):
                alpha = cand
                break
        if alpha is not None:
            break
        if radius > 16:
            raise RuntimeError("no separating functional found")
    if outside:
        mu = min(abs(lattice.vec_dot(alpha, beta)) for beta in outside)
    else:
        mu = 1
    norm_bound = max(sum(abs(x) for x in r) for r in parent.roots)
    eps = Fraction(mu, 2 * norm_bound + 1)  # |<eps*1, beta>| < mu/2 for all roots

    def value(v: Vec) -> Fraction:
        return lattice.vec_dot(alpha, v) + eps * sum(v)

    for obj in parent.objects:
        values = [value(f) for f in obj.basis.vectors]
        if all(v > 0 for v in values):
            return sorted(f for f in obj.basis.vectors if _in_span(span, f))
    raise RuntimeError("no object basis is positive for the separating functional")


def restrict(parent: ExplorationResult, roots: list[Vec],
             caps: Caps = Caps()) -> Subsystem:
    """Restrict to H = span(roots) and re-verify the restricted triple.

    The chosen roots must lie in Delta and be linearly independent.
    """
    if not parent.is_finite:
        raise ValueError("restriction requires a finite parent exploration")
    root_set = set(parent.roots)
    for f in roots:
        if tuple(f) not in root_set:
            raise ValueError(f"{f} is not a root of the parent system")
    span = tuple(tuple(f) for f in roots)
    if lattice.rank(span) != len(span):
        raise ValueError("chosen roots are linearly dependent")

    gamma = lattice.saturate(span)
    roots_in_h = tuple(sorted(r for r in parent.roots if _in_span(span, r)))
    positive_in_h = [r for r in roots_in_h if all(c >= 0 for c in r)]

    e_h = _indecomposables(positive_in_h)
    if not _sandwich_holds(e_h, positive_in_h):
        e_h = _functional_basis(parent, span)
        if not _sandwich_holds(e_h, positive_in_h):
            raise RuntimeError("no basis with the sandwich property was found")

    chi = parent.chi
    restricted = Bicharacter(
        chi.context,
        len(e_h),
        tuple(tuple(chi.evaluate(a, b) for b in e_h) for a in e_h),
    )
    verdict = is_arithmetic(restricted, caps)
    return Subsystem(parent, span, gamma, roots_in_h, tuple(e_h), restricted, verdict)


def _sandwich_holds(e_h: list[Vec], positive_in_h: list[Vec]) -> bool:
    """E_H ⊂ Delta^+ ∩ H and every element of Delta^+ ∩ H is an
    N_0-combination of E_H, with E_H independent."""
    if not e_h:
        return not positive_in_h
    if lattice.rank(tuple(e_h)) != len(e_h):
        return False
    pos = set(positive_in_h)
    if any(tuple(f) not in pos for f in e_h):
        return False
    return all(_nonneg_int_combination(tuple(e_h), beta) is not None
               for beta in positive_in_h)


def _is_root_multiple(v: Vec, root_set: set[Vec]) -> bool:
    """Whether v = c * alpha for some root alpha and integer c >= 1."""
    g = lattice.gcd_vector(v)
    if g == 0:
        return False
    for c in range(1, g + 1):
        if g % c == 0 and tuple(x // c for x in v) in root_set:
            return True
    return False


def check_lbasis(parent: ExplorationResult, roots: list[Vec]) -> bool:
    """Linear-independence criterion for a root family f_1..f_l.

    Tests, over a coordinate box bounded by the largest root norm, that no
    f_i minus a nonzero N_0-combination of the later f_j is a positive
    multiple of a root; asserts agreement with the direct statement that
    Delta ∩ span lies in the (+/-) nonnegative span of the family.
    """
    if not parent.is_finite:
        raise ValueError("criterion requires a finite parent exploration")
    root_set = set(parent.roots)
    for f in roots:
        if tuple(f) not in root_set:
            raise ValueError(f"{f} is not a root of the parent system")
    span = tuple(tuple(f) for f in roots)
    if lattice.rank(span) != len(span):
        raise ValueError("chosen roots are linearly dependent")
    l = len(roots)
    bound = max(lattice.vec_norm_inf(r) for r in parent.roots)

    criterion = True
    for i in range(l - 1):
        tail = span[i + 1:]
        for ms in product(range(bound + 1), repeat=len(tail)):
            if not any(ms):
                continue
            v = span[i]
            for m, f in zip(ms, tail):
                v = lattice.vec_sub(v, lattice.vec_scale(m, f))
            if _is_root_multiple(v, root_set):
                criterion = False
                break
        if not criterion:
            break

    direct = _roots_in_pm_cone(parent, span)
    assert criterion == direct, \
        "bounded exponent criterion disagrees with the direct span test"
    return criterion


def _roots_in_pm_cone(parent: ExplorationResult, span: Mat) -> bool:
    """Delta ∩ span(f) ⊂ (+span_{R+} f) ∪ (−span_{R+} f), decided exactly."""
    rows = lattice.transpose(span)
    for r in parent.roots:
        sol = lattice.rational_solve(rows, r)
        if sol is None:
            continue
        if not (all(c >= 0 for c in sol) or all(c <= 0 for c in sol)):
            return False
    return True
