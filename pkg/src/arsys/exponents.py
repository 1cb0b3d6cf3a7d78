"""Exact arithmetic in the abelian value group Z^r x Z/N.

Every structure constant of a diagonal bicharacter lives in the subgroup of
k^* generated by finitely many parameters: free ("generic") parameters of
infinite order together with roots of unity.  In characteristic zero that
subgroup is isomorphic to Z^r x Z/N, so equality, orders and exponent
equations are decidable exactly.  Elements are written additively here:
``free`` is the exponent vector of the generic generators and ``tor`` the
exponent of a fixed primitive N-th root of unity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd, lcm
from typing import Iterable


class ContextMismatchError(ValueError):
    """Two elements from different value groups were combined."""


_FREE_NAMES = ("q", "r", "s")


@dataclass(frozen=True, slots=True)
class GroupContext:
    """Ambient value group Z^free_rank x Z/torsion_order."""

    free_rank: int
    torsion_order: int

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free_rank must be >= 0")
        if self.torsion_order < 1:
            raise ValueError("torsion_order must be >= 1")

    def one(self) -> GroupElement:
        return GroupElement(self, (0,) * self.free_rank, 0)

    def element(self, free: Iterable[int], tor: int) -> GroupElement:
        free = tuple(int(x) for x in free)
        if len(free) != self.free_rank:
            raise ValueError(f"free part must have length {self.free_rank}")
        return GroupElement(self, free, int(tor) % self.torsion_order)

    def free_generator(self, k: int = 0) -> GroupElement:
        if not 0 <= k < self.free_rank:
            raise ValueError(f"no free generator {k} in rank {self.free_rank}")
        free = tuple(1 if i == k else 0 for i in range(self.free_rank))
        return GroupElement(self, free, 0)

    def root_of_unity(self, order: int) -> GroupElement:
        """A torsion element of exact multiplicative order ``order``."""
        if order < 1 or self.torsion_order % order != 0:
            raise ValueError(f"order {order} does not divide N={self.torsion_order}")
        return GroupElement(self, (0,) * self.free_rank, self.torsion_order // order % self.torsion_order)

    def minus_one(self) -> GroupElement:
        return self.root_of_unity(2)

    def join(self, other: GroupContext) -> GroupContext:
        """Smallest common context, embedding both via lcm of torsion orders."""
        return GroupContext(max(self.free_rank, other.free_rank),
                            lcm(self.torsion_order, other.torsion_order))

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion_order": self.torsion_order}

    @staticmethod
    def from_json(data: dict) -> GroupContext:
        return GroupContext(int(data["free_rank"]), int(data["torsion_order"]))


@dataclass(frozen=True, slots=True)
class GroupElement:
    """Element of a :class:`GroupContext`, written additively.

    ``free`` is always of length ``context.free_rank`` and ``tor`` is reduced
    mod ``context.torsion_order``.  Instances are immutable and hashable; two
    elements are equal iff both parts (and the context) agree.
    """

    context: GroupContext
    free: tuple[int, ...]
    tor: int

    def _check(self, other: GroupElement) -> None:
        if self.context != other.context:
            raise ContextMismatchError(f"{self.context} vs {other.context}")

    def __mul__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(
            self.context,
            tuple(a + b for a, b in zip(self.free, other.free)),
            (self.tor + other.tor) % self.context.torsion_order,
        )

    def inverse(self) -> GroupElement:
        return GroupElement(
            self.context,
            tuple(-a for a in self.free),
            -self.tor % self.context.torsion_order,
        )

    def __pow__(self, m: int) -> GroupElement:
        return GroupElement(
            self.context,
            tuple(m * a for a in self.free),
            (m * self.tor) % self.context.torsion_order,
        )

    @property
    def is_one(self) -> bool:
        return self.tor == 0 and not any(self.free)

    def order(self) -> int | None:
        """Least m >= 1 with self^m = 1, or None for infinite order."""
        if any(self.free):
            return None
        n = self.context.torsion_order
        return n // gcd(self.tor, n)

    def embed(self, target: GroupContext) -> GroupElement:
        """Reinterpret in a larger context (free generators identified by
        position, torsion scaled along mu_N -> mu_N')."""
        src = self.context
        if target.free_rank < src.free_rank or target.torsion_order % src.torsion_order:
            raise ContextMismatchError(f"cannot embed {src} into {target}")
        scale = target.torsion_order // src.torsion_order
        free = self.free + (0,) * (target.free_rank - src.free_rank)
        return GroupElement(target, free, self.tor * scale % target.torsion_order)

    @property
    def key(self) -> tuple:
        """Context-free data key, used for canonical forms and JSON-free sets."""
        return (self.free, self.tor)

    def render(self) -> str:
        """Human-readable monomial, e.g. ``-q^2*z`` (z = torsion generator)."""
        n = self.context.torsion_order
        tor = self.tor
        sign = ""
        if n % 2 == 0 and tor >= n // 2:
            sign = "-"
            tor -= n // 2
        parts = []
        for k, e in enumerate(self.free):
            if e == 0:
                continue
            name = _FREE_NAMES[k] if k < len(_FREE_NAMES) else f"g{k}"
            parts.append(name if e == 1 else f"{name}^{e}")
        if tor:
            parts.append("z" if tor == 1 else f"z^{tor}")
        if not parts:
            return sign + "1"
        return sign + "*".join(parts)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<{self.render()} in Z^{self.context.free_rank}xZ/{self.context.torsion_order}>"

    def to_json(self) -> dict:
        return {"free": list(self.free), "tor": self.tor}

    @staticmethod
    def from_json(data: dict, context: GroupContext) -> GroupElement:
        return context.element(data["free"], data["tor"])


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    return a * b


def inv(a: GroupElement) -> GroupElement:
    return a.inverse()


def power(a: GroupElement, m: int) -> GroupElement:
    return a ** m


def is_one(a: GroupElement) -> bool:
    return a.is_one


def order(a: GroupElement) -> int | None:
    return a.order()


def _min_congruence_solution(a: int, b: int, n: int) -> int | None:
    """Least m >= 0 with m*a + b == 0 (mod n), or None."""
    a %= n
    b %= n
    g = gcd(a, n)
    if b % g:
        return None
    n1 = n // g
    # a/g is invertible mod n/g
    return (-(b // g) * pow(a // g, -1, n1)) % n1 if n1 > 1 else 0


def solve_min_exponent(q: GroupElement, p: GroupElement) -> int | None:
    """Least m >= 0 with q^m * p = 1, or None when no such m exists.

    The free parts impose an exact integer linear equation (they either force
    a single candidate m, force no solution, or leave m unconstrained); the
    torsion parts impose a linear congruence mod N.  The result is the least
    nonnegative solution of the combined system.
    """
    if q.context != p.context:
        raise ContextMismatchError(f"{q.context} vs {p.context}")
    n = q.context.torsion_order
    m_forced: int | None = None
    for fq, fp in zip(q.free, p.free):
        if fq == 0:
            if fp != 0:
                return None
            continue
        if fp % fq:
            return None
        m = -fp // fq
        if m_forced is None:
            m_forced = m
        elif m_forced != m:
            return None
    if m_forced is not None:
        if m_forced < 0:
            return None
        return m_forced if (m_forced * q.tor + p.tor) % n == 0 else None
    return _min_congruence_solution(q.tor, p.tor, n)


def has_int_exponent(q: GroupElement, p: GroupElement) -> bool:
    """Whether q^m * p = 1 for some integer m (of either sign)."""
    return solve_min_exponent(q, p) is not None or solve_min_exponent(q.inverse(), p) is not None


def element_to_json_str(a: GroupElement) -> str:
    return json.dumps(a.to_json(), sort_keys=True)
