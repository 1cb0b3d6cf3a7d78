"""Small exact integer/rational linear algebra for lattice work.

Vectors are tuples of ints, matrices are tuples of row tuples.  Sizes here
are tiny (rank <= 4), so the implementations favour clarity and exactness
over asymptotics: fraction-free determinants, Euclidean Hermite normal form
with transformation matrix, and double-kernel saturation.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_scale(c: int, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def vec_neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_dot(a: Vec, b: Vec) -> int:
    return sum(x * y for x, y in zip(a, b))


def vec_norm_inf(a: Vec) -> int:
    return max(abs(x) for x in a) if a else 0


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = tuple(zip(*b))
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def mat_vec(a: Mat, v: Vec) -> Vec:
    return tuple(vec_dot(row, v) for row in a)


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def mat_from_cols(cols) -> Mat:
    return tuple(zip(*cols))


def mat_cols(a: Mat) -> tuple[Vec, ...]:
    return tuple(zip(*a))


def det(a: Mat) -> int:
    """Integer determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def unimodular_inverse(a: Mat) -> Mat:
    """Inverse of a matrix with determinant +-1 (stays integral)."""
    d = det(a)
    if d not in (1, -1):
        raise ValueError(f"matrix is not unimodular (det={d})")
    n = len(a)
    # adjugate via cofactors; n <= 4 so this is cheap
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = tuple(
                tuple(a[r][c] for c in range(n) if c != i)
                for r in range(n) if r != j
            )
            row.append((-1) ** (i + j) * det(minor) * d)
        inv.append(tuple(row))
    return tuple(inv)


def hnf_with_transform(a: Mat) -> tuple[Mat, Mat]:
    """Row-style Hermite form: returns (H, U) with U unimodular, U*a = H.

    Zero rows of H are collected at the bottom; the matching rows of U span
    the integer left-kernel of ``a``.
    """
    rows = [list(r) for r in a]
    k = len(rows)
    n = len(rows[0]) if rows else 0
    u = [list(r) for r in identity(k)]
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, k):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        u[r], u[piv] = u[piv], u[r]
        # clear the column below the pivot by gcd steps
        for i in range(r + 1, k):
            while rows[i][c]:
                q = rows[r][c] // rows[i][c]
                rows[r] = [x - q * y for x, y in zip(rows[r], rows[i])]
                u[r] = [x - q * y for x, y in zip(u[r], u[i])]
                rows[r], rows[i] = rows[i], rows[r]
                u[r], u[i] = u[i], u[r]
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
            u[r] = [-x for x in u[r]]
        r += 1
        if r == k:
            break
    return tuple(tuple(x) for x in rows), tuple(tuple(x) for x in u)


def int_right_kernel(a: Mat) -> Mat:
    """Z-basis (rows) of {x in Z^n : a @ x = 0}."""
    at = transpose(a)
    h, u = hnf_with_transform(at)
    kernel = [u[i] for i in range(len(h)) if not any(h[i])]
    return tuple(kernel)


def saturate(vectors: Mat) -> Mat:
    """Z-basis (rows) of Q-span(vectors) intersected with Z^n."""
    if not vectors:
        return ()
    k = int_right_kernel(vectors)
    if not k:
        return identity(len(vectors[0]))
    return int_right_kernel(k)


def rank(a: Mat) -> int:
    h, _ = hnf_with_transform(a)
    return sum(1 for row in h if any(row))


def rational_solve(a: Mat, b: Vec) -> tuple[Fraction, ...] | None:
    """One exact solution x of a @ x = b, or None (a given by rows)."""
    m = len(a)
    n = len(a[0]) if a else 0
    rows = [[Fraction(x) for x in list(a[i]) + [b[i]]] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if rows[i][n]:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return tuple(x)


def gcd_vector(v: Vec) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g
