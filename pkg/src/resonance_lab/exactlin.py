"""Exact rational linear algebra and two-generator cone tests.

Vectors are plain tuples of :class:`fractions.Fraction`; matrices are
sequences of such rows.  Nothing in this module touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import count
from math import gcd, lcm
from typing import Iterable, Optional, Sequence, Tuple

Vector = Tuple[Fraction, ...]
Matrix = Sequence[Sequence[Fraction]]


class Inconsistent(ValueError):
    """The linear system has no solution."""


class ZeroVector(ValueError):
    """A zero vector was passed where a ray generator is required."""


def vec(*entries) -> Vector:
    """Build a vector from ints, Fractions or ``"p/q"`` strings."""
    if len(entries) == 1 and not isinstance(entries[0], (int, Fraction, str)):
        entries = tuple(entries[0])
    return tuple(Fraction(x) for x in entries)


def zero(d: int) -> Vector:
    return (Fraction(0),) * d


def unit(d: int, i: int) -> Vector:
    """The i-th standard basis vector of Q^d (0-based)."""
    return tuple(Fraction(1 if k == i else 0) for k in range(d))


def add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def scale(c, v: Vector) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in v)


def neg(v: Vector) -> Vector:
    return tuple(-a for a in v)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def primitive(v: Sequence) -> Tuple[int, ...]:
    """Primitive integer vector on the ray R_{>0} v."""
    if is_zero(v):
        raise ZeroVector("zero vector has no primitive representative")
    fr = [Fraction(a) for a in v]
    m = lcm(*(a.denominator for a in fr))
    ints = [int(a * m) for a in fr]
    g = gcd(*ints)
    return tuple(a // g for a in ints)


def _integer_rows(rows: Iterable[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (rank and solution set
    of a homogeneous row are unchanged by nonzero row scaling)."""
    out = []
    for row in rows:
        fr = [Fraction(a) for a in row]
        m = lcm(*(a.denominator for a in fr)) if fr else 1
        out.append([int(a * m) for a in fr])
    return out


def _bareiss(m: list[list[int]], ncols: int) -> list[int]:
    """In-place fraction-free row echelon form of an integer matrix.

    Only the first ``ncols`` columns are used for pivoting; any further
    columns (an augmented right-hand side) are carried along.  Returns the
    pivot columns.
    """
    rows = len(m)
    width = len(m[0]) if rows else 0
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, rows):
            mic = m[i][c]
            row_i = m[i]
            row_r = m[r]
            for j in range(c + 1, width):
                row_i[j] = (piv * row_i[j] - mic * row_r[j]) // prev
            row_i[c] = 0
        # rows above the pivot row keep their scale; rows below were divided
        # by the previous pivot so the next division is again exact
        prev = piv
        pivots.append(c)
        r += 1
    return pivots


def rank(a: Matrix) -> int:
    """Row-space dimension of ``a`` by fraction-free elimination."""
    rows = _integer_rows(a)
    if not rows:
        return 0
    return len(_bareiss(rows, len(rows[0])))


def solve(a: Matrix, b: Sequence) -> Tuple[Vector, bool]:
    """Solve ``a x = b`` exactly.

    Returns ``(x, unique)``; free variables are set to zero.  Raises
    :class:`Inconsistent` if no solution exists.
    """
    if len(a) != len(b):
        raise ValueError("row count of a and length of b differ")
    if not a:
        raise ValueError("empty system")
    n = len(a[0])
    aug = _integer_rows([list(row) + [rhs] for row, rhs in zip(a, b)])
    pivots = _bareiss(aug, n)
    k = len(pivots)
    for row in aug[k:]:
        if row[n] != 0:
            raise Inconsistent("system has no solution")
    x = [Fraction(0)] * n
    for i in range(k - 1, -1, -1):
        c = pivots[i]
        row = aug[i]
        s = Fraction(row[n]) - sum(row[j] * x[j] for j in range(c + 1, n))
        x[c] = s / row[c]
    return tuple(x), k == n


def solve_affine_one(functionals: Sequence[Sequence]) -> Tuple[Vector, bool]:
    """Find X with <f, X> = -1 for every f in ``functionals``.

    Returns ``(X, unique)`` where ``unique`` means the coefficient matrix
    has trivial kernel.  Raises :class:`Inconsistent` when no such X exists.
    """
    if not functionals:
        raise ValueError("need at least one functional")
    d = len(functionals[0])
    if any(len(f) != d for f in functionals):
        raise ValueError("functionals of mixed dimension")
    return solve(functionals, [Fraction(-1)] * len(functionals))


def transpose(a: Matrix) -> list[list[Fraction]]:
    return [list(col) for col in zip(*a)]


def open_cone2_from_gram(uu, vv, ww, uv, uw, vw) -> bool:
    """Cone test on a Gram matrix: is u in R_{>0} v + R_{>0} w (up to a
    positive factor)?  All arguments are exact (int or Fraction)."""
    det = vv * ww - vw * vw
    if det != 0:
        # s v + t w = u with s = a/det, t = b/det
        a = uv * ww - uw * vw
        b = uw * vv - uv * vw
        # squared norm of det*u - a v - b w
        res = (det * det * uu + a * a * vv + b * b * ww
               - 2 * det * a * uv - 2 * det * b * uw + 2 * a * b * vw)
        if res != 0:
            return False
        # det > 0 for independent v, w (Gram determinant)
        return a > 0 and b > 0
    # v, w parallel: the open cone lies on the line through v
    if uv * uv != uu * vv:
        return False
    if vw > 0:
        return uv > 0
    return True


def in_open_cone2(u: Sequence, v: Sequence, w: Sequence) -> bool:
    """True iff s*v + t*w is a positive multiple of u for some s, t > 0."""
    for x in (u, v, w):
        if is_zero(x):
            raise ZeroVector("cone generators and the tested vector must be nonzero")
    if not len(u) == len(v) == len(w):
        raise ValueError("dimension mismatch")
    u, v, w = primitive(u), primitive(v), primitive(w)
    return open_cone2_from_gram(
        dot(u, u), dot(v, v), dot(w, w), dot(u, v), dot(u, w), dot(v, w)
    )


def separating_witness(vectors: Sequence[Sequence]) -> Vector:
    """A deterministic X with pairwise distinct values <v, X>.

    Candidates run along the moment curve (1, m, m^2, ...), m = 1, 2, ...;
    a pair of distinct vectors collides for at most d-1 values of m, so the
    search terminates.  Raises ValueError if two vectors coincide.
    """
    vs = [tuple(Fraction(a) for a in v) for v in vectors]
    if len(set(vs)) != len(vs):
        raise ValueError("vectors are not pairwise distinct")
    if not vs:
        raise ValueError("no vectors")
    d = len(vs[0])
    for m in count(1):
        x = tuple(Fraction(m) ** k for k in range(d))
        vals = [dot(v, x) for v in vs]
        if len(set(vals)) == len(vals):
            return x
    raise AssertionError("unreachable")


def as_pairs(v: Sequence) -> list[list[int]]:
    """JSON encoding of a rational vector as [numerator, denominator] pairs."""
    return [[Fraction(a).numerator, Fraction(a).denominator] for a in v]


def from_pairs(pairs: Sequence[Sequence[int]]) -> Vector:
    out = []
    for p in pairs:
        if len(p) != 2 or p[1] == 0:
            raise ValueError(f"bad rational pair {p!r}")
        out.append(Fraction(int(p[0]), int(p[1])))
    return tuple(out)


def fmt(v) -> str:
    """Render a rational or vector as text ("num/den" style)."""
    if isinstance(v, (int, Fraction)):
        return str(Fraction(v))
    return "(" + ", ".join(str(Fraction(a)) for a in v) + ")"


__all__ = [
    "Vector", "Matrix", "Inconsistent", "ZeroVector", "vec", "zero", "unit",
    "add", "sub", "scale", "neg", "dot", "is_zero", "primitive", "rank",
    "solve", "solve_affine_one", "transpose", "in_open_cone2",
    "open_cone2_from_gram", "separating_witness", "as_pairs", "from_pairs",
    "fmt",
]
