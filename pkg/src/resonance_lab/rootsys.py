"""Restricted root systems in explicit coordinates, maximal parabolic
complements and the minimal resonant codimension r(g).

Coordinates
-----------
Classical families use the usual +-e_i +-e_j presentations with Bourbaki
numbering of the simple roots.  The exceptional systems use the following
models (e_1..e_d orthonormal):

* F4 in R^4 with alpha_1 = e2-e3, alpha_2 = e3-e4, alpha_3 = e4,
  alpha_4 = (e1-e2-e3-e4)/2.
* E8 in R^8 with alpha_8 = (e8-e7-...-e2+e1)/2, alpha_7 = e2+e1,
  alpha_6 = e2-e1, ..., alpha_1 = e7-e6 (Bourbaki order reversed).
* E7 inside the hyperplane (e8+e7)^perp of R^8 with
  alpha_7 = (e8-e7-...-e2+e1)/2, alpha_6 = e2+e1, alpha_5 = e2-e1, ...,
  alpha_1 = e6-e5.
* E6 in R^8 with Bourbaki's simple roots.
* G2 in the plane x+y+z = 0 of R^3 with alpha_1 = e1-e2 (short),
  alpha_2 = -2e1+e2+e3 (long).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterator, Tuple

from . import exactlin as el
from .exactlin import Vector

HALF = Fraction(1, 2)
SCHEMA_VERSION = 1


class InvalidType(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


FAMILIES = ("A", "B", "C", "D", "BC", "E", "F", "G")
EXCEPTIONAL = ("E", "F", "G")


@dataclass(frozen=True, order=True)
class RootSystemType:
    family: str
    rank: int

    def __post_init__(self):
        f, l = self.family, self.rank
        if f not in FAMILIES:
            raise InvalidType(f"unknown family {f!r}")
        if not isinstance(l, int) or l < 1:
            raise InvalidType(f"rank must be a positive integer, got {l!r}")
        if f == "E" and l not in (6, 7, 8):
            raise InvalidType("E_l exists only for l in {6, 7, 8}")
        if f == "F" and l != 4:
            raise InvalidType("F_l exists only for l = 4")
        if f == "G" and l != 2:
            raise InvalidType("G_l exists only for l = 2")

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "RootSystemType":
        """Parse ``"F4"``, ``"BC3"``, ``"e7"``; or a bare family plus ``rank``."""
        m = re.fullmatch(r"\s*(BC|[A-G])\s*_?(\d*)\s*", text.upper())
        if not m:
            raise InvalidType(f"cannot parse root system type {text!r}")
        fam, digits = m.groups()
        if digits:
            if rank is not None and rank != int(digits):
                raise InvalidType(f"rank {rank} conflicts with {text!r}")
            rank = int(digits)
        if rank is None:
            raise InvalidType(f"type {text!r} needs a rank")
        return cls(fam, rank)

    @property
    def exceptional(self) -> bool:
        return self.family in EXCEPTIONAL

    @property
    def reduced(self) -> "RootSystemType":
        """The reduced type: BC_l -> B_l, everything else unchanged."""
        if self.family == "BC":
            return RootSystemType("B", self.rank)
        return self

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class RootSystem:
    type: RootSystemType
    ambient_dim: int
    roots: Tuple[Vector, ...]
    simple: Tuple[Vector, ...]
    # coefficients of every root on the simple system, in root order
    coefficients: Tuple[Tuple[int, ...], ...] = field(repr=False, compare=False, default=())

    @property
    def rank(self) -> int:
        return len(self.simple)

    def coefficient_map(self) -> Dict[Vector, Tuple[int, ...]]:
        return dict(zip(self.roots, self.coefficients))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": str(self.type),
            "ambient_dim": self.ambient_dim,
            "roots": [el.as_pairs(r) for r in self.roots],
            "simple": [el.as_pairs(a) for a in self.simple],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict) -> "RootSystem":
        t = RootSystemType.parse(doc["type"])
        roots = tuple(el.from_pairs(r) for r in doc["roots"])
        simple = tuple(el.from_pairs(a) for a in doc["simple"])
        return _finish(t, int(doc["ambient_dim"]), roots, simple)


@dataclass(frozen=True)
class ParabolicComplement:
    j0: int
    complement: Tuple[Vector, ...]

    @property
    def codim(self) -> int:
        return len(self.complement)


# --------------------------------------------------------------------------
# coordinates


def _e(d: int, *terms: Tuple[int, int]) -> Vector:
    """Vector sum_k c_k e_{i_k} from 1-based (index, coefficient) pairs."""
    v = [Fraction(0)] * d
    for i, c in terms:
        v[i - 1] += Fraction(c)
    return tuple(v)


def _pm_pairs(d: int, idx) -> Iterator[Vector]:
    for i, j in combinations(idx, 2):
        for si, sj in product((1, -1), repeat=2):
            yield _e(d, (i, si), (j, sj))


def _classical(t: RootSystemType):
    f, l = t.family, t.rank
    if f == "A":
        d = l + 1
        roots = [_e(d, (i, 1), (j, -1)) for i in range(1, d + 1)
                 for j in range(1, d + 1) if i != j]
        simple = [_e(d, (i, 1), (i + 1, -1)) for i in range(1, l + 1)]
        return d, roots, simple
    d = l
    roots = list(_pm_pairs(d, range(1, l + 1)))
    simple = [_e(d, (i, 1), (i + 1, -1)) for i in range(1, l)]
    if f in ("B", "BC"):
        roots += [_e(d, (i, s)) for i in range(1, l + 1) for s in (1, -1)]
    if f in ("C", "BC"):
        roots += [_e(d, (i, 2 * s)) for i in range(1, l + 1) for s in (1, -1)]
    if f in ("B", "BC"):
        simple.append(_e(d, (l, 1)))
    elif f == "C":
        simple.append(_e(d, (l, 2)))
    else:  # D
        if l == 1:
            raise InvalidType("D_1 has no roots")
        simple.append(_e(d, (l - 1, 1), (l, 1)))
    return d, roots, simple


def _half_spin(d: int, fixed: Dict[int, int], free, parity: int) -> Iterator[Vector]:
    """Vectors (1/2) sum +-e_i with prescribed signs on ``fixed`` and all
    sign patterns on ``free`` having #minus == parity (mod 2)."""
    for signs in product((1, -1), repeat=len(free)):
        if sum(1 for s in signs if s < 0) % 2 != parity:
            continue
        v = [Fraction(0)] * d
        for i, s in fixed.items():
            v[i - 1] = HALF * s
        for i, s in zip(free, signs):
            v[i - 1] = HALF * s
        yield tuple(v)


def _half(d: int, signs: Dict[int, int]) -> Vector:
    return tuple(HALF * signs.get(i, 0) for i in range(1, d + 1))


def _exceptional(t: RootSystemType):
    l = t.rank
    if t.family == "G":
        d = 3
        short = [_e(d, (i, 1), (j, -1)) for i in (1, 2, 3) for j in (1, 2, 3) if i != j]
        long_ = []
        for i in (1, 2, 3):
            others = [j for j in (1, 2, 3) if j != i]
            v = _e(d, (i, 2), (others[0], -1), (others[1], -1))
            long_ += [v, el.neg(v)]
        simple = [_e(d, (1, 1), (2, -1)), _e(d, (1, -2), (2, 1), (3, 1))]
        return d, short + long_, simple
    if t.family == "F":
        d = 4
        roots = list(_pm_pairs(d, range(1, 5)))
        roots += [_e(d, (i, s)) for i in range(1, 5) for s in (1, -1)]
        roots += [tuple(HALF * s for s in signs) for signs in product((1, -1), repeat=4)]
        simple = [_e(d, (2, 1), (3, -1)), _e(d, (3, 1), (4, -1)), _e(d, (4, 1)),
                  _half(d, {1: 1, 2: -1, 3: -1, 4: -1})]
        return d, roots, simple
    d = 8
    if l == 8:
        roots = list(_pm_pairs(d, range(1, 9)))
        roots += list(_half_spin(d, {}, range(1, 9), 0))
        simple = [_e(d, (7, 1), (6, -1))]
        simple += [_e(d, (k + 1, 1), (k, -1)) for k in range(5, 0, -1)]  # alpha_2..alpha_6
        simple += [_e(d, (2, 1), (1, 1)),
                   _half(d, {8: 1, 7: -1, 6: -1, 5: -1, 4: -1, 3: -1, 2: -1, 1: 1})]
        return d, roots, simple
    if l == 7:
        roots = [_e(d, (8, 1), (7, -1)), _e(d, (8, -1), (7, 1))]
        roots += list(_pm_pairs(d, range(1, 7)))
        for s in (1, -1):
            # negating flips all six free signs, which keeps the minus count odd
            roots += list(_half_spin(d, {8: s, 7: -s}, range(1, 7), 1))
        simple = [_e(d, (6, 1), (5, -1))]
        simple += [_e(d, (k + 1, 1), (k, -1)) for k in range(4, 0, -1)]  # alpha_2..alpha_5
        simple += [_e(d, (2, 1), (1, 1)),
                   _half(d, {8: 1, 7: -1, 6: -1, 5: -1, 4: -1, 3: -1, 2: -1, 1: 1})]
        return d, roots, simple
    # E6, Bourbaki
    roots = list(_pm_pairs(d, range(1, 6)))
    for s in (1, -1):
        # negating flips five free signs: even minus count becomes odd
        roots += list(_half_spin(d, {8: s, 7: -s, 6: -s}, range(1, 6), 0 if s == 1 else 1))
    simple = [_half(d, {1: 1, 8: 1, 2: -1, 3: -1, 4: -1, 5: -1, 6: -1, 7: -1}),
              _e(d, (1, 1), (2, 1))]
    simple += [_e(d, (k, 1), (k - 1, -1)) for k in range(2, 6)]
    return d, roots, simple


def _expand(simple, roots):
    """Simple-root coefficients of each root, checked to be integral."""
    a_t = el.transpose(simple)
    out = []
    for r in roots:
        try:
            c, unique = el.solve(a_t, r)
        except el.Inconsistent:
            raise InvalidType(f"root {el.fmt(r)} is not in the span of the simple roots")
        if not unique:
            raise InvalidType("simple roots are linearly dependent")
        if any(x.denominator != 1 for x in c):
            raise InvalidType(f"root {el.fmt(r)} has non-integral simple coefficients")
        out.append(tuple(int(x) for x in c))
    return out


def _finish(t: RootSystemType, d: int, roots, simple) -> RootSystem:
    roots = tuple(sorted(set(roots)))
    simple = tuple(simple)
    if len(simple) != t.rank:
        raise InvalidType(f"{t}: expected {t.rank} simple roots")
    rootset = set(roots)
    if any(el.neg(r) not in rootset for r in roots):
        raise InvalidType(f"{t}: roots not closed under negation")
    coeffs = _expand(simple, roots)
    for r, c in zip(roots, coeffs):
        if not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
            raise InvalidType(f"{t}: root {el.fmt(r)} has mixed-sign coefficients")
    if len(roots) != expected_root_count(t):
        raise InvalidType(f"{t}: got {len(roots)} roots, expected {expected_root_count(t)}")
    return RootSystem(t, d, roots, simple, tuple(coeffs))


def expected_root_count(t: RootSystemType) -> int:
    l = t.rank
    return {
        "A": l * l + l,
        "B": 2 * l * l,
        "C": 2 * l * l,
        "BC": 2 * l * l + 2 * l,
        "D": 2 * l * l - 2 * l,
        "E": {6: 72, 7: 126, 8: 240}.get(l, 0),
        "F": 48,
        "G": 12,
    }[t.family]


@lru_cache(maxsize=None)
def build(t: RootSystemType | str) -> RootSystem:
    """Construct the root system of type ``t`` in the coordinates above."""
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    if t.exceptional:
        d, roots, simple = _exceptional(t)
    else:
        d, roots, simple = _classical(t)
    return _finish(t, d, roots, simple)


def positive_roots(rs: RootSystem) -> Tuple[Vector, ...]:
    return tuple(r for r, c in zip(rs.roots, rs.coefficients) if all(x >= 0 for x in c))


def parabolic_complement(rs: RootSystem, j0: int) -> ParabolicComplement:
    """Negative roots with a nonzero coefficient on alpha_{j0} (1-based)."""
    if not 1 <= j0 <= rs.rank:
        raise IndexOutOfRange(f"j0 must lie in 1..{rs.rank}, got {j0}")
    comp = tuple(r for r, c in zip(rs.roots, rs.coefficients) if c[j0 - 1] < 0)
    return ParabolicComplement(j0, comp)


def codimensions(t: RootSystemType | str) -> Dict[int, int]:
    """Codimension of each maximal parabolic, computed on the reduced type."""
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    rs = build(t.reduced)
    return {j: parabolic_complement(rs, j).codim for j in range(1, rs.rank + 1)}


def minimal_resonant_codim(t: RootSystemType | str) -> int:
    return min(codimensions(t).values())


def minimizing_j0(t: RootSystemType | str) -> Tuple[int, ...]:
    cod = codimensions(t)
    m = min(cod.values())
    return tuple(j for j, c in cod.items() if c == m)
