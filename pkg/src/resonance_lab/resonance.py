"""Limit-case configuration engine and optimal-index bounds.

In the limit case r(g) = 2p + 1 the Lyapunov functionals chi_1..chi_r are
positive multiples of the roots in a minimal parabolic complement, and they
must satisfy chi_i + chi_{r+1-i} = 2 chi_center.  The engine searches for
the center ray, the pairing and the scalings, then looks for a direction X
on which every functional takes the value -1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence, Tuple

from . import exactlin as el
from . import rootsys
from .exactlin import Vector
from .rootsys import RootSystemType

SCHEMA_VERSION = 1


class TooFewRays(ValueError):
    pass


class NoPerfectMatching(ValueError):
    pass


class AmbiguousMatching(ValueError):
    pass


class ScalingInfeasible(ValueError):
    pass


class NotExceptional(ValueError):
    pass


class RankTooLow(ValueError):
    pass


class NonReduced(ValueError):
    pass


@dataclass(frozen=True)
class RaySet:
    """Open half-lines, each stored by its primitive integer generator."""

    rays: Tuple[Vector, ...]

    def __post_init__(self):
        seen = set()
        for r in self.rays:
            key = el.primitive(r)  # raises ZeroVector
            if key in seen:
                raise NonReduced(f"ray {el.fmt(r)} repeated (positively proportional generators)")
            seen.add(key)

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence]) -> "RaySet":
        return cls(tuple(el.vec(el.primitive(v)) for v in vectors))

    def __len__(self) -> int:
        return len(self.rays)

    def _gram(self):
        ints = [el.primitive(r) for r in self.rays]
        return [[sum(a * b for a, b in zip(x, y)) for y in ints] for x in ints]


@dataclass(frozen=True)
class Configuration:
    rays: Tuple[Vector, ...]          # ray generator behind each chi_i
    scalings: Tuple[Fraction, ...]    # chi_i = scalings[i] * rays[i]
    functionals: Tuple[Vector, ...]   # chi_1..chi_r, ordered by a witness
    chi: Vector                       # 2 * chi_center

    @property
    def r(self) -> int:
        return len(self.functionals)

    @property
    def center_index(self) -> int:
        return (self.r + 1) // 2

    @property
    def matching(self) -> Tuple[Tuple[int, int], ...]:
        r = self.r
        return tuple((i, r + 1 - i) for i in range(1, r // 2 + 1))

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "center_index": self.center_index,
            "matching": [list(p) for p in self.matching],
            "scalings": [[s.numerator, s.denominator] for s in self.scalings],
            "functionals": [el.as_pairs(f) for f in self.functionals],
            "chi": el.as_pairs(self.chi),
        }


def _center_flags(gram) -> list[bool]:
    n = len(gram)
    flags = []
    for u in range(n):
        ok = True
        for v in range(n):
            if v == u:
                continue
            if not any(
                el.open_cone2_from_gram(gram[u][u], gram[v][v], gram[w][w],
                                        gram[u][v], gram[u][w], gram[v][w])
                for w in range(n) if w != u and w != v
            ):
                ok = False
                break
        flags.append(ok)
    return flags


def find_centers(rays: RaySet) -> Tuple[int, ...]:
    """Indices u such that every other ray v has a partner w (w != u, v)
    with u strictly inside the cone spanned by v and w."""
    if len(rays) < 3:
        raise TooFewRays("need at least three rays")
    return tuple(i for i, ok in enumerate(_center_flags(rays._gram())) if ok)


def _perfect_matchings(nodes: list[int], adj: dict, limit: int) -> list[list[Tuple[int, int]]]:
    """Up to ``limit`` perfect matchings of ``nodes`` using edges in ``adj``."""
    found: list[list[Tuple[int, int]]] = []

    def rec(remaining: list[int], acc: list[Tuple[int, int]]):
        if len(found) >= limit:
            return
        if not remaining:
            found.append(list(acc))
            return
        a = remaining[0]
        for b in remaining[1:]:
            if b in adj[a]:
                rest = [x for x in remaining[1:] if x != b]
                acc.append((a, b))
                rec(rest, acc)
                acc.pop()

    rec(nodes, [])
    return found


def admissible_pairs(rays: RaySet, center: int) -> dict:
    gram = rays._gram()
    u = center
    others = [i for i in range(len(rays)) if i != u]
    adj = {i: set() for i in others}
    for a in others:
        for b in others:
            if a < b and el.open_cone2_from_gram(gram[u][u], gram[a][a], gram[b][b],
                                                 gram[u][a], gram[u][b], gram[a][b]):
                adj[a].add(b)
                adj[b].add(a)
    return adj


def build_configuration(rays: RaySet, center: int) -> Configuration:
    """Pair the non-center rays around ``center`` and solve the scalings.

    The homothety is fixed by chi_center = u / <u, u> for the primitive
    generator u of the center ray, i.e. <chi_center, -u> = -1.
    """
    n = len(rays)
    if not 0 <= center < n:
        raise IndexError("center index out of range")
    if n % 2 == 0:
        raise NoPerfectMatching("an even number of rays leaves no center")
    adj = admissible_pairs(rays, center)
    nodes = sorted(adj)
    matchings = _perfect_matchings(nodes, adj, limit=2)
    if not matchings:
        raise NoPerfectMatching("no perfect matching of the rays around the center")
    if len(matchings) > 1:
        raise AmbiguousMatching("more than one admissible perfect matching")
    u = rays.rays[center]
    chi_c = el.scale(Fraction(1) / el.dot(u, u), u)
    target = el.scale(2, chi_c)
    scal = {center: Fraction(1) / el.dot(u, u)}
    for a, b in matchings[0]:
        va, vb = rays.rays[a], rays.rays[b]
        try:
            (s, t), unique = el.solve(el.transpose([va, vb]), target)
        except el.Inconsistent as exc:
            raise ScalingInfeasible(str(exc))
        if not unique or s <= 0 or t <= 0:
            raise ScalingInfeasible(f"no positive scalings for rays {a}, {b}")
        scal[a], scal[b] = s, t
    idx = list(range(n))
    funcs = {i: el.scale(scal[i], rays.rays[i]) for i in idx}
    x0 = el.separating_witness([funcs[i] for i in idx])
    idx.sort(key=lambda i: el.dot(funcs[i], x0))
    conf = Configuration(
        rays=tuple(rays.rays[i] for i in idx),
        scalings=tuple(scal[i] for i in idx),
        functionals=tuple(funcs[i] for i in idx),
        chi=target,
    )
    for i, j in conf.matching:
        if el.add(conf.functionals[i - 1], conf.functionals[j - 1]) != conf.chi:
            raise ScalingInfeasible("witness order does not pair i with r+1-i")
    return conf


def span_dimension(c: Configuration) -> int:
    return el.rank(c.functionals)


def uniform_direction(c: Configuration) -> Optional[Tuple[Vector, bool]]:
    """X with chi_i(X) = -1 for all i, and whether it is unique."""
    try:
        return el.solve_affine_one(c.functionals)
    except el.Inconsistent:
        return None


# --------------------------------------------------------------------------
# per-type report


class Verdict(str, Enum):
    NOT_APPLICABLE = "NotApplicable"
    CONFORMALLY_FLAT = "ConformallyFlat"
    MIXED = "Mixed"
    INFEASIBLE = "Infeasible"


@dataclass
class J0Case:
    j0: int
    complement_size: int
    centers: Tuple[Vector, ...]
    configuration: Optional[Configuration] = None
    uniform_direction: Optional[Vector] = None
    unique_direction: bool = False
    status: str = ""

    @property
    def admits_configuration(self) -> bool:
        # an ambiguous matching still means some configuration exists
        return self.configuration is not None or self.status == "AmbiguousMatching"

    def to_json(self) -> dict:
        return {
            "j0": self.j0,
            "complement_size": self.complement_size,
            "centers": [el.as_pairs(c) for c in self.centers],
            "status": self.status,
            "configuration": None if self.configuration is None else self.configuration.to_json(),
            "uniform_direction": None if self.uniform_direction is None
            else el.as_pairs(self.uniform_direction),
            "unique_direction": self.unique_direction,
        }


@dataclass
class LimitCaseReport:
    type: RootSystemType
    verdict: Verdict
    j0_cases: list[J0Case] = field(default_factory=list)


def analyse_j0(rs: rootsys.RootSystem, j0: int) -> J0Case:
    comp = rootsys.parabolic_complement(rs, j0).complement
    rays = RaySet.from_vectors(comp)
    centers = find_centers(rays)
    case = J0Case(j0, len(comp), tuple(rays.rays[i] for i in centers))
    if not centers:
        case.status = "NoCenter"
        return case
    statuses = []
    for c in centers:
        try:
            conf = build_configuration(rays, c)
        except (NoPerfectMatching, AmbiguousMatching, ScalingInfeasible) as exc:
            statuses.append(type(exc).__name__)
            continue
        case.configuration = conf
        ud = uniform_direction(conf)
        if ud is None:
            case.status = "NoUniformDirection"
        else:
            case.uniform_direction, case.unique_direction = ud
            case.status = "UniformDirection"
        return case
    case.status = "AmbiguousMatching" if "AmbiguousMatching" in statuses else statuses[0]
    return case


def limit_case_report(t: RootSystemType | str) -> LimitCaseReport:
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    if not t.exceptional:
        raise NotExceptional(f"{t} is not an exceptional root system")
    r_g = rootsys.minimal_resonant_codim(t)
    if r_g % 2 == 0:
        # r(g) = 2p + 1 is impossible, so the limit case never occurs (E6)
        return LimitCaseReport(t, Verdict.NOT_APPLICABLE)
    rs = rootsys.build(t)
    cases = [analyse_j0(rs, j0) for j0 in rootsys.minimizing_j0(t)]
    if not any(c.admits_configuration for c in cases):
        verdict = Verdict.INFEASIBLE
    elif all(c.configuration is not None and c.uniform_direction is not None for c in cases):
        verdict = Verdict.CONFORMALLY_FLAT
    else:
        verdict = Verdict.MIXED
    return LimitCaseReport(t, verdict, cases)


# --------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class BoundRecord:
    type: RootSystemType
    r_g: int
    rank_bound: int
    resonance_bound: int
    limit_case: str            # NotApplicable | ConfigurationExists | Infeasible
    conformally_flat: bool
    k_bound: int

    def to_json(self) -> dict:
        return {
            "type": str(self.type),
            "r_g": self.r_g,
            "rank_bound": self.rank_bound,
            "resonance_bound": self.resonance_bound,
            "limit_case": self.limit_case,
            "conformally_flat": self.conformally_flat,
            "k_bound": self.k_bound,
        }


def optimal_index_bound(t: RootSystemType | str) -> BoundRecord:
    """Lower bound on the optimal index k for lattices with root system t."""
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    if t.rank < 2:
        raise RankTooLow("real rank must be at least 2")
    r_g = rootsys.minimal_resonant_codim(t)
    rank_bound = t.rank - 1
    resonance_bound = ceil(Fraction(r_g - 1, 2))
    limit = "NotApplicable"
    flat = False
    if t.exceptional:
        rep = limit_case_report(t)
        if rep.verdict is Verdict.INFEASIBLE:
            limit = "Infeasible"
        elif rep.verdict is not Verdict.NOT_APPLICABLE:
            limit = "ConfigurationExists"
            flat = rep.verdict is Verdict.CONFORMALLY_FLAT
    k = max(rank_bound, resonance_bound) + (1 if limit == "Infeasible" else 0)
    return BoundRecord(t, r_g, rank_bound, resonance_bound, limit, flat, k)


def report_json(t: RootSystemType | str) -> dict:
    if isinstance(t, str):
        t = RootSystemType.parse(t)
    rep = limit_case_report(t)
    bound = optimal_index_bound(t)
    return {
        "schema_version": SCHEMA_VERSION,
        "type": str(t),
        "r_g": bound.r_g,
        "j0_cases": [c.to_json() for c in rep.j0_cases],
        "verdict": rep.verdict.value,
        "k_bound": bound.k_bound,
        "refined_bound": bound.k_bound,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True)
