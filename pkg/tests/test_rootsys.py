from __future__ import annotations

import json
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from resonance_lab import exactlin as el
from resonance_lab import rootsys
from resonance_lab.rootsys import RootSystemType
from reference_data import E7_J01, E8_J01, F4_J01, F4_J04

H = Fraction(1, 2)

ALL_TYPES = (
    [RootSystemType("A", l) for l in range(1, 9)]
    + [RootSystemType(f, l) for f in ("B", "C", "BC") for l in range(1, 9)]
    + [RootSystemType("D", l) for l in range(2, 9)]
    + [RootSystemType.parse(x) for x in ("E6", "E7", "E8", "F4", "G2")]
)


def _norm2(v):
    return sum(x * x for x in v)


# -- independent enumerations -------------------------------------------------


def enumerate_g2():
    """Integer points of the plane x+y+z = 0 with squared length 2 or 6."""
    out = set()
    for v in product(range(-2, 3), repeat=3):
        if sum(v) == 0 and _norm2(v) in (2, 6):
            out.add(tuple(Fraction(x) for x in v))
    return out


def enumerate_f4():
    """Vectors in Z^4 or (Z+1/2)^4 with squared length 1 or 2."""
    out = set()
    for v in product(range(-1, 2), repeat=4):
        if _norm2(v) in (1, 2):
            out.add(tuple(Fraction(x) for x in v))
    for v in product((-H, H), repeat=4):
        out.add(v)
    return out


def enumerate_e8():
    """Vectors in Z^8 or (Z+1/2)^8 with even coordinate sum and length^2 2."""
    out = set()
    for v in product(range(-1, 2), repeat=8):
        if _norm2(v) == 2 and sum(v) % 2 == 0:
            out.add(tuple(Fraction(x) for x in v))
    for v in product((-H, H), repeat=8):
        if sum(v) % 2 == 0:
            out.add(v)
    return out


def test_g2_enumeration():
    rs = rootsys.build("G2")
    assert len(rs.roots) == 12
    assert set(rs.roots) == enumerate_g2()


def test_f4_enumeration():
    rs = rootsys.build("F4")
    assert set(rs.roots) == enumerate_f4()
    lengths = [_norm2(r) for r in rs.roots]
    assert lengths.count(2) == 24 and lengths.count(1) == 24


def test_e8_enumeration():
    rs = rootsys.build("E8")
    assert set(rs.roots) == enumerate_e8()
    assert sum(1 for r in rs.roots if all(x.denominator == 2 for x in r)) == 128


def test_e7_is_e8_slice():
    e8 = set(rootsys.build("E8").roots)
    e7 = set(rootsys.build("E7").roots)
    slice_ = {r for r in e8 if r[7] + r[6] == 0}
    assert e7 == slice_ and len(e7) == 126


def test_e6_is_e8_slice():
    # E6 (Bourbaki) is the part of E8 orthogonal to e8 + e7 and e8 + e6
    e8 = set(rootsys.build("E8").roots)
    e6 = set(rootsys.build("E6").roots)
    assert e6 == {r for r in e8 if r[7] + r[6] == 0 and r[7] + r[5] == 0}


# -- structural invariants ----------------------------------------------------


@pytest.mark.parametrize("t", ALL_TYPES, ids=str)
def test_structure(t):
    rs = rootsys.build(t)
    roots = set(rs.roots)
    assert len(roots) == rootsys.expected_root_count(t)
    assert all(el.neg(r) in roots for r in roots)
    for r, c in zip(rs.roots, rs.coefficients):
        assert all(x >= 0 for x in c) or all(x <= 0 for x in c)
        combo = el.zero(rs.ambient_dim)
        for a, x in zip(rs.simple, c):
            combo = el.add(combo, el.scale(x, a))
        assert combo == r
    assert len(rootsys.positive_roots(rs)) * 2 == len(rs.roots)
    assert all(s in roots for s in rs.simple)


@pytest.mark.parametrize("t", ALL_TYPES, ids=str)
def test_root_strings(t):
    # for roots a != +-b the a-string through b is unbroken and has length
    # at most 4
    rs = rootsys.build(t)
    if t.family == "BC":
        return  # non-reduced; strings through 2e_i are not of this form
    roots = set(rs.roots)
    for a in rs.simple:
        for b in rs.roots:
            if b in (a, el.neg(a)):
                continue
            k = 0
            while el.add(b, el.scale(k + 1, a)) in roots:
                k += 1
            m = 0
            while el.sub(b, el.scale(m + 1, a)) in roots:
                m += 1
            assert k + m + 1 <= 4
            # Cartan integer check: m - k = 2<b,a>/<a,a>
            assert m - k == 2 * el.dot(b, a) / el.dot(a, a)


def test_positive_counts():
    assert len(rootsys.positive_roots(rootsys.build("A2"))) == 3
    assert len(rootsys.positive_roots(rootsys.build("F4"))) == 24
    assert len(rootsys.positive_roots(rootsys.build("E7"))) == 63


F4_CARTAN = [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]]


def cartan(rs):
    return [[2 * el.dot(a, b) / el.dot(b, b) for b in rs.simple] for a in rs.simple]


def test_f4_numbering():
    h = H
    rs = rootsys.build("F4")
    assert rs.simple == ((0, 1, -1, 0), (0, 0, 1, -1), (0, 0, 0, 1), (h, -h, -h, -h))
    # alpha_1, alpha_2 long; alpha_3, alpha_4 short
    assert cartan(rs) == [[Fraction(x) for x in row] for row in F4_CARTAN]


def _chain_ends(rs):
    c = cartan(rs)
    degree = [sum(1 for j in range(len(c)) if j != i and c[i][j] != 0) for i in range(len(c))]
    return degree


def test_e8_numbering():
    rs = rootsys.build("E8")
    assert rs.simple[0] == (0, 0, 0, 0, 0, -1, 1, 0)
    assert rs.simple[6] == (1, 1, 0, 0, 0, 0, 0, 0)
    assert rs.simple[7] == (H, -H, -H, -H, -H, -H, -H, H)
    # alpha_1 is the end of the long arm (away from the branch node)
    deg = _chain_ends(rs)
    assert deg[0] == 1 and deg.count(3) == 1


def test_e7_numbering():
    rs = rootsys.build("E7")
    assert rs.simple[0] == (0, 0, 0, 0, -1, 1, 0, 0)
    assert all(r[7] + r[6] == 0 for r in rs.simple)
    deg = _chain_ends(rs)
    assert deg[0] == 1 and deg.count(3) == 1


def test_g2_simple():
    rs = rootsys.build("G2")
    assert rs.simple == ((1, -1, 0), (-2, 1, 1))
    assert [[int(x) for x in row] for row in cartan(rs)] == [[2, -1], [-3, 2]]


# -- parabolic complements -----------------------------------------------------


@pytest.mark.parametrize("name,j0,expected,size", [
    ("F4", 4, F4_J04, 15),
    ("F4", 1, F4_J01, 15),
    ("E8", 1, E8_J01, 57),
    ("E7", 1, E7_J01, 27),
])
def test_complement_goldens(name, j0, expected, size):
    comp = rootsys.parabolic_complement(rootsys.build(name), j0)
    assert len(expected) == size
    assert set(comp.complement) == expected
    assert comp.codim == size


@pytest.mark.parametrize("t", ALL_TYPES, ids=str)
def test_complement_negative(t):
    rs = rootsys.build(t)
    pos = set(rootsys.positive_roots(rs))
    cm = rs.coefficient_map()
    for j in range(1, rs.rank + 1):
        comp = rootsys.parabolic_complement(rs, j)
        assert not pos & set(comp.complement)
        assert all(cm[r][j - 1] < 0 for r in comp.complement)


def coweight_codims(rs):
    """Float oracle: the j-th fundamental coweight w_j pairs to delta_ij with
    the simple roots; the complement for j0 is {root : <root, w_j0> < 0}."""
    a = np.array([[float(x) for x in s] for s in rs.simple])
    w = np.linalg.pinv(a)  # columns are coweights within span(simple)
    roots = np.array([[float(x) for x in r] for r in rs.roots])
    pair = roots @ w
    return {j + 1: int((pair[:, j] < -0.5).sum()) for j in range(rs.rank)}


@pytest.mark.parametrize("t", ALL_TYPES, ids=str)
def test_codim_float_oracle(t):
    rs = rootsys.build(t.reduced)
    oracle = coweight_codims(rs)
    assert rootsys.codimensions(t) == oracle
    assert rootsys.minimal_resonant_codim(t) == min(oracle.values())


@pytest.mark.parametrize("t", ALL_TYPES, ids=str)
def test_codim_sum(t):
    rs = rootsys.build(t.reduced)
    neg = [c for c in rs.coefficients if all(x <= 0 for x in c)]
    total = sum(sum(1 for x in c if x != 0) for c in neg)
    assert sum(rootsys.codimensions(t).values()) == total


def expected_r(t):
    l = t.rank
    return {
        "A": l, "B": 2 * l - 1, "C": 2 * l - 1, "BC": 2 * l - 1,
        "E": {6: 16, 7: 27, 8: 57}.get(l), "F": 15, "G": 5,
    }.get(t.family)


@pytest.mark.parametrize("t", [t for t in ALL_TYPES if t.family != "D"], ids=str)
def test_r_table(t):
    assert rootsys.minimal_resonant_codim(t) == expected_r(t)


@pytest.mark.parametrize("l", range(4, 9))
def test_r_table_d(l):
    assert rootsys.minimal_resonant_codim(RootSystemType("D", l)) == 2 * l - 2


def test_small_d():
    # D3 = A3 and D2 = A1 x A1: 2l - 2 does not hold below rank 4
    assert rootsys.minimal_resonant_codim("D3") == rootsys.minimal_resonant_codim("A3") == 3
    assert rootsys.minimal_resonant_codim("D2") == 1


def test_minimizing_j0():
    assert rootsys.minimizing_j0("F4") == (1, 4)
    assert rootsys.minimizing_j0("E8") == (1,)
    assert rootsys.minimizing_j0("E7") == (1,)
    assert rootsys.minimizing_j0("G2") == (1, 2)


def test_bc_reduces_to_b():
    bc = rootsys.build("BC3")
    assert len(bc.roots) == 24
    assert (2, 0, 0) in bc.roots
    assert rootsys.codimensions("BC3") == rootsys.codimensions("B3")


# -- types, errors, serialization ---------------------------------------------


@pytest.mark.parametrize("text", ["E5", "E9", "F3", "G3", "A0", "X2", "D1", ""])
def test_invalid_types(text):
    with pytest.raises(rootsys.InvalidType):
        rootsys.build(text)


def test_parse():
    assert RootSystemType.parse("bc", 3) == RootSystemType("BC", 3)
    assert str(RootSystemType.parse("E7")) == "E7"
    assert RootSystemType.parse("BC2").reduced == RootSystemType("B", 2)


def test_index_out_of_range():
    rs = rootsys.build("F4")
    for j in (0, 5):
        with pytest.raises(rootsys.IndexOutOfRange):
            rootsys.parabolic_complement(rs, j)


@pytest.mark.parametrize("name", ["F4", "E7", "BC2", "G2"])
def test_json_roundtrip(name):
    rs = rootsys.build(name)
    text = rs.dumps()
    back = rootsys.RootSystem.from_json(json.loads(text))
    assert back.roots == rs.roots and back.simple == rs.simple
    assert back.type == rs.type and back.ambient_dim == rs.ambient_dim
    assert back.dumps() == text
