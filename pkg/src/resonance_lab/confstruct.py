"""Structural rules for Lyapunov spectra of conformal cocycles.

A declared spectrum lists Oseledec blocks (functional, multiplicity, block
signature or isotropic) together with the distortion functional chi.  The
validator reorders the blocks by a separating witness and checks the rule
catalogue below.  All comparisons are exact.

Rule catalogue
--------------
R1  r <= 2p + 1, and r <= 2p when r is even
R2  chi_i + chi_{r+1-i} = chi for every i
R3  dim E_i = dim E_{r+1-i}
R4  r even  =>  p = q and every block isotropic
R5  r odd   =>  middle block non-degenerate, all other blocks isotropic
R6  sum_i dim E_i chi_i = (p + q) chi / 2
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from . import exactlin as el
from .exactlin import Vector

RULES = ("R1", "R2", "R3", "R4", "R5", "R6")
SCHEMA_VERSION = 1


class NoSeparatingWitness(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    functional: Vector
    multiplicity: int
    # (p_i, q_i) for a non-degenerate block, None for a totally isotropic one
    signature: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("block multiplicity must be positive")
        if self.signature is not None and sum(self.signature) != self.multiplicity:
            raise ValueError("block signature must add up to its multiplicity")

    @property
    def isotropic(self) -> bool:
        return self.signature is None


@dataclass(frozen=True)
class ConformalSpectrum:
    p: int
    q: int
    blocks: Tuple[Block, ...]
    chi: Optional[Vector] = None

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise ValueError("bad signature")
        if sum(b.multiplicity for b in self.blocks) != self.p + self.q:
            raise ValueError("multiplicities must add up to p + q")
        dims = {len(b.functional) for b in self.blocks}
        if self.chi is not None:
            dims.add(len(self.chi))
        if len(dims) > 1:
            raise ValueError("functionals of mixed dimension")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def r(self) -> int:
        return len(self.blocks)

    def normalized(self) -> "ConformalSpectrum":
        """Swap to p <= q (reversing block signatures accordingly)."""
        if self.p <= self.q:
            return self
        blocks = tuple(
            replace(b, signature=None if b.signature is None else b.signature[::-1])
            for b in self.blocks)
        return ConformalSpectrum(self.q, self.p, blocks, self.chi)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "q": self.q,
            "blocks": [
                {
                    "functional": el.as_pairs(b.functional),
                    "multiplicity": b.multiplicity,
                    "signature": "isotropic" if b.signature is None else list(b.signature),
                }
                for b in self.blocks
            ],
            "chi": None if self.chi is None else el.as_pairs(self.chi),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ConformalSpectrum":
        blocks = []
        for b in doc["blocks"]:
            sig = b.get("signature", "isotropic")
            blocks.append(Block(
                el.from_pairs(b["functional"]),
                int(b["multiplicity"]),
                None if sig in (None, "isotropic", "Isotropic") else (int(sig[0]), int(sig[1])),
            ))
        chi = doc.get("chi")
        return cls(int(doc["p"]), int(doc["q"]), tuple(blocks),
                   None if chi is None else el.from_pairs(chi))


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str
    indices: Tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"rule": self.rule, "detail": self.detail, "indices": list(self.indices)}


def derive_chi(s: ConformalSpectrum) -> Vector:
    """chi = (2/n) sum_i dim E_i chi_i."""
    d = len(s.blocks[0].functional)
    total = el.zero(d)
    for b in s.blocks:
        total = el.add(total, el.scale(b.multiplicity, b.functional))
    return el.scale(Fraction(2, s.n), total)


def canonical(s: ConformalSpectrum) -> ConformalSpectrum:
    """Normalize p <= q, fill in chi if absent, and sort the blocks by a
    separating witness so that block i carries index i."""
    s = s.normalized()
    funcs = [b.functional for b in s.blocks]
    if len(set(funcs)) != len(funcs):
        raise NoSeparatingWitness("two blocks share the same functional")
    x0 = el.separating_witness(funcs)
    blocks = tuple(sorted(s.blocks, key=lambda b: el.dot(b.functional, x0)))
    chi = s.chi if s.chi is not None else derive_chi(s)
    return ConformalSpectrum(s.p, s.q, blocks, chi)


def validate(s: ConformalSpectrum) -> list[Violation]:
    s = canonical(s)
    p, q, r, chi = s.p, s.q, s.r, s.chi
    b = s.blocks
    out: list[Violation] = []

    if r > 2 * p + 1 or (r % 2 == 0 and r > 2 * p):
        bound = 2 * p if r % 2 == 0 else 2 * p + 1
        out.append(Violation("R1", f"r = {r} exceeds {bound} for p = {p}"))

    for i in range(1, (r + 1) // 2 + 1):
        j = r + 1 - i
        if el.add(b[i - 1].functional, b[j - 1].functional) != chi:
            out.append(Violation("R2", f"chi_{i} + chi_{j} != chi", (i, j)))

    for i in range(1, r // 2 + 1):
        j = r + 1 - i
        if b[i - 1].multiplicity != b[j - 1].multiplicity:
            out.append(Violation(
                "R3", f"dim E_{i} = {b[i - 1].multiplicity} but dim E_{j} = {b[j - 1].multiplicity}",
                (i, j)))

    if r % 2 == 0:
        if p != q:
            out.append(Violation("R4", f"r = {r} is even but (p, q) = ({p}, {q}) is not split"))
        for i, blk in enumerate(b, 1):
            if not blk.isotropic:
                out.append(Violation("R4", f"r even but E_{i} is not totally isotropic", (i,)))
    else:
        mid = (r + 1) // 2
        for i, blk in enumerate(b, 1):
            if i == mid and blk.isotropic:
                out.append(Violation("R5", f"middle block E_{i} is isotropic", (i,)))
            elif i != mid and not blk.isotropic:
                out.append(Violation("R5", f"E_{i} must be totally isotropic", (i,)))

    if derive_chi(s) != chi:
        out.append(Violation("R6", "sum_i dim E_i chi_i != n chi / 2"))
    return out


def orthogonality_obligations(s: ConformalSpectrum) -> set[Tuple[int, int]]:
    """Index pairs (i <= j, canonical order) with chi_i + chi_j != chi."""
    s = canonical(s)
    f = [blk.functional for blk in s.blocks]
    return {
        (i, j)
        for i in range(1, s.r + 1)
        for j in range(i, s.r + 1)
        if el.add(f[i - 1], f[j - 1]) != s.chi
    }


def from_configuration(conf, p: int, q: int) -> ConformalSpectrum:
    """Spectrum induced by a limit-case configuration with r = 2p + 1.

    Paired functionals get multiplicity one and isotropic blocks; the middle
    block absorbs the remaining n - 2p = q - p dimensions with signature
    (0, q - p).
    """
    r = conf.r
    if r != 2 * p + 1 or q <= p:
        raise ValueError("need r = 2p + 1 functionals and q > p")
    mid = conf.center_index
    blocks = tuple(
        Block(f, q - p, (0, q - p)) if i == mid else Block(f, 1)
        for i, f in enumerate(conf.functionals, 1)
    )
    return ConformalSpectrum(p, q, blocks, conf.chi)


def violations_json(vs: Sequence[Violation]) -> str:
    return json.dumps([v.to_json() for v in vs], sort_keys=True)
