"""Table maps: the exact (pseudo-)full-group elements of the tail relation.

A :class:`TableMap` is a finite list of equal-length prefix replacements
``u.w -> v.w``.  Sources are pairwise prefix-free, as are targets, so the map
is injective; a map whose sources and targets both have kraft sum 1 is total.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import perms
from .cylinder import (
    CylinderSet,
    check_depth,
    check_word,
    complement,
    canonicalize,
    disjoint,
    fmt_q,
    is_prefix_free,
    kraft,
    leaf_word,
    mu,
    overlapping,
    word_index,
    word_mass,
)
from .errors import DepthError, DomainError, OverlapError


def _merge_pairs(d: dict[str, str]) -> dict[str, str]:
    by_len = defaultdict(list)
    for u in d:
        by_len[len(u)].append(u)
    for n in range(max(by_len, default=0), 0, -1):
        for u in by_len[n]:
            if u[-1] != "0" or u not in d:
                continue
            sib = u[:-1] + "1"
            if sib not in d:
                continue
            v, w = d[u], d[sib]
            if v[-1] == "0" and w[-1] == "1" and v[:-1] == w[:-1]:
                del d[u], d[sib]
                d[u[:-1]] = v[:-1]
                by_len[n - 1].append(u[:-1])
    return d


@dataclass(frozen=True)
class TableMap:
    pairs: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, pairs: Iterable[Sequence[str]]) -> "TableMap":
        d: dict[str, str] = {}
        for u, v in pairs:
            check_word(u)
            check_word(v)
            if len(u) != len(v):
                raise ValueError(f"pair {u!r}->{v!r} has unequal lengths")
            if u in d:
                raise OverlapError(f"source {u!r} listed twice", (u, v))
            d[u] = v
        if not is_prefix_free(d):
            raise OverlapError("sources are not prefix-free", sorted(d))
        if not is_prefix_free(d.values()):
            raise OverlapError("targets are not prefix-free", sorted(d.values()))
        return cls(tuple(sorted(_merge_pairs(d).items())))

    @property
    def sources(self) -> list[str]:
        return [u for u, _ in self.pairs]

    @property
    def targets(self) -> list[str]:
        return [v for _, v in self.pairs]

    def dom(self) -> CylinderSet:
        return canonicalize(self.sources)

    def rng(self) -> CylinderSet:
        return canonicalize(self.targets)

    @property
    def depth(self) -> int:
        return max((len(u) for u, _ in self.pairs), default=0)

    def is_total(self) -> bool:
        return kraft(self.dom()) == 1 and kraft(self.rng()) == 1

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __matmul__(self, other: "TableMap") -> "TableMap":
        return compose(self, other)

    def to_json(self) -> dict:
        return {"pairs": [[u, v] for u, v in self.pairs]}

    @classmethod
    def from_json(cls, data: dict) -> "TableMap":
        return cls.of(data["pairs"])

    def __repr__(self):
        body = ", ".join(f"{u or 'ε'}→{v or 'ε'}" for u, v in self.pairs)
        return f"TableMap({body})"


IDENTITY = TableMap((("", ""),))
SWAP = TableMap((("0", "1"), ("1", "0")))


def identity_on(A: CylinderSet) -> TableMap:
    return TableMap.of((w, w) for w in A)


def compose(f: TableMap, g: TableMap) -> TableMap:
    """``f o g`` on ``g^-1(dom f)``."""
    by_target = sorted(g.pairs, key=lambda p: p[1])
    out = []
    for (u, v), (a, b) in overlapping(by_target, list(f.pairs),
                                      key_x=lambda p: p[1], key_y=lambda p: p[0]):
        if a.startswith(v):
            out.append((u + a[len(v):], b))
        else:
            out.append((u, b + v[len(a):]))
    return TableMap.of(out)


def inverse(f: TableMap) -> TableMap:
    return TableMap.of((v, u) for u, v in f.pairs)


def support(f: TableMap) -> CylinderSet:
    return canonicalize(u for u, v in f.pairs if u != v)


def du(f: TableMap, g: TableMap, lam) -> Fraction:
    """Uniform distance ``mu{x : f(x) != g(x)}``.

    Defined for partial maps too: a point where exactly one side is defined
    counts as a disagreement.
    """
    total = Fraction(0)
    for (u, v), (a, b) in overlapping(list(f.pairs), list(g.pairs),
                                      key_x=lambda p: p[0], key_y=lambda p: p[0]):
        if len(u) >= len(a):
            c, img_f, img_g = u, v, b + u[len(a):]
        else:
            c, img_f, img_g = a, v + a[len(u):], b
        if img_f != img_g:
            total += word_mass(c, lam)
    df, dg = f.dom(), g.dom()
    total += mu(_sym_diff(df, dg), lam)
    return total


def _sym_diff(A: CylinderSet, B: CylinderSet) -> CylinderSet:
    from .cylinder import difference, union
    return union(difference(A, B), difference(B, A))


def rn_cocycle(f: TableMap, lam) -> list[tuple[str, Fraction]]:
    """Radon-Nikodym derivative of ``mu o f`` w.r.t. mu, one value per piece."""
    return [(u, word_mass(v, lam) / word_mass(u, lam)) for u, v in f.pairs]


def cocycle_at(f: TableMap, lam, w: str) -> Fraction:
    u = covering_source(f, w)
    v = dict(f.pairs)[u]
    return word_mass(v, lam) / word_mass(u, lam)


def glue(parts: Iterable[TableMap]) -> TableMap:
    parts = list(parts)
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if not disjoint(parts[i].dom(), parts[j].dom()):
                raise OverlapError(f"parts {i} and {j} have overlapping sources", (i, j))
            if not disjoint(parts[i].rng(), parts[j].rng()):
                raise OverlapError(f"parts {i} and {j} have overlapping targets", (i, j))
    return TableMap.of(p for part in parts for p in part.pairs)


def covering_source(f: TableMap, w: str) -> str:
    srcs = f.sources
    i = bisect.bisect_right(srcs, w) - 1
    if i >= 0 and w.startswith(srcs[i]):
        return srcs[i]
    if i + 1 < len(srcs) and srcs[i + 1].startswith(w):
        raise DomainError(f"word {w!r} too short to resolve", w)
    raise DomainError(f"word {w!r} lies outside the domain", w)


def apply_prefix(f: TableMap, w: str) -> str:
    u = covering_source(f, w)
    return dict(f.pairs)[u] + w[len(u):]


# -- leaf permutations ---------------------------------------------------------

@dataclass(frozen=True)
class LeafPerm:
    """A permutation of the ``2**level`` level-``level`` cylinders."""

    level: int
    perm: tuple[int, ...]

    def __post_init__(self):
        if len(self.perm) != 1 << self.level or not perms.is_perm(self.perm):
            raise ValueError("LeafPerm needs a permutation of 2**level points")

    @classmethod
    def identity(cls, level: int) -> "LeafPerm":
        return cls(level, perms.identity(1 << level))

    def __mul__(self, other: "LeafPerm") -> "LeafPerm":
        if self.level != other.level:
            raise ValueError("leaf permutations at different levels")
        return LeafPerm(self.level, perms.mul(self.perm, other.perm))

    def inverse(self) -> "LeafPerm":
        return LeafPerm(self.level, perms.inv(self.perm))

    def refine(self, level: int) -> "LeafPerm":
        k = level - self.level
        if k < 0:
            raise ValueError("cannot coarsen a leaf permutation")
        check_depth(level)
        return LeafPerm(level, tuple((self.perm[i >> k] << k) | (i & ((1 << k) - 1))
                                     for i in range(1 << level)))

    def to_json(self) -> dict:
        return {"level": self.level, "perm": list(self.perm)}


def to_leaf_perm(f: TableMap, level: int) -> LeafPerm:
    if not f.is_total():
        raise DomainError("only total maps have a leaf permutation", f.to_json())
    if level < f.depth:
        raise ValueError(f"level {level} is below the table depth {f.depth}")
    check_depth(level)
    out = []
    for u, v in f.pairs:
        k = level - len(u)
        s, t = word_index(u) << k, word_index(v) << k
        out.extend((s + i, t + i) for i in range(1 << k))
    out.sort()
    return LeafPerm(level, tuple(t for _, t in out))


def from_leaf_perm(p: LeafPerm) -> TableMap:
    return TableMap.of((leaf_word(i, p.level), leaf_word(j, p.level))
                       for i, j in enumerate(p.perm))


# -- truncated infinite tables ---------------------------------------------------

@dataclass(frozen=True)
class TruncatedMap:
    table: TableMap
    defect_dom: CylinderSet
    defect_rng: CylinderSet

    @classmethod
    def from_table(cls, table: TableMap) -> "TruncatedMap":
        return cls(table, complement(table.dom()), complement(table.rng()))

    def to_json(self) -> dict:
        d = self.table.to_json()
        d["defect_dom"] = self.defect_dom.to_json()
        d["defect_rng"] = self.defect_rng.to_json()
        return d

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedMap":
        t = cls.from_table(TableMap.from_json(data))
        if (t.defect_dom.to_json() != sorted(data["defect_dom"])
                or t.defect_rng.to_json() != sorted(data["defect_rng"])):
            raise ValueError("defect sets do not complement the table")
        return t


def odometer(depth: int) -> TruncatedMap:
    """Binary adding machine ``1^k 0 w -> 0^k 1 w`` truncated below ``depth``."""
    if not 1 <= depth:
        raise ValueError("odometer depth must be at least 1")
    check_depth(depth)
    table = TableMap.of(("1" * k + "0", "0" * k + "1") for k in range(depth))
    return TruncatedMap(table, CylinderSet(("1" * depth,)), CylinderSet(("0" * depth,)))


def compose_truncated(f: TruncatedMap, g: TruncatedMap) -> TruncatedMap:
    return TruncatedMap.from_table(compose(f.table, g.table))


def describe(f: TableMap, lam=None) -> str:
    lines = []
    for u, v in f.pairs:
        line = f"  {u or 'ε':>12} -> {v or 'ε'}"
        if lam is not None:
            line += f"   rn={fmt_q(word_mass(v, lam) / word_mass(u, lam))}"
        lines.append(line)
    return "\n".join(lines)


__all__ = [
    "TableMap", "LeafPerm", "TruncatedMap", "IDENTITY", "SWAP", "DepthError",
    "compose", "inverse", "support", "du", "rn_cocycle", "cocycle_at", "glue",
    "apply_prefix", "to_leaf_perm", "from_leaf_perm", "odometer",
    "compose_truncated", "identity_on",
]
