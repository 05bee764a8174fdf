"""Equidecomposition of cylinder sets by partial table maps.

Equal-length tables preserve the kraft sum, so an exact map ``A -> B`` exists
iff ``kraft(A) == kraft(B)``.  Otherwise the heavier side keeps a leftover of
exactly the surplus kraft; for ``lambda != 1/2`` that leftover can be chosen
among the mu-lightest deep leaves and so made mu-small.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .cylinder import (
    EMPTY,
    HALF,
    CylinderSet,
    canonicalize,
    complement,
    disjoint,
    fmt_q,
    kraft,
    leaf_runs,
    leaf_word,
    mu,
    runs_to_set,
    union,
)
from . import cylinder
from .errors import BudgetError, DepthError, DomainError, ObstructionError
from .maps import TableMap, compose, glue, identity_on, inverse, support

MAX_LEAVES = 1 << 20


@dataclass(frozen=True)
class EquidecompResult:
    map: TableMap
    uncovered_dom: CylinderSet
    uncovered_rng: CylinderSet
    rounds: int
    masses: tuple[Fraction, ...] = field(default=())
    level: int = 0

    def to_json(self) -> dict:
        return {
            "map": self.map.to_json(),
            "uncovered_dom": self.uncovered_dom.to_json(),
            "uncovered_rng": self.uncovered_rng.to_json(),
            "rounds": self.rounds,
            "level": self.level,
            "masses": [fmt_q(m) for m in self.masses],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EquidecompResult":
        return cls(TableMap.from_json(data["map"]),
                   CylinderSet.from_json(data["uncovered_dom"]),
                   CylinderSet.from_json(data["uncovered_rng"]),
                   data["rounds"],
                   tuple(Fraction(m) for m in data["masses"]),
                   data.get("level", 0))


def _tz(x: int, cap: int) -> int:
    return cap if x == 0 else min((x & -x).bit_length() - 1, cap)


def match_runs(src: list[tuple[int, int]], dst: list[tuple[int, int]], level: int) -> TableMap:
    """Match leaves of ``src`` to leaves of ``dst`` in order (both as index runs).

    ``dst`` must hold at least as many leaves as ``src``.  Each translated
    segment is cut into maximal aligned dyadic blocks, so the table stays
    small whenever the matching is coarse.
    """
    pairs = []
    j = 0
    d0 = dst[0][0] if dst else 0
    for s, e in src:
        while s < e:
            if j >= len(dst):
                raise ValueError("destination has fewer leaves than source")
            ds, de = dst[j]
            if d0 < ds:
                d0 = ds
            n = min(e - s, de - d0)
            x, c = s, d0 - s
            end = s + n
            while x < end:
                k = min(_tz(x, level), _tz(x + c, level))
                while (1 << k) > end - x:
                    k -= 1
                pairs.append((leaf_word(x >> k, level - k), leaf_word((x + c) >> k, level - k)))
                x += 1 << k
            s += n
            d0 += n
            if d0 == de:
                j += 1
                if j < len(dst):
                    d0 = dst[j][0]
    return TableMap.of(pairs)


def _take_runs(runs, count):
    out = []
    for s, e in runs:
        if count <= 0:
            break
        n = min(e - s, count)
        out.append((s, s + n))
        count -= n
    return out


def prec(A: CylinderSet, B: CylinderSet):
    """``A`` embeds into ``B``: a table with domain exactly A and range inside B.

    Returns ``(True, map)`` or ``(False, certificate)`` with the two kraft sums.
    """
    if not A or not B:
        raise ValueError("prec needs nonempty sets")
    ka, kb = kraft(A), kraft(B)
    if ka > kb:
        return False, {"kraft_A": fmt_q(ka), "kraft_B": fmt_q(kb)}
    level = max(A.depth, B.depth)
    a_runs = leaf_runs(A, level)
    n = sum(e - s for s, e in a_runs)
    return True, match_runs(a_runs, _take_runs(leaf_runs(B, level), n), level)


def _zero_classes(H: CylinderSet, level: int) -> list[int]:
    """Number of level-``level`` leaves under H with each zero count."""
    counts = [0] * (level + 1)
    for w in H:
        z0, m = w.count("0"), level - len(w)
        for j in range(m + 1):
            counts[z0 + j] += comb(m, j)
    return counts


def lightest_mass(H: CylinderSet, surplus: int, level: int, lam: Fraction) -> Fraction:
    """Exact mu-mass of the ``surplus`` lightest level-``level`` leaves of H."""
    counts = _zero_classes(H, level)
    order = range(level + 1) if lam > HALF else range(level, -1, -1)
    total, left = Fraction(0), surplus
    for z in order:
        if left == 0:
            break
        t = min(counts[z], left)
        total += t * lam ** z * (1 - lam) ** (level - z)
        left -= t
    return total


def equidecompose_onto(A: CylinderSet, B: CylinderSet, lam, eps,
                       max_leaves: int = MAX_LEAVES) -> EquidecompResult:
    lam, eps = Fraction(lam), Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if not A or not B or mu(A, lam) <= 0 or mu(B, lam) <= 0:
        raise ValueError("both sets need positive measure")
    ka, kb = kraft(A), kraft(B)
    if ka == kb:
        level = max(A.depth, B.depth)
        m = match_runs(leaf_runs(A, level), leaf_runs(B, level), level)
        return EquidecompResult(m, EMPTY, EMPTY, 0, (), level)
    if lam == HALF:
        raise ObstructionError(
            "invariant-measure obstruction: kraft sums differ and lambda = 1/2",
            {"kraft_A": fmt_q(ka), "kraft_B": fmt_q(kb)})

    heavy, light = (A, B) if ka > kb else (B, A)
    surplus_kraft = abs(ka - kb)
    masses = []
    level = max(A.depth, B.depth)
    while True:
        if level > cylinder.MAX_DEPTH:
            raise DepthError(
                f"leftover {float(masses[-1]):.6g} still above epsilon={eps} at "
                f"MAX_DEPTH={cylinder.MAX_DEPTH}",
                {"masses": [fmt_q(m) for m in masses]})
        surplus = int(surplus_kraft * (1 << level))
        masses.append(lightest_mass(heavy, surplus, level, lam))
        if masses[-1] <= eps:
            break
        level += 1

    n_heavy = int(kraft(heavy) * (1 << level))
    if n_heavy > max_leaves:
        raise BudgetError(
            f"level {level} needs {n_heavy} heavy-side leaves (budget {max_leaves})",
            {"level": level, "leaves": n_heavy, "masses": [fmt_q(m) for m in masses]})

    heavy_runs = leaf_runs(heavy, level)
    leaves = [i for s, e in heavy_runs for i in range(s, e)]
    if lam > HALF:
        key = lambda i: (level - bin(i).count("1"), i)
    else:
        key = lambda i: (-(level - bin(i).count("1")), i)
    chosen = set(sorted(leaves, key=key)[:surplus])
    kept_runs = _runs(i for i in leaves if i not in chosen)
    leftover = runs_to_set(_runs(sorted(chosen)), level)
    light_runs = leaf_runs(light, level)
    if heavy is A:
        m = match_runs(kept_runs, light_runs, level)
        return EquidecompResult(m, leftover, EMPTY, len(masses), tuple(masses), level)
    m = match_runs(light_runs, kept_runs, level)
    return EquidecompResult(m, EMPTY, leftover, len(masses), tuple(masses), level)


def _runs(indices):
    out = []
    for i in indices:
        if out and out[-1][1] == i:
            out[-1][1] = i + 1
        else:
            out.append([i, i + 1])
    return [tuple(r) for r in out]


# -- pre-3-cycles ---------------------------------------------------------------

def pre_three_cycle(lam=None) -> tuple[TableMap, TableMap]:
    return TableMap.of([("00", "01")]), TableMap.of([("01", "10")])


def pre_three_cycle_violations(phi: TableMap, psi: TableMap, lam) -> list[str]:
    d, r = phi.dom(), phi.rng()
    bad = []
    if not d:
        bad.append("dom phi is empty")
    if not disjoint(d, r):
        bad.append("rng phi meets dom phi")
    if mu(union(d, r), lam) >= 1:
        bad.append("mu(dom phi u rng phi) is not < 1")
    if psi.dom() != r:
        bad.append("dom psi differs from rng phi")
    if not disjoint(psi.rng(), union(d, r)):
        bad.append("rng psi meets dom phi u rng phi")
    return bad


def three_cycle(phi: TableMap, psi: TableMap) -> TableMap:
    """Glue ``phi``, ``psi``, ``(psi phi)^-1`` and the identity elsewhere."""
    bad = pre_three_cycle_violations(phi, psi, HALF)
    if bad:
        raise DomainError("not a pre-3-cycle: " + "; ".join(bad), bad)
    back = inverse(compose(psi, phi))
    moved = union(union(phi.dom(), phi.rng()), psi.rng())
    return glue([phi, psi, back, identity_on(complement(moved))])
