"""Step functions from X into a finite set or a finite permutation group.

This is the desk-scale stand-in for the group of measurable maps X -> G:
a :class:`StepFn` assigns one value to each cylinder of a canonical
partition of X.  Permutation values are tuples of images (see ``perms``).
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Optional, Sequence

from . import perms
from .cylinder import (
    check_word,
    interval,
    is_prefix_free,
    leaf_word,
    overlapping,
    parse_q,
    word_mass,
)
from .errors import DomainError, NotConjugateError

MAX_DEGREE = 8


def _merge_equal(d: dict[str, Hashable]) -> dict[str, Hashable]:
    by_len = defaultdict(list)
    for u in d:
        by_len[len(u)].append(u)
    for n in range(max(by_len, default=0), 0, -1):
        for u in by_len[n]:
            if u[-1] != "0" or u not in d:
                continue
            sib = u[:-1] + "1"
            if sib in d and d[sib] == d[u]:
                d[u[:-1]] = d.pop(u)
                del d[sib]
                by_len[n - 1].append(u[:-1])
    return d


@dataclass(frozen=True)
class StepFn:
    pieces: tuple[tuple[str, Any], ...]
    group: Optional[str] = None

    @classmethod
    def of(cls, pieces, group: Optional[str] = None) -> "StepFn":
        d = {}
        for w, v in pieces:
            check_word(w)
            if isinstance(v, list):
                v = tuple(v)
            d[w] = v
        if not is_prefix_free(d) or sum(Fraction(1, 2 ** len(w)) for w in d) != 1:
            raise ValueError("step function pieces must partition X")
        return cls(tuple(sorted(_merge_equal(d).items())), group)

    @classmethod
    def const(cls, value, group: Optional[str] = None) -> "StepFn":
        return cls.of([("", value)], group)

    @classmethod
    def leaves(cls, values: Sequence, level: int, group: Optional[str] = None) -> "StepFn":
        return cls.of(((leaf_word(i, level), v) for i, v in enumerate(values)), group)

    def __call__(self, w: str):
        """Value on the cylinder ``w`` (which must lie inside one piece)."""
        for u, v in self.pieces:
            if w.startswith(u):
                return v
        raise DomainError(f"cylinder {w!r} is not inside a single piece", w)

    def values(self) -> list:
        return [v for _, v in self.pieces]

    @property
    def degree(self) -> Optional[int]:
        if self.group and self.group.startswith("S_"):
            return int(self.group[2:])
        return None

    def to_json(self) -> dict:
        return {"group": self.group,
                "pieces": [[w, list(v) if isinstance(v, tuple) else v]
                           for w, v in self.pieces]}

    @classmethod
    def from_json(cls, data: dict) -> "StepFn":
        return cls.of(data["pieces"], data.get("group"))


def sym(p: int) -> str:
    return f"S_{p}"


def common_refinement(*fns: StepFn) -> list[tuple[str, tuple]]:
    """Pieces of the coarsest partition refining every input, with all values."""
    acc = [(w, (v,)) for w, v in fns[0].pieces]
    for f in fns[1:]:
        acc = [(max(u, w, key=len), a + (b,))
               for (u, a), (w, b) in overlapping(acc, list(f.pieces),
                                                 key_x=lambda t: t[0], key_y=lambda t: t[0])]
    return acc


def _same_group(f: StepFn, g: StepFn) -> str:
    if f.group != g.group:
        raise DomainError(f"mismatched groups {f.group} and {g.group}")
    return f.group


def l0_product(f: StepFn, g: StepFn) -> StepFn:
    grp = _same_group(f, g)
    return StepFn.of(((w, perms.mul(a, b)) for w, (a, b) in common_refinement(f, g)), grp)


def l0_inverse(f: StepFn) -> StepFn:
    return StepFn.of(((w, perms.inv(v)) for w, v in f.pieces), f.group)


def gauge(f: StepFn, g: StepFn, lam, window: Optional[int] = None) -> Fraction:
    """Measure of the set where ``f`` and ``g`` disagree.

    With the discrete metric this is the whole story.  ``window=N`` compares
    permutation values only on the points ``0..N`` -- the basic neighbourhoods
    of pointwise convergence -- so ``window=0`` asks where ``f(x)(0) != g(x)(0)``.
    """
    _same_group(f, g)
    total = Fraction(0)
    for w, (a, b) in common_refinement(f, g):
        differ = a != b if window is None else tuple(a[:window + 1]) != tuple(b[:window + 1])
        if differ:
            total += word_mass(w, lam)
    return total


def contraction(f: StepFn, t, y0) -> StepFn:
    """The path ``f_t(x) = y0 if x > t else f(x)`` for dyadic ``t`` in [0, 1]."""
    t = parse_q(t)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    k = t.denominator.bit_length() - 1
    if t.denominator != 1 << k:
        raise DomainError(f"t={t} is not dyadic", str(t))
    from .cylinder import check_depth
    check_depth(k)
    if isinstance(y0, list):
        y0 = tuple(y0)
    out = []

    def split(w, v):
        a, b = interval(w)
        if b <= t:
            out.append((w, v))
        elif a >= t:
            out.append((w, y0))
        else:
            split(w + "0", v)
            split(w + "1", v)

    for w, v in f.pieces:
        split(w, v)
    return StepFn.of(out, f.group)


def quantize(f: StepFn, points: Sequence, eps, metric: Callable[[Any, Any], Any]) -> StepFn:
    """Replace each value by the least-index point of ``points`` within ``eps``."""
    out = []
    for w, v in f.pieces:
        for y in points:
            if metric(v, y) < eps:
                out.append((w, y))
                break
        else:
            raise DomainError(f"no point within {eps} of value {v!r} on piece {w!r}", (w, v))
    return StepFn.of(out)


# -- finite groups ---------------------------------------------------------------

def _act_by_perm(g, y):
    return g[y]


@dataclass(frozen=True)
class FiniteGroupSpec:
    """A subgroup of S_p listed in a fixed element order, optionally acting on Y."""

    degree: int
    elements: tuple[tuple[int, ...], ...]
    action: Callable = field(default=_act_by_perm, compare=False)
    verify: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not self.verify:
            return
        elems = set(self.elements)
        if perms.identity(self.degree) not in elems:
            raise ValueError("group spec lacks the identity")
        for a in self.elements:
            if perms.inv(a) not in elems:
                raise ValueError(f"group spec not closed under inverse at {a}")
            for b in self.elements:
                if perms.mul(a, b) not in elems:
                    raise ValueError(f"group spec not closed under product at {a}, {b}")

    @classmethod
    def symmetric(cls, p: int, action: Callable = _act_by_perm) -> "FiniteGroupSpec":
        return cls(p, tuple(itertools.permutations(range(p))), action, verify=False)

    @classmethod
    def generated(cls, gens: Sequence[Sequence[int]], p: int,
                  action: Callable = _act_by_perm) -> "FiniteGroupSpec":
        gens = [perms.check_perm(g, p) for g in gens]
        seen = {perms.identity(p)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = perms.mul(g, a)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return cls(p, tuple(sorted(seen)), action, verify=len(seen) <= 720)

    @property
    def name(self) -> str:
        if len(self.elements) == _factorial(self.degree):
            return sym(self.degree)
        return f"G<{self.degree}>"


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def orbit_member(f: StepFn, spec: FiniteGroupSpec, y0):
    """Decide whether every value of ``f`` lies in the orbit of ``y0``.

    Returns ``(True, witness)`` where ``witness`` picks, per piece, the first
    group element (in ``spec`` order) sending ``y0`` to the value, or
    ``(False, (word, value))`` naming a piece outside the orbit.
    """
    out = []
    for w, v in f.pieces:
        for g in spec.elements:
            if spec.action(g, y0) == v:
                out.append((w, g))
                break
        else:
            return False, (w, v)
    return True, StepFn.of(out, spec.name)


def act(phi: StepFn, f: StepFn, action: Callable = _act_by_perm) -> StepFn:
    """Pointwise ``phi(x) . f(x)``."""
    return StepFn.of((w, action(g, y)) for w, (g, y) in common_refinement(phi, f))


def cyclic_block_conjugate(S: Sequence[StepFn], T: Sequence[StepFn], tau: Sequence,
                           max_degree: Optional[int] = MAX_DEGREE) -> StepFn:
    """Pointwise least ``g`` with ``g T_i(x) g^-1 = S_i(x)`` for every i.

    Both tuples must be pointwise simultaneously conjugate to ``tau``; a piece
    where that fails raises :class:`NotConjugateError` carrying the piece.
    """
    tau = tuple(tuple(t) for t in tau)
    if len(S) != len(T) or len(S) != len(tau):
        raise ValueError("tuple lengths differ")
    p = len(tau[0]) if tau else (S[0].degree if S else 1)
    if max_degree is not None and p > max_degree:
        raise ValueError(f"degree {p} exceeds the exhaustive-search bound {max_degree}")
    n = len(S)
    out = []
    for w, vals in common_refinement(*S, *T):
        sv, tv = vals[:n], vals[n:]
        for side, vv in (("S", sv), ("T", tv)):
            if perms.least_conjugator(tau, vv, p) is None:
                raise NotConjugateError(
                    f"{side}-values on piece {w!r} are not conjugate to tau",
                    {"piece": w, "side": side, "values": [list(v) for v in vv]})
        g = perms.least_conjugator(tv, sv, p)
        if g is None:  # pragma: no cover - conjugacy is transitive
            raise NotConjugateError(f"no conjugator on piece {w!r}", {"piece": w})
        out.append((w, g))
    return StepFn.of(out, sym(p))


def phi_embed(T) -> StepFn:
    """Embed a leaf permutation as a step function into ``S_{2^L}``.

    On the leaf ``p`` the value sends ``i`` to ``(pi(p + i) - p) mod 2^L``:
    the index ``j`` with ``T(f_i(x)) = f_j(x)`` for the cyclic shifts
    ``f_i(p.w) = (p + i).w``.
    """
    m = 1 << T.level
    vals = [tuple((T.perm[(p + i) % m] - p) % m for i in range(m)) for p in range(m)]
    return StepFn.leaves(vals, T.level, sym(m))
