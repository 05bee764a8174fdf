"""Binary words, canonical cylinder sets and the product measures mu_lambda.

A word is a plain ``str`` over ``"01"``; the empty word is the whole space.
All arithmetic is done with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import contextlib
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import DepthError

MAX_DEPTH = 32


def set_max_depth(depth: int) -> None:
    global MAX_DEPTH
    if depth < 0:
        raise ValueError("max depth must be non-negative")
    MAX_DEPTH = depth


@contextlib.contextmanager
def max_depth(depth: int) -> Iterator[None]:
    old = MAX_DEPTH
    set_max_depth(depth)
    try:
        yield
    finally:
        set_max_depth(old)


def check_word(w: str) -> str:
    if not isinstance(w, str) or w.strip("01"):
        raise ValueError(f"not a binary word: {w!r}")
    if len(w) > MAX_DEPTH:
        raise DepthError(f"word of length {len(w)} exceeds MAX_DEPTH={MAX_DEPTH}", w)
    return w


def check_depth(level: int) -> int:
    if level > MAX_DEPTH:
        raise DepthError(f"level {level} exceeds MAX_DEPTH={MAX_DEPTH}", level)
    return level


def leaf_word(index: int, level: int) -> str:
    """The level-``level`` word with binary value ``index``."""
    return format(index, f"0{level}b") if level else ""


def word_index(w: str) -> int:
    return int(w, 2) if w else 0


# -- rationals ---------------------------------------------------------------

def parse_q(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def fmt_q(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def Lambda(value) -> Fraction:
    """Validate a measure parameter: a rational strictly between 0 and 1."""
    lam = parse_q(value)
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    return lam


HALF = Fraction(1, 2)


# -- cylinder sets -----------------------------------------------------------

def _absorb(words: Iterable[str]) -> set[str]:
    ws = set(words)
    return {w for w in ws if not any(w[:k] in ws for k in range(len(w)))}


def _merge_siblings(ws: set[str]) -> set[str]:
    by_len = defaultdict(list)
    for w in ws:
        by_len[len(w)].append(w)
    for n in range(max(by_len, default=0), 0, -1):
        for w in by_len[n]:
            if w[-1] == "0" and w in ws:
                sib = w[:-1] + "1"
                if sib in ws:
                    ws.discard(w)
                    ws.discard(sib)
                    ws.add(w[:-1])
                    by_len[n - 1].append(w[:-1])
    return ws


@dataclass(frozen=True)
class CylinderSet:
    """A finite union of cylinders in canonical (prefix-free, merged, sorted) form.

    Always build through :func:`canonicalize` or :meth:`of`.
    """

    words: tuple[str, ...] = ()

    @classmethod
    def of(cls, *words: str) -> "CylinderSet":
        return canonicalize(words)

    def __iter__(self):
        return iter(self.words)

    def __len__(self):
        return len(self.words)

    def __bool__(self):
        return bool(self.words)

    @property
    def depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def to_json(self) -> list[str]:
        return list(self.words)

    @classmethod
    def from_json(cls, data) -> "CylinderSet":
        return canonicalize(data)

    def __repr__(self):
        return f"CylinderSet({list(self.words)!r})"


EMPTY = CylinderSet(())
ROOT = CylinderSet(("",))


def canonicalize(words: Iterable[str]) -> CylinderSet:
    ws = {check_word(w) for w in words}
    return CylinderSet(tuple(sorted(_merge_siblings(_absorb(ws)))))


def word_mass(w: str, lam) -> Fraction:
    lam = Fraction(lam)
    z = w.count("0")
    return lam ** z * (1 - lam) ** (len(w) - z)


def mu(A: CylinderSet, lam) -> Fraction:
    return sum((word_mass(w, lam) for w in A), Fraction(0))


def kraft(A: CylinderSet) -> Fraction:
    return sum((Fraction(1, 2 ** len(w)) for w in A), Fraction(0))


def is_prefix_free(words: Iterable[str]) -> bool:
    ws = sorted(words)
    return all(not b.startswith(a) for a, b in zip(ws, ws[1:]))


def overlapping(xs: list, ys: list, key_x=lambda t: t, key_y=lambda t: t):
    """Yield ``(x, y)`` for every overlapping pair of cylinders.

    Both inputs must be sorted by word and prefix-free; runs in linear time.
    """
    i = j = 0
    while i < len(xs) and j < len(ys):
        u, v = key_x(xs[i]), key_y(ys[j])
        if v.startswith(u):
            yield xs[i], ys[j]
            if u == v:
                i += 1
            j += 1
        elif u.startswith(v):
            yield xs[i], ys[j]
            i += 1
        elif u < v:
            i += 1
        else:
            j += 1


def union(A: CylinderSet, B: CylinderSet) -> CylinderSet:
    return canonicalize(A.words + B.words)


def intersect(A: CylinderSet, B: CylinderSet) -> CylinderSet:
    return canonicalize(max(u, v, key=len) for u, v in overlapping(list(A), list(B)))


def complement(A: CylinderSet) -> CylinderSet:
    out = []
    ws = list(A)

    def walk(prefix: str, lo: int, hi: int):
        # ws[lo:hi] are exactly the words starting with prefix
        if lo == hi:
            out.append(prefix)
            return
        if ws[lo] == prefix:
            return
        mid = lo
        while mid < hi and ws[mid][len(prefix)] == "0":
            mid += 1
        walk(prefix + "0", lo, mid)
        walk(prefix + "1", mid, hi)

    walk("", 0, len(ws))
    return canonicalize(out)


def difference(A: CylinderSet, B: CylinderSet) -> CylinderSet:
    return intersect(A, complement(B))


def disjoint(A: CylinderSet, B: CylinderSet) -> bool:
    return next(overlapping(list(A), list(B)), None) is None


def contains(A: CylinderSet, B: CylinderSet) -> bool:
    """True when B is a subset of A."""
    return not difference(B, A)


def refine(A: CylinderSet, level: int) -> list[str]:
    """All level-``level`` words below A, in lexicographic order.

    The result is not merged (it is a list of leaves, not a canonical set).
    """
    check_depth(level)
    if level < A.depth:
        raise ValueError(f"cannot refine depth-{A.depth} set to level {level}")
    out = []
    for w in A:
        k = level - len(w)
        base = word_index(w) << k
        out.extend(leaf_word(base + t, level) for t in range(1 << k))
    return out


def leaf_runs(A: CylinderSet, level: int) -> list[tuple[int, int]]:
    """Half-open intervals of level-``level`` leaf indices covered by A."""
    runs: list[tuple[int, int]] = []
    for w in A:
        k = level - len(w)
        if k < 0:
            raise ValueError("level below set depth")
        s = word_index(w) << k
        e = s + (1 << k)
        if runs and runs[-1][1] == s:
            runs[-1] = (runs[-1][0], e)
        else:
            runs.append((s, e))
    return runs


def runs_to_set(runs: Iterable[tuple[int, int]], level: int) -> CylinderSet:
    words = []
    for s, e in runs:
        x = s
        while x < e:
            k = _tz(x, level)
            while (1 << k) > e - x:
                k -= 1
            words.append(leaf_word(x >> k, level - k))
            x += 1 << k
    return canonicalize(words)


def _tz(x: int, cap: int) -> int:
    if x == 0:
        return cap
    return min((x & -x).bit_length() - 1, cap)


def interval(w: str) -> tuple[Fraction, Fraction]:
    """The dyadic interval ``[0.w, 0.w + 2^-|w|)`` of X identified with [0, 1]."""
    size = Fraction(1, 2 ** len(w))
    return word_index(w) * size, (word_index(w) + 1) * size
