"""Finite permutations as tuples of images.

Products compose right to left: ``mul(a, b)[i] == a[b[i]]``.
"""

from __future__ import annotations

from typing import Optional, Sequence

Perm = tuple


def identity(p: int) -> Perm:
    return tuple(range(p))


def mul(a: Sequence[int], b: Sequence[int]) -> Perm:
    return tuple(a[x] for x in b)


def inv(a: Sequence[int]) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def conj(g: Sequence[int], x: Sequence[int]) -> Perm:
    """``g x g^-1``."""
    out = [0] * len(x)
    for i, xi in enumerate(x):
        out[g[i]] = g[xi]
    return tuple(out)


def is_perm(a: Sequence[int], p: Optional[int] = None) -> bool:
    p = len(a) if p is None else p
    return len(a) == p and sorted(a) == list(range(p))


def check_perm(a, p: Optional[int] = None) -> Perm:
    a = tuple(int(x) for x in a)
    if not is_perm(a, p):
        raise ValueError(f"not a permutation of size {p or len(a)}: {a}")
    return a


def cycles(a: Sequence[int]) -> list[tuple[int, ...]]:
    seen = set()
    out = []
    for i in range(len(a)):
        if i in seen:
            continue
        c = [i]
        seen.add(i)
        j = a[i]
        while j != i:
            c.append(j)
            seen.add(j)
            j = a[j]
        out.append(tuple(c))
    return out


def least_conjugator(src: Sequence[Perm], dst: Sequence[Perm], p: int) -> Optional[Perm]:
    """Lexicographically least ``g`` with ``g src[i] g^-1 == dst[i]`` for all i.

    Backtracking: choose the image of the least unassigned point in increasing
    order, then propagate ``g(src_i(x)) = dst_i(g(x))`` along the orbit.
    Returns None when the tuples are not simultaneously conjugate.
    """
    g = [-1] * p
    used = [False] * p

    def assign(x: int, y: int, trail: list) -> bool:
        stack = [(x, y)]
        while stack:
            a, b = stack.pop()
            if g[a] != -1:
                if g[a] != b:
                    return False
                continue
            if used[b]:
                return False
            g[a] = b
            used[b] = True
            trail.append(a)
            for s, d in zip(src, dst):
                stack.append((s[a], d[b]))
        return True

    def undo(trail):
        for a in trail:
            used[g[a]] = False
            g[a] = -1

    def search(start: int) -> bool:
        x = start
        while x < p and g[x] != -1:
            x += 1
        if x == p:
            return True
        for y in range(p):
            if used[y]:
                continue
            trail: list = []
            if assign(x, y, trail) and search(x + 1):
                return True
            undo(trail)
        return False

    return tuple(g) if search(0) else None


def orbit_of(gens: Sequence[Perm], x: int) -> list[int]:
    seen = {x}
    order = [x]
    for y in order:
        for g in gens:
            z = g[y]
            if z not in seen:
                seen.add(z)
                order.append(z)
    return order


def is_transitive(gens: Sequence[Perm], p: int) -> bool:
    return p == 0 or len(orbit_of(gens, 0)) == p
