"""Orbit censuses of tuples of leaf permutations and their conjugation.

A tuple of leaf permutations at level L splits the ``2**L`` leaves into
finite orbits (blocks).  Each block carries a transitive tuple type; the
multiset of types with block counts is the complete conjugacy invariant at
leaf level.  :func:`conjugate_tuples` builds an explicit conjugator between
two tuples with the same types, and :func:`densify` perturbs a tuple on a
small invariant set so that every small type shows up often.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import perms
from .cylinder import (
    HALF,
    CylinderSet,
    canonicalize,
    check_depth,
    fmt_q,
    leaf_word,
    mu,
    word_mass,
)
from . import cylinder
from .equidecompose import equidecompose_onto
from .errors import DepthError, ObstructionError, TypeMismatchError
from .l0 import StepFn, cyclic_block_conjugate, sym
from .maps import LeafPerm, TableMap, glue

MAX_ENUMERATION = 10 ** 6


@dataclass(frozen=True, order=True)
class TransitiveTupleType:
    """Canonical representative of a transitive n-tuple of permutations of {0..q-1}."""

    n: int
    q: int
    gens: tuple[tuple[int, ...], ...]

    @property
    def encoding(self) -> str:
        return f"{self.q}:" + "/".join(",".join(map(str, g)) for g in self.gens)

    def __str__(self):
        return self.encoding


def _bfs_relabel(gens, base):
    label = {base: 0}
    order = [base]
    for x in order:
        for g in gens:
            y = g[x]
            if y not in label:
                label[y] = len(order)
                order.append(y)
    return label, order


def canonical_type(gens: Sequence[Sequence[int]], block: Sequence[int] | None = None) -> TransitiveTupleType:
    """Canonical type of ``gens`` restricted to ``block`` (default: all points).

    Minimizes the relabelled generator images over breadth-first relabelings
    from every base point.
    """
    gens = [tuple(g) for g in gens]
    if block is None:
        block = range(len(gens[0])) if gens else range(1)
    block = list(block)
    q = len(block)
    best = None
    for base in block:
        label, order = _bfs_relabel(gens, base)
        if len(order) != q:
            raise ValueError("tuple is not transitive on the block")
        enc = tuple(tuple(label[g[x]] for x in order) for g in gens)
        if best is None or enc < best:
            best = enc
    return TransitiveTupleType(len(gens), q, best)


def orbit_partition(tup: Sequence[LeafPerm]) -> list[list[int]]:
    """Orbits of ``<T_1..T_n>`` on the leaves, each sorted, ordered by least leaf."""
    level = _common_level(tup)
    size = 1 << level
    seen = [False] * size
    blocks = []
    for x in range(size):
        if seen[x]:
            continue
        seen[x] = True
        block = [x]
        for y in block:
            for t in tup:
                z = t.perm[y]
                if not seen[z]:
                    seen[z] = True
                    block.append(z)
        blocks.append(sorted(block))
    return blocks


def _common_level(tup: Sequence[LeafPerm]) -> int:
    if not tup:
        raise ValueError("empty tuple")
    levels = {t.level for t in tup}
    if len(levels) != 1:
        raise ValueError(f"tuple mixes levels {sorted(levels)}")
    return levels.pop()


def block_type(tup: Sequence[LeafPerm], block: Sequence[int]) -> TransitiveTupleType:
    return canonical_type([t.perm for t in tup], block)


@dataclass
class CensusEntry:
    count: int
    mass: Fraction
    blocks: list[list[int]]


@dataclass
class OrbitCensus:
    level: int
    lam: Fraction
    entries: dict[TransitiveTupleType, CensusEntry]

    def types(self) -> set[TransitiveTupleType]:
        return set(self.entries)

    def counts(self) -> dict[TransitiveTupleType, int]:
        return {t: e.count for t, e in self.entries.items()}

    def masses(self) -> dict[TransitiveTupleType, Fraction]:
        return {t: e.mass for t, e in self.entries.items()}

    def to_json(self) -> list[dict]:
        return [{"type": t.encoding, "count": e.count, "mass": fmt_q(e.mass),
                 "blocks": e.blocks}
                for t, e in sorted(self.entries.items(), key=lambda kv: kv[0].encoding)]


def census(tup: Sequence[LeafPerm], lam) -> OrbitCensus:
    lam = Fraction(lam)
    level = _common_level(tup)
    entries: dict[TransitiveTupleType, CensusEntry] = {}
    for block in orbit_partition(tup):
        t = block_type(tup, block)
        m = sum((word_mass(leaf_word(x, level), lam) for x in block), Fraction(0))
        e = entries.setdefault(t, CensusEntry(0, Fraction(0), []))
        e.count += 1
        e.mass += m
        e.blocks.append(block)
    return OrbitCensus(level, lam, entries)


def transitive_types(n: int, s: int) -> list[TransitiveTupleType]:
    """All transitive n-tuple types on at most ``s`` points (exhaustive)."""
    out = set()
    for q in range(1, s + 1):
        all_perms = list(itertools.permutations(range(q)))
        total = len(all_perms) ** n
        if total > MAX_ENUMERATION:
            raise ValueError(f"enumerating {total} tuples of degree {q} exceeds the bound")
        for gens in itertools.product(all_perms, repeat=n):
            if perms.is_transitive(gens, q):
                out.add(canonical_type(gens) if n else TransitiveTupleType(0, 1, ()))
    return sorted(out, key=lambda t: (t.q, t.encoding))


def en_surrogate_check(tup: Sequence[LeafPerm], s: int, N: int):
    """Every transitive type on at most ``s`` points occurs on at least ``N`` blocks.

    Returns ``(ok, missing)`` where ``missing`` maps type encodings to the
    number of blocks actually present.  All orbits are finite at leaf level,
    so only the multiplicity condition needs checking.
    """
    if s < 1 or N < 1:
        raise ValueError("s and N must be positive")
    counts = census(tup, HALF).counts()
    missing = {t.encoding: counts.get(t, 0)
               for t in transitive_types(len(tup), s) if counts.get(t, 0) < N}
    return not missing, missing


# -- conjugation -------------------------------------------------------------------

def _index_tuple(tup, block):
    pos = {x: i for i, x in enumerate(block)}
    return tuple(tuple(pos[t.perm[x]] for x in block) for t in tup)


def conjugate_tuples(S: Sequence[LeafPerm], T: Sequence[LeafPerm], lam, eps=None):
    """A table map ``C`` with ``C S_i C^-1 = T_i`` on its domain, plus a defect report.

    For each type: the lexicographically least leaf of every block is its
    transversal point and the block is walked in increasing leaf order (the
    cyclic successor maps).  A bridging map sends S-transversals to
    T-transversals -- blockwise when counts agree, otherwise through
    :func:`equidecompose_onto` -- and is extended along the blocks, the
    position within each block being corrected by a pointwise conjugator of
    the two index tuples.
    """
    lam = Fraction(lam)
    if len(S) != len(T):
        raise ValueError("tuples have different lengths")
    level = _common_level(list(S) + list(T))
    cs, ct = census(S, lam), census(T, lam)
    only = cs.types() ^ ct.types()
    if only:
        t = min(only, key=lambda t: t.encoding)
        side = "source" if t in cs.entries else "target"
        raise TypeMismatchError(f"type {t.encoding} occurs only on the {side} side",
                                {"type": t.encoding, "side": side})
    unequal = [t for t in cs.entries if cs.entries[t].count != ct.entries[t].count]
    if unequal and lam == HALF:
        raise ObstructionError(
            "invariant-measure obstruction: block counts differ at lambda = 1/2",
            {t.encoding: [cs.entries[t].count, ct.entries[t].count] for t in unequal})
    if unequal and eps is None:
        raise ValueError("unequal block counts need an epsilon budget")

    t_heavy = [t for t in unequal if ct.entries[t].count > cs.entries[t].count]
    parts = []
    per_type = {}
    for t in sorted(cs.entries, key=lambda t: t.encoding):
        sblocks, tblocks = cs.entries[t].blocks, ct.entries[t].blocks
        if t in unequal:
            budget = Fraction(eps)
            if t in t_heavy:
                # the residual is the V-orbit of the uncovered transversal part
                amp = max(sum(word_mass(leaf_word(x, level), lam) for x in b)
                          / word_mass(leaf_word(b[0], level), lam) for b in tblocks)
                budget = Fraction(eps) / (len(t_heavy) * amp)
            A = canonicalize(leaf_word(b[0], level) for b in sblocks)
            B = canonicalize(leaf_word(b[0], level) for b in tblocks)
            res = equidecompose_onto(A, B, lam, budget)
            bridge = _split_to_level(res.map.pairs, level)
            per_type[t.encoding] = {"level": res.level, "rounds": res.rounds,
                                    "uncovered_dom": fmt_q(mu(res.uncovered_dom, lam)),
                                    "uncovered_rng": fmt_q(mu(res.uncovered_rng, lam))}
        else:
            bridge = [(leaf_word(a[0], level), leaf_word(b[0], level))
                      for a, b in zip(sblocks, tblocks)]
        parts.append(_extend_bridge(S, T, t, sblocks, tblocks, bridge, level))
    C = glue(parts)
    residual = mu(_complement_of(C.rng()), lam)
    report = {
        "exact": not unequal,
        "residual": residual,
        "uncovered_dom": mu(_complement_of(C.dom()), lam),
        "types": per_type,
    }
    return C, report


def _split_to_level(pairs, level):
    out = []
    for u, v in pairs:
        k = level - len(u)
        if k <= 0:
            out.append((u, v))
            continue
        for i in range(1 << k):
            tail = leaf_word(i, k)
            out.append((u + tail, v + tail))
    return out


def _complement_of(A):
    from .cylinder import complement
    return complement(A)


def _extend_bridge(S, T, t, sblocks, tblocks, bridge, level):
    s_of = {b[0]: b for b in sblocks}
    t_of = {b[0]: b for b in tblocks}
    q = t.q
    # pointwise index tuples over the bridge pieces; tau itself elsewhere
    tau = t.gens
    dom = canonicalize(u for u, _ in bridge)
    filler = [(w, tau) for w in _complement_of(dom)]
    s_side = [(u, _index_tuple(S, s_of[int(u[:level], 2) if level else 0])) for u, _ in bridge]
    t_side = [(u, _index_tuple(T, t_of[int(v[:level], 2) if level else 0])) for u, v in bridge]
    n = len(S)
    if n == 0:
        g_at = {u: perms.identity(q) for u, _ in bridge}
    else:
        sf = [StepFn.of([(w, vals[i]) for w, vals in s_side + filler], sym(q)) for i in range(n)]
        tf = [StepFn.of([(w, vals[i]) for w, vals in t_side + filler], sym(q)) for i in range(n)]
        # g with g sigma g^-1 = tau_T, i.e. S-index i goes to T-index g(i)
        G = cyclic_block_conjugate(tf, sf, tau, max_degree=None)
        g_at = {u: G(u) for u, _ in bridge}
    pairs = []
    for u, v in bridge:
        sb = s_of[int(u[:level], 2) if level else 0]
        tb = t_of[int(v[:level], 2) if level else 0]
        g = g_at[u]
        su, sv = u[level:], v[level:]
        for i in range(q):
            pairs.append((leaf_word(sb[i], level) + su, leaf_word(tb[g[i]], level) + sv))
    return TableMap.of(pairs)


# -- embeddings and densification ------------------------------------------------------

def psi_embed(sigma: Sequence[int]) -> LeafPerm:
    """The leaf permutation ``k -> sigma(k)`` on ``m = 2**l`` leaves.

    On leaf k this is ``succ^(sigma(k) - k)`` for the leaf successor ``succ``.
    """
    m = len(sigma)
    level = m.bit_length() - 1
    if m < 1 or m != 1 << level:
        raise ValueError(f"size {m} is not a power of two")
    check_depth(level)
    return LeafPerm(level, perms.check_perm(sigma))


def leaf_successor(level: int) -> LeafPerm:
    m = 1 << level
    return LeafPerm(level, tuple((k + 1) % m for k in range(m)))


def densify(tup: Sequence[LeafPerm], lam, eps, s: int, N: int) -> list[LeafPerm]:
    """Perturb ``tup`` on a small invariant set so that every type of size <= s
    appears on at least N blocks.

    Blocks are collected lightest first while their total mass stays below
    ``eps``; when they do not hold enough leaves the level is refined.  The
    collected leaves are regrouped: N groups per type carrying the type's
    canonical generators, the rest fixed.
    """
    lam, eps = Fraction(lam), Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    n = len(tup)
    types = transitive_types(n, s)
    need = N * sum(t.q for t in types)
    level = _common_level(tup)
    while True:
        cur = [t.refine(level) for t in tup]
        blocks = orbit_partition(cur)
        weighted = sorted(
            ((sum((word_mass(leaf_word(x, level), lam) for x in b), Fraction(0)), b[0], b)
             for b in blocks))
        chosen, total, count = [], Fraction(0), 0
        for m, _, b in weighted:
            if count >= need or total + m >= eps:
                break
            chosen.append(b)
            total += m
            count += len(b)
        if count >= need:
            break
        level += 1
        if level > cylinder.MAX_DEPTH:
            raise DepthError(f"no invariant set of mass < {eps} with {need} leaves "
                             f"below MAX_DEPTH={cylinder.MAX_DEPTH}", {"need": need})
    leaves = sorted(x for b in chosen for x in b)
    out = [list(t.perm) for t in cur]
    for x in leaves:
        for o in out:
            o[x] = x
    pos = 0
    for t in types:
        for _ in range(N):
            grp = leaves[pos:pos + t.q]
            pos += t.q
            for o, g in zip(out, t.gens):
                for k, x in enumerate(grp):
                    o[x] = grp[g[k]]
    return [LeafPerm(level, tuple(o)) for o in out]
