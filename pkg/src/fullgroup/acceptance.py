"""Acceptance suites, one function per criterion.

Each suite returns a :class:`Result`; a suite passes only if every check holds
and it finishes inside its time limit.  ``run_all`` drives them for the CLI
``selftest`` command and for ``tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from . import perms
from .census import census, conjugate_tuples, densify, en_surrogate_check
from .cylinder import CylinderSet, HALF, canonicalize, fmt_q, leaf_word, mu, union
from .equidecompose import (
    equidecompose_onto, lightest_mass, pre_three_cycle, pre_three_cycle_violations,
    three_cycle,
)
from .errors import DomainError, ObstructionError
from .l0 import (
    FiniteGroupSpec, StepFn, act, contraction, cyclic_block_conjugate, gauge, l0_product,
    orbit_member, phi_embed, sym,
)
from .maps import (
    IDENTITY, SWAP, LeafPerm, TableMap, apply_prefix, cocycle_at, compose, du,
    from_leaf_perm, inverse, rn_cocycle, support, to_leaf_perm,
)

L23 = Fraction(2, 3)


@dataclass
class Result:
    name: str
    passed: bool
    seconds: float
    limit: float
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        tail = f" -- {'; '.join(self.details)}" if self.details else ""
        return f"[{mark}] {self.name} ({self.seconds:.2f}s / {self.limit:.0f}s){tail}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "seconds": round(self.seconds, 3),
                "limit": self.limit, "details": self.details}


class _Checker:
    def __init__(self, name, limit):
        self.name, self.limit = name, limit
        self.failures: list[str] = []
        self.notes: list[str] = []
        self.t0 = time.perf_counter()

    def check(self, cond, msg):
        if not cond and len(self.failures) < 5:
            self.failures.append(msg)
        return cond

    def result(self) -> Result:
        dt = time.perf_counter() - self.t0
        details = list(self.failures)
        if dt >= self.limit:
            details.append(f"runtime {dt:.1f}s exceeds {self.limit}s")
        return Result(self.name, not details, dt, self.limit, details + self.notes)


def random_leaf_perm(rng: random.Random, level: int) -> LeafPerm:
    p = list(range(1 << level))
    rng.shuffle(p)
    return LeafPerm(level, tuple(p))


def random_full_map(rng: random.Random, max_depth: int) -> TableMap:
    return from_leaf_perm(random_leaf_perm(rng, rng.randint(0, max_depth)))


def _power_of_two(q: Fraction) -> bool:
    n, d = q.numerator, q.denominator
    return (n == 1 or n & (n - 1) == 0) and (d == 1 or d & (d - 1) == 0) and (n == 1 or d == 1)


# -- 1 ---------------------------------------------------------------------------

def group_algebra(seed=0, trials=1000) -> Result:
    c = _Checker("1 group algebra", 10)
    rng = random.Random(seed)
    for _ in range(trials):
        f, g, h = (random_full_map(rng, 6) for _ in range(3))
        c.check(compose(compose(f, g), h) == compose(f, compose(g, h)), f"associativity {f}")
        fi = inverse(f)
        c.check(compose(f, fi) == IDENTITY and compose(fi, f) == IDENTITY, f"inverse {f}")
        c.check(compose(IDENTITY, f) == f == compose(f, IDENTITY), f"identity {f}")
        c.check(du(compose(h, f), compose(h, g), L23) == du(f, g, L23), "left invariance")
    f = from_leaf_perm(LeafPerm(2, (1, 0, 2, 3)))
    left, right = du(f, IDENTITY, L23), du(compose(f, SWAP), compose(IDENTITY, SWAP), L23)
    c.check(left != right, "no right-invariance witness")
    c.notes.append(f"right-invariance witness: {fmt_q(left)} vs {fmt_q(right)}")
    return c.result()


# -- 2 ---------------------------------------------------------------------------

def cocycle_suite(seed=0, trials=1000) -> Result:
    c = _Checker("2 cocycle", 10)
    rng = random.Random(seed)
    for _ in range(trials):
        f, g = random_full_map(rng, 6), random_full_map(rng, 6)
        fg = compose(f, g)
        level = max(f.depth, g.depth)
        for i in range(1 << level):
            w = leaf_word(i, level)
            lhs = cocycle_at(fg, L23, w)
            rhs = cocycle_at(f, L23, apply_prefix(g, w)) * cocycle_at(g, L23, w)
            if not c.check(lhs == rhs, f"chain rule at {w}"):
                break
        c.check(all(v == 1 for _, v in rn_cocycle(fg, HALF)), "value != 1 at lambda=1/2")
        c.check(all(_power_of_two(v) for _, v in rn_cocycle(fg, L23)), "value not 2^k")
    return c.result()


# -- 3 ---------------------------------------------------------------------------

def phi_suite(seed=0, samples=100) -> Result:
    c = _Checker("3 phi embedding", 30)
    rng = random.Random(seed)
    epsilons = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
    pairs, singles = [], []
    for level in range(3):
        every = [LeafPerm(level, p) for p in itertools.permutations(range(1 << level))]
        singles += every
        pairs += [(a, b) for a in every for b in every]
    for _ in range(samples):
        a, b = random_leaf_perm(rng, 3), random_leaf_perm(rng, 3)
        singles += [a, b]
        pairs.append((a, b))
    for a, b in pairs:
        c.check(phi_embed(a * b) == l0_product(phi_embed(a), phi_embed(b)), f"homomorphism {a} {b}")
    for t in singles:
        ident = StepFn.const(perms.identity(1 << t.level), sym(1 << t.level))
        is_id = t == LeafPerm.identity(t.level)
        c.check((phi_embed(t) == ident) == is_id, f"kernel {t}")
        supp = support(from_leaf_perm(t))
        for lam in (HALF, L23):
            g = gauge(phi_embed(t), ident, lam, window=0)
            for eps in epsilons:
                c.check((mu(supp, lam) < eps) == (g < eps), f"eps-ball {t} eps={eps}")
    return c.result()


# -- 4 ---------------------------------------------------------------------------

def _census_key(tup):
    cs = census(tup, HALF)
    return tuple(sorted((t.encoding, e.count) for t, e in cs.entries.items()))


def _conj_table(C, S):
    return compose(compose(C, from_leaf_perm(S)), inverse(C))


def unequal_count_pair():
    """Level-3 1-tuples with the same types but different 2-cycle counts."""
    S = [LeafPerm(3, (1, 0, 2, 3, 4, 5, 6, 7))]
    T = [LeafPerm(3, (0, 1, 2, 3, 5, 4, 7, 6))]
    return S, T


def conjugacy_suite(seed=0) -> Result:
    c = _Checker("4 tuple conjugation", 60)
    checked = 0
    for level in range(3):
        group = [LeafPerm(level, p) for p in itertools.permutations(range(1 << level))]
        for n in (1, 2):
            tuples = list(itertools.product(group, repeat=n))
            keys = {tup: _census_key(tup) for tup in tuples}
            for S in tuples:
                orbit = {tuple(g * s * g.inverse() for s in S) for g in group}
                for T in tuples:
                    same = keys[S] == keys[T]
                    c.check(same == (T in orbit), f"census vs brute force {S} {T}")
                    if not same:
                        continue
                    C, rep = conjugate_tuples(S, T, L23)
                    ok = C.is_total() and all(
                        _conj_table(C, s) == from_leaf_perm(t) for s, t in zip(S, T))
                    c.check(ok and rep["exact"], f"conjugator {S} -> {T}")
                    checked += 1
    c.notes.append(f"{checked} conjugate pairs verified")

    S, T = unequal_count_pair()
    eps = Fraction(1, 16)
    C, rep = conjugate_tuples(S, T, L23, eps)
    c.check(rep["residual"] <= eps, f"residual {rep['residual']} > 1/16")
    for s, t in zip(S, T):
        d = du(_conj_table(C, s), from_leaf_perm(t), L23)
        c.check(d == rep["residual"], f"audited d_u {d} != reported {rep['residual']}")
    c.notes.append(f"unequal-count residual {fmt_q(rep['residual'])}")
    try:
        conjugate_tuples(S, T, HALF, eps)
        c.check(False, "no refusal at lambda=1/2")
    except ObstructionError:
        pass
    return c.result()


# -- 5 ---------------------------------------------------------------------------

def cylinder_family():
    sets = {canonicalize(ws) for r in range(1, 5)
            for ws in itertools.combinations(["00", "01", "10", "11"], r)}
    sets |= {canonicalize([leaf_word(i, d)]) for d in range(5) for i in range(1 << d)}
    return sorted(sets, key=lambda s: s.words)


def independent_mass(A: CylinderSet, lam) -> Fraction:
    """Sum the product formula word by word (grouped by zero count and length)."""
    lam = Fraction(lam)
    classes = Counter((w.count("0"), len(w)) for w in A)
    return sum((n * lam ** z * (1 - lam) ** (k - z) for (z, k), n in classes.items()),
               Fraction(0))


def brute_lightest(H: CylinderSet, surplus: int, level: int, lam) -> Fraction:
    masses = sorted(independent_mass(CylinderSet((w,)), lam)
                    for w in (leaf_word(i, level) for i in range(1 << level))
                    if any(w.startswith(u) for u in H))
    return sum(masses[:surplus], Fraction(0))


def geometric_envelope(lam=L23, ratio=L23, levels=range(1, 21)):
    """Leftover after refining A=X, B={"0"} to each level, against ``c * ratio**k``."""
    X = CylinderSet(("",))
    rows = [(L, lightest_mass(X, 1 << (L - 1), L, lam)) for L in levels]
    base = rows[0][1]
    return [(L, m, base * ratio ** (L - rows[0][0])) for L, m in rows]


def equidecompose_suite(seed=0) -> Result:
    from .cylinder import kraft
    from .maps import TableMap as _TM
    c = _Checker("5 equidecomposition", 10)
    fam = cylinder_family()
    for A in fam:
        for B in fam:
            exact_expected = kraft(A) == kraft(B)
            r = equidecompose_onto(A, B, L23, Fraction(1))
            exact = not r.uncovered_dom and not r.uncovered_rng
            c.check(exact == exact_expected, f"exactness {A} {B}")
            c.check(union(r.map.dom(), r.uncovered_dom) == A
                    and union(r.map.rng(), r.uncovered_rng) == B, f"cover {A} {B}")
            try:
                r = equidecompose_onto(A, B, HALF, Fraction(1))
                c.check(exact_expected and r.map.dom() == A and r.map.rng() == B,
                        f"lambda=1/2 {A} {B}")
            except ObstructionError:
                c.check(not exact_expected, f"spurious obstruction {A} {B}")

    A, B = CylinderSet(("0",)), CylinderSet(("10",))
    for eps in (Fraction(1, 8), Fraction(1, 32), Fraction(1, 128)):
        try:
            r = equidecompose_onto(A, B, L23, eps)
        except DomainError as e:
            c.check(False, f"eps={fmt_q(eps)}: {e}")
            continue
        left = independent_mass(r.uncovered_dom, L23)
        c.check(left <= eps and not r.uncovered_rng, f"eps={fmt_q(eps)} leftover {left}")
        c.check(r.masses[-1] == left, f"eps={fmt_q(eps)} reported {r.masses[-1]} != {left}")
        start = r.level - r.rounds + 1
        for k, m in enumerate(r.masses):
            level = start + k
            if level <= 14:
                c.check(m == brute_lightest(A, 1 << (level - 2), level, L23),
                        f"trace at level {level}")
        c.notes.append(f"eps={fmt_q(eps)}: level {r.level}, leftover {float(left):.5f}")

    bad = [(L, float(m), float(env)) for L, m, env in geometric_envelope() if m > env]
    c.check(not bad, f"leftover exceeds the ratio-2/3 envelope at levels {[b[0] for b in bad]}")
    try:
        equidecompose_onto(A, B, HALF, Fraction(1, 8))
        c.check(False, "no obstruction at lambda=1/2")
    except ObstructionError:
        pass
    return c.result()


# -- 6 ---------------------------------------------------------------------------

def densify_suite(seed=0) -> Result:
    c = _Checker("6 densification", 30)
    rng = random.Random(seed)
    starts = [[LeafPerm.identity(L)] for L in range(1, 5)]
    starts += [[random_leaf_perm(rng, 4), random_leaf_perm(rng, 4)] for _ in range(3)]
    for tup in starts:
        for eps in (Fraction(1, 4), Fraction(1, 16)):
            out = densify(tup, L23, eps, 2, 2)
            for a, b in zip(out, tup):
                d = du(from_leaf_perm(a), from_leaf_perm(b), L23)
                c.check(d < eps, f"d_u {d} >= {eps}")
            ok, missing = en_surrogate_check(out, 2, 2)
            c.check(ok, f"surrogate check misses {missing}")
    return c.result()


# -- 7 ---------------------------------------------------------------------------

def random_pre_three_cycle(rng: random.Random, max_depth=5):
    level = rng.randint(2, max_depth)
    leaves = list(range(1 << level))
    rng.shuffle(leaves)
    k = rng.randint(1, ((1 << level) - 1) // 3)
    D, R, R2 = leaves[:k], leaves[k:2 * k], leaves[2 * k:3 * k]
    rng.shuffle(R)
    rng.shuffle(R2)
    w = lambda i: leaf_word(i, level)
    phi = TableMap.of((w(a), w(b)) for a, b in zip(D, R))
    psi = TableMap.of((w(a), w(b)) for a, b in zip(sorted(R), R2))
    return phi, psi


def three_cycle_suite(seed=0, trials=100) -> Result:
    c = _Checker("7 pre-3-cycles", 5)
    phi, psi = pre_three_cycle()
    for lam in (HALF, L23, Fraction(1, 3)):
        c.check(not pre_three_cycle_violations(phi, psi, lam), f"canonical pre-3-cycle at {lam}")
    rng = random.Random(seed)
    for _ in range(trials + 1):
        C = three_cycle(phi, psi)
        c.check(compose(C, compose(C, C)) == IDENTITY, f"C^3 != id for {phi}, {psi}")
        moved = union(union(phi.dom(), phi.rng()), psi.rng())
        c.check(support(C) == moved, "support equality")
        phi, psi = random_pre_three_cycle(rng)
    return c.result()


# -- 8 ---------------------------------------------------------------------------

def random_stepfn(rng, values, depth=3, group=None):
    def grow(w):
        if len(w) < depth and rng.random() < 0.6:
            return grow(w + "0") + grow(w + "1")
        return [(w, rng.choice(values))]
    return StepFn.of(grow(""), group)


def l0_suite(seed=0, trials=100) -> Result:
    c = _Checker("8 L0 step functions", 30)
    rng = random.Random(seed)
    for _ in range(trials):
        p = rng.randint(1, 5)
        vals = list(itertools.permutations(range(p)))
        f = random_stepfn(rng, vals, group=sym(p))
        y0 = rng.choice(vals)
        c.check(contraction(f, 1, y0) == f, "f_1 != f")
        c.check(contraction(f, 0, y0) == StepFn.const(y0, f.group), "f_0 != const")

        ys = random_stepfn(rng, list(range(p)))
        for spec in (FiniteGroupSpec.symmetric(p),
                     FiniteGroupSpec.generated([rng.choice(vals)], p)):
            point = rng.randrange(p)
            ok, w = orbit_member(ys, spec, point)
            if ok:
                c.check(act(w, StepFn.const(point)) == ys, "witness does not reproduce f")
            else:
                word, value = w
                c.check(all(g[point] != value for g in spec.elements), "bogus refusal")

    constant_cases = 0
    for p in range(1, 5):
        group = list(itertools.permutations(range(p)))
        for n in (1, 2):
            for S in itertools.product(group, repeat=n):
                for g0 in group:
                    T = tuple(perms.conj(g0, s) for s in S)
                    Sf = [StepFn.const(s, sym(p)) for s in S]
                    Tf = [StepFn.const(t, sym(p)) for t in T]
                    out = cyclic_block_conjugate(Sf, Tf, S)
                    g = out.pieces[0][1]
                    c.check(all(perms.conj(g, t) == s for s, t in zip(S, T)),
                            f"constant case {S} {T}")
                    constant_cases += 1
    c.notes.append(f"{constant_cases} constant cases")

    for _ in range(trials):
        p, n = rng.randint(2, 6), rng.randint(1, 2)
        group = list(itertools.permutations(range(p)))
        tau = tuple(rng.choice(group) for _ in range(n))
        shape = random_stepfn(rng, [0])
        words = [w for w, _ in shape.pieces]
        gs = [rng.choice(group) for _ in words]
        hs = [rng.choice(group) for _ in words]
        Sf = [StepFn.of([(w, perms.conj(g, tau[i])) for w, g in zip(words, gs)], sym(p))
              for i in range(n)]
        Tf = [StepFn.of([(w, perms.conj(h, tau[i])) for w, h in zip(words, hs)], sym(p))
              for i in range(n)]
        out = cyclic_block_conjugate(Sf, Tf, tau)
        for w in words:
            g = out(w)
            c.check(all(perms.conj(g, Tf[i](w)) == Sf[i](w) for i in range(n)),
                    f"piecewise case on {w}")
    return c.result()


# -- 9 ---------------------------------------------------------------------------

def census_invariance_suite(seed=0, trials=200) -> Result:
    c = _Checker("9 census invariance", 10)
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, 2)
        S = [random_full_map(rng, 5) for _ in range(n)]
        T = random_full_map(rng, 5)
        conj = [compose(compose(T, s), inverse(T)) for s in S]
        level = max(m.depth for m in S + conj + [T])
        a = census([to_leaf_perm(m, level) for m in S], HALF)
        b = census([to_leaf_perm(m, level) for m in conj], HALF)
        c.check(a.types() == b.types(), "type sets differ")
        c.check(a.counts() == b.counts(), "block counts differ")
        c.check(a.masses() == b.masses(), "per-type masses differ")
    return c.result()


SUITES = [group_algebra, cocycle_suite, phi_suite, conjugacy_suite, equidecompose_suite,
          densify_suite, three_cycle_suite, l0_suite, census_invariance_suite]


def run_all(seed=0) -> list[Result]:
    return [suite(seed=seed) for suite in SUITES]
