from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from fullgroup.cylinder import CylinderSet, canonicalize, leaf_word, mu, word_mass
from fullgroup.errors import DomainError, OverlapError
from fullgroup.maps import (
    IDENTITY, SWAP, LeafPerm, TableMap, TruncatedMap, apply_prefix, cocycle_at,
    compose, compose_truncated, du, from_leaf_perm, glue, identity_on, inverse,
    odometer, rn_cocycle, support, to_leaf_perm,
)

from conftest import full_maps, lambdas, leaf_perms

DEEP = 6


def evaluate(f, w):
    """Pointwise image of the word ``w``, or None off the domain."""
    for u, v in f.pairs:
        if w.startswith(u):
            return v + w[len(u):]
    return None


def deep_words(level=DEEP):
    return ("".join(b) for b in product("01", repeat=level))


def brute_du(f, g, lam, level=DEEP):
    return sum((word_mass(w, lam) for w in deep_words(level)
                if evaluate(f, w) != evaluate(g, w)), Fraction(0))


@st.composite
def partial_maps(draw, max_level=4):
    p = draw(leaf_perms(max_level))
    keep = draw(st.lists(st.booleans(), min_size=len(p.perm), max_size=len(p.perm)))
    return TableMap.of((leaf_word(i, p.level), leaf_word(j, p.level))
                       for i, (j, k) in enumerate(zip(p.perm, keep)) if k)


def test_table_validation():
    with pytest.raises(OverlapError):
        TableMap.of([("0", "1"), ("01", "00")])
    with pytest.raises(OverlapError):
        TableMap.of([("0", "1"), ("1", "1")])
    with pytest.raises(ValueError):
        TableMap.of([("0", "10")])
    assert TableMap.of([("00", "10"), ("01", "11")]).pairs == (("0", "1"),)


def test_compose_examples():
    assert compose(SWAP, SWAP) == IDENTITY
    f = TableMap.of([("00", "01"), ("01", "11"), ("10", "00"), ("11", "10")])
    assert compose(IDENTITY, f) == f
    h = compose(f, SWAP)
    for w in deep_words(2):
        assert evaluate(h, w) == evaluate(f, evaluate(SWAP, w))


def test_inverse_support_examples():
    assert inverse(TableMap.of([("00", "10")])).pairs == (("10", "00"),)
    assert support(SWAP).to_json() == [""]
    assert support(IDENTITY).to_json() == []
    f = TableMap.of([("00", "01"), ("01", "00"), ("1", "1")])
    assert support(f).to_json() == ["0"]


def test_du_examples():
    assert du(SWAP, IDENTITY, Fraction(1, 3)) == 1
    assert du(SWAP, SWAP, Fraction(2, 3)) == 0
    f = from_leaf_perm(LeafPerm(2, (1, 0, 2, 3)))
    assert du(f, IDENTITY, Fraction(2, 3)) == Fraction(2, 3)


def test_du_is_not_right_invariant():
    f = from_leaf_perm(LeafPerm(2, (1, 0, 2, 3)))
    lam = Fraction(2, 3)
    assert du(compose(f, SWAP), SWAP, lam) == Fraction(1, 3) != du(f, IDENTITY, lam)


def test_cocycle_examples():
    assert rn_cocycle(SWAP, Fraction(1, 3))[0] == ("0", 2)
    assert all(v == 1 for _, v in rn_cocycle(SWAP, Fraction(1, 2)))
    assert rn_cocycle(TableMap.of([("00", "11")]), Fraction(2, 3)) == [("00", Fraction(1, 4))]


def test_glue_examples():
    a, b = TableMap.of([("00", "01")]), TableMap.of([("01", "00")])
    assert glue([a, b]).pairs == (("00", "01"), ("01", "00"))
    assert glue([identity_on(CylinderSet.of("0")), identity_on(CylinderSet.of("1"))]) == IDENTITY
    with pytest.raises(OverlapError):
        glue([a, TableMap.of([("0", "1")])])


def test_leaf_perm_examples():
    assert to_leaf_perm(SWAP, 1).perm == (1, 0)
    assert to_leaf_perm(SWAP, 2).perm == (2, 3, 0, 1)
    with pytest.raises(DomainError):
        to_leaf_perm(TableMap.of([("0", "1")]), 1)


def test_odometer():
    t = odometer(1)
    assert t.table.pairs == (("0", "1"),)
    assert t.defect_dom.to_json() == ["1"]
    assert mu(odometer(3).defect_dom, Fraction(2, 3)) == Fraction(1, 27)
    # carry rule 1^k 0 w -> 0^k 1 w
    assert apply_prefix(odometer(3).table, "110") == "001"
    assert apply_prefix(odometer(3).table, "0110") == "1110"
    assert TruncatedMap.from_json(t.to_json()) == t


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(2, 3), Fraction(1, 5)])
def test_odometer_square_defect(d, lam):
    sq = compose_truncated(odometer(d), odometer(d))
    assert mu(sq.defect_dom, lam) <= 2 * (1 - lam) ** (d - 1)
    # the composite acts as adding 2 on reversed binary numbers where defined
    for w in deep_words(d + 1):
        img = evaluate(sq.table, w)
        if img is not None:
            n = int(w[::-1], 2)
            assert int(img[::-1], 2) == (n + 2) % (1 << len(w))


def test_apply_prefix():
    assert apply_prefix(SWAP, "01") == "11"
    assert apply_prefix(IDENTITY, "0110") == "0110"
    with pytest.raises(DomainError):
        apply_prefix(TableMap.of([("0", "1")]), "10")


@given(partial_maps(), partial_maps())
def test_compose_matches_pointwise(f, g):
    h = compose(f, g)
    for w in deep_words():
        gw = evaluate(g, w)
        expected = None if gw is None else evaluate(f, gw)
        assert evaluate(h, w) == expected


@given(partial_maps(), partial_maps(), lambdas)
def test_du_matches_pointwise(f, g, lam):
    assert du(f, g, lam) == brute_du(f, g, lam)


@given(partial_maps())
def test_inverse_and_kraft(f):
    assert compose(inverse(f), f) == identity_on(f.dom())
    assert compose(f, inverse(f)) == identity_on(f.rng())
    from fullgroup.cylinder import kraft
    assert kraft(f.dom()) == kraft(f.rng())


@given(full_maps(), full_maps(), lambdas)
def test_left_invariance(h, f, lam):
    g = from_leaf_perm(LeafPerm.identity(0))
    assert du(compose(h, f), compose(h, g), lam) == du(f, g, lam)


@given(full_maps(), lambdas)
def test_cocycle_is_mass_ratio(f, lam):
    for w in deep_words(5):
        img = evaluate(f, w)
        assert cocycle_at(f, lam, w) == word_mass(img, lam) / word_mass(w, lam)


@given(leaf_perms(), st.integers(0, 2))
def test_leaf_perm_round_trip(p, extra):
    f = from_leaf_perm(p)
    assert to_leaf_perm(f, p.level) == p
    assert to_leaf_perm(f, p.level + extra) == p.refine(p.level + extra)
    assert TableMap.from_json(f.to_json()) == f


@given(leaf_perms(max_level=3, level=3), leaf_perms(max_level=3, level=3))
def test_leaf_perm_product_matches_compose(a, b):
    assert from_leaf_perm(a * b) == compose(from_leaf_perm(a), from_leaf_perm(b))
    assert from_leaf_perm(a.inverse()) == inverse(from_leaf_perm(a))


@given(partial_maps())
def test_support_pointwise(f):
    s = support(f)
    for w in deep_words():
        img = evaluate(f, w)
        moved = img is not None and img != w
        assert any(w.startswith(u) for u in s) == moved
