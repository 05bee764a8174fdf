from fractions import Fraction
from itertools import product

import pytest
from hypothesis import assume, given, strategies as st

from fullgroup.cylinder import CylinderSet, canonicalize, kraft, leaf_word, mu, union
from fullgroup.equidecompose import (
    EquidecompResult, equidecompose_onto, lightest_mass, pre_three_cycle,
    pre_three_cycle_violations, prec, three_cycle,
)
from fullgroup.errors import BudgetError, DepthError, DomainError, ObstructionError
from fullgroup.maps import IDENTITY, TableMap, compose, rn_cocycle, support
from fullgroup.acceptance import brute_lightest, geometric_envelope, independent_mass

from conftest import lambdas, word_lists

L23 = Fraction(2, 3)


def nonempty_sets():
    return word_lists.map(canonicalize).filter(bool)


def test_prec_examples():
    ok, m = prec(CylinderSet.of("00"), CylinderSet.of("1"))
    assert ok and m.dom().to_json() == ["00"] and m.rng().to_json() == ["10"]
    ok, cert = prec(CylinderSet.of("0"), CylinderSet.of("10"))
    assert not ok and cert == {"kraft_A": "1/2", "kraft_B": "1/4"}
    A = canonicalize(["01", "110"])
    ok, m = prec(A, A)
    assert ok and m.dom() == A and m.rng() == A


def test_equidecompose_exact_example():
    r = equidecompose_onto(CylinderSet.of("0"), CylinderSet.of("1"), L23, Fraction(1, 8))
    assert r.map.pairs == (("0", "1"),) and r.rounds == 0


def test_equidecompose_twentieth():
    A, B = CylinderSet.of("0"), CylinderSet.of("10")
    eps = Fraction(1, 20)
    r = equidecompose_onto(A, B, L23, eps)
    assert r.map.rng() == B and not r.uncovered_rng
    assert union(r.map.dom(), r.uncovered_dom) == A
    left = independent_mass(r.uncovered_dom, L23)
    assert left == r.masses[-1] <= eps
    assert list(r.masses) == sorted(r.masses, reverse=True)


def test_equidecompose_obstruction():
    with pytest.raises(ObstructionError, match="invariant-measure obstruction"):
        equidecompose_onto(CylinderSet.of("0"), CylinderSet.of("10"), Fraction(1, 2), Fraction(1, 8))


def test_equidecompose_limits():
    A, B = CylinderSet.of("0"), CylinderSet.of("10")
    with pytest.raises(BudgetError):
        equidecompose_onto(A, B, L23, Fraction(1, 32))
    with pytest.raises(DepthError):
        equidecompose_onto(A, B, L23, Fraction(1, 128))


@given(nonempty_sets(), nonempty_sets(), st.sampled_from([Fraction(2, 3), Fraction(1, 3), Fraction(3, 4)]))
def test_equidecompose_contract(A, B, lam):
    try:
        r = equidecompose_onto(A, B, lam, Fraction(1, 4), max_leaves=1 << 12)
    except (BudgetError, DepthError):
        assume(False)
    assert union(r.map.dom(), r.uncovered_dom) == A
    assert union(r.map.rng(), r.uncovered_rng) == B
    assert kraft(r.map.dom()) == kraft(r.map.rng())
    assert (not r.uncovered_dom and not r.uncovered_rng) == (kraft(A) == kraft(B))
    left = mu(r.uncovered_dom, lam) + mu(r.uncovered_rng, lam)
    assert left <= Fraction(1, 4)
    if r.masses:
        assert left == r.masses[-1]
    assert EquidecompResult.from_json(r.to_json()) == r


@given(nonempty_sets(), st.integers(0, 6), lambdas)
def test_lightest_mass_matches_sorting(H, extra, lam):
    level = H.depth + extra
    n = int(kraft(H) * (1 << level))
    for surplus in {0, n // 3, n // 2, n}:
        assert lightest_mass(H, surplus, level, lam) == brute_lightest(H, surplus, level, lam)


def test_leftover_obeys_chernoff_envelope():
    # the leftover is the lightest half of the space; the exact decay rate
    # is 2*sqrt(lam*(1 - lam)), compared here in squared form
    lam = L23
    for L, m, _ in geometric_envelope(levels=range(1, 41)):
        assert m * m <= (4 * lam * (1 - lam)) ** L


def test_leftover_is_not_dominated_by_two_thirds_ratio():
    rows = geometric_envelope()
    assert any(m > env for _, m, env in rows)


def test_pre_three_cycle_canonical():
    phi, psi = pre_three_cycle()
    assert phi.pairs == (("00", "01"),) and psi.pairs == (("01", "10"),)
    assert pre_three_cycle_violations(phi, psi, L23) == []
    assert mu(union(phi.dom(), phi.rng()), L23) == Fraction(2, 3)
    assert psi.dom() == phi.rng()


def test_three_cycle_canonical():
    C = three_cycle(*pre_three_cycle())
    assert C.pairs == (("00", "01"), ("01", "10"), ("10", "00"), ("11", "11"))
    assert compose(C, compose(C, C)) == IDENTITY
    assert mu(support(C), L23) == Fraction(8, 9)
    rn = dict(rn_cocycle(C, L23))
    assert (rn["00"], rn["01"], rn["10"]) == (Fraction(1, 2), 1, 2)
    assert rn["00"] * rn["01"] * rn["10"] == 1


def test_three_cycle_rejects_bad_input():
    with pytest.raises(DomainError):
        three_cycle(TableMap.of([("0", "1")]), TableMap.of([("1", "0")]))
