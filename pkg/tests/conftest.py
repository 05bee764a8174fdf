from fractions import Fraction

from hypothesis import settings, strategies as st

from fullgroup.maps import LeafPerm, from_leaf_perm

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

LAMBDAS = [Fraction(1, 2), Fraction(2, 3), Fraction(1, 3), Fraction(3, 4)]

words = st.text(alphabet="01", max_size=5)
word_lists = st.lists(words, max_size=6)
lambdas = st.sampled_from(LAMBDAS)


@st.composite
def leaf_perms(draw, max_level=4, level=None):
    if level is None:
        level = draw(st.integers(0, max_level))
    perm = draw(st.permutations(range(1 << level)))
    return LeafPerm(level, tuple(perm))


@st.composite
def full_maps(draw, max_level=4):
    return from_leaf_perm(draw(leaf_perms(max_level)))


@st.composite
def tuples_at(draw, max_level=3, max_n=2):
    level = draw(st.integers(0, max_level))
    n = draw(st.integers(1, max_n))
    return [draw(leaf_perms(level=level)) for _ in range(n)]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
