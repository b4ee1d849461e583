import random

import pytest
from hypothesis import strategies as st

from plurality_ne import Election, PrincipledProfile

ACCEPTANCE_LINES = []


def random_election(rng, n_range=(1, 5), m_range=(1, 4), hi=100):
    n = rng.randint(*n_range)
    m = rng.randint(*m_range)
    return Election(tuple(tuple(rng.sample(range(1, max(hi, m) + 1), m)) for _ in range(n)))


def random_principled(rng, m, s):
    return PrincipledProfile(tuple(tuple(rng.sample(range(m), m)) for _ in range(s)))


@st.composite
def elections(draw, max_n=4, max_m=4, hi=100):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    hi = max(hi, m)
    utils = tuple(
        tuple(draw(st.lists(st.integers(1, hi), min_size=m, max_size=m, unique=True)))
        for _ in range(n)
    )
    return Election(utils)


@st.composite
def principled_profiles(draw, m, max_s=2):
    s = draw(st.integers(0, max_s))
    return PrincipledProfile(tuple(tuple(draw(st.permutations(range(m)))) for _ in range(s)))


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
