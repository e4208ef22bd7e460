import random

import pytest
from hypothesis import settings, strategies as st

from pbpsamp.bp import random_permutation_program
from pbpsamp.samplers import QuerySet

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def perm_programs(draw, max_n=6, max_w=5, max_a=2):
    n = draw(st.integers(0, max_n))
    w = draw(st.integers(1, max_w))
    a = draw(st.integers(1, min(max_a, w)))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_permutation_program(n, w, 2, random.Random(seed), a=a)


@st.composite
def query_sets(draw, n, max_size=8):
    strings = draw(st.lists(st.tuples(*[st.integers(0, 1)] * n), min_size=1, max_size=max_size))
    return QuerySet.of(strings, n, 2)


@st.composite
def program_and_hitter(draw, max_n=6, max_w=6, max_a=2, max_h=6):
    B = draw(perm_programs(max_n, max_w, max_a))
    H = draw(query_sets(B.n, max_h))
    return B, H


@pytest.fixture
def rng():
    return random.Random(1234)
