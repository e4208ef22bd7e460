import pytest
from hypothesis import given, strategies as st

from pbpsamp.bp import parity_program, random_permutation_program
from pbpsamp.oracle import OracleSession, PlanViolation, distinct_query_count, zero_oracle
from pbpsamp.samplers import averaging_estimate, random_query_set


def test_zero_oracle_answers_zero():
    s = zero_oracle(3)
    assert s.query((1, 0, 1)) == 0


def test_plan_violation():
    s = OracleSession(parity_program(3), plan=[(0, 0, 0)])
    assert s.query((0, 0, 0)) == 0
    with pytest.raises(PlanViolation):
        s.query((0, 0, 1))


def test_parity_query():
    assert OracleSession(parity_program(3)).query((1, 0, 0)) == 1


def test_distinct_counting():
    s = zero_oracle(3)
    assert distinct_query_count(s) == 0
    for x in [(0, 0, 0), (0, 0, 0), (1, 1, 1)]:
        s(x)
    assert distinct_query_count(s) == 2
    assert len(s.log) == 3
    assert s.export_queries() == "000\n111\n"
    assert s.export_csv() == "query,answer\n000,0\n111,0\n"


def test_full_plan_count():
    plan = [(0, 1), (1, 1), (1, 0)]
    s = zero_oracle(2, plan=plan)
    for x in plan:
        s(x)
    assert s.distinct_query_count() == 3


def test_wrong_length_and_late_plan():
    s = zero_oracle(3)
    with pytest.raises(ValueError):
        s.query((0, 1))
    s.query((0, 1, 1))
    with pytest.raises(RuntimeError):
        s.declare_plan([(0, 0, 0)])


@given(st.integers(1, 8), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_nonadaptive_replay_same_queries(n, size, seed):
    import random

    Q = random_query_set(n, 2, size, seed)
    rng = random.Random(seed)
    one = OracleSession(random_permutation_program(n, 4, 2, rng), plan=Q)
    two = OracleSession(random_permutation_program(n, 5, 2, rng, a=2), plan=Q)
    averaging_estimate(Q, one)
    averaging_estimate(Q, two)
    assert one.distinct_queries() == two.distinct_queries() == list(Q)


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1)), max_size=20))
def test_count_monotone_and_bounded(queries):
    plan = {(0, 0, 0), (0, 1, 0), (1, 1, 1), (1, 0, 1)}
    s = zero_oracle(3, plan=plan)
    last = 0
    for x in queries:
        try:
            s(x)
        except PlanViolation:
            assert x not in plan
        assert last <= s.distinct_query_count() <= len(plan)
        last = s.distinct_query_count()
