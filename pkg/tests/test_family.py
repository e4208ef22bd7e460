from fractions import Fraction

import pytest

from pbpsamp.bp import truth_mask
from pbpsamp.family import (
    BUDGET_ENV,
    BudgetExceeded,
    FamilySpec,
    distinct_functions,
    enumerate_family,
    enumeration_budget,
    family_size,
    family_tables_array,
)


def test_counts_with_fixed_endpoints():
    one = FamilySpec(1, 2, 2, True, (0,), [(0,)])
    two = FamilySpec(2, 2, 2, True, (0,), [(0,)])
    triv = FamilySpec(1, 1, 2, True, (0,), [(0,)])
    assert len(list(enumerate_family(one))) == 4
    assert len(list(enumerate_family(two))) == 16
    assert len(list(enumerate_family(triv))) == 1
    assert family_size(two) == 16


def test_enumeration_unique_and_ordered():
    spec = FamilySpec(2, 2, 2, True, "all", "all")
    progs = list(enumerate_family(spec))
    assert len(progs) == family_size(spec) == 16 * 2 * 3
    assert len(set(progs)) == len(progs)
    flat = [tuple(t for layer in B.transitions for row in layer for t in row) for B in progs[::6]]
    assert flat == sorted(flat)


def test_general_family_count():
    spec = FamilySpec(1, 2, 2, False, (0,), [(0,)])
    assert family_size(spec) == 2**4
    assert len(list(enumerate_family(spec))) == 16


def test_budget_error_carries_size():
    spec = FamilySpec(4, 3, 2, True)
    with pytest.raises(BudgetExceeded) as info:
        list(enumerate_family(spec, budget=100))
    assert info.value.size == family_size(spec)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv(BUDGET_ENV, "7")
    assert enumeration_budget() == 7
    with pytest.raises(BudgetExceeded):
        family_tables_array(FamilySpec(2, 2, 2, True))


@pytest.mark.parametrize("spec", [
    FamilySpec(3, 2, 2, True, "all", "all"),
    FamilySpec(2, 3, 2, True, "all", 1),
    FamilySpec(2, 2, 2, False, "all", "all"),
    FamilySpec(3, 3, 2, True, (0,), 2),
])
def test_distinct_functions_match_enumeration(spec):
    expected = {truth_mask(B) for B in enumerate_family(spec)}
    got = distinct_functions(spec)
    assert {f.mask for f in got} == expected
    for f in got:
        assert truth_mask(f.program) == f.mask


def test_tables_array_matches_stream():
    spec = FamilySpec(2, 2, 2, True, (0,), [(0,)])
    arr = family_tables_array(spec)
    progs = list(enumerate_family(spec))
    assert arr.shape == (16, 2, 2, 2)
    for row, B in zip(arr, progs):
        assert row.tolist() == [list(map(list, layer)) for layer in B.transitions]
