from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pbpsamp.bp import (
    BranchingProgram,
    accept_prob_exact,
    accepts,
    check_permutation,
    parity_program,
    random_permutation_program,
    truth_mask,
)
from pbpsamp.graphs import graph_to_bp, random_consistent_graph
from pbpsamp.hitprog import (
    build_hit_program,
    eval_hit_blackbox,
    hit_approx_error,
    hit_query_closure,
    hit_states,
    hit_states_bruteforce,
    restriction_masks,
    single_accept_restrictions,
    verify_hitter_on_restrictions,
    width_bound,
)
from pbpsamp.oracle import OracleSession, PlanViolation
from pbpsamp.samplers import QuerySet, random_query_set
from pbpsamp.words import all_words

from conftest import program_and_hitter, query_sets


def test_width_bound_formula():
    assert width_bound(1, 0, 1) == 2
    assert width_bound(4, 6, 1) == 32
    assert width_bound(3, 4, 2) == 36


def test_full_cube_preserves_function(rng):
    B = random_permutation_program(5, 6, 2, rng, a=2)
    hp = build_hit_program(B, QuerySet.full_cube(5))
    assert truth_mask(hp.explicit_bp) == truth_mask(B)
    assert hit_approx_error(B, QuerySet.full_cube(5), hp) == 0


def test_parity_with_zero_hitter_is_all_zero():
    B = parity_program(4)
    H = QuerySet.of(["0000"], 4)
    assert hit_states(B, H) == tuple(frozenset({1}) for _ in range(5))
    hp = build_hit_program(B, H)
    assert not hp.start_kept
    assert accept_prob_exact(hp.explicit_bp) == 0
    assert hit_approx_error(B, H) == Fraction(1, 2)
    assert all(eval_hit_blackbox(OracleSession(B), H, x) == 0 for x in all_words(4))


def test_graph_instance_width():
    G = random_consistent_graph(32, 2, 17)
    B = graph_to_bp(G, 3, 5, 6)
    H = random_query_set(6, 2, 4, 8)
    assert len(H) <= 4
    hp = build_hit_program(B, H)
    assert hp.width <= width_bound(len(H), 6, 1) <= 32
    assert check_permutation(hp.explicit_bp)


def test_rejects_bad_inputs(rng):
    B = random_permutation_program(3, 3, 2, rng)
    with pytest.raises(ValueError):
        build_hit_program(B, QuerySet(3, 2, ()))
    general = BranchingProgram(1, 2, (2, 2), (((0, 0), (0, 1)),), 0, frozenset({0}))
    with pytest.raises(ValueError):
        build_hit_program(general, QuerySet.of(["0"], 1))
    with pytest.raises(ValueError):
        eval_hit_blackbox(OracleSession(B), QuerySet(3, 2, ()), (0, 0, 0))


def test_state_map_csv(rng):
    B = random_permutation_program(2, 3, 2, rng)
    hp = build_hit_program(B, QuerySet.of(["00", "11"], 2))
    lines = hp.state_map_csv().splitlines()
    assert lines[0] == "bh_index,kind,layer,original"
    assert len(lines) == 1 + 3 * hp.width


def test_planned_blackbox_queries_whole_closure(rng):
    B = random_permutation_program(4, 4, 2, rng)
    H = QuerySet.of(["0000", "1010"], 4)
    x = (1, 1, 0, 0)
    closure = hit_query_closure(H, x)
    s = OracleSession(B, plan=closure)
    eval_hit_blackbox(s, H, x)
    assert set(s.distinct_queries()) == set(closure)
    s = OracleSession(B, plan=closure[:-1])
    with pytest.raises(PlanViolation):
        eval_hit_blackbox(s, H, x)


def test_restrictions_are_prefix_programs(rng):
    B = random_permutation_program(3, 3, 2, rng, a=2)
    for (i, v, u), P in single_accept_restrictions(B):
        for x in all_words(3):
            end = v
            for r, c in enumerate(x[: 3 - i]):
                end = B.transitions[i + r][end][c]
            assert accepts(P, x) == int(end == u)
    delta = Fraction(1, 8)
    masks = dict(restriction_masks(B, delta))
    for key, P in single_accept_restrictions(B):
        heavy = accept_prob_exact(P).value > delta
        assert (key in masks) == heavy
        if heavy:
            assert masks[key] == truth_mask(P)


@given(program_and_hitter(max_n=7, max_w=8, max_h=8))
def test_blackbox_matches_explicit(pair):
    B, H = pair
    hp = build_hit_program(B, H)
    for x in all_words(B.n):
        assert eval_hit_blackbox(OracleSession(B), H, x) == accepts(hp.explicit_bp, x)


@given(program_and_hitter(max_n=6, max_w=8, max_a=3, max_h=8))
def test_construction_laws(pair):
    B, H = pair
    hp = build_hit_program(B, H)
    assert hit_states(B, H) == hit_states_bruteforce(B, H)
    assert hp.width_law_holds()
    assert check_permutation(hp.explicit_bp)
    assert B.accept <= hp.hit_states[-1]
    # one-sided: B_H accepts only inputs B accepts
    assert truth_mask(hp.explicit_bp) & ~truth_mask(B) == 0


@given(program_and_hitter(max_n=5, max_w=6, max_h=5), st.data())
def test_hit_states_monotone(pair, data):
    B, H = pair
    extra = data.draw(query_sets(B.n, 4))
    bigger = QuerySet(B.n, 2, H.strings + extra.strings)
    for small, large in zip(hit_states(B, H), hit_states(B, bigger)):
        assert small <= large


@given(program_and_hitter(max_n=6, max_w=6, max_h=8), st.sampled_from([Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]))
def test_restriction_hitter_implies_approximation(pair, delta):
    B, H = pair
    if verify_hitter_on_restrictions(H, B, delta / (B.n * B.a or 1)):
        assert hit_approx_error(B, H) <= delta
