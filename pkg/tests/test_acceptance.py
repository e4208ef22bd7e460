"""End-to-end acceptance criteria, each at its stated scale and exact tolerance.

Every test prints one ``[criterion N] PASS|FAIL`` line (visible with ``-s`` or
in the summary written by the final test).
"""

from fractions import Fraction

import pytest

from pbpsamp import checks
from pbpsamp.family import FamilySpec
from pbpsamp.samplers import averaging_sampler, random_query_set, verify_sampler
from pbpsamp.scenario import run_scenario

RESULTS: dict[int, tuple[bool, str]] = {}
WIDTH_LAW: list[checks.CheckResult] = []


def record(criterion: int, ok: bool, detail: str, capsys) -> None:
    RESULTS[criterion] = (ok, detail)
    with capsys.disabled():
        print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def corpus_report():
    return run_scenario("corpus")


def test_c1_oracle_equivalence(capsys):
    eq, wl = checks.oracle_equivalence(trials=200, max_vertices=16, max_n=8, max_h=8, seed=101)
    WIDTH_LAW.append(wl)
    record(1, eq.passed and eq.checked >= 200,
           f"{eq.checked} pairs, {eq.detail['inputs']} inputs, {eq.violations} mismatching pairs", capsys)


def test_c3_injectivity(capsys):
    ex = checks.injectivity_exhaustive(max_n=4, max_w=3)
    rnd = checks.injectivity_random(count=100, seed=103)
    record(3, ex.passed and rnd.passed,
           f"exhaustive {ex.detail['programs']} programs / {ex.checked} checks, "
           f"random 100 programs / {rnd.checked} checks, {ex.violations + rnd.violations} violations", capsys)


def test_c4_approximation_law(capsys):
    approx, onesided, wl = checks.approximation_law(
        families=((3, 2, 2), (4, 2, 2), (6, 2, 1), (3, 3, 2), (5, 3, 1), (6, 3, 1)),
        delta=Fraction(1, 2), corpus_per_family=200, random_hitters=6, seed=104,
    )
    WIDTH_LAW.append(wl)
    approx_b, onesided_b, wl_b = checks.approximation_law(
        families=((4, 2, 1), (3, 3, 1)), delta=Fraction(1, 4), random_hitters=6, seed=1040,
    )
    WIDTH_LAW.append(wl_b)
    approx_c, onesided_c, wl_c = checks.approximation_law(
        families=((3, 3, 1), (4, 3, 1)), delta=Fraction(3, 4), random_hitters=6, seed=1041,
    )
    WIDTH_LAW.append(wl_c)
    runs = (approx, approx_b, approx_c)
    ok = all(r.passed for r in runs + (onesided, onesided_b, onesided_c))
    hitters = sum(r.detail["hitters"] for r in runs)
    worst = max(Fraction(r.detail["max_error"]) for r in runs)
    control = max(Fraction(r.detail["max_error_unverified"]) for r in runs)
    record(4, ok and hitters > 0,
           f"{hitters} verified hitters, {sum(r.checked for r in runs)} programs, "
           f"{sum(r.violations for r in runs)} approximation and "
           f"{sum(r.violations for r in (onesided, onesided_b, onesided_c))} one-sidedness violations; "
           f"max error {worst} (unverified-hitter control {control})", capsys)


def test_c5_end_to_end(corpus_report, capsys):
    rows = corpus_report.rows
    eps = Fraction(1, 4)
    max_err = max(Fraction(r["error"]) for r in rows)
    desk_verified = all(r["gate_hitter"] and r["gate_inner"] for r in rows)
    queries = all(r["b_queries"] <= r["accounting_bound"] for r in rows)
    plans = all(r["gate_plan"] for r in rows)
    sizes = {r["vertices"] for r in rows}
    ns = {r["n"] for r in rows}
    WIDTH_LAW.append(checks.CheckResult("width-law-corpus", len(rows), sum(not r["gate_width"] for r in rows)))
    ok = len(rows) >= 50 and max(sizes) <= 256 and ns <= set(range(4, 9)) and desk_verified
    ok = ok and max_err <= eps and queries and plans
    record(5, ok,
           f"{len(rows)} graphs, |V| {min(sizes)}..{max(sizes)}, n {sorted(ns)}, max error {max_err} "
           f"(eps {eps}), queries within bound: {queries}, plans respected: {plans}", capsys)


def test_c2_width_law(capsys):
    # runs after the suites above have contributed their constructions
    suites = list(WIDTH_LAW)
    eq, wl = checks.oracle_equivalence(trials=50, max_a=3, seed=102)
    suites.append(wl)
    total = sum(s.checked for s in suites)
    bad = sum(s.violations for s in suites)
    record(2, bad == 0 and total > 0, f"{total} constructions over {len(suites)} suites, {bad} violations", capsys)


def test_c6_sampler_implies_hitter(capsys):
    eps = Fraction(1, 4)
    checked = violations = 0
    for n, w in ((2, 2), (3, 2), (4, 2), (2, 3), (3, 3)):
        fam = FamilySpec(n, w, 2, True, "all", "all")
        battery = [averaging_sampler(random_query_set(n, 2, s, seed)) for s in (2, 4, 8, 16, 32) for seed in range(6)]
        battery.append(checks.adaptive_sampler(random_query_set(n, 2, 3, 1), random_query_set(n, 2, 12, 2)))
        res = checks.sampler_implies_hitter(battery, fam, eps)
        checked += res.checked
        violations += res.violations
    cons = checks.sampler_adversary_consistency(
        [averaging_sampler(random_query_set(n, 2, k, 10 * n + k)) for n in (4, 6, 8, 10) for k in (2, 6, 18)],
        Fraction(1, 8),
    )
    record(6, violations == 0 and checked > 0 and cons.passed,
           f"{checked} verified samplers, {violations} hitter failures at 2eps; "
           f"adversary consistency {cons.checked} witnesses, {cons.violations} violations", capsys)


def test_c7_adversaries(capsys):
    par = checks.adversary_completeness(trials=1000, max_n=12, seed=107)
    pre, match = checks.prefix_adversaries(trials=300, max_n=10, seed=108)
    ok = par.passed and pre.passed and match.passed and pre.detail["fired"] > 0 and match.detail["fired"] > 0
    record(7, ok,
           f"parity {par.checked} hitters / {par.violations} failures; prefix fired {pre.detail['fired']} "
           f"/ {pre.violations} failures; prefix-match fired {match.detail['fired']} / {match.violations} failures",
           capsys)


def test_c8_size_law(capsys):
    res = checks.size_law(sizes=(2, 4, 8, 16, 32, 64), seeds=100, epsilon=Fraction(1, 4))
    rates = [res["rates"][s] for s in sorted(res["rates"])]
    monotone = all(a >= b for a, b in zip(rates, rates[1:]))
    small = [s for s in res["passing"] if s <= 64]
    exhaustive = bool(small) and verify_sampler(res["passing"][min(small)], res["family"], Fraction(1, 4)).exhaustive
    record(8, monotone and bool(small) and exhaustive,
           "failure rates " + ", ".join(f"{s}:{r}" for s, r in sorted(res["rates"].items()))
           + f"; smallest passing size {min(small) if small else None} (exhaustive: {exhaustive})", capsys)


def test_c9_exactness_and_reproducibility(corpus_report, capsys):
    ex = checks.exactness(count=60, max_n=14, seed=109)
    again = run_scenario("corpus")
    same_csv = again.to_csv() == corpus_report.to_csv()
    same_json = again.to_json() == corpus_report.to_json()
    cyc = run_scenario("cycle4").to_csv() == run_scenario("cycle4").to_csv()
    record(9, ex.passed and same_csv and same_json and cyc,
           f"{ex.checked} programs (n up to 14) DP vs enumeration, {ex.violations} mismatches; "
           f"corpus rerun byte-identical CSV {same_csv}, JSON {same_json}; cycle4 {cyc}", capsys)


def test_zz_summary(capsys):
    with capsys.disabled():
        print("\nacceptance summary")
        for c in range(1, 10):
            ok, detail = RESULTS.get(c, (False, "not run"))
            print(f"  [criterion {c}] {'PASS' if ok else 'FAIL'}")
    assert len(RESULTS) == 9 and all(ok for ok, _ in RESULTS.values())
