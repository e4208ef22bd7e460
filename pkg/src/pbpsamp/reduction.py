"""Samplers for unbounded-width permutation programs from bounded-width ones.

The inner sampler never sees ``B``: each of its queries ``x`` is answered by
evaluating the induced hit program ``B_H(x)`` through ``B``'s oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Union

from .hitprog import eval_hit_blackbox, hit_query_closure, width_bound
from .oracle import OracleSession
from .samplers import QuerySet, SamplerSpec, averaging_sampler, random_query_set, read_query_set

InnerFactory = Callable[[int, int, Fraction, int], SamplerSpec]


@dataclass(frozen=True)
class ParameterSchedule:
    n: int
    a: int
    epsilon: Fraction
    c: Fraction
    delta_hit: Fraction
    w_hit: int
    eps_inner: Fraction
    delta_budget: Fraction
    hitter_size: Optional[int] = None
    w_inner: Optional[int] = None
    envelope_exponent: int = 4

    @property
    def delta_unbounded(self) -> Fraction:
        """Hitter quality the approximation step needs: ``delta_budget / (n a)``."""
        return self.delta_budget / (self.n * self.a)

    def with_hitter(self, size: int) -> "ParameterSchedule":
        return replace(self, hitter_size=size, w_inner=width_bound(size, self.n, self.a))

    def envelope(self) -> Fraction:
        """Polynomial query envelope ``(n a / eps) ** envelope_exponent``."""
        return (self.n * self.a / self.epsilon) ** self.envelope_exponent

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "epsilon": str(self.epsilon),
            "c": str(self.c),
            "delta_hit": str(self.delta_hit),
            "w_hit": self.w_hit,
            "eps_inner": str(self.eps_inner),
            "delta_budget": str(self.delta_budget),
            "delta_unbounded": str(self.delta_unbounded),
            "hitter_size": self.hitter_size,
            "w_inner": self.w_inner,
            "envelope_exponent": self.envelope_exponent,
        }


def build_schedule(n: int, a: int, epsilon, c=1, envelope_exponent: int = 4) -> ParameterSchedule:
    """Derived parameters: hitter quality ``eps/(4na)``; hitter width
    ``c * ceil(n^2 * 8na / eps)`` (the bounded-width hitter handoff with
    ``delta = eps/(8na)``); inner error ``eps/2``; approximation budget ``eps/2``."""
    eps, c = Fraction(epsilon), Fraction(c)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    if a < 1 or n < 1:
        raise ValueError("need n >= 1 and a >= 1")
    if c <= 0:
        raise ValueError("the constant c must be positive")
    base = math.ceil(Fraction(n * n * 8 * n * a) / eps)
    sched = ParameterSchedule(
        n=n,
        a=a,
        epsilon=eps,
        c=c,
        delta_hit=eps / (4 * n * a),
        w_hit=math.ceil(c * base),
        eps_inner=eps / 2,
        delta_budget=eps / 2,
        envelope_exponent=envelope_exponent,
    )
    assert sched.eps_inner + sched.delta_budget <= sched.epsilon
    return sched


def query_accounting(inner_count: int, n: int, h: int) -> int:
    return inner_count * (n + 1) * h


# -- inner sampler factories --------------------------------------------------


def full_cube_factory(n: int, w: int, eps, d: int = 2) -> SamplerSpec:
    """Exact (0-error) averaging sampler over all of [d]^n."""
    return averaging_sampler(QuerySet.full_cube(n, d), 0, w)


def random_set_factory(size: int, seed: int) -> InnerFactory:
    def make(n: int, w: int, eps, d: int = 2) -> SamplerSpec:
        return averaging_sampler(random_query_set(n, d, size, seed), eps, w)

    return make


def plan_file_factory(path) -> InnerFactory:
    def make(n: int, w: int, eps, d: int = 2) -> SamplerSpec:
        Q = read_query_set(path, n, d)
        if Q.n != n:
            raise ValueError(f"plan file holds strings of length {Q.n}, expected {n}")
        return averaging_sampler(Q, eps, w)

    return make


# -- the sampler ----------------------------------------------------------------


@dataclass(frozen=True)
class SampleResult:
    estimate: Fraction
    clamped: bool
    inner_queries: int
    b_queries: int
    accounting_bound: int
    hitter_size: int
    planned: Optional[int]


def b_query_plan(H: QuerySet, inner_plan: QuerySet) -> list:
    out: dict = {}
    for x in inner_plan:
        for q in hit_query_closure(H, x):
            out.setdefault(q, None)
    return list(out)


def run_reduction(session: OracleSession, H: QuerySet, inner: SamplerSpec) -> SampleResult:
    """Run ``inner`` against ``x -> B_H(x)``, answering through ``session``.

    A nonadaptive inner sampler has its full ``B``-query plan registered on
    ``session`` before the first query.
    """
    n, d = session.n, session.d
    if (H.n, H.d) != (n, d):
        raise ValueError("hitter and oracle disagree on n or d")
    planned = None
    if inner.plan is not None:
        plan = b_query_plan(H, inner.plan)
        session.declare_plan(plan)
        planned = len(plan)
    virtual = OracleSession(lambda x: eval_hit_blackbox(session, H, x), n, d, plan=inner.plan)
    raw = Fraction(inner.run(virtual))
    est = min(max(raw, Fraction(0)), Fraction(1))
    inner_count = virtual.distinct_query_count()
    return SampleResult(
        estimate=est,
        clamped=est != raw,
        inner_queries=inner_count,
        b_queries=session.distinct_query_count(),
        accounting_bound=query_accounting(inner_count, n, len(H)),
        hitter_size=len(H),
        planned=planned,
    )


def unbounded_sampler(
    session: OracleSession,
    a: int,
    epsilon,
    inner_factory: InnerFactory,
    hitter: Union[QuerySet, Callable[[ParameterSchedule], QuerySet]],
    c=1,
) -> SampleResult:
    """Estimate ``Pr[B = 1]`` for a black-box permutation program with at most
    ``a`` accept states: build the schedule, obtain ``H``, size the inner
    sampler for width ``|H| (n+2) a`` and error ``eps/2``, and run it on ``B_H``."""
    sched = build_schedule(session.n, a, epsilon, c)
    H = hitter if isinstance(hitter, QuerySet) else hitter(sched)
    sched = sched.with_hitter(len(H))
    inner = inner_factory(session.n, sched.w_inner, sched.eps_inner, session.d)
    return run_reduction(session, H, inner)
