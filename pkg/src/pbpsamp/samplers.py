"""Deterministic averaging samplers, hitters, and exhaustive verification.

A sampler is any object with ``run(session) -> Fraction``; samplers that
also carry a ``plan`` query set are nonadaptive.  Families are either a
:class:`~pbpsamp.family.FamilySpec` (checked through its distinct truth
tables) or an explicit sequence of programs (checked by exact DP).
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .bp import BranchingProgram, accept_prob_exact, accepts, truth_mask
from .family import BudgetExceeded, FamilySpec, distinct_functions, enumeration_budget, random_member
from .oracle import OracleSession, zero_oracle
from .words import Word, all_words, check_word, format_word, index_word, parse_word, words_mask

Family = Union[FamilySpec, Sequence[BranchingProgram]]


@dataclass(frozen=True)
class QuerySet:
    """Distinct length-``n`` strings over [d], in first-seen order."""

    n: int
    d: int
    strings: tuple[Word, ...]
    raw_draws: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        seen = dict.fromkeys(check_word(x, self.d, self.n) for x in self.strings)
        object.__setattr__(self, "strings", tuple(seen))

    @classmethod
    def of(cls, strings: Iterable, n: int | None = None, d: int = 2) -> "QuerySet":
        words = [parse_word(x, d) if isinstance(x, str) else tuple(x) for x in strings]
        if n is None:
            if not words:
                raise ValueError("n is needed for an empty query set")
            n = len(words[0])
        return cls(n, d, tuple(words))

    @classmethod
    def full_cube(cls, n: int, d: int = 2) -> "QuerySet":
        return cls(n, d, tuple(all_words(n, d)))

    def __len__(self):
        return len(self.strings)

    def __iter__(self):
        return iter(self.strings)

    def __contains__(self, x):
        return tuple(x) in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.strings)

    @cached_property
    def mask(self) -> int:
        return words_mask(self.strings, self.d)

    def digest(self) -> str:
        text = "\n".join(sorted(format_word(x, self.d) for x in self.strings))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def write_query_set(path, Q: QuerySet, kind: str = "hitter", epsilon=None, provenance=None) -> None:
    path = Path(path)
    path.write_text("".join(format_word(x, Q.d) + "\n" for x in Q))
    meta = {
        "n": Q.n,
        "d": Q.d,
        "kind": kind,
        "epsilon": None if epsilon is None else str(Fraction(epsilon)),
        "provenance": provenance or {},
    }
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_query_set(path, n: int | None = None, d: int | None = None) -> QuerySet:
    path = Path(path)
    sidecar = Path(str(path) + ".json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        n = meta["n"] if n is None else n
        d = meta["d"] if d is None else d
    d = 2 if d is None else d
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    return QuerySet.of(lines, n, d)


@dataclass
class SamplerSpec:
    """An averaging sampler over ``query_plan``, or a plugin callable."""

    kind: str
    query_plan: Optional[QuerySet] = None
    epsilon: Fraction = Fraction(0)
    n: int = 0
    w: int = 0
    d: int = 2
    fn: Optional[Callable[[OracleSession], Fraction]] = None
    plan_declared: Optional[QuerySet] = None

    def __post_init__(self):
        if self.kind not in ("averaging", "plugin"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.kind == "averaging" and self.query_plan is None:
            raise ValueError("an averaging sampler needs a query plan")
        if self.kind == "plugin" and self.fn is None:
            raise ValueError("a plugin sampler needs a callable")
        self.epsilon = Fraction(self.epsilon)

    @property
    def plan(self) -> Optional[QuerySet]:
        """The fixed query set when nonadaptive, else None."""
        return self.query_plan if self.kind == "averaging" else self.plan_declared

    def run(self, session: OracleSession) -> Fraction:
        if self.kind == "averaging":
            return averaging_estimate(self.query_plan, session)
        return Fraction(self.fn(session))


def averaging_sampler(Q: QuerySet, epsilon=0, w: int = 0) -> SamplerSpec:
    return SamplerSpec("averaging", Q, Fraction(epsilon), Q.n, w, Q.d)


def averaging_estimate(Q: QuerySet, session: OracleSession) -> Fraction:
    if len(Q) == 0:
        raise ValueError("averaging over an empty query set")
    return Fraction(sum(session.query(x) for x in Q), len(Q))


def random_query_set(n: int, d: int, size: int, seed: int) -> QuerySet:
    """``size`` independent uniform draws, deduplicated; ``raw_draws`` keeps the count."""
    if size < 1:
        raise ValueError("size must be at least 1")
    rng = random.Random(seed)
    draws = [tuple(rng.randrange(d) for _ in range(n)) for _ in range(size)]
    return QuerySet(n, d, tuple(draws), raw_draws=size)


# -- sizing helpers for the probabilistic-method construction ----------------


def description_length(n: int, w: int, d: int = 2) -> int:
    """Bits in the canonical binary encoding of a width-``w`` program:
    ``n*w*d*ceil(log2 w)`` table bits plus ``ceil(log2 w)`` for the start and
    ``w`` for the accept bitmask."""
    cell = math.ceil(math.log2(w)) if w > 1 else 0
    return n * w * d * cell + cell + w


def three_k_over_eps(k: int, epsilon) -> int:
    """Query-set size ``ceil(3k/eps)`` used in the existence argument."""
    return math.ceil(3 * k / Fraction(epsilon))


def chernoff_tail(size: int, epsilon) -> float:
    """Standard two-sided additive bound ``2 exp(-size eps^2 / 3)`` for
    Bernoulli means (multiplicative form with ``mu <= 1``)."""
    eps = float(Fraction(epsilon))
    return 2.0 * math.exp(-size * eps * eps / 3.0)


def union_bound_size(k: int, epsilon) -> int:
    """Smallest size whose standard Chernoff tail beats a union over ``2**k`` programs."""
    eps = Fraction(epsilon)
    return math.floor(3 * (k + 1) * math.log(2) / float(eps * eps)) + 1


# -- verification ------------------------------------------------------------


@dataclass
class Verdict:
    ok: bool
    exhaustive: bool
    checked: int
    counterexample: Optional[BranchingProgram] = None
    estimate: Optional[Fraction] = None
    truth: Optional[Fraction] = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    @property
    def coverage(self) -> str:
        return "exhaustive" if self.exhaustive else "sampled"


def family_functions(
    spec: FamilySpec, budget: int | None = None, sample_size: int = 4096, seed: int = 0
) -> tuple[list[tuple[int, BranchingProgram]], bool]:
    """Distinct ``(mask, program)`` pairs and whether they cover the family."""
    try:
        funcs = distinct_functions(spec, budget)
        return [(f.mask, f.program) for f in funcs], True
    except BudgetExceeded:
        rng = random.Random(seed)
        seen: dict[int, BranchingProgram] = {}
        for _ in range(sample_size):
            B = random_member(spec, rng)
            seen.setdefault(truth_mask(B), B)
        return list(seen.items()), False


def _as_sampler(sampler) -> SamplerSpec:
    if isinstance(sampler, QuerySet):
        return averaging_sampler(sampler)
    return sampler


def verify_sampler(
    sampler,
    family: Family,
    epsilon,
    budget: int | None = None,
    sample_size: int = 4096,
    seed: int = 0,
) -> Verdict:
    """Check ``|estimate - Pr[B=1]| <= eps`` for every program of the family."""
    eps = Fraction(epsilon)
    S = _as_sampler(sampler)
    if isinstance(family, FamilySpec):
        funcs, exhaustive = family_functions(family, budget, sample_size, seed)
        cube = family.d**family.n
        qmask = S.plan.mask if S.kind == "averaging" else None
        for checked, (mask, B) in enumerate(funcs, start=1):
            truth = Fraction(mask.bit_count(), cube)
            if qmask is not None:
                est = Fraction((mask & qmask).bit_count(), len(S.plan))
            else:
                est = S.run(OracleSession(B))
            if abs(est - truth) > eps:
                return Verdict(False, exhaustive, checked, B, est, truth)
        return Verdict(True, exhaustive, len(funcs))
    for checked, B in enumerate(family, start=1):
        truth = accept_prob_exact(B).value
        est = S.run(OracleSession(B))
        if abs(est - truth) > eps:
            return Verdict(False, True, checked, B, est, truth)
    return Verdict(True, True, len(family))


def hitter_from_sampler(sampler, n: int | None = None, d: int | None = None) -> QuerySet:
    """Queries the sampler makes on the all-zeroes function."""
    S = _as_sampler(sampler)
    if S.kind == "averaging":
        return S.query_plan
    n = S.n if n is None else n
    d = S.d if d is None else d
    session = zero_oracle(n, d)
    S.run(session)
    return QuerySet(n, d, tuple(session.distinct_queries()))


def verify_hitter(
    H: QuerySet,
    family: Family,
    epsilon,
    budget: int | None = None,
    sample_size: int = 4096,
    seed: int = 0,
) -> Verdict:
    """Every program with ``Pr[B=1] > eps`` must accept some element of ``H``."""
    eps = Fraction(epsilon)
    if isinstance(family, FamilySpec):
        funcs, exhaustive = family_functions(family, budget, sample_size, seed)
        cube = family.d**family.n
        for checked, (mask, B) in enumerate(funcs, start=1):
            truth = Fraction(mask.bit_count(), cube)
            if truth > eps and not mask & H.mask:
                return Verdict(False, exhaustive, checked, B, Fraction(0), truth)
        return Verdict(True, exhaustive, len(funcs))
    for checked, B in enumerate(family, start=1):
        truth = accept_prob_exact(B).value
        if truth > eps and not any(accepts(B, x) for x in H):
            return Verdict(False, True, checked, B, Fraction(0), truth)
    return Verdict(True, True, len(family))


def greedy_hitting_set(masks: Sequence[int], universe: int) -> list[int]:
    """Greedy set cover: indices of inputs hitting every mask (lowest index on ties)."""
    masks = [m for m in dict.fromkeys(masks)]
    if any(m == 0 for m in masks):
        raise ValueError("an empty requirement cannot be hit")
    if not masks:
        return []
    M = np.zeros((len(masks), universe), dtype=bool)
    for r, m in enumerate(masks):
        bits = bin(m)[2:][::-1]
        M[r, : len(bits)] = np.frombuffer(bits.encode(), dtype=np.uint8) == ord("1")
    alive = np.ones(len(masks), dtype=bool)
    chosen = []
    while alive.any():
        counts = M[alive].sum(axis=0)
        j = int(np.argmax(counts))
        chosen.append(j)
        alive &= ~M[:, j]
    return sorted(chosen)


def exact_hitting_set(masks: Sequence[int], universe: int, max_size: int, budget: int) -> Optional[list[int]]:
    """Smallest hitting set of size ``<= max_size`` by lexicographic subset search,
    or None if none exists within that size.  Raises when the search exceeds ``budget``."""
    masks = list(dict.fromkeys(masks))
    if not masks:
        return []
    work = 0
    for k in range(1, max_size + 1):
        work += math.comb(universe, k)
        if work > budget:
            raise BudgetExceeded(work, budget, "exact hitting-set search")
        for combo in combinations(range(universe), k):
            sel = 0
            for j in combo:
                sel |= 1 << j
            if all(m & sel for m in masks):
                return list(combo)
    return None


@dataclass
class HitterSearchResult:
    hitter: QuerySet
    greedy_size: int
    minimal: bool
    requirements: int


def minimal_hitter_search(
    family: Family,
    epsilon,
    size_budget: int = 2**16,
    exact: bool = True,
    budget: int | None = None,
    n: int | None = None,
    d: int | None = None,
) -> HitterSearchResult:
    """Greedy cover of the heavy functions' accepting sets, then (when the
    subset search fits ``size_budget``) an exact search for a smaller set."""
    eps = Fraction(epsilon)
    if isinstance(family, FamilySpec):
        n, d = family.n, family.d
        funcs = distinct_functions(family, budget)
        masks = [f.mask for f in funcs if Fraction(f.ones, d**n) > eps]
    else:
        n = family[0].n if n is None else n
        d = family[0].d if d is None else d
        masks = [truth_mask(B) for B in family if accept_prob_exact(B).value > eps]
    return hitter_from_masks(masks, n, d, size_budget if exact else 0)


def hitter_from_masks(masks: Sequence[int], n: int, d: int, exact_budget: int = 0) -> HitterSearchResult:
    universe = d**n
    greedy = greedy_hitting_set(masks, universe)
    best, minimal = greedy, False
    if exact_budget and len(greedy) > 1:
        try:
            found = exact_hitting_set(masks, universe, len(greedy) - 1, exact_budget)
            minimal = True
            if found is not None:
                best = found
        except BudgetExceeded:
            pass
    elif len(greedy) <= 1:
        minimal = True
    if not best:
        # nothing is heavy: any single string is a hitter
        best = [0]
    H = QuerySet(n, d, tuple(index_word(j, n, d) for j in best))
    return HitterSearchResult(H, len(greedy), minimal, len(set(masks)))
