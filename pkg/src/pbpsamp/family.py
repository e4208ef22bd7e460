"""Finite families of uniform-width programs: exhaustive enumeration and the
distinct functions they compute.

Enumeration order is lexicographic over the flattened transition tables
(layer-major, then state, then symbol); for each table assignment, starts
ascend and accept sets follow ``(size, sorted tuple)`` order.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial
from typing import Iterator, Sequence, Union

import numpy as np

from .bp import BranchingProgram, random_permutation_program, random_program

DEFAULT_BUDGET = 2**20
BUDGET_ENV = "PBPSAMP_ENUM_BUDGET"

AcceptPolicy = Union[str, int, Sequence[Sequence[int]]]


class BudgetExceeded(RuntimeError):
    def __init__(self, size: int, budget: int, what: str = "family"):
        super().__init__(f"{what} size {size} exceeds enumeration budget {budget}")
        self.size = size
        self.budget = budget
        self.module = __name__


def enumeration_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))


@dataclass(frozen=True)
class FamilySpec:
    """Uniform-width length-``n`` programs with an endpoint policy.

    ``starts`` is ``"all"`` or a tuple of start states.  ``accepts`` is
    ``"all"`` (every nonempty subset), an int ``a`` (nonempty subsets of size
    at most ``a``), or an explicit sequence of accept sets.
    """

    n: int
    w: int
    d: int = 2
    permutation_only: bool = True
    starts: Union[str, tuple[int, ...]] = "all"
    accepts: AcceptPolicy = "all"

    def start_list(self) -> list[int]:
        if self.starts == "all":
            return list(range(self.w))
        return [int(s) for s in self.starts]

    def accept_list(self) -> list[frozenset[int]]:
        if isinstance(self.accepts, str):
            if self.accepts != "all":
                raise ValueError(f"unknown accept policy {self.accepts!r}")
            top = self.w
        elif isinstance(self.accepts, int):
            top = min(self.accepts, self.w)
        else:
            return [frozenset(int(s) for s in A) for A in self.accepts]
        return [frozenset(c) for k in range(1, top + 1) for c in combinations(range(self.w), k)]

    def tables_per_layer(self) -> int:
        if self.permutation_only:
            return factorial(self.w) ** self.d
        return self.w ** (self.w * self.d)


def family_size(spec: FamilySpec) -> int:
    return spec.tables_per_layer() ** spec.n * len(spec.start_list()) * len(spec.accept_list())


@lru_cache(maxsize=None)
def layer_tables(w: int, d: int, permutation_only: bool) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All single-layer tables ``[w] x [d] -> [w]`` in lexicographic order."""
    if not permutation_only:
        flat = product(range(w), repeat=w * d)
    else:
        perms = list(permutations(range(w)))
        flat = sorted(
            tuple(cols[sigma][s] for s in range(w) for sigma in range(d))
            for cols in product(perms, repeat=d)
        )
    return tuple(tuple(tuple(f[s * d : (s + 1) * d]) for s in range(w)) for f in flat)


def enumerate_family(spec: FamilySpec, budget: int | None = None) -> Iterator[BranchingProgram]:
    size = family_size(spec)
    budget = enumeration_budget(budget)
    if size > budget:
        raise BudgetExceeded(size, budget)
    return _enumerate(spec)


def _enumerate(spec: FamilySpec) -> Iterator[BranchingProgram]:
    tables = layer_tables(spec.w, spec.d, spec.permutation_only)
    widths = (spec.w,) * (spec.n + 1)
    starts, accepts = spec.start_list(), spec.accept_list()
    for layers in product(tables, repeat=spec.n):
        for s in starts:
            for A in accepts:
                yield BranchingProgram(spec.n, spec.d, widths, layers, s, A)


def family_tables_array(spec: FamilySpec, budget: int | None = None) -> np.ndarray:
    """Every table assignment as an array of shape ``(count, n, w, d)``, in
    enumeration order; endpoints are not expanded."""
    count = spec.tables_per_layer() ** spec.n
    budget = enumeration_budget(budget)
    if count > budget:
        raise BudgetExceeded(count, budget, "table assignment")
    tables = np.array(layer_tables(spec.w, spec.d, spec.permutation_only), dtype=np.int16)
    if spec.n == 0:
        return np.zeros((1, 0, spec.w, spec.d), dtype=np.int16)
    grids = np.indices((len(tables),) * spec.n).reshape(spec.n, -1).T
    return tables[grids]


def random_member(spec: FamilySpec, rng: random.Random) -> BranchingProgram:
    starts, accepts = spec.start_list(), spec.accept_list()
    if spec.permutation_only:
        B = random_permutation_program(spec.n, spec.w, spec.d, rng)
    else:
        B = random_program(spec.n, (spec.w,) * (spec.n + 1), spec.d, rng)
    return B.with_endpoints(rng.choice(starts), rng.choice(accepts))


@dataclass(frozen=True)
class FamilyFunction:
    """A function computed by the family, with its first representative."""

    mask: int
    program: BranchingProgram

    @property
    def ones(self) -> int:
        return self.mask.bit_count()


def _canonical(vec: tuple[int, ...], w: int) -> tuple[tuple[int, ...], list[int]]:
    relabel = [-1] * w
    nxt = 0
    for s in vec:
        if relabel[s] < 0:
            relabel[s] = nxt
            nxt += 1
    for s in range(w):
        if relabel[s] < 0:
            relabel[s] = nxt
            nxt += 1
    return tuple(relabel[s] for s in vec), relabel


def distinct_functions(spec: FamilySpec, budget: int | None = None) -> list[FamilyFunction]:
    """The distinct truth tables of the family, each with a member computing it.

    Works layer by layer on the vector of states reached by every prefix.
    Vectors in layers ``1..n-1`` are reduced modulo state renaming, which the
    next layer's table family absorbs; this keeps the work far below the raw
    family size.  ``budget`` caps the number of vector extensions.
    """
    budget = enumeration_budget(budget)
    tables = layer_tables(spec.w, spec.d, spec.permutation_only)
    d, w, n = spec.d, spec.w, spec.n
    work = 0
    # vector -> (start, layer tables) of the first program producing it
    frontier: dict[tuple[int, ...], tuple[int, tuple]] = {}
    for s in spec.start_list():
        frontier.setdefault((s,), (s, ()))
    for r in range(n):
        last = r == n - 1
        nxt: dict[tuple[int, ...], tuple[int, tuple]] = {}
        for vec, (s0, layers) in frontier.items():
            for T in tables:
                work += 1
                if work > budget:
                    raise BudgetExceeded(work, budget, "function enumeration work")
                raw = tuple(T[v][sigma] for v in vec for sigma in range(d))
                if last:
                    if raw not in nxt:
                        nxt[raw] = (s0, layers + (T,))
                    continue
                canon, rho = _canonical(raw, w)
                if canon not in nxt:
                    renamed = tuple(tuple(rho[t] for t in row) for row in T)
                    nxt[canon] = (s0, layers + (renamed,))
        frontier = nxt
    widths = (w,) * (n + 1)
    seen: dict[int, FamilyFunction] = {}
    accepts = spec.accept_list()
    for vec, (s0, layers) in frontier.items():
        for A in accepts:
            mask = 0
            for idx, v in enumerate(vec):
                if v in A:
                    mask |= 1 << idx
            if mask not in seen:
                seen[mask] = FamilyFunction(mask, BranchingProgram(n, d, widths, layers, s0, A))
    return list(seen.values())
