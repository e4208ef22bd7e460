"""Ordered and permutation branching programs over the alphabet [d].

A program of length ``n`` has layers ``0..n``; ``transitions[r]`` maps layer
``r`` to layer ``r + 1`` and is indexed ``transitions[r][state][symbol]``.
States are 0-based.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, total_ordering
from pathlib import Path
from typing import Iterable, Sequence

from .words import Word, all_words, check_word

Table = tuple[tuple[int, ...], ...]


@total_ordering
@dataclass(frozen=True)
class DyadicProbability:
    """Exact probability ``numerator / base**exponent``."""

    numerator: int
    exponent: int
    base: int = 2

    def __post_init__(self):
        if self.exponent < 0 or self.base < 2:
            raise ValueError("need exponent >= 0 and base >= 2")
        if not 0 <= self.numerator <= self.base**self.exponent:
            raise ValueError(f"{self.numerator}/{self.base}^{self.exponent} is not in [0, 1]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.base**self.exponent)

    def _coerce(self, other):
        if isinstance(other, DyadicProbability):
            return other.value
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.value == o

    def __lt__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.value < o

    def __hash__(self):
        return hash(self.value)

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self.value - o

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else o - self.value

    def __float__(self):
        return float(self.value)

    def __str__(self):
        v = self.value
        return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class PermutationFlag:
    is_permutation: bool
    reason: str = ""

    def __bool__(self):
        return self.is_permutation


@dataclass(frozen=True)
class BranchingProgram:
    """Layered deterministic automaton reading one symbol per layer."""

    n: int
    d: int
    widths: tuple[int, ...]
    transitions: tuple[Table, ...]
    start: int
    accept: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        object.__setattr__(
            self,
            "transitions",
            tuple(tuple(tuple(int(t) for t in row) for row in layer) for layer in self.transitions),
        )
        object.__setattr__(self, "accept", frozenset(int(s) for s in self.accept))
        if self.d < 2:
            raise ValueError("alphabet size d must be at least 2")
        if self.n < 0 or len(self.widths) != self.n + 1 or len(self.transitions) != self.n:
            raise ValueError("need n+1 widths and n transition tables")
        if any(w < 1 for w in self.widths):
            raise ValueError("every layer needs at least one state")
        for r, layer in enumerate(self.transitions):
            if len(layer) != self.widths[r]:
                raise ValueError(f"layer {r} table has {len(layer)} rows, expected {self.widths[r]}")
            nxt = self.widths[r + 1]
            for row in layer:
                if len(row) != self.d:
                    raise ValueError(f"layer {r} row has {len(row)} entries, expected {self.d}")
                for t in row:
                    if not 0 <= t < nxt:
                        raise ValueError(f"layer {r} target {t} outside [0, {nxt})")
        if not 0 <= self.start < self.widths[0]:
            raise ValueError(f"start {self.start} outside layer 0")
        if any(not 0 <= s < self.widths[-1] for s in self.accept):
            raise ValueError("accept states must lie in the final layer")

    @property
    def a(self) -> int:
        return len(self.accept)

    @property
    def width(self) -> int:
        return max(self.widths)

    @cached_property
    def inverse_transitions(self) -> tuple[Table, ...]:
        """``inv[r][t][sigma]`` is the unique source of ``t``; permutation programs only."""
        if not check_permutation(self):
            raise ValueError("inverse tables exist only for permutation programs")
        inv = []
        for r, layer in enumerate(self.transitions):
            rows = [[0] * self.d for _ in range(self.widths[r + 1])]
            for s, row in enumerate(layer):
                for sigma, t in enumerate(row):
                    rows[t][sigma] = s
            inv.append(tuple(tuple(row) for row in rows))
        return tuple(inv)

    def with_endpoints(self, start: int | None = None, accept: Iterable[int] | None = None):
        return BranchingProgram(
            self.n,
            self.d,
            self.widths,
            self.transitions,
            self.start if start is None else start,
            self.accept if accept is None else frozenset(accept),
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "widths": list(self.widths),
            "transitions": [[list(row) for row in layer] for layer in self.transitions],
            "start": self.start,
            "accept": sorted(self.accept),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BranchingProgram":
        return cls(
            n=data["n"],
            d=data["d"],
            widths=data["widths"],
            transitions=data["transitions"],
            start=data["start"],
            accept=data["accept"],
        )


def evaluate(B: BranchingProgram, v: int, x: Sequence[int], layer: int = 0) -> int:
    """State reached from ``v`` in ``layer`` after reading ``x``."""
    if not 0 <= layer <= B.n:
        raise IndexError(f"layer {layer} outside [0, {B.n}]")
    if not 0 <= v < B.widths[layer]:
        raise IndexError(f"state {v} outside layer {layer}")
    if layer + len(x) > B.n:
        raise IndexError(f"string of length {len(x)} runs past the last layer")
    for r, sigma in enumerate(x, start=layer):
        if not 0 <= sigma < B.d:
            raise IndexError(f"symbol {sigma} outside alphabet [{B.d}]")
        v = B.transitions[r][v][sigma]
    return v


def accepts(B: BranchingProgram, x: Sequence[int]) -> int:
    if len(x) != B.n:
        raise ValueError(f"expected input of length {B.n}, got {len(x)}")
    return int(evaluate(B, B.start, x) in B.accept)


def layer_counts(B: BranchingProgram) -> list[list[int]]:
    """Per-layer number of prefixes reaching each state (layer i sums to d**i)."""
    counts = [0] * B.widths[0]
    counts[B.start] = 1
    out = [counts]
    for r, layer in enumerate(B.transitions):
        nxt = [0] * B.widths[r + 1]
        for s, c in enumerate(counts):
            if c:
                for t in layer[s]:
                    nxt[t] += c
        counts = nxt
        out.append(counts)
    return out


def accept_prob_exact(B: BranchingProgram) -> DyadicProbability:
    final = layer_counts(B)[-1]
    return DyadicProbability(sum(final[s] for s in B.accept), B.n, B.d)


def accept_prob_bruteforce(B: BranchingProgram) -> DyadicProbability:
    """Reference value by running every input of [d]^n."""
    hits = sum(accepts(B, x) for x in all_words(B.n, B.d))
    return DyadicProbability(hits, B.n, B.d)


def truth_mask(B: BranchingProgram) -> int:
    """Bitmask of accepted inputs, indexed as in :func:`words.word_index`."""
    states = [B.start]
    for layer in B.transitions:
        states = [layer[s][sigma] for s in states for sigma in range(B.d)]
    mask = 0
    for idx, s in enumerate(states):
        if s in B.accept:
            mask |= 1 << idx
    return mask


def check_permutation(B: BranchingProgram) -> PermutationFlag:
    if len(set(B.widths)) != 1:
        return PermutationFlag(False, "layer widths differ")
    w = B.widths[0]
    for r, layer in enumerate(B.transitions):
        for sigma in range(B.d):
            if len({row[sigma] for row in layer}) != w:
                return PermutationFlag(False, f"layer {r} symbol {sigma} is not a bijection")
    return PermutationFlag(True)


def relabel(B: BranchingProgram, perms: Sequence[Sequence[int]]) -> BranchingProgram:
    """Rename the states of layer i via the bijection ``perms[i]``."""
    if len(perms) != B.n + 1:
        raise ValueError("need one bijection per layer")
    for i, p in enumerate(perms):
        if sorted(p) != list(range(B.widths[i])):
            raise ValueError(f"perms[{i}] is not a bijection of layer {i}")
    transitions = []
    for r, layer in enumerate(B.transitions):
        src, dst = perms[r], perms[r + 1]
        rows = [None] * B.widths[r]
        for s, row in enumerate(layer):
            rows[src[s]] = tuple(dst[t] for t in row)
        transitions.append(tuple(rows))
    last = perms[-1]
    return BranchingProgram(
        B.n, B.d, B.widths, tuple(transitions), perms[0][B.start], {last[s] for s in B.accept}
    )


def dumps_program(B: BranchingProgram, provenance: dict | None = None) -> str:
    data = B.to_dict()
    if provenance is not None:
        data["provenance"] = provenance
    return json.dumps(data, separators=(",", ":"))


def loads_program(text: str) -> BranchingProgram:
    return BranchingProgram.from_dict(json.loads(text))


def write_program(path, B: BranchingProgram, provenance: dict | None = None) -> None:
    Path(path).write_text(dumps_program(B, provenance) + "\n")


def read_program(path) -> BranchingProgram:
    return loads_program(Path(path).read_text())


# -- standard programs -------------------------------------------------------


def identity_program(n: int, w: int, d: int = 2, start: int = 0, accept=(0,)) -> BranchingProgram:
    layer = tuple((s,) * d for s in range(w))
    return BranchingProgram(n, d, (w,) * (n + 1), (layer,) * n, start, frozenset(accept))


def parity_program(n: int, accept=(1,), mask: Sequence[int] | None = None) -> BranchingProgram:
    """Width-2 program tracking the parity of the bits selected by ``mask``."""
    mask = (1,) * n if mask is None else tuple(mask)
    if len(mask) != n:
        raise ValueError("mask length must equal n")
    flip = ((0, 1), (1, 0))
    keep = ((0, 0), (1, 1))
    return BranchingProgram(n, 2, (2,) * (n + 1), tuple(flip if z else keep for z in mask), 0, frozenset(accept))


def all_accept_program(n: int, w: int = 1, d: int = 2) -> BranchingProgram:
    return identity_program(n, w, d, 0, range(w))


def all_reject_program(n: int, w: int = 2, d: int = 2) -> BranchingProgram:
    """The constant-zero function as a width-``w`` permutation program."""
    return identity_program(n, w, d, 0, range(1, w))


def random_permutation_program(
    n: int, w: int, d: int = 2, rng: random.Random | None = None, start=None, accept=None, a: int = 1
) -> BranchingProgram:
    rng = rng or random.Random(0)
    layers = []
    for _ in range(n):
        cols = []
        for _ in range(d):
            p = list(range(w))
            rng.shuffle(p)
            cols.append(p)
        layers.append(tuple(tuple(cols[sigma][s] for sigma in range(d)) for s in range(w)))
    if start is None:
        start = rng.randrange(w)
    if accept is None:
        accept = rng.sample(range(w), min(a, w))
    return BranchingProgram(n, d, (w,) * (n + 1), tuple(layers), start, frozenset(accept))


def random_program(
    n: int, widths: Sequence[int], d: int = 2, rng: random.Random | None = None, a: int = 1
) -> BranchingProgram:
    """Arbitrary (generally non-permutation) OBP with the given layer widths."""
    rng = rng or random.Random(0)
    layers = []
    for r in range(n):
        layers.append(
            tuple(tuple(rng.randrange(widths[r + 1]) for _ in range(d)) for _ in range(widths[r]))
        )
    accept = rng.sample(range(widths[-1]), min(a, widths[-1]))
    return BranchingProgram(n, d, tuple(widths), tuple(layers), rng.randrange(widths[0]), frozenset(accept))


def input_check(B: BranchingProgram, x: Sequence[int]) -> Word:
    return check_word(x, B.d, B.n)
