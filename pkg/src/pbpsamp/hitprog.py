"""Induced hit programs: restricting a permutation program to the states from
which some hitter string's prefix reaches an accept state.

Hitter strings are always read as prefixes: a state ``v`` in layer ``i`` is a
hit state when ``B[v, y[:n-i]]`` accepts for some ``y`` in ``H``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .bp import BranchingProgram, accept_prob_exact, check_permutation, evaluate
from .oracle import OracleSession
from .samplers import QuerySet, Verdict
from .words import Word, check_word


class WidthLawViolation(AssertionError):
    pass


@dataclass(frozen=True)
class StateTag:
    kind: str  # "real", "sink" or "padding"
    layer: int
    original: object  # real: state of B; sink: (j, v); padding: slot number

    def describe(self) -> str:
        if self.kind == "sink":
            j, v = self.original
            return f"{j}:{v}"
        return str(self.original)


@dataclass(frozen=True)
class HitProgram:
    base: BranchingProgram
    H: QuerySet
    hit_states: tuple[frozenset[int], ...]
    explicit_bp: BranchingProgram
    state_map: tuple[tuple[StateTag, ...], ...]
    pad_size: int

    @property
    def width(self) -> int:
        return self.explicit_bp.width

    @property
    def start_kept(self) -> bool:
        return self.base.start in self.hit_states[0]

    def width_law_holds(self) -> bool:
        cap = len(self.H) * self.base.a
        return all(len(K) <= cap for K in self.hit_states) and self.width <= width_bound(
            len(self.H), self.base.n, self.base.a
        )

    def state_map_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bh_index", "kind", "layer", "original"])
        for layer, tags in enumerate(self.state_map):
            for idx, tag in enumerate(tags):
                writer.writerow([idx, tag.kind, layer, tag.describe()])
        return buf.getvalue()


def width_bound(h: int, n: int, a: int) -> int:
    return h * (n + 2) * a


def _check_inputs(B: BranchingProgram, H: QuerySet) -> None:
    if len(H) == 0:
        raise ValueError("the hitter must be nonempty")
    if (H.n, H.d) != (B.n, B.d):
        raise ValueError("hitter strings must match the program's length and alphabet")
    if not check_permutation(B):
        raise ValueError("induced hit programs are defined for permutation programs only")
    if B.a < 1:
        raise ValueError("the program needs at least one accept state")


def hit_states(B: BranchingProgram, H: QuerySet) -> tuple[frozenset[int], ...]:
    """``K_i`` for every layer, by pulling the accept set back through the
    inverse tables along each hitter prefix."""
    inv = B.inverse_transitions
    n = B.n
    out = []
    for i in range(n + 1):
        K: set[int] = set()
        for y in H:
            S = set(B.accept)
            for r in range(n - 1, i - 1, -1):
                sigma = y[r - i]
                S = {inv[r][t][sigma] for t in S}
            K |= S
        out.append(frozenset(K))
    return tuple(out)


def hit_states_bruteforce(B: BranchingProgram, H: QuerySet) -> tuple[frozenset[int], ...]:
    """``K_i`` straight from the definition, by forward evaluation."""
    n = B.n
    return tuple(
        frozenset(
            v
            for v in range(B.widths[i])
            if any(evaluate(B, v, y[: n - i], layer=i) in B.accept for y in H)
        )
        for i in range(n + 1)
    )


def build_hit_program(B: BranchingProgram, H: QuerySet) -> HitProgram:
    """Explicit, permutation-completed ``B_H``.

    Layer ``i`` holds the real hit states (ascending), then sinks ``(j, v)``
    for ``j = 0..n`` and ``v < K``, then padding, for a uniform width of
    ``(n + 2) * K`` where ``K = max |K_i|``.  A kept state whose successor
    leaves the hit set falls into sink ``(i + 1, slot)``; sinks of other tags
    loop to themselves.  The remaining sources and targets of each column are
    paired in ascending index order, which sends the free sinks (listed
    before the padding) onto any unfilled real slots, so padding never leads
    to a hit state.
    """
    _check_inputs(B, H)
    n, d = B.n, B.d
    K_sets = hit_states(B, H)
    K = max(len(Ki) for Ki in K_sets)
    W = (n + 2) * K
    real = [sorted(Ki) for Ki in K_sets]
    slot = [{s: p for p, s in enumerate(r)} for r in real]

    def sink(i: int, j: int, v: int) -> int:
        return len(real[i]) + j * K + v

    state_map = []
    for i in range(n + 1):
        tags = [StateTag("real", i, s) for s in real[i]]
        tags += [StateTag("sink", i, (j, v)) for j in range(n + 1) for v in range(K)]
        tags += [StateTag("padding", i, q) for q in range(K - len(real[i]))]
        state_map.append(tuple(tags))

    transitions = []
    for r in range(n):
        tag = r + 1
        rows = [[None] * d for _ in range(W)]
        for sigma in range(d):
            used = [False] * W
            for p, s in enumerate(real[r]):
                t = B.transitions[r][s][sigma]
                target = slot[r + 1][t] if t in slot[r + 1] else sink(r + 1, tag, p)
                rows[p][sigma] = target
                used[target] = True
            for j in range(n + 1):
                if j == tag:
                    continue
                for v in range(K):
                    target = sink(r + 1, j, v)
                    rows[sink(r, j, v)][sigma] = target
                    used[target] = True
            free_sources = [src for src in range(W) if rows[src][sigma] is None]
            free_targets = [t for t in range(W) if not used[t]]
            for src, t in zip(free_sources, free_targets):
                rows[src][sigma] = t
        transitions.append(tuple(tuple(row) for row in rows))

    start = slot[0][B.start] if B.start in slot[0] else sink(0, 0, 0)
    accept = frozenset(slot[n][s] for s in B.accept)
    explicit = BranchingProgram(n, d, (W,) * (n + 1), tuple(transitions), start, accept)
    hp = HitProgram(B, H, K_sets, explicit, tuple(state_map), K)
    if not hp.width_law_holds():
        raise WidthLawViolation(
            f"width {hp.width} or some |K_i| exceeds |H|*(n+2)*a = {width_bound(len(H), n, B.a)}"
        )
    return hp


def hit_query_closure(H: Iterable[Sequence[int]], x: Sequence[int]) -> list[Word]:
    """All strings ``x[:i] + y[:n-i]`` for ``i = 0..n`` and ``y`` in ``H`` (first-seen order)."""
    x = tuple(x)
    n = len(x)
    out = {}
    for i in range(n + 1):
        for y in H:
            out.setdefault(x[:i] + tuple(y[: n - i]), None)
    return list(out)


def eval_hit_blackbox(session: OracleSession, H: QuerySet, x: Sequence[int]) -> int:
    """``B_H(x)`` from oracle access to ``B``: for every split point ``i``,
    some ``x[:i] + y[:n-i]`` must be accepted."""
    if len(H) == 0:
        raise ValueError("the hitter must be nonempty")
    x = check_word(x, session.d, session.n)
    n = session.n
    if session.plan is None:
        for i in range(n + 1):
            if not any(session.query(x[:i] + y[: n - i]) for y in H):
                return 0
        return 1
    answers = [[session.query(x[:i] + y[: n - i]) for y in H] for i in range(n + 1)]
    return int(all(any(row) for row in answers))


def hit_approx_error(B: BranchingProgram, H: QuerySet, hp: HitProgram | None = None) -> Fraction:
    hp = hp or build_hit_program(B, H)
    return abs(accept_prob_exact(hp.explicit_bp).value - accept_prob_exact(B).value)


# -- the single-accept restrictions a hitter must handle ----------------------


def single_accept_restrictions(B: BranchingProgram) -> list[tuple[tuple[int, int, int], BranchingProgram]]:
    """For every layer ``i``, state ``v`` and accept state ``u``: the length-``n``
    program that runs ``B`` from ``v`` in layer ``i`` on the first ``n - i``
    symbols, ignores the rest, and accepts at ``u``."""
    w_last = B.widths[-1]
    ident = tuple((s,) * B.d for s in range(w_last))
    out = []
    for i in range(B.n + 1):
        transitions = B.transitions[i:] + (ident,) * i
        widths = B.widths[i:] + (w_last,) * i
        for v in range(B.widths[i]):
            for u in sorted(B.accept):
                P = BranchingProgram(B.n, B.d, widths, transitions, v, frozenset({u}))
                out.append(((i, v, u), P))
    return out


def restriction_masks(B: BranchingProgram, delta) -> list[tuple[tuple[int, int, int], int]]:
    """Accepting sets (as input bitmasks) of the single-accept restrictions with
    acceptance probability above ``delta``.  A set ``H`` hits all of them iff it
    is a ``delta``-hitter for those restrictions."""
    delta = Fraction(delta)
    n, d = B.n, B.d
    out = []
    for i in range(n + 1):
        k = n - i
        block = (1 << d**i) - 1
        # maps[p][v] = B[v, p] for every prefix p of length k read from layer i
        maps = [tuple(range(B.widths[i]))]
        for r in range(i, n):
            layer = B.transitions[r]
            maps = [tuple(layer[u][sigma] for u in m) for m in maps for sigma in range(d)]
        reach: dict[tuple[int, int], int] = {}
        for p, m in enumerate(maps):
            for v, u in enumerate(m):
                if u in B.accept:
                    reach[(v, u)] = reach.get((v, u), 0) | (1 << p)
        for (v, u), pmask in sorted(reach.items()):
            if Fraction(pmask.bit_count(), d**k) > delta:
                mask = 0
                p = 0
                while pmask:
                    if pmask & 1:
                        mask |= block << (p * d**i)
                    pmask >>= 1
                    p += 1
                out.append(((i, v, u), mask))
    return out


def verify_hitter_on_restrictions(H: QuerySet, B: BranchingProgram, delta) -> Verdict:
    """Hitter check against ``B``'s own single-accept restrictions."""
    reqs = restriction_masks(B, delta)
    for checked, ((i, v, u), mask) in enumerate(reqs, start=1):
        if not mask & H.mask:
            P = dict(single_accept_restrictions(B))[(i, v, u)]
            return Verdict(False, True, checked, P, Fraction(0), accept_prob_exact(P).value,
                           {"layer": i, "state": v, "accept": u})
    return Verdict(True, True, len(reqs))
