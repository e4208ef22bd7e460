"""Lower-bound witnesses: programs that a too-small hitter misses.

Each constructor returns ``None`` when its precondition fails for the given
hitter; otherwise the program rejects every string of ``H`` while accepting
with probability at least the stated bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .bp import BranchingProgram, accept_prob_exact, accepts, check_permutation
from .samplers import QuerySet


# -- GF(2) linear algebra on bit-packed rows ---------------------------------


def pack_row(x: Sequence[int]) -> int:
    """Bit ``j`` holds ``x[j]``."""
    row = 0
    for j, b in enumerate(x):
        if b:
            row |= 1 << j
    return row


def unpack_row(row: int, n: int) -> tuple[int, ...]:
    return tuple((row >> j) & 1 for j in range(n))


def rref(rows: Sequence[int], n_cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; pivots are chosen by ascending column."""
    work = [r for r in rows if r]
    pivots = []
    rank = 0
    for col in range(n_cols):
        pivot = next((k for k in range(rank, len(work)) if (work[k] >> col) & 1), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for k in range(len(work)):
            if k != rank and (work[k] >> col) & 1:
                work[k] ^= work[rank]
        pivots.append(col)
        rank += 1
    return work[:rank], pivots


def nullspace_basis(rows: Sequence[int], n_cols: int) -> list[int]:
    """Basis of ``{z : <z, r> = 0 for every row r}``, one vector per free column."""
    reduced, pivots = rref(rows, n_cols)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = []
    for f in free:
        z = 1 << f
        for r, p in zip(reduced, pivots):
            if (r >> f) & 1:
                z |= 1 << p
        basis.append(z)
    return basis


def dot2(a: int, b: int) -> int:
    return (a & b).bit_count() & 1


@dataclass(frozen=True)
class GF2System:
    rows: tuple[int, ...]
    n: int
    solution: Optional[int]

    @classmethod
    def from_hitter(cls, H: QuerySet) -> "GF2System":
        rows = tuple(pack_row(x) for x in H)
        basis = nullspace_basis(rows, H.n)
        return cls(rows, H.n, basis[0] if basis else None)


# -- adversaries -------------------------------------------------------------


def _require_binary(H: QuerySet) -> None:
    if H.d != 2:
        raise ValueError("these adversaries are defined over the binary alphabet")


def parity_adversary(H: QuerySet) -> Optional[BranchingProgram]:
    """Width-2 parity program ``x -> <z, x>`` for a nonzero ``z`` orthogonal to
    all of ``H``; None when only ``z = 0`` qualifies."""
    _require_binary(H)
    system = GF2System.from_hitter(H)
    if system.solution is None:
        return None
    return parity_of(unpack_row(system.solution, H.n))


def parity_of(z: Sequence[int]) -> BranchingProgram:
    flip = ((0, 1), (1, 0))
    keep = ((0, 0), (1, 1))
    n = len(z)
    return BranchingProgram(n, 2, (2,) * (n + 1), tuple(flip if b else keep for b in z), 0, frozenset({1}))


def floor_log2(q: Fraction) -> int:
    """Largest ``l`` with ``2**l <= q`` for positive rational ``q``."""
    if q <= 0:
        raise ValueError("log of a non-positive number")
    l = q.numerator.bit_length() - q.denominator.bit_length()
    while Fraction(2) ** l > q:
        l -= 1
    while Fraction(2) ** (l + 1) <= q:
        l += 1
    return l


def prefix_length(a: int, epsilon) -> int:
    """``l = floor(log2(a / (2 eps)))``: the largest prefix length whose
    per-state mass ``2**-l`` still gives ``a`` states mass at least ``2 eps``."""
    eps = Fraction(epsilon)
    if eps <= 0 or a < 1:
        raise ValueError("need eps > 0 and a >= 1")
    if Fraction(a) / (2 * eps) < 1:
        raise ValueError(f"eps = {eps} is too large for a = {a}: 2*eps must not exceed a")
    return floor_log2(Fraction(a) / (2 * eps))


def prefix_adversary(H: QuerySet, a: int, epsilon) -> Optional[BranchingProgram]:
    """Width-``2**l`` permutation program whose final state is the binary value
    of the first ``l`` bits; accepts the ``a`` smallest states that no prefix of
    ``H`` reaches.  ``l`` is capped at ``n``, which only raises the mass."""
    _require_binary(H)
    l = min(prefix_length(a, epsilon), H.n)
    reached = {sum(x[j] << j for j in range(l)) for x in H}
    free = [s for s in range(2**l) if s not in reached]
    if len(free) < a:
        return None
    w = 2**l
    layers = []
    for r in range(H.n):
        bit = 1 << r if r < l else 0
        layers.append(tuple((s, s ^ bit) for s in range(w)))
    return BranchingProgram(H.n, 2, (w,) * (H.n + 1), tuple(layers), 0, frozenset(free[:a]))


def match_length(epsilon) -> int:
    """``l = floor(log2(1 / (2 eps)))``, the longest prefix whose cylinder has
    mass at least ``2 eps``."""
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("need 0 < eps < 1/2")
    return floor_log2(1 / (2 * eps))


def prefix_match_adversary(H: QuerySet, epsilon) -> Optional[BranchingProgram]:
    """Width-2 (non-permutation) program accepting ``x`` iff ``x[:l]`` equals
    the lexicographically first ``l``-bit string that prefixes no member of ``H``."""
    _require_binary(H)
    l = min(match_length(epsilon), H.n)
    taken = {tuple(x[:l]) for x in H}
    sigma = None
    for v in range(2**l):
        cand = tuple((v >> (l - 1 - j)) & 1 for j in range(l))
        if cand not in taken:
            sigma = cand
            break
    if sigma is None:
        return None
    layers = []
    for r in range(H.n):
        if r < l:
            alive = [0, 0]
            alive[1 - sigma[r]] = 1
            layers.append((tuple(alive), (1, 1)))
        else:
            layers.append(((0, 0), (1, 1)))
    return BranchingProgram(H.n, 2, (2,) * (H.n + 1), tuple(layers), 0, frozenset({0}))


@dataclass(frozen=True)
class WitnessVerdict:
    rejects_hitter: bool
    probability: Fraction
    bound: Fraction
    is_permutation: bool
    width: int

    @property
    def ok(self) -> bool:
        return self.rejects_hitter and self.probability >= self.bound

    def __bool__(self):
        return self.ok


def witness_verify(B: BranchingProgram, H: QuerySet, bound) -> WitnessVerdict:
    """Independent check: ``B`` rejects all of ``H`` (direct evaluation) and
    accepts with probability at least ``bound`` (exact DP)."""
    rejects = not any(accepts(B, x) for x in H)
    return WitnessVerdict(
        rejects,
        accept_prob_exact(B).value,
        Fraction(bound),
        bool(check_permutation(B)),
        B.width,
    )
