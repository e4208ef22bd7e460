"""Consistently labelled regular digraphs and the walk programs they induce."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .bp import BranchingProgram, DyadicProbability


class InconsistentLabelling(ValueError):
    pass


@dataclass(frozen=True)
class LabelledDigraph:
    """``perm[sigma][u]`` is the endpoint of the sigma-labelled edge out of ``u``."""

    vertices: int
    d: int
    perm: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(tuple(int(t) for t in p) for p in self.perm))
        if self.vertices < 1 or self.d < 1:
            raise ValueError("need at least one vertex and one label")
        if len(self.perm) != self.d or any(len(p) != self.vertices for p in self.perm):
            raise ValueError("perm must have d rows of length |V|")
        if any(not 0 <= t < self.vertices for p in self.perm for t in p):
            raise ValueError("edge endpoint outside the vertex set")

    def to_dict(self) -> dict:
        return {"vertices": self.vertices, "d": self.d, "perm": [list(p) for p in self.perm]}

    @classmethod
    def from_dict(cls, data: dict) -> "LabelledDigraph":
        return cls(data["vertices"], data["d"], data["perm"])


def graph_from_edges(vertices: int, d: int, edges: Iterable[tuple[int, int, int]]) -> LabelledDigraph:
    """Build a graph from ``(source, label, target)`` triples; each vertex needs
    exactly one out-edge per label."""
    perm = [[None] * vertices for _ in range(d)]
    for u, sigma, t in edges:
        if perm[sigma][u] is not None:
            raise ValueError(f"vertex {u} has two out-edges labelled {sigma}")
        perm[sigma][u] = t
    if any(t is None for p in perm for t in p):
        raise ValueError("some vertex is missing an out-edge")
    return LabelledDigraph(vertices, d, perm)


def check_consistent(G: LabelledDigraph) -> bool:
    return all(len(set(p)) == G.vertices for p in G.perm)


def graph_to_bp(G: LabelledDigraph, u: int, v: int, n: int) -> BranchingProgram:
    if not check_consistent(G):
        raise InconsistentLabelling("some label's edges do not form a permutation")
    if not (0 <= u < G.vertices and 0 <= v < G.vertices):
        raise ValueError("walk endpoints must be vertices of G")
    layer = tuple(tuple(G.perm[sigma][s] for sigma in range(G.d)) for s in range(G.vertices))
    return BranchingProgram(n, G.d, (G.vertices,) * (n + 1), (layer,) * n, u, frozenset({v}))


def transition_counts(G: LabelledDigraph) -> np.ndarray:
    """Integer matrix of edge multiplicities; the walk matrix is this over d."""
    M = np.zeros((G.vertices, G.vertices), dtype=object)
    for p in G.perm:
        for s, t in enumerate(p):
            M[s, t] += 1
    return M


def _matpow(M: np.ndarray, k: int) -> np.ndarray:
    result = np.identity(M.shape[0], dtype=object)
    base = M
    while k:
        if k & 1:
            result = result.dot(base)
        k >>= 1
        if k:
            base = base.dot(base)
    return result


def walk_prob_matrix(G: LabelledDigraph, u: int, v: int, n: int) -> DyadicProbability:
    """``(M^n)[u, v]`` by repeated squaring of the integer count matrix."""
    if G.d < 2:
        raise ValueError("walk probabilities need d >= 2 (base of the dyadic denominator)")
    power = _matpow(transition_counts(G), n)
    return DyadicProbability(int(power[u, v]), n, G.d)


def random_consistent_graph(vertices: int, d: int = 2, seed: int | None = 0) -> LabelledDigraph:
    if vertices < 1:
        raise ValueError("need at least one vertex")
    rng = random.Random(seed)
    perm = []
    for _ in range(d):
        p = list(range(vertices))
        rng.shuffle(p)
        perm.append(p)
    return LabelledDigraph(vertices, d, perm)


def cycle_graph(vertices: int) -> LabelledDigraph:
    """Label 0 steps +1, label 1 steps -1."""
    fwd = [(s + 1) % vertices for s in range(vertices)]
    back = [(s - 1) % vertices for s in range(vertices)]
    return LabelledDigraph(vertices, 2, (fwd, back))


def dumps_graph(G: LabelledDigraph) -> str:
    return json.dumps(G.to_dict(), separators=(",", ":"))


def write_graph(path, G: LabelledDigraph) -> None:
    Path(path).write_text(dumps_graph(G) + "\n")


def read_graph(path) -> LabelledDigraph:
    return LabelledDigraph.from_dict(json.loads(Path(path).read_text()))
