"""Deterministic samplers for permutation branching programs of unbounded width."""

__version__ = "0.1.0"
