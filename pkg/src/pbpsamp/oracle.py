"""Black-box access to a target function with distinct-query accounting."""

from __future__ import annotations

import csv
import io
from typing import Callable, Iterable, Sequence

from .bp import BranchingProgram, accepts
from .words import Word, check_word, format_word


class PlanViolation(RuntimeError):
    """A query fell outside the pre-registered plan: the caller is adaptive."""


class OracleSession:
    """Wraps ``f : [d]^n -> {0,1}`` and logs every query.

    ``target`` is a :class:`BranchingProgram` or any callable on tuples.  Once
    a plan is declared, queries outside it raise :class:`PlanViolation`.
    """

    def __init__(
        self,
        target: BranchingProgram | Callable[[Word], int],
        n: int | None = None,
        d: int | None = None,
        plan: Iterable[Sequence[int]] | None = None,
    ):
        if isinstance(target, BranchingProgram):
            program = target
            self._f = lambda x: accepts(program, x)
            n = program.n if n is None else n
            d = program.d if d is None else d
            if (n, d) != (program.n, program.d):
                raise ValueError("n and d must match the target program")
        else:
            if n is None:
                raise ValueError("n is required for a callable target")
            self._f = target
        self.n = n
        self.d = 2 if d is None else d
        self.log: list[tuple[Word, int]] = []
        self._answers: dict[Word, int] = {}
        self.plan: frozenset[Word] | None = None
        if plan is not None:
            self.declare_plan(plan)

    def declare_plan(self, plan: Iterable[Sequence[int]]) -> None:
        if self.plan is not None:
            raise RuntimeError("a plan has already been declared for this session")
        if self.log:
            raise RuntimeError("the plan must be declared before the first query")
        self.plan = frozenset(check_word(x, self.d, self.n) for x in plan)

    def query(self, x: Sequence[int]) -> int:
        x = check_word(x, self.d, self.n)
        if self.plan is not None and x not in self.plan:
            raise PlanViolation(f"query {format_word(x, self.d)} is not in the declared plan")
        bit = int(self._f(x))
        self.log.append((x, bit))
        self._answers.setdefault(x, bit)
        return bit

    __call__ = query

    def distinct_query_count(self) -> int:
        return len(self._answers)

    def distinct_queries(self) -> list[Word]:
        """Distinct queries in first-seen order."""
        return list(self._answers)

    def export_queries(self) -> str:
        return "".join(format_word(x, self.d) + "\n" for x in self._answers)

    def export_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["query", "answer"])
        for x, bit in self._answers.items():
            writer.writerow([format_word(x, self.d), bit])
        return buf.getvalue()


def distinct_query_count(session: OracleSession) -> int:
    return session.distinct_query_count()


def zero_oracle(n: int, d: int = 2, plan=None) -> OracleSession:
    return OracleSession(lambda x: 0, n, d, plan)
