"""At-most-k constraint encoders.

Two encodings over a list of solver variables:

* binomial — one all-negative clause per (k+1)-subset, C(n, k+1) clauses,
  no auxiliary variables; fine for tiny inputs and for cross-validation.
* sequential — the sequential-counter construction with (n-1)*k auxiliary
  register variables and O(n*k) clauses; the default used by the encodings.

Both treat k >= n as the empty constraint and k == 0 as unit negatives.
"""

from __future__ import annotations

from itertools import combinations
from typing import Protocol, Sequence


class AuxAllocator(Protocol):
    def fresh_aux(self) -> int: ...


class CounterAllocator:
    """Plain id allocator for clause sets built outside a VarMap."""

    def __init__(self, start: int):
        self.top = start

    def fresh_aux(self) -> int:
        self.top += 1
        return self.top


def at_most_binomial(k: int, variables: Sequence[int]) -> list[list[int]]:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k >= len(variables):
        return []
    return [[-v for v in subset] for subset in combinations(variables, k + 1)]


def at_most_sequential(
    k: int, variables: Sequence[int], alloc: AuxAllocator
) -> list[list[int]]:
    """Sequential counter for sum(variables) <= k.

    Register variable s[i][j] means "at least j+1 of the first i+1 inputs are
    true".  Any total assignment of the inputs extends to a satisfying
    assignment of the returned clauses iff at most k inputs are true.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    n = len(variables)
    if k >= n:
        return []
    if k == 0:
        return [[-v] for v in variables]
    clauses: list[list[int]] = []
    regs = [[alloc.fresh_aux() for _ in range(k)] for _ in range(n - 1)]
    x = list(variables)
    clauses.append([-x[0], regs[0][0]])
    for j in range(1, k):
        clauses.append([-regs[0][j]])
    for i in range(1, n - 1):
        clauses.append([-x[i], regs[i][0]])
        clauses.append([-regs[i - 1][0], regs[i][0]])
        for j in range(1, k):
            clauses.append([-x[i], -regs[i - 1][j - 1], regs[i][j]])
            clauses.append([-regs[i - 1][j], regs[i][j]])
        clauses.append([-x[i], -regs[i - 1][k - 1]])
    clauses.append([-x[n - 1], -regs[n - 2][k - 1]])
    return clauses


def sequential_clause_bound(n: int, k: int) -> int:
    """Declared upper bound on the sequential encoding's clause count."""
    return 3 * n * k + n


def at_most(
    k: int,
    variables: Sequence[int],
    alloc: AuxAllocator,
    method: str = "sequential",
) -> list[list[int]]:
    if method == "sequential":
        return at_most_sequential(k, variables, alloc)
    if method == "binomial":
        return at_most_binomial(k, variables)
    raise ValueError(f"unknown cardinality method {method!r}")
