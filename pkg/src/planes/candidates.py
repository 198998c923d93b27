"""Candidate set D: vectors compatible (at most one coincidence) with every member of a partial code."""
from __future__ import annotations

from typing import Sequence

from .znn import Vector


def enumerate_candidates(b0: Sequence[Sequence[int]], n: int | None = None) -> list[Vector]:
    """All v not in b0 with at most one coincidence with each member, in lexicographic order.

    Backtracks coordinate by coordinate, tracking coincidence counts.  When
    b0 holds all n constant vectors the count against constant m is the
    multiplicity of symbol m, so only permutation vectors survive.
    """
    if n is None:
        if not b0:
            raise ValueError("order needed for an empty partial code")
        n = len(b0[0])
    members = [tuple(v) for v in b0]
    hits = [[[k for k, v in enumerate(members) if v[i] == x] for x in range(n)] for i in range(n)]
    counts = [0] * len(members)
    present = set(members)
    out: list[Vector] = []
    prefix: list[int] = []

    def rec(i: int):
        if i == n:
            v = tuple(prefix)
            if v not in present:
                out.append(v)
            return
        for x in range(n):
            touched = hits[i][x]
            if any(counts[k] for k in touched):
                continue
            for k in touched:
                counts[k] += 1
            prefix.append(x)
            rec(i + 1)
            prefix.pop()
            for k in touched:
                counts[k] -= 1

    rec(0)
    return out
