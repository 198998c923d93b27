"""Arithmetic on the group Z_n^n.

Vectors are stored additively as tuples of exponent residues: the value
``j`` at a coordinate stands for the root of unity omega**j.  The
multiplicative "quotient" of two vectors is therefore the componentwise
difference mod n, and a coordinate "equals 1" exactly when its exponent
is 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class VectorError(ValueError):
    """Malformed vector or index."""


@dataclass(frozen=True)
class GroupParams:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise VectorError(f"order must be >= 2, got {self.n}")

    @property
    def size(self) -> int:
        return self.n ** self.n

    @property
    def identity(self) -> Vector:
        return (0,) * self.n

    def constant(self, m: int) -> Vector:
        return (m % self.n,) * self.n


def make_vector(values: Iterable[int], n: int | None = None) -> Vector:
    """Validate and freeze an exponent vector.  Length defines the order unless `n` is given."""
    v = tuple(int(x) for x in values)
    if n is None:
        n = len(v)
    if len(v) != n:
        raise VectorError(f"expected {n} coordinates, got {len(v)}")
    if n < 2:
        raise VectorError("order must be >= 2")
    for x in v:
        if not 0 <= x < n:
            raise VectorError(f"coordinate {x} outside [0, {n})")
    return v


def count_coincidences(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise VectorError(f"length mismatch: {len(u)} vs {len(v)}")
    return sum(1 for a, b in zip(u, v) if a == b)


def difference(u: Sequence[int], v: Sequence[int]) -> Vector:
    """Componentwise u - v mod n (the quotient u/v in multiplicative notation)."""
    if len(u) != len(v):
        raise VectorError(f"length mismatch: {len(u)} vs {len(v)}")
    n = len(u)
    return tuple((a - b) % n for a, b in zip(u, v))


def negate(v: Sequence[int]) -> Vector:
    n = len(v)
    return tuple((-a) % n for a in v)


def zero_count(v: Sequence[int]) -> int:
    return sum(1 for a in v if a == 0)


def in_forbidden_set(v: Sequence[int]) -> bool:
    """True iff at least two coordinates are the identity (exponent 0)."""
    return zero_count(v) >= 2


def pair_value(v: Sequence[int], i: int, j: int) -> tuple[int, int]:
    """Coordinates (v_i, v_j) for 1-based indices i < j."""
    n = len(v)
    if not 1 <= i < j <= n:
        raise VectorError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    return v[i - 1], v[j - 1]


def is_permutation(v: Sequence[int]) -> bool:
    return sorted(v) == list(range(len(v)))


def format_vector(v: Sequence[int]) -> str:
    return ",".join(str(x) for x in v)


def parse_vector(text: str, n: int | None = None) -> Vector:
    try:
        values = [int(x) for x in text.strip().split(",")]
    except ValueError as exc:
        raise VectorError(f"bad vector {text!r}") from exc
    return make_vector(values, n)
