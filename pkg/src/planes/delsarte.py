"""The Delsarte LP bound on Z_n^n with the explicit witness

    f(z) = S(z) * (S(z) - n),   S(z) = sum_i sum_j z_i**j.

Since sum_j z**j equals n when z = 1 and 0 otherwise, f depends only on the
number c of coordinates equal to 1 and f = n^2 c (c - 1).  Fourier
coefficients are computed exactly by expanding S and S^2 as sparse
polynomials over exponent vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Mapping, Sequence

import numpy as np

from .znn import Vector, in_forbidden_set, make_vector, zero_count

Poly = dict[Vector, int]


class WitnessCheckError(AssertionError):
    """A property of the explicit witness failed; this contradicts the theory."""


@dataclass(frozen=True)
class FunctionTable:
    """A function on Z_n^n.

    With ``symmetric=True`` the keys of `values` are coincidence counts
    c = 0..n (number of zero exponents); otherwise they are vectors and
    missing vectors read as 0.
    """

    order: int
    values: Mapping
    symmetric: bool = False

    def __call__(self, v: Sequence[int]) -> Fraction:
        if self.symmetric:
            return Fraction(self.values.get(zero_count(v), 0))
        return Fraction(self.values.get(tuple(v), 0))


def delsarte_table(n: int) -> FunctionTable:
    return FunctionTable(n, {c: n * n * c * (c - 1) for c in range(n + 1)}, symmetric=True)


def eval_f(v: Sequence[int]) -> int:
    v = make_vector(v)
    n = len(v)
    c = zero_count(v)
    return n * n * c * (c - 1)


def _poly_mul(a: Poly, b: Poly, n: int) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple((x + y) % n for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def witness_polynomial(n: int) -> Poly:
    """Coefficients of f = S^2 - nS keyed by exponent vector (character)."""
    zero = (0,) * n
    s: Poly = {}
    for i in range(n):
        for j in range(n):
            e = tuple(j if k == i else 0 for k in range(n))
            s[e] = s.get(e, 0) + 1
    f = _poly_mul(s, s, n)
    for e, c in s.items():
        f[e] = f.get(e, 0) - n * c
    f = {e: c for e, c in f.items() if c}
    f.setdefault(zero, 0)
    return f


def fourier_constant_term(n: int) -> int:
    if n < 2:
        raise ValueError("n >= 2 required")
    return witness_polynomial(n)[(0,) * n]


def brute_force_transform(table: FunctionTable) -> np.ndarray:
    """Character sums sum_x f(x) omega^(g.x) for every character g, as an n^n complex array."""
    n = table.order
    if n > 5:
        raise ValueError("brute-force transform limited to n <= 5")
    arr = np.zeros((n,) * n)
    for v in product(range(n), repeat=n):
        arr[v] = float(table(v))
    return np.fft.fftn(arr)


def krawtchouk_transform(values: Mapping[int, object], n: int) -> list[Fraction]:
    """Exact transform of a symmetric table, indexed by the support size w of the character.

    Per coordinate the generating polynomial in t (marking a zero exponent) is
    t + (n-1) where the character is trivial and t - 1 where it is not.
    """
    out = []
    for w in range(n + 1):
        poly = [Fraction(1)]
        for factor in [(n - 1, 1)] * (n - w) + [(-1, 1)] * w:
            nxt = [Fraction(0)] * (len(poly) + 1)
            for k, c in enumerate(poly):
                nxt[k] += c * factor[0]
                nxt[k + 1] += c * factor[1]
            poly = nxt
        out.append(sum(Fraction(values.get(c, 0)) * poly[c] for c in range(n + 1)))
    return out


@dataclass
class DelsarteReport:
    order: int
    value_at_identity: int
    constant_term: int
    vanishes_off_forbidden: bool
    fourier_nonnegative: bool
    min_coefficient: int
    bound: Fraction
    brute_force_checked: bool = False
    coefficient_counts: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        return [
            f"order={self.order}",
            f"vanishes_off_A={'pass' if self.vanishes_off_forbidden else 'FAIL'}",
            f"fourier_nonnegative={'pass' if self.fourier_nonnegative else 'FAIL'} "
            f"min_coefficient={self.min_coefficient}",
            f"f_identity={self.value_at_identity} constant_term={self.constant_term}",
            f"bound={self.bound}",
            f"brute_force_transform={'pass' if self.brute_force_checked else 'skipped'}",
        ]


def verify_delsarte_witness(n: int, brute_force: bool | None = None) -> DelsarteReport:
    """Check the explicit witness and return the resulting bound, which must be n^2."""
    if n < 2:
        raise ValueError("n >= 2 required")
    poly = witness_polynomial(n)
    vanish = all(eval_f((0,) * c + (1,) * (n - c)) == 0 for c in (0, 1))
    coeffs = list(poly.values())
    nonneg = min(coeffs) >= 0
    const = poly[(0,) * n]
    at_identity = eval_f((0,) * n)
    # |G| * f(identity) / fhat(trivial), with fhat(trivial) = |G| * constant term
    bound = Fraction(at_identity, const)
    counts: dict[int, int] = {}
    for c in coeffs:
        counts[c] = counts.get(c, 0) + 1
    report = DelsarteReport(n, at_identity, const, vanish, nonneg, min(coeffs), bound,
                            coefficient_counts=counts)
    if brute_force is None:
        brute_force = n <= 5
    if brute_force:
        fhat = brute_force_transform(delsarte_table(n))
        size = n ** n
        expect = np.zeros((n,) * n)
        for e, c in poly.items():
            expect[e] = c * size
        if not np.allclose(fhat, expect, atol=1e-6 * size):
            raise WitnessCheckError(f"brute-force transform disagrees with the expansion at n={n}")
        report.brute_force_checked = True
    if not (vanish and nonneg and bound == n * n):
        raise WitnessCheckError(f"explicit witness failed at n={n}: {report.lines()}")
    return report


@dataclass(frozen=True)
class BoundResult:
    ok: bool
    bound: Fraction | None = None
    reason: str = ""
    point: Vector | None = None
    character: Vector | None = None


def lp_bound(
    f: FunctionTable,
    forbidden: Callable[[Sequence[int]], bool] = in_forbidden_set,
    tol: float = 1e-9,
) -> BoundResult:
    """Bound |B| <= f(0)|G| / fhat(1) if f <= 0 off `forbidden` and fhat >= 0.

    Symmetric tables use the exact Krawtchouk transform and require
    `forbidden` to depend only on the number of zero exponents.  General
    tables (n <= 5) are checked pointwise exactly and transformed by FFT,
    so their nonnegativity test is numerical with relative tolerance `tol`.
    """
    n = f.order
    size = n ** n
    if f.symmetric:
        for c in range(n + 1):
            v = (0,) * c + (1,) * (n - c)
            if not forbidden(v) and f(v) > 0:
                return BoundResult(False, reason="f > 0 outside the forbidden set", point=v)
        fhat = krawtchouk_transform(f.values, n)
        for w, val in enumerate(fhat):
            if val < 0:
                return BoundResult(False, reason="negative Fourier coefficient",
                                   character=(1,) * w + (0,) * (n - w))
        total = fhat[0]
    else:
        if n > 5:
            raise ValueError("general tables are limited to n <= 5")
        for v in product(range(n), repeat=n):
            if not forbidden(v) and f(v) > 0:
                return BoundResult(False, reason="f > 0 outside the forbidden set", point=v)
        fhat = brute_force_transform(f)
        scale = max(1.0, float(np.abs(fhat).max()))
        bad = np.argwhere(fhat.real < -tol * scale)
        if len(bad):
            return BoundResult(False, reason="negative Fourier coefficient",
                               character=tuple(int(x) for x in bad[0]))
        total = sum((f(v) for v in product(range(n), repeat=n)), Fraction(0))
    if total <= 0:
        return BoundResult(False, reason="fhat at the trivial character is not positive",
                           character=(0,) * n)
    return BoundResult(True, Fraction(f((0,) * n)) * size / total)


def support_weight(e: Sequence[int]) -> int:
    return sum(1 for x in e if x)


def coefficient_profile(n: int) -> dict[int, set[int]]:
    """Distinct coefficient values of the witness polynomial grouped by character support size."""
    out: dict[int, set[int]] = {}
    for e, c in witness_polynomial(n).items():
        out.setdefault(support_weight(e), set()).add(c)
    return out


def expected_profile(n: int) -> dict[int, int]:
    """Closed form of the same coefficients: n(n-1), 2n-2 and 2 for supports 0, 1, 2."""
    return {0: n * (n - 1), 1: 2 * n - 2, 2: 2}


def count_with_support(n: int, w: int) -> int:
    return comb(n, w) * (n - 1) ** w
