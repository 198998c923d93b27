"""Improvement witnesses h for partial codes.

A witness is a real function h = sum_{i<j} g_ij(z_i, z_j) with every pair
table g_ij summing to zero, such that h sums to 1 over the partial code B0
and h >= 0 on every candidate d in D.  Over any full code every pair of
coordinates takes each value pair exactly once, so h would sum to 0 over
the whole code, while B0 contributes 1 and the rest is nonnegative: B0
cannot be completed.

The search for h is an LP whose Farkas alternative is a fractional
completion: weights mu_d >= 0 such that every pair cell (i, j, a, b) not
already covered by B0 is covered with total weight exactly 1.  The exact
simplex runs phase 1 on that alternative; a positive optimum yields h from
the optimal row prices, a zero optimum yields the fractional completion.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .candidates import enumerate_candidates
from .designs import PlaneCode, validate_code
from .formats import format_rational, parse_rational, vectors_digest
from .simplex import phase_one
from .znn import Vector, VectorError, count_coincidences, make_vector

CERT_VERSION = 1


class CertificateFormatError(ValueError):
    """A certificate record could not be parsed."""


def pairs(n: int) -> list[tuple[int, int]]:
    """1-based coordinate pairs i < j."""
    return list(combinations(range(1, n + 1), 2))


@dataclass(frozen=True)
class WitnessFunction:
    order: int
    tables: dict[tuple[int, int], tuple[tuple[Fraction, ...], ...]]

    @classmethod
    def zero(cls, n: int) -> "WitnessFunction":
        z = tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
        return cls(n, {p: z for p in pairs(n)})

    def zero_sum_violations(self) -> list[tuple[int, int]]:
        return [p for p, t in sorted(self.tables.items()) if sum(sum(row) for row in t) != 0]


def eval_h(h: WitnessFunction, v: Sequence[int]) -> Fraction:
    if len(v) != h.order:
        raise VectorError(f"vector of length {len(v)} for a witness of order {h.order}")
    total = Fraction(0)
    for (i, j), t in h.tables.items():
        total += t[v[i - 1]][v[j - 1]]
    return total


@dataclass
class FeasibilityLP:
    """Variables are the pair-table entries g_ij(a, b), indexed pair-major."""

    order: int
    b0: tuple[Vector, ...]
    d: tuple[Vector, ...]
    pair_list: list[tuple[int, int]] = field(default_factory=list)

    @property
    def n_variables(self) -> int:
        return len(self.pair_list) * self.order ** 2

    @property
    def n_equalities(self) -> int:
        return len(self.pair_list) + 1

    @property
    def n_inequalities(self) -> int:
        return len(self.d)

    def variable(self, p: int, a: int, b: int) -> int:
        return (p * self.order + a) * self.order + b

    def cells(self, v: Sequence[int]) -> list[int]:
        return [self.variable(p, v[i - 1], v[j - 1]) for p, (i, j) in enumerate(self.pair_list)]

    def equality_rows(self) -> list[tuple[dict[int, int], int]]:
        """Zero sum per pair table, then the normalisation sum over B0 equal to 1."""
        n2 = self.order ** 2
        rows = [({p * n2 + k: 1 for k in range(n2)}, 0) for p in range(len(self.pair_list))]
        norm: dict[int, int] = {}
        for v in self.b0:
            for c in self.cells(v):
                norm[c] = norm.get(c, 0) + 1
        rows.append((norm, 1))
        return rows

    def inequality_rows(self) -> list[dict[int, int]]:
        """h(d) >= 0 for each candidate."""
        return [{c: 1 for c in self.cells(d)} for d in self.d]

    def covered(self) -> set[int]:
        return {c for v in self.b0 for c in self.cells(v)}

    def alternative(self):
        """Cover system: columns per candidate over the uncovered cells, all right-hand sides 1."""
        cov = self.covered()
        row_cells = [c for c in range(self.n_variables) if c not in cov]
        row_of = {c: r for r, c in enumerate(row_cells)}
        columns = [{row_of[c]: 1 for c in self.cells(d)} for d in self.d]
        return columns, [1] * len(row_cells), row_cells


def build_lp(b0: Iterable[Sequence[int]], d: Iterable[Sequence[int]]) -> FeasibilityLP:
    b0 = tuple(make_vector(v) for v in b0)
    if not b0:
        raise ValueError("B0 must be nonempty")
    n = len(b0[0])
    code = PlaneCode(n, b0)
    rep = validate_code(code)
    if not rep:
        raise ValueError(f"B0 is not a partial code: {rep.message}")
    d = tuple(make_vector(v, n) for v in d)
    members = set(b0)
    for v in d:
        if v in members:
            raise ValueError(f"candidate {v} already in B0")
        if any(count_coincidences(v, w) > 1 for w in b0):
            raise ValueError(f"candidate {v} coincides twice with a member of B0")
    return FeasibilityLP(n, b0, d, pairs(n))


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: WitnessFunction | None = None
    cover: dict[Vector, Fraction] | None = None
    objective: Fraction = Fraction(0)
    pivots: int = 0

    def __bool__(self):
        return self.feasible


def check_witness(lp: FeasibilityLP, h: WitnessFunction) -> str:
    """Empty string if h satisfies every constraint of `lp` exactly, else the first violation."""
    bad = h.zero_sum_violations()
    if bad:
        return f"pair table {bad[0]} does not sum to zero"
    total = sum((eval_h(h, v) for v in lp.b0), Fraction(0))
    if total != 1:
        return f"sum over B0 is {total}, not 1"
    for v in lp.d:
        val = eval_h(h, v)
        if val < 0:
            return f"h({','.join(map(str, v))}) = {val} < 0"
    return ""


def check_cover(lp: FeasibilityLP, cover: dict[Vector, Fraction]) -> str:
    """Empty string if `cover` is an exact fractional completion (proving no witness exists)."""
    if any(w < 0 for w in cover.values()):
        return "negative weight"
    if any(v not in set(lp.d) for v in cover):
        return "weight on a non-candidate"
    load: dict[int, Fraction] = {}
    for v, w in cover.items():
        for c in lp.cells(v):
            load[c] = load.get(c, 0) + w
    cov = lp.covered()
    for c in range(lp.n_variables):
        want = 0 if c in cov else 1
        if load.get(c, 0) != want:
            return f"cell {c} carries {load.get(c, 0)}, expected {want}"
    return ""


def _witness_from_prices(lp: FeasibilityLP, row_cells: list[int], y: list[Fraction], z: Fraction):
    n = lp.order
    n2 = n * n
    vals = [Fraction(0)] * lp.n_variables
    for r, c in enumerate(row_cells):
        vals[c] = -y[r] / z
    cov = sorted(lp.covered())
    for p in range(len(lp.pair_list)):
        block = range(p * n2, (p + 1) * n2)
        anchor = next(c for c in cov if c in block)
        vals[anchor] = -sum(vals[c] for c in block if c != anchor)
    tables = {}
    for p, pr in enumerate(lp.pair_list):
        tables[pr] = tuple(tuple(vals[p * n2 + a * n + b] for b in range(n)) for a in range(n))
    return WitnessFunction(n, tables)


def solve_feasibility(lp: FeasibilityLP, *, hint: bool = True, rule: str = "bland") -> FeasibilityResult:
    """Exact decision: a witness h, or a fractional completion showing none exists."""
    columns, rhs, row_cells = lp.alternative()
    res = phase_one(columns, rhs, len(rhs), hint=hint, rule=rule)
    if res.feasible:
        cover = {lp.d[j]: w for j, w in sorted(res.x.items())}
        problem = check_cover(lp, cover)
        if problem:
            raise AssertionError(f"exact phase one returned a bad completion: {problem}")
        return FeasibilityResult(False, cover=cover, pivots=res.pivots)
    h = _witness_from_prices(lp, row_cells, res.y, res.objective)
    problem = check_witness(lp, h)
    if problem:
        raise AssertionError(f"exact phase one returned a bad witness: {problem}")
    return FeasibilityResult(True, witness=h, objective=res.objective, pivots=res.pivots)


# certificates


@dataclass(frozen=True)
class Certificate:
    order: int
    catalogue_label: int | None
    extension: tuple[Vector, ...]
    b0: tuple[Vector, ...]
    witness: WitnessFunction
    d_digest: str
    version: int = CERT_VERSION

    def to_json(self) -> dict:
        n = self.order
        return {
            "version": self.version,
            "order": n,
            "seed": {
                "catalogue_label": self.catalogue_label,
                "extension": [list(v) for v in self.extension],
            },
            "b0": [list(v) for v in self.b0],
            "d_digest": self.d_digest,
            "tables": {
                f"{i},{j}": [[format_rational(x) for x in row] for row in t]
                for (i, j), t in sorted(self.witness.tables.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, obj) -> "Certificate":
        try:
            if obj["version"] != CERT_VERSION:
                raise CertificateFormatError(f"unsupported version {obj['version']!r}")
            n = int(obj["order"])
            if n < 2:
                raise CertificateFormatError("order must be >= 2")
            seed = obj["seed"]
            label = seed.get("catalogue_label")
            ext = tuple(make_vector(v, n) for v in seed["extension"])
            b0 = tuple(make_vector(v, n) for v in obj["b0"])
            digest = obj["d_digest"]
            if not isinstance(digest, str):
                raise CertificateFormatError("d_digest must be a string")
            raw = obj["tables"]
            want = {f"{i},{j}" for i, j in pairs(n)}
            if set(raw) != want:
                raise CertificateFormatError("tables must have exactly one entry per pair i<j")
            tables = {}
            for key, rows in raw.items():
                i, j = (int(x) for x in key.split(","))
                if len(rows) != n or any(len(r) != n for r in rows):
                    raise CertificateFormatError(f"table {key} is not {n}x{n}")
                parsed = []
                for r in rows:
                    prow = []
                    for x in r:
                        q = parse_rational(x)
                        if format_rational(q) != x:
                            raise CertificateFormatError(f"rational {x!r} not in lowest p/q form")
                        prow.append(q)
                    parsed.append(tuple(prow))
                tables[(i, j)] = tuple(parsed)
        except CertificateFormatError:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CertificateFormatError(f"malformed certificate: {exc}") from exc
        return cls(n, label, ext, b0, WitnessFunction(n, tables), digest)

    @classmethod
    def loads(cls, text: str) -> "Certificate":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_json(obj)


def make_certificate(lp: FeasibilityLP, h: WitnessFunction, label: int | None = None,
                     extension: Sequence[Vector] = ()) -> Certificate:
    return Certificate(lp.order, label, tuple(extension), lp.b0, h, vectors_digest(lp.d))


@dataclass
class WitnessReport:
    ok: bool
    message: str = ""
    candidates: int = 0

    def __bool__(self):
        return self.ok


def verify_witness(cert: Certificate, d: Sequence[Vector] | None = None) -> WitnessReport:
    """Exact re-check of a certificate.  D is recomputed from B0 unless supplied by a caller that did so."""
    n = cert.order
    code = PlaneCode(n, cert.b0)
    rep = validate_code(code)
    if not cert.b0 or not rep:
        return WitnessReport(False, f"B0 is not a partial code: {rep.message or 'empty'}")
    if tuple(cert.b0[len(cert.b0) - len(cert.extension):]) != cert.extension:
        return WitnessReport(False, "extension vectors are not the tail of B0")
    if d is None:
        d = enumerate_candidates(cert.b0, n)
    if vectors_digest(d) != cert.d_digest:
        return WitnessReport(False, "candidate set digest mismatch", len(d))
    bad = cert.witness.zero_sum_violations()
    if bad:
        return WitnessReport(False, f"pair table {bad[0]} does not sum to zero", len(d))
    total = sum((eval_h(cert.witness, v) for v in cert.b0), Fraction(0))
    if total != 1:
        return WitnessReport(False, f"sum over B0 is {total}, not 1", len(d))
    for v in d:
        val = eval_h(cert.witness, v)
        if val < 0:
            return WitnessReport(False, f"h({','.join(map(str, v))}) = {val} < 0", len(d))
    return WitnessReport(True, "", len(d))
