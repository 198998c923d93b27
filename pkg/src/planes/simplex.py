"""Exact rational phase-1 simplex.

Solves  min sum(a)  s.t.  A x + I a = b,  x, a >= 0  with b >= 0 and integer
A given as sparse columns.  A basis consists of structural columns S, the
artificial columns of a row set Ra and, for a warm start only, "logical"
unit columns of a row set Rl that are fixed at zero and cost nothing.
With Rs the remaining rows the basis matrix is block triangular, so only
the k x k block A[Rs, S] is ever factorised (exactly, with FLINT).

A floating-point HiGHS solve may supply the starting basis.  It is only a
hint: both possible outcomes are re-derived exactly from it.  A primal
point x >= 0 with A x = b proves feasibility; row prices y with
y.A_j <= 0 for every column, y <= 1 and y.b > 0 bound the phase-1 optimum
away from zero (weak duality) and prove infeasibility.  If neither
certificate comes out of the hint, the exact simplex takes over with
Bland's rule (or Dantzig's rule falling back to Bland on degenerate runs).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import flint
import numpy as np

log = logging.getLogger(__name__)

Column = Mapping[int, int]
ZERO = flint.fmpq(0)
ONE = flint.fmpq(1)


class SimplexError(RuntimeError):
    pass


def to_fraction(q) -> Fraction:
    q = flint.fmpq(q)
    return Fraction(int(q.p), int(q.q))


def _fmpq(x) -> flint.fmpq:
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


@dataclass
class PhaseOneResult:
    feasible: bool
    objective: Fraction  # phase-1 optimum when solved by pivoting; certified lower bound from a hint
    x: dict[int, Fraction]  # nonzero structural values of the final basic solution
    y: list[Fraction]  # row prices; reduced cost of column j is -y.A_j
    structural_basis: tuple[int, ...]
    artificial_rows: tuple[int, ...]
    pivots: int
    warm_started: bool


class _Basis:
    def __init__(self, cols: Sequence[Column], rhs: list, m: int,
                 S: list[int], Ra: set[int], Rl: frozenset[int] = frozenset()):
        self.cols, self.rhs, self.m = cols, rhs, m
        self.S, self.Ra, self.Rl = S, Ra, Rl
        self.Rs = [r for r in range(m) if r not in Ra and r not in Rl]
        if len(self.Rs) != len(S):
            raise SimplexError("basis shape mismatch")
        self.pos = {r: i for i, r in enumerate(self.Rs)}
        k = len(S)
        entries = [0] * (k * k)
        for c, j in enumerate(S):
            for r, a in cols[j].items():
                i = self.pos.get(r)
                if i is not None:
                    entries[i * k + c] = a
        self.M = flint.fmpq_mat(k, k, entries) if k else None
        self._Mt = None

    def solve(self, vec: Mapping[int, object]) -> list:
        """z with A[Rs, S] z = vec[Rs]; raises ZeroDivisionError if singular."""
        k = len(self.S)
        if not k:
            return []
        b = [ZERO] * k
        for r, v in vec.items():
            i = self.pos.get(r)
            if i is not None:
                b[i] = flint.fmpq(v)
        sol = self.M.solve(flint.fmpq_mat(k, 1, b))
        return [sol[i, 0] for i in range(k)]

    def residual(self, z: list, vec: Mapping[int, object], rows) -> dict[int, object]:
        """vec[r] - A[r, S] z for r in rows."""
        rows = set(rows)
        out = {r: flint.fmpq(vec.get(r, 0)) for r in rows}
        for c, j in enumerate(self.S):
            if z[c] == 0:
                continue
            for r, a in self.cols[j].items():
                if r in rows:
                    out[r] -= a * z[c]
        return out

    def primal(self):
        rhs = dict(enumerate(self.rhs))
        xs = self.solve(rhs)
        return xs, self.residual(xs, rhs, self.Ra), self.residual(xs, rhs, self.Rl)

    def duals(self) -> list:
        y = [ZERO] * self.m
        for r in self.Ra:
            y[r] = ONE
        k = len(self.S)
        if k:
            t = [-sum((a for r, a in self.cols[j].items() if r in self.Ra), ZERO) for j in self.S]
            if self._Mt is None:
                self._Mt = self.M.transpose()
            sol = self._Mt.solve(flint.fmpq_mat(k, 1, t))
            for i in range(k):
                y[self.Rs[i]] = sol[i, 0]
        return y

    def reduced_costs(self, y) -> list[tuple[int, object]]:
        """(variable, reduced cost) over nonbasic variables; artificial of row r is variable n + r."""
        basic = set(self.S)
        n = len(self.cols)
        out = [(j, -sum((a * y[r] for r, a in col.items()), ZERO))
               for j, col in enumerate(self.cols) if j not in basic]
        out.extend((n + r, ONE - y[r]) for r in range(self.m) if r not in self.Ra)
        return out


def _pivot_columns(mat) -> list[int]:
    rref, _, rank = mat.rref()
    out, row = [], 0
    for c in range(mat.ncols()):
        if row < rank and rref[row, c] != 0:
            out.append(c)
            row += 1
    return out


def _independent_start(cols: Sequence[Column], m: int, cand: Sequence[int], forced_rows: set[int]):
    """Exact choice of independent columns from `cand` with pivot rows outside `forced_rows`."""
    free_rows = [r for r in range(m) if r not in forced_rows]
    if not cand or not free_rows:
        return [], set(range(m))
    idx = {r: i for i, r in enumerate(free_rows)}
    f, k = len(free_rows), len(cand)
    entries = [0] * (f * k)
    for c, j in enumerate(cand):
        for r, a in cols[j].items():
            i = idx.get(r)
            if i is not None:
                entries[i * k + c] = a
    keep = _pivot_columns(flint.fmpz_mat(f, k, entries))
    if not keep:
        return [], set(range(m))
    sub = flint.fmpz_mat(len(keep), f, [entries[i * k + c] for c in keep for i in range(f)])
    rows = [free_rows[i] for i in _pivot_columns(sub)]
    return [cand[c] for c in keep], set(range(m)) - set(rows)


def highs_basis_hint(columns: Sequence[Column], rhs: Sequence, m: int):
    """Float solve of the phase-1 LP; returns (basic columns, basic artificial rows, basic logical rows)."""
    import highspy

    n = len(columns)
    starts, index, value = [0], [], []
    for col in columns:
        for r in sorted(col):
            index.append(r)
            value.append(float(col[r]))
        starts.append(len(index))
    for r in range(m):
        index.append(r)
        value.append(1.0)
        starts.append(len(index))
    lp = highspy.HighsLp()
    lp.num_col_ = n + m
    lp.num_row_ = m
    lp.col_cost_ = np.concatenate([np.zeros(n), np.ones(m)])
    lp.col_lower_ = np.zeros(n + m)
    lp.col_upper_ = np.full(n + m, highspy.kHighsInf)
    b = np.array([float(Fraction(x)) for x in rhs])
    lp.row_lower_ = b
    lp.row_upper_ = b
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = np.array(starts, dtype=np.int32)
    lp.a_matrix_.index_ = np.array(index, dtype=np.int32)
    lp.a_matrix_.value_ = np.array(value)
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.passModel(lp)
    h.run()
    basis = h.getBasis()
    basic = highspy.HighsBasisStatus.kBasic
    cs, rs = list(basis.col_status), list(basis.row_status)
    S = [j for j in range(n) if cs[j] == basic]
    Ra = {r for r in range(m) if cs[n + r] == basic}
    Rl = frozenset(r for r in range(m) if rs[r] == basic)
    return S, Ra, Rl


def _result(basis: _Basis, feasible: bool, objective, xs, y, pivots, warm) -> PhaseOneResult:
    return PhaseOneResult(
        feasible=feasible,
        objective=to_fraction(objective),
        x={j: to_fraction(v) for j, v in zip(basis.S, xs) if v != 0},
        y=[to_fraction(v) for v in y],
        structural_basis=tuple(basis.S),
        artificial_rows=tuple(sorted(basis.Ra)),
        pivots=pivots,
        warm_started=warm,
    )


def _certify_hint(cols, rhs, m, S, Ra, Rl):
    """Try to read an exact certificate off a hinted basis; None if it yields neither."""
    try:
        basis = _Basis(cols, rhs, m, S, Ra, Rl)
        xs, arts, logic = basis.primal()
        y = basis.duals()
    except (ZeroDivisionError, SimplexError):
        return None
    if all(v >= 0 for v in xs) and all(v == 0 for v in arts.values()) and all(v == 0 for v in logic.values()):
        return _result(basis, True, ZERO, xs, y, 0, True)
    bound = sum((y[r] * rhs[r] for r in range(m)), ZERO)
    if bound > 0 and all(rc >= 0 for _, rc in basis.reduced_costs(y)):
        return _result(basis, False, bound, xs, y, 0, True)
    return None


def phase_one(
    columns: Sequence[Column],
    rhs: Sequence,
    m: int,
    *,
    hint: bool = True,
    rule: str = "bland",
    max_pivots: int | None = None,
) -> PhaseOneResult:
    """Exact phase 1; `feasible` is True iff A x = b has a solution x >= 0."""
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    if len(rhs) != m:
        raise ValueError("rhs length must equal number of rows")
    b = [_fmpq(x) for x in rhs]
    if any(x < 0 for x in b):
        raise ValueError("phase one needs b >= 0")
    S: list[int] = []
    Ra: set[int] = set(range(m))
    warm = False
    if hint and columns:
        hs, hra, hrl = highs_basis_hint(columns, rhs, m)
        done = _certify_hint(columns, b, m, hs, hra, hrl)
        if done is not None:
            return done
        log.debug("event=hint_not_optimal rows=%d cols=%d", m, len(columns))
        S, Ra = _independent_start(columns, m, hs, hra)
        warm = True
    basis = _Basis(columns, b, m, S, Ra)
    xs, arts, _ = basis.primal()
    if any(v < 0 for v in xs) or any(v < 0 for v in arts.values()):
        warm = False
        basis = _Basis(columns, b, m, [], set(range(m)))
        xs, arts, _ = basis.primal()

    n = len(columns)
    pivots = 0
    degenerate_run = 0
    while True:
        objective = sum(arts.values(), ZERO)
        y = basis.duals()
        if objective == 0:
            break
        neg = [(v, rc) for v, rc in basis.reduced_costs(y) if rc < 0]
        if not neg:
            break
        if rule == "bland" or degenerate_run > 20:
            q = min(v for v, _ in neg)
        else:
            q = min(neg, key=lambda t: (t[1], t[0]))[0]
        col = columns[q] if q < n else {q - n: 1}
        ws = basis.solve(col)
        wa = basis.residual(ws, col, basis.Ra)
        best = None
        for c, j in enumerate(basis.S):
            if ws[c] > 0:
                key = (xs[c] / ws[c], j)
                if best is None or key < best[0]:
                    best = (key, ("s", c))
        for r in basis.Ra:
            if wa[r] > 0:
                key = (arts[r] / wa[r], n + r)
                if best is None or key < best[0]:
                    best = (key, ("a", r))
        if best is None:
            raise SimplexError("phase one reported unbounded")
        degenerate_run = degenerate_run + 1 if best[0][0] == 0 else 0
        S, Ra = list(basis.S), set(basis.Ra)
        kind, where = best[1]
        if q < n:
            if kind == "s":
                S[where] = q
            else:
                Ra.discard(where)
                S.append(q)
        else:
            if kind == "s":
                S.pop(where)
            else:
                Ra.discard(where)
            Ra.add(q - n)
        basis = _Basis(columns, b, m, S, Ra)
        xs, arts, _ = basis.primal()
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            raise SimplexError(f"pivot limit {max_pivots} exceeded")
    return _result(basis, objective == 0, objective, xs, y, pivots, warm)
