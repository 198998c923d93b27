"""Latin squares, complete MOLS, affine and projective planes, plane codes.

Point ids are row-major: the point with coordinates (i, j) in Z_n^2 has id
``i * n + j``.  Lines are frozensets of point ids and a parallel class is a
tuple of lines (its order is the line index m in l_k^(m)).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .znn import Vector, count_coincidences, make_vector


class DesignError(ValueError):
    """A structure failed validation or a conversion precondition."""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    message: str = ""

    def __bool__(self):
        return self.ok

    def raise_if_failed(self, what: str = "structure"):
        if not self.ok:
            raise DesignError(f"invalid {what}: {self.message}")


PASS = ValidationReport(True)


def _fail(msg: str) -> ValidationReport:
    return ValidationReport(False, msg)


@dataclass(frozen=True)
class LatinSquare:
    grid: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "LatinSquare":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @property
    def order(self) -> int:
        return len(self.grid)

    def __getitem__(self, ij):
        i, j = ij
        return self.grid[i][j]

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(row[j] for row in self.grid) for j in range(self.order)]


@dataclass(frozen=True)
class MOLSet:
    order: int
    squares: tuple[LatinSquare, ...]


@dataclass(frozen=True)
class AffinePlane:
    order: int
    classes: tuple[tuple[frozenset[int], ...], ...]

    @property
    def points(self) -> range:
        return range(self.order * self.order)

    def lines(self) -> list[frozenset[int]]:
        return [line for cls in self.classes for line in cls]


@dataclass(frozen=True)
class ProjectivePlane:
    """Affine plane plus one ideal point per parallel class (ids n^2, n^2+1, ...)."""

    affine: AffinePlane

    @classmethod
    def from_affine(cls, plane: AffinePlane) -> "ProjectivePlane":
        return cls(plane)

    @property
    def order(self) -> int:
        return self.affine.order

    @property
    def line_at_infinity(self) -> frozenset[int]:
        n2 = self.order ** 2
        return frozenset(range(n2, n2 + len(self.affine.classes)))

    @property
    def num_points(self) -> int:
        return self.order ** 2 + len(self.affine.classes)

    def lines(self) -> list[frozenset[int]]:
        n2 = self.order ** 2
        out = [line | {n2 + k} for k, cls in enumerate(self.affine.classes) for line in cls]
        out.append(self.line_at_infinity)
        return out


@dataclass(frozen=True)
class PlaneCode:
    order: int
    vectors: tuple[Vector, ...]

    @classmethod
    def of(cls, vectors, n: int | None = None) -> "PlaneCode":
        vs = tuple(make_vector(v, n) for v in vectors)
        if n is None:
            if not vs:
                raise DesignError("cannot infer order of an empty code")
            n = len(vs[0])
        return cls(n, vs)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)


# validation


def validate_latin(sq: LatinSquare, order: int | None = None) -> ValidationReport:
    m = sq.order
    if order is not None and m != order:
        return _fail(f"square has order {m}, expected {order}")
    if m == 0:
        return _fail("empty square")
    symbols = set(range(m))
    for i, row in enumerate(sq.grid):
        if len(row) != m:
            return _fail(f"row {i} has length {len(row)}, expected {m}")
        if set(row) != symbols:
            return _fail(f"row {i} does not contain each symbol 0..{m - 1} exactly once")
    for j, col in enumerate(sq.columns()):
        if set(col) != symbols:
            return _fail(f"column {j} does not contain each symbol 0..{m - 1} exactly once")
    return PASS


def orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    m = a.order
    pairs = {(a.grid[i][j], b.grid[i][j]) for i in range(m) for j in range(m)}
    return len(pairs) == m * m


def validate_mols(mols: MOLSet, complete: bool = True) -> ValidationReport:
    n = mols.order
    if complete and len(mols.squares) != n - 1:
        return _fail(f"complete set needs {n - 1} squares, got {len(mols.squares)}")
    for k, sq in enumerate(mols.squares):
        rep = validate_latin(sq, n)
        if not rep:
            return _fail(f"square {k}: {rep.message}")
    for (a, sa), (b, sb) in combinations(enumerate(mols.squares), 2):
        if not orthogonal(sa, sb):
            return _fail(f"squares {a} and {b} are not orthogonal")
    return PASS


def validate_affine(plane: AffinePlane) -> ValidationReport:
    n = plane.order
    if n < 2:
        return _fail("order must be >= 2")
    if len(plane.classes) != n + 1:
        return _fail(f"expected {n + 1} parallel classes, got {len(plane.classes)}")
    npts = n * n
    for k, cls in enumerate(plane.classes):
        if len(cls) != n:
            return _fail(f"class {k} has {len(cls)} lines, expected {n}")
        for m, line in enumerate(cls):
            if len(line) != n:
                return _fail(f"line {m} of class {k} has {len(line)} points, expected {n}")
            if any(not 0 <= p < npts for p in line):
                return _fail(f"line {m} of class {k} has a point id outside [0, {npts})")
    for (k1, c1), (k2, c2) in combinations(enumerate(plane.classes), 2):
        for m1, l1 in enumerate(c1):
            for m2, l2 in enumerate(c2):
                meet = len(l1 & l2)
                if meet != 1:
                    return _fail(
                        f"two lines intersect in {meet} != 1 point: "
                        f"line {m1} of class {k1} and line {m2} of class {k2}"
                    )
    for k, cls in enumerate(plane.classes):
        covered = set()
        for line in cls:
            if covered & line:
                return _fail(f"parallel lines of class {k} intersect")
            covered |= line
        if len(covered) != npts:
            return _fail(f"class {k} does not cover all points")
    return PASS


def validate_projective(plane: ProjectivePlane) -> ValidationReport:
    rep = validate_affine(plane.affine)
    if not rep:
        return rep
    lines = plane.lines()
    v = plane.num_points
    n = plane.order
    if len(lines) != v or v != n * n + n + 1:
        return _fail(f"expected {n * n + n + 1} points and lines")
    for a, b in combinations(range(len(lines)), 2):
        if len(lines[a] & lines[b]) != 1:
            return _fail(f"projective lines {a} and {b} do not meet in exactly one point")
    on = [0] * (v * v)
    for line in lines:
        for p, q in combinations(sorted(line), 2):
            on[p * v + q] += 1
    for p, q in combinations(range(v), 2):
        if on[p * v + q] != 1:
            return _fail(f"points {p} and {q} lie on {on[p * v + q]} lines")
    return PASS


def validate_code(code: PlaneCode, complete: bool = False) -> ValidationReport:
    """Pairwise at most one coincidence; with `complete`, also |code| = n^2."""
    n = code.order
    for v in code.vectors:
        if len(v) != n or any(not 0 <= x < n for x in v):
            return _fail(f"vector {v} is not an element of Z_{n}^{n}")
    if len(set(code.vectors)) != len(code.vectors):
        return _fail("code contains a repeated vector")
    if complete and len(code.vectors) != n * n:
        return _fail(f"code has {len(code.vectors)} vectors, expected {n * n}")
    for a, b in combinations(code.vectors, 2):
        c = count_coincidences(a, b)
        if c > 1:
            return _fail(f"vectors {a} and {b} coincide in {c} coordinates")
    return PASS


# constructions


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def prime_plane(p: int) -> AffinePlane:
    """Lines y = a*x + b (one class per slope a) followed by the vertical class x = c."""
    if not _is_prime(p):
        raise DesignError(f"{p} is not prime")
    classes = [
        tuple(frozenset(x * p + (a * x + b) % p for x in range(p)) for b in range(p))
        for a in range(p)
    ]
    classes.append(tuple(frozenset(c * p + y for y in range(p)) for c in range(p)))
    return AffinePlane(p, tuple(classes))


def affine_to_mols(plane: AffinePlane) -> MOLSet:
    """The last two classes act as the vertical and horizontal lines."""
    validate_affine(plane).raise_if_failed("affine plane")
    n = plane.order
    vertical, horizontal = plane.classes[-2], plane.classes[-1]
    coord = {}
    for i, vl in enumerate(vertical):
        for j, hl in enumerate(horizontal):
            (pt,) = vl & hl
            coord[pt] = (i, j)
    squares = []
    for cls in plane.classes[:-2]:
        grid = [[0] * n for _ in range(n)]
        for m, line in enumerate(cls):
            for pt in line:
                i, j = coord[pt]
                grid[i][j] = m
        squares.append(LatinSquare.from_rows(grid))
    return MOLSet(n, tuple(squares))


def mols_to_affine(mols: MOLSet) -> AffinePlane:
    validate_mols(mols, complete=True).raise_if_failed("MOLS")
    n = mols.order
    classes = []
    for sq in mols.squares:
        lines = [set() for _ in range(n)]
        for i in range(n):
            for j in range(n):
                lines[sq.grid[i][j]].add(i * n + j)
        classes.append(tuple(frozenset(line) for line in lines))
    classes.append(tuple(frozenset(m * n + j for j in range(n)) for m in range(n)))
    classes.append(tuple(frozenset(i * n + m for i in range(n)) for m in range(n)))
    return AffinePlane(n, tuple(classes))


def affine_to_code(plane: AffinePlane) -> PlaneCode:
    """Constants (m,...,m) first, then for each square and symbol the column of that symbol per row."""
    mols = affine_to_mols(plane)
    n = plane.order
    vectors = [(m,) * n for m in range(n)]
    for sq in mols.squares:
        where = [[0] * n for _ in range(n)]
        for i, row in enumerate(sq.grid):
            for j, s in enumerate(row):
                where[s][i] = j
        vectors.extend(tuple(w) for w in where)
    return PlaneCode(n, tuple(vectors))


def partition_code(code: PlaneCode) -> list[list[Vector]]:
    """Split a full code into n classes of mutually disjoint (no coincidence) vectors."""
    n = code.order
    rep = validate_code(code, complete=True)
    if not rep:
        raise DesignError(f"cannot partition: {rep.message}")
    vs = list(code.vectors)
    parent = list(range(len(vs)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in combinations(range(len(vs)), 2):
        if count_coincidences(vs[a], vs[b]) == 0:
            parent[find(a)] = find(b)
    groups: dict[int, list[Vector]] = {}
    for idx, v in enumerate(vs):
        groups.setdefault(find(idx), []).append(v)
    classes = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    if len(classes) != n or any(len(g) != n for g in classes):
        raise DesignError(
            f"partition has class sizes {sorted(len(g) for g in classes)}, expected {n} classes of {n}"
        )
    for g in classes:
        for a, b in combinations(g, 2):
            if count_coincidences(a, b) != 0:
                raise DesignError("vectors in one class share a coordinate")
    for g1, g2 in combinations(classes, 2):
        for a in g1:
            for b in g2:
                if count_coincidences(a, b) != 1:
                    raise DesignError(f"vectors {a} and {b} from different classes do not coincide once")
    return classes


def code_to_affine(code: PlaneCode) -> AffinePlane:
    """Each vector u becomes the line {(i, u_i)}; the vertical lines {(m, *)} form the last class."""
    n = code.order
    if len(code.vectors) != n * n:
        raise DesignError(f"code has {len(code.vectors)} vectors, expected {n * n}")
    classes = [
        tuple(frozenset(i * n + u[i] for i in range(n)) for u in cls) for cls in partition_code(code)
    ]
    classes.append(tuple(frozenset(m * n + j for j in range(n)) for m in range(n)))
    plane = AffinePlane(n, tuple(classes))
    validate_affine(plane).raise_if_failed("affine plane built from code")
    return plane
