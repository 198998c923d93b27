"""Reduced Latin squares, isotopy canonical forms and class catalogues.

Every Latin square is isotopic to a reduced one (first row and first column
in natural order), and the reduced isotopes of a square are parametrised by
the row that becomes row 0 and an arbitrary column permutation: the symbol
permutation is then fixed by making row 0 the identity and the row order by
making column 0 the identity.  The lexicographically smallest of these m*m!
squares is the canonical form; it is the lexicographic minimum over the
whole isotopy orbit because that minimum is itself reduced.

Squares of order m <= 7 are keyed by the lexicographic ranks of rows
1..m-2 (row m-1 is forced), which gives an order-preserving int64 key.
Classes are found by orbit marking over the sorted key array.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .designs import DesignError, LatinSquare, validate_latin
from .formats import FormatError, format_grid_blocks, parse_grid_blocks

MAX_ORDER = 7


class CatalogueError(ValueError):
    pass


@dataclass(frozen=True)
class IsotopyClassCatalogue:
    order: int
    representatives: tuple[LatinSquare, ...]

    @property
    def labels(self) -> list[int]:
        return list(range(1, len(self.representatives) + 1))

    def __len__(self):
        return len(self.representatives)

    def __getitem__(self, label: int) -> LatinSquare:
        if not 1 <= label <= len(self.representatives):
            raise KeyError(label)
        return self.representatives[label - 1]

    def items(self):
        return zip(self.labels, self.representatives)

    def label_of(self, sq: LatinSquare) -> int:
        canon = canonical_form(sq)
        for label, rep in self.items():
            if rep == canon:
                return label
        raise KeyError("square not isotopic to any representative")

    def text(self) -> str:
        return format_grid_blocks(
            [r.grid for r in self.representatives],
            header=f"isotopy class representatives of order {self.order}: {len(self)}",
        )

    def digest(self) -> str:
        return hashlib.sha256(self.text().encode()).hexdigest()


def _check_order(m: int):
    if not 2 <= m <= MAX_ORDER:
        raise ValueError(f"order {m} outside supported range [2, {MAX_ORDER}]")


@lru_cache(maxsize=None)
def _perm_table(m: int):
    perms = np.array(list(permutations(range(m))), dtype=np.int64)
    weights = m ** np.arange(m - 1, -1, -1, dtype=np.int64)
    rank = np.full(m ** m, -1, dtype=np.int64)
    rank[perms @ weights] = np.arange(len(perms))
    return perms, weights, rank


def _row_ranks(grids: np.ndarray) -> np.ndarray:
    """Lex ranks of every row; grids has shape (..., m, m)."""
    m = grids.shape[-1]
    _, weights, rank = _perm_table(m)
    return rank[grids.astype(np.int64) @ weights]


def _keys(grids: np.ndarray) -> np.ndarray:
    m = grids.shape[-1]
    ranks = _row_ranks(grids)[..., 1 : m - 1]
    base = np.int64(len(_perm_table(m)[0]))
    key = np.zeros(ranks.shape[:-1], dtype=np.int64)
    for t in range(ranks.shape[-1]):
        key = key * base + ranks[..., t]
    return key


def _decode(key: int, m: int) -> LatinSquare:
    perms = _perm_table(m)[0]
    base = len(perms)
    ranks = []
    for _ in range(m - 2):
        key, r = divmod(int(key), base)
        ranks.append(r)
    rows = [list(range(m))] + [list(perms[r]) for r in reversed(ranks)]
    last = [next(iter(set(range(m)) - {row[j] for row in rows})) for j in range(m)]
    rows.append(last)
    return LatinSquare.from_rows(rows)


@lru_cache(maxsize=None)
def _compat_bits(m: int):
    """For each permutation: bitset of permutations disagreeing with it in every position."""
    perms = _perm_table(m)[0]
    total = len(perms)
    nbytes = (total + 7) // 8
    compat = []
    for start in range(0, total, 512):
        block = np.all(perms[start : start + 512, None, :] != perms[None, :, :], axis=2)
        packed = np.packbits(block, axis=1, bitorder="little")
        compat.extend(int.from_bytes(row.tobytes()[:nbytes], "little") for row in packed)
    first = [0] * m
    for idx, p in enumerate(perms):
        first[p[0]] |= 1 << idx
    return compat, first


def _reduced_keys(m: int) -> np.ndarray:
    """Sorted keys of all reduced squares of order m, by bitset backtracking over rows."""
    _check_order(m)
    if m == 2:
        return np.zeros(1, dtype=np.int64)
    compat, first = _compat_bits(m)
    base = len(compat)
    out: list[int] = []
    identity = 0
    depth = m - 2

    def rec(level: int, allowed: int, prefix: int):
        cand = allowed & first[level]
        if level == depth:
            while cand:
                low = cand & -cand
                out.append(prefix * base + low.bit_length() - 1)
                cand ^= low
            return
        while cand:
            low = cand & -cand
            idx = low.bit_length() - 1
            cand ^= low
            rec(level + 1, allowed & compat[idx], prefix * base + idx)

    rec(1, compat[identity], 0)
    return np.array(out, dtype=np.int64)


def enumerate_reduced(m: int) -> Iterator[LatinSquare]:
    """All reduced Latin squares of order m in lexicographic order."""
    for key in _reduced_keys(m):
        yield _decode(int(key), m)


def reduced_isotopes(sq: LatinSquare) -> np.ndarray:
    """All m*m! reduced squares reachable from `sq`, shape (m*m!, m, m), possibly with repeats."""
    m = sq.order
    grid = np.array(sq.grid, dtype=np.int64)
    cols = _perm_table(m)[0]
    idx = np.arange(len(cols))[:, None]
    out = []
    for r in range(m):
        lk = grid[:, cols].transpose(1, 0, 2)  # lk[p, i, j] = grid[i, cols[p, j]]
        sigma = np.empty((len(cols), m), dtype=np.int64)
        sigma[idx, lk[:, r, :]] = np.arange(m)[None, :]
        relabeled = sigma[idx[:, :, None], lk]
        order = np.argsort(relabeled[:, :, 0], axis=1)
        out.append(np.take_along_axis(relabeled, order[:, :, None], axis=1))
    return np.concatenate(out)


def canonical_form(sq: LatinSquare) -> LatinSquare:
    validate_latin(sq).raise_if_failed("Latin square")
    _check_order(sq.order)
    if sq.order == 2:
        return LatinSquare(((0, 1), (1, 0)))
    keys = _keys(reduced_isotopes(sq))
    return _decode(int(keys.min()), sq.order)


def intercalate_count(sq: LatinSquare) -> int:
    """Number of 2x2 Latin subsquares; an isotopy invariant."""
    m, g = sq.order, sq.grid
    count = 0
    for r1 in range(m):
        for r2 in range(r1 + 1, m):
            for c1 in range(m):
                for c2 in range(c1 + 1, m):
                    if g[r1][c1] == g[r2][c2] and g[r1][c2] == g[r2][c1]:
                        count += 1
    return count


def isotopy_classes(m: int) -> IsotopyClassCatalogue:
    """Canonical representatives of all isotopy classes of order m, sorted, labelled 1..K."""
    _check_order(m)
    keys = _reduced_keys(m)
    if m == 2:
        return IsotopyClassCatalogue(2, (LatinSquare(((0, 1), (1, 0))),))
    marked = np.zeros(len(keys), dtype=bool)
    reps = []
    pos = 0
    while True:
        free = np.flatnonzero(~marked[pos:])
        if len(free) == 0:
            break
        pos += int(free[0])
        orbit = np.unique(_keys(reduced_isotopes(_decode(int(keys[pos]), m))))
        where = np.searchsorted(keys, orbit)
        if np.any(where >= len(keys)) or np.any(keys[np.minimum(where, len(keys) - 1)] != orbit):
            raise AssertionError("isotope of a reduced square missing from the enumeration")
        marked[where] = True
        reps.append(int(orbit[0]))
    reps.sort()
    return IsotopyClassCatalogue(m, tuple(_decode(k, m) for k in reps))


def catalogue_from_text(text: str, check_canonical: bool = False) -> IsotopyClassCatalogue:
    try:
        blocks = parse_grid_blocks(text)
    except FormatError as exc:
        raise CatalogueError(f"parse error: {exc}") from exc
    if not blocks:
        raise CatalogueError("catalogue contains no squares")
    squares = []
    order = None
    for k, (line, rows) in enumerate(blocks, 1):
        sq = LatinSquare.from_rows(rows)
        rep = validate_latin(sq)
        if not rep:
            raise CatalogueError(f"block {k} (line {line}): {rep.message}")
        if order is None:
            order = sq.order
        elif sq.order != order:
            raise CatalogueError(f"block {k} (line {line}): order {sq.order}, expected {order}")
        squares.append(sq)
    if check_canonical:
        seen = set()
        for k, sq in enumerate(squares, 1):
            try:
                canon = canonical_form(sq)
            except (ValueError, DesignError) as exc:
                raise CatalogueError(f"block {k}: {exc}") from exc
            if canon != sq:
                raise CatalogueError(f"block {k} is not in canonical form")
            if canon in seen:
                raise CatalogueError(f"block {k} repeats an earlier isotopy class")
            seen.add(canon)
    return IsotopyClassCatalogue(order, tuple(squares))


def load_catalogue(path, check_canonical: bool = False) -> IsotopyClassCatalogue:
    return catalogue_from_text(Path(path).read_text(), check_canonical)


def save_catalogue(catalogue: IsotopyClassCatalogue, path) -> None:
    Path(path).write_text(catalogue.text())


def canonicalize_all(squares: Sequence[LatinSquare]) -> list[LatinSquare]:
    return [canonical_form(s) for s in squares]
