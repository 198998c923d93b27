"""Text formats shared by the command line, the catalogue and proof bundles.

* vector lists: one comma-separated exponent vector per line
* Latin-square blocks: m lines of m whitespace-separated symbols, blocks
  separated by a blank line, ``#`` starts a comment line
* plane files: one line per text line as row-major point ids, parallel
  classes separated by a blank line
* rationals: ``p/q`` with q > 0 in lowest terms
"""
from __future__ import annotations

import hashlib
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .znn import Vector, VectorError, format_vector, parse_vector


class FormatError(ValueError):
    """Parse failure; `line` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str):
        raise FormatError(f"rational must be a string, got {type(text).__name__}")
    try:
        if "/" in text:
            p, q = text.split("/")
            p, q = int(p), int(q)
            if q <= 0:
                raise FormatError(f"non-positive denominator in {text!r}")
            return Fraction(p, q)
        return Fraction(int(text))
    except ValueError as exc:
        raise FormatError(f"bad rational {text!r}") from exc


def dump_vectors(vectors: Iterable[Sequence[int]]) -> str:
    return "".join(format_vector(v) + "\n" for v in vectors)


def load_vectors(text: str, n: int | None = None) -> list[Vector]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = parse_vector(line, n)
        except VectorError as exc:
            raise FormatError(str(exc), lineno) from exc
        if n is None:
            n = len(v)
        out.append(v)
    return out


def vectors_digest(vectors: Iterable[Sequence[int]]) -> str:
    """SHA-256 of the sorted vector list in text form."""
    return hashlib.sha256(dump_vectors(sorted(tuple(v) for v in vectors)).encode()).hexdigest()


def _blocks(text: str) -> list[tuple[int, list[tuple[int, str]]]]:
    blocks, current = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            if current:
                blocks.append(current)
                current = []
            continue
        current.append((lineno, stripped))
    if current:
        blocks.append(current)
    return [(b[0][0], b) for b in blocks]


def parse_grid_blocks(text: str) -> list[tuple[int, list[list[int]]]]:
    """Return (first line number, rows) for each block; checks only shape and integers."""
    out = []
    for start, block in _blocks(text):
        rows = []
        for lineno, line in block:
            try:
                rows.append([int(x) for x in line.split()])
            except ValueError as exc:
                raise FormatError(f"non-integer symbol in {line!r}", lineno) from exc
        m = len(rows)
        for (lineno, _), row in zip(block, rows):
            if len(row) != m:
                raise FormatError(f"row has {len(row)} symbols, block has {m} rows", lineno)
        out.append((start, rows))
    return out


def format_grid_blocks(grids: Iterable[Sequence[Sequence[int]]], header: str = "") -> str:
    parts = []
    for g in grids:
        parts.append("".join(" ".join(str(x) for x in row) + "\n" for row in g))
    body = "\n".join(parts)
    if header:
        body = "".join(f"# {h}\n" for h in header.splitlines()) + body
    return body


def parse_plane(text: str) -> list[list[frozenset[int]]]:
    classes = []
    for _, block in _blocks(text):
        lines = []
        for lineno, line in block:
            try:
                lines.append(frozenset(int(x) for x in line.split()))
            except ValueError as exc:
                raise FormatError(f"bad point id in {line!r}", lineno) from exc
        classes.append(lines)
    return classes


def format_plane(classes: Sequence[Sequence[Iterable[int]]]) -> str:
    return "\n".join(
        "".join(" ".join(str(p) for p in sorted(line)) + "\n" for line in cls) for cls in classes
    )


def file_sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
