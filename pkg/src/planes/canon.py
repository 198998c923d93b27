"""Canonical labelling of point-line incidence structures.

A small individualisation-refinement search in the style of nauty:
equitable refinement by neighbour counts, branching on the first largest
non-singleton cell, and pruning with automorphisms found at equivalent
leaves (orbit pruning on the first path, jump-back elsewhere).  The
canonical form is the least relabelled edge list over the leaves.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .designs import AffinePlane, PlaneCode, ProjectivePlane, code_to_affine, validate_code


def _refine(cells: list[list[int]], adj: Sequence[Sequence[int]], nv: int) -> list[list[int]]:
    where = [0] * nv
    while True:
        for i, c in enumerate(cells):
            for v in c:
                where[v] = i
        out = []
        split = False
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            sig = {}
            for v in c:
                counts = {}
                for u in adj[v]:
                    k = where[u]
                    counts[k] = counts.get(k, 0) + 1
                sig.setdefault(tuple(sorted(counts.items())), []).append(v)
            if len(sig) > 1:
                split = True
                out.extend(sig[k] for k in sorted(sig))
            else:
                out.append(c)
        cells = out
        if not split:
            return cells


@dataclass
class _Leaf:
    cert: tuple
    lab: list[int]
    path: list[int]


@dataclass
class _Search:
    adj: list[list[int]]
    edges: list[tuple[int, int]]
    nv: int
    first: _Leaf | None = None
    best: _Leaf | None = None
    gens: list[list[int]] = field(default_factory=list)
    nodes: int = 0

    def leaf(self, cells, path):
        lab = [0] * self.nv
        for i, c in enumerate(cells):
            lab[c[0]] = i
        cert = tuple(sorted((lab[u], lab[v]) for u, v in self.edges))
        here = _Leaf(cert, lab, list(path))
        if self.first is None:
            self.first = self.best = here
            return None
        for ref in (self.first, self.best):
            if cert == ref.cert:
                inv = [0] * self.nv
                for v, p in enumerate(ref.lab):
                    inv[p] = v
                self.gens.append([inv[lab[v]] for v in range(self.nv)])
                k = 0
                while path[k] == ref.path[k]:
                    k += 1
                return k
        if cert < self.best.cert:
            self.best = here
        return None

    def orbits(self, fixed: Sequence[int]) -> list[int]:
        parent = list(range(self.nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.gens:
            if all(g[v] == v for v in fixed):
                for v in range(self.nv):
                    a, b = find(v), find(g[v])
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        return [find(v) for v in range(self.nv)]

    def run(self, cells, path):
        self.nodes += 1
        level = len(path)
        if len(cells) == self.nv:
            return self.leaf(cells, path)
        ti = min((i for i, c in enumerate(cells) if len(c) > 1), key=lambda i: (-len(cells[i]), i))
        on_first = self.first is None or self.first.path[:level] == path
        done_orbits: set[int] = set()
        for w in sorted(cells[ti]):
            if on_first and done_orbits:
                orb = self.orbits(path)
                if orb[w] in {orb[x] for x in done_orbits}:
                    continue
            child = cells[:ti] + [[w], [x for x in cells[ti] if x != w]] + cells[ti + 1:]
            r = self.run(_refine(child, self.adj, self.nv), path + [w])
            done_orbits.add(w)
            if r is not None and r < level:
                return r
        return None


def canonical_incidence(num_points: int, lines: Iterable[Iterable[int]]) -> tuple:
    """Canonical edge list of the incidence graph; equal iff the structures are isomorphic."""
    lines = [sorted(l) for l in lines]
    nv = num_points + len(lines)
    adj: list[list[int]] = [[] for _ in range(nv)]
    edges = []
    for k, line in enumerate(lines):
        for p in line:
            adj[p].append(num_points + k)
            adj[num_points + k].append(p)
            edges.append((p, num_points + k))
    cells = [c for c in (list(range(num_points)), list(range(num_points, nv))) if c]
    s = _Search(adj, edges, nv)
    s.run(_refine(cells, adj, nv), [])
    return (num_points, len(lines)) + s.best.cert


def fingerprint_projective(plane: ProjectivePlane) -> str:
    form = canonical_incidence(plane.num_points, plane.lines())
    return hashlib.sha256(repr(form).encode()).hexdigest()


def fingerprint_affine(plane: AffinePlane) -> str:
    return fingerprint_projective(ProjectivePlane(plane))


def completion_invariant(code: PlaneCode) -> str:
    """Isomorphism-class fingerprint of the projective plane a complete code determines."""
    validate_code(code, complete=True).raise_if_failed()
    return fingerprint_affine(code_to_affine(code))
