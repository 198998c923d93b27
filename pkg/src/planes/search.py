"""Branch-and-refute search over partial plane codes.

Each isotopy class of Latin squares of order n-1 fixes a seed of 2n-1
vectors.  A node either completes the code, is refuted (by an exact
witness h or by counting), or branches.  Near the root a branch adds each
candidate of D in turn; deeper down it picks the uncovered pair cell with
fewest covering candidates, since every completion must cover that cell
exactly once.  Both rules exhaust the completions of the node.
"""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .candidates import enumerate_candidates
from .canon import completion_invariant
from .designs import DesignError, LatinSquare, PlaneCode, validate_code
from .formats import dump_vectors
from .isotopy import IsotopyClassCatalogue
from .witness import Certificate, build_lp, make_certificate, pairs, solve_feasibility
from .znn import Vector, format_vector

__all__ = [
    "Limits", "SearchNode", "ClassResult", "ProofBundle", "seed_b0", "enumerate_candidates",
    "uncovered_cells", "choose_cell", "prove_node", "prove_order", "write_bundle", "verdict_of",
]

log = logging.getLogger(__name__)

Cell = tuple[int, int, int, int]  # (i, j, a, b): coordinates i < j (1-based) take values a, b


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class Limits:
    max_depth: int | None = None  # None: n^2 - (2n - 1), i.e. unbounded
    full_branch_depth: int = 1  # nodes shallower than this branch on all of D
    hint: bool = True  # float warm start for the exact LP
    propagate: bool = True  # below full_branch_depth, branch on a cell with <= 1 candidates without an LP

    def depth_cap(self, n: int) -> int:
        return n * n - (2 * n - 1) if self.max_depth is None else self.max_depth


@dataclass
class SearchNode:
    path: tuple[int, ...]  # child positions below the class root
    added: Vector | None
    kind: str  # witness | branch | count | completion | depth_limit
    d_size: int = 0
    rule: str | None = None  # branch rule: "all" or "cell"
    cell: Cell | None = None
    certificate: Certificate | None = None
    children: list["SearchNode"] = field(default_factory=list)
    fingerprint: str | None = None
    code: tuple[Vector, ...] | None = None

    @property
    def depth(self) -> int:
        return len(self.path)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def path_name(path: Sequence[int]) -> str:
    return ".".join(["0", *map(str, path)])


def seed_b0(n: int, square: LatinSquare) -> PlaneCode:
    """Constants first, then one vector per column: 0 followed by the column with symbols shifted by one."""
    if square.order != n - 1:
        raise DesignError(f"seed for order {n} needs a square of order {n - 1}, got {square.order}")
    vs = [tuple([m] * n) for m in range(n)]
    for c in range(n - 1):
        vs.append((0,) + tuple(square.grid[r][c] + 1 for r in range(n - 1)))
    code = PlaneCode(n, tuple(vs))
    validate_code(code).raise_if_failed("seed")
    return code


def uncovered_cells(b0: Sequence[Vector], n: int) -> list[Cell]:
    covered = {(i, j, v[i - 1], v[j - 1]) for v in b0 for i, j in pairs(n)}
    return [(i, j, a, b) for i, j in pairs(n) for a in range(n) for b in range(n)
            if (i, j, a, b) not in covered]


def covering(cell: Cell, d: Sequence[Vector]) -> list[Vector]:
    i, j, a, b = cell
    return [v for v in d if v[i - 1] == a and v[j - 1] == b]


def choose_cell(b0: Sequence[Vector], d: Sequence[Vector], n: int) -> tuple[Cell, int]:
    """The uncovered cell with fewest covering candidates (lexicographically first on ties)."""
    load: dict[Cell, int] = {}
    for v in d:
        for i, j in pairs(n):
            key = (i, j, v[i - 1], v[j - 1])
            load[key] = load.get(key, 0) + 1
    cells = uncovered_cells(b0, n)
    if not cells:
        raise SearchError("no uncovered cell although the code is incomplete")
    best = min(cells, key=lambda c: (load.get(c, 0), c))
    return best, load.get(best, 0)


_fp_cache: dict[frozenset, str] = {}


def _fingerprint(n: int, b0: Sequence[Vector]) -> str:
    key = frozenset(b0)
    if key not in _fp_cache:
        _fp_cache[key] = completion_invariant(PlaneCode(n, tuple(sorted(key))))
    return _fp_cache[key]


def prove_node(b0: Sequence[Vector], n: int, limits: Limits = Limits(), *, seed_size: int | None = None,
               label: int | None = None, path: tuple[int, ...] = (), added: Vector | None = None,
               expand: bool = True) -> SearchNode:
    """Resolve the node for partial code b0.  With expand=False a branch node is returned childless."""
    b0 = tuple(b0)
    seed_size = len(b0) if seed_size is None else seed_size
    depth = len(path)
    node = SearchNode(path, added, "branch")
    if len(b0) == n * n:
        validate_code(PlaneCode(n, b0), complete=True).raise_if_failed("completion")
        node.kind = "completion"
        node.code = b0
        node.fingerprint = _fingerprint(n, b0)
        return node
    d = enumerate_candidates(b0, n)
    node.d_size = len(d)
    if len(b0) + len(d) < n * n:
        node.kind = "count"
        return node
    cell = None
    if depth >= limits.full_branch_depth:
        cell, load = choose_cell(b0, d, n)
        if limits.propagate and depth > limits.full_branch_depth and load <= 1:
            return _branch(node, b0, n, limits, seed_size, label, covering(cell, d), "cell", cell, expand)
    lp = build_lp(b0, d)
    res = solve_feasibility(lp, hint=limits.hint)
    if res.feasible:
        node.kind = "witness"
        node.certificate = make_certificate(lp, res.witness, label, b0[seed_size:])
        return node
    if depth >= limits.depth_cap(n):
        node.kind = "depth_limit"
        return node
    if cell is None:
        return _branch(node, b0, n, limits, seed_size, label, d, "all", None, expand)
    return _branch(node, b0, n, limits, seed_size, label, covering(cell, d), "cell", cell, expand)


def _branch(node, b0, n, limits, seed_size, label, kids, rule, cell, expand):
    node.kind = "branch"
    node.rule = rule
    node.cell = cell
    if expand:
        node.children = [
            prove_node(b0 + (v,), n, limits, seed_size=seed_size, label=label,
                       path=node.path + (k,), added=v)
            for k, v in enumerate(kids)
        ]
    else:
        node.children = [SearchNode(node.path + (k,), v, "pending") for k, v in enumerate(kids)]
    return node


def _root_task(args):
    n, label, seed, limits = args
    node = prove_node(seed, n, limits, label=label, expand=False)
    log.info("event=root order=%d class=%d kind=%s d=%d children=%d",
             n, label, node.kind, node.d_size, len(node.children))
    return node


def _child_task(args):
    n, label, seed, limits, k, v = args
    node = prove_node(seed + (v,), n, limits, seed_size=len(seed), label=label, path=(k,), added=v)
    log.debug("event=subtree order=%d class=%d child=%d kind=%s nodes=%d",
              n, label, k, node.kind, sum(1 for _ in node.walk()))
    return node


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


@dataclass
class ClassResult:
    label: int
    seed: tuple[Vector, ...]
    root: SearchNode

    def counts(self) -> dict[str, int]:
        out = {k: 0 for k in ("witness", "branch", "count", "completion", "depth_limit")}
        for node in self.root.walk():
            out[node.kind] += 1
        out["nodes"] = sum(out.values())
        out["max_depth"] = max(node.depth for node in self.root.walk())
        return out


@dataclass
class ProofBundle:
    order: int
    catalogue: IsotopyClassCatalogue
    classes: list[ClassResult]
    limits: Limits
    complete: bool  # every class of the catalogue was searched

    @property
    def verdict(self) -> str:
        return verdict_of(self.leaf_kinds(), self.complete)

    def leaf_kinds(self) -> set[str]:
        return {node.kind for c in self.classes for node in c.root.walk() if not node.children}

    def completions(self) -> dict[str, list[tuple[int, SearchNode]]]:
        out: dict[str, list[tuple[int, SearchNode]]] = {}
        for c in self.classes:
            for node in c.root.walk():
                if node.kind == "completion":
                    out.setdefault(node.fingerprint, []).append((c.label, node))
        return dict(sorted(out.items()))

    def certificates(self) -> int:
        return sum(1 for c in self.classes for node in c.root.walk() if node.kind == "witness")


def verdict_of(leaf_kinds: set[str], complete: bool) -> str:
    if "depth_limit" in leaf_kinds:
        return "Inconclusive"
    if "completion" in leaf_kinds:
        return "Completions"
    return "NonExistence" if complete else "Partial"


def prove_order(n: int, catalogue: IsotopyClassCatalogue, limits: Limits = Limits(), jobs: int = 1,
                classes: Sequence[int] | None = None) -> ProofBundle:
    """Run the search for every selected class; roots first, then branch subtrees, merged in order."""
    if catalogue.order != n - 1:
        raise ValueError(f"order {n} needs a catalogue of order {n - 1}, got {catalogue.order}")
    labels = sorted(set(classes)) if classes else catalogue.labels
    for lab in labels:
        catalogue[lab]
    seeds = {lab: seed_b0(n, catalogue[lab]).vectors for lab in labels}
    roots = _map(_root_task, [(n, lab, seeds[lab], limits) for lab in labels], jobs)
    tasks = []
    for lab, root in zip(labels, roots):
        for child in root.children:
            tasks.append((n, lab, seeds[lab], limits, child.path[0], child.added))
    subtrees = iter(_map(_child_task, tasks, jobs))
    results = []
    for lab, root in zip(labels, roots):
        root.children = [next(subtrees) for _ in root.children]
        results.append(ClassResult(lab, seeds[lab], root))
        kinds = ClassResult(lab, seeds[lab], root).counts()
        log.info("event=class order=%d class=%d %s", n, lab, " ".join(f"{k}={v}" for k, v in kinds.items()))
    return ProofBundle(n, catalogue, results, limits, complete=len(labels) == len(catalogue))


# bundle output


def _node_record(node: SearchNode) -> dict:
    rec = {"path": path_name(node.path), "kind": node.kind, "d_size": node.d_size}
    rec["added"] = format_vector(node.added) if node.added is not None else None
    if node.kind == "branch":
        rec["rule"] = node.rule
        rec["cell"] = list(node.cell) if node.cell else None
        rec["children"] = len(node.children)
    if node.kind == "witness":
        rec["certificate"] = f"node-{path_name(node.path)}.cert.json"
    if node.kind == "completion":
        rec["fingerprint"] = node.fingerprint
    return rec


def write_bundle(bundle: ProofBundle, out: Path) -> Path:
    """Write manifest.json, catalogue.txt, per-class trees and certificates, and completion codes."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    n = bundle.order
    (out / "catalogue.txt").write_text(bundle.catalogue.text())
    summaries = []
    for c in bundle.classes:
        cdir = out / f"class-{c.label}"
        cdir.mkdir(exist_ok=True)
        records = []
        for node in c.root.walk():
            records.append(_node_record(node))
            if node.kind == "witness":
                (cdir / records[-1]["certificate"]).write_text(node.certificate.dumps())
        tree = {"order": n, "class": c.label, "seed": [format_vector(v) for v in c.seed], "nodes": records}
        (cdir / "tree.json").write_text(json.dumps(tree, indent=1, sort_keys=True) + "\n")
        summaries.append({"class": c.label, "root": c.root.kind, "root_d_size": c.root.d_size,
                          **c.counts()})
    comps = []
    found = bundle.completions()
    if found:
        (out / "completions").mkdir(exist_ok=True)
    for fp, occ in found.items():
        rep = min(tuple(sorted(node.code)) for _, node in occ)
        name = f"{fp[:16]}.code"
        (out / "completions" / name).write_text(f"# order {n} fingerprint {fp}\n" + dump_vectors(rep))
        comps.append({"fingerprint": fp, "file": f"completions/{name}", "multiplicity": len(occ),
                      "occurrences": [f"class-{lab}/{path_name(node.path)}" for lab, node in occ]})
    lim = bundle.limits
    manifest = {
        "version": 1,
        "order": n,
        "catalogue": {"file": "catalogue.txt", "digest": bundle.catalogue.digest(),
                      "order": bundle.catalogue.order, "classes": len(bundle.catalogue)},
        "searched_classes": [c.label for c in bundle.classes],
        "limits": {"max_depth": lim.depth_cap(n), "full_branch_depth": lim.full_branch_depth,
                   "propagate": lim.propagate},
        "verdict": bundle.verdict,
        "certificates": bundle.certificates(),
        "classes": summaries,
        "completions": comps,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return out


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("PLANES_JOBS", "1")))
    except ValueError:
        return 1
