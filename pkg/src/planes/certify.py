"""Independent verification of proof bundles.

Nothing here solves an LP.  The verifier rebuilds every seed from the
catalogue, walks each class tree, recomputes the candidate set at every
node and checks each outcome exactly: witnesses by evaluating h in exact
rationals, branches by comparing the children with the recomputed
candidates, counting refutations by arithmetic, completions by
validation.  The verdict is then recomputed and compared with the manifest.
"""
from __future__ import annotations

import hashlib
import json
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from .candidates import enumerate_candidates
from .canon import completion_invariant
from .designs import DesignError, PlaneCode, code_to_affine, validate_affine, validate_code
from .formats import FormatError, load_vectors, vectors_digest
from .isotopy import MAX_ORDER, CatalogueError, catalogue_from_text
from .witness import Certificate, CertificateFormatError
from .znn import Vector, VectorError, format_vector, parse_vector

KINDS = ("witness", "branch", "count", "completion", "depth_limit")


class BundleFormatError(ValueError):
    """The bundle is not structurally readable (exit status 2 territory)."""


@dataclass
class VerificationReport:
    digest: str
    ok: bool = True
    classes: dict[int, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=lambda: {k: 0 for k in KINDS})
    failure: str | None = None
    failures: list[str] = field(default_factory=list)
    verdict: str | None = None

    def __bool__(self):
        return self.ok

    def fail(self, where: str, message: str):
        text = f"{where}: {message}"
        self.failures.append(text)
        if self.ok or text < self.failure:
            self.failure = text
        self.ok = False

    def lines(self) -> list[str]:
        out = [f"bundle digest {self.digest}"]
        out += [f"class {k}: {v}" for k, v in sorted(self.classes.items())]
        out.append(" ".join(f"{k}={v}" for k, v in self.counts.items()))
        out.append("PASS" if self.ok else f"FAIL {self.failure}")
        return out


def bundle_digest(path) -> str:
    """SHA-256 over the sorted relative file names and their contents."""
    root = Path(path)
    h = hashlib.sha256()
    for f in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = f.relative_to(root).as_posix().encode()
        data = f.read_bytes()
        h.update(len(rel).to_bytes(8, "big") + rel + len(data).to_bytes(8, "big") + data)
    return h.hexdigest()


def _seed(n: int, grid) -> tuple[Vector, ...]:
    consts = [tuple([m] * n) for m in range(n)]
    cols = [(0,) + tuple(grid[r][c] + 1 for r in range(n - 1)) for c in range(n - 1)]
    return tuple(consts + cols)


def _pair_cells(v, n):
    return [(i, j, v[i - 1], v[j - 1]) for i, j in combinations(range(1, n + 1), 2)]


def _eval(tables, v, n) -> Fraction:
    return sum((tables[(i, j)][a][b] for i, j, a, b in _pair_cells(v, n)), Fraction(0))


def _check_certificate(cert: Certificate, b0, d, n, label) -> str:
    if cert.order != n:
        return f"certificate order {cert.order} != {n}"
    if tuple(cert.b0) != tuple(b0):
        return "certificate B0 does not match the node path"
    if cert.catalogue_label != label:
        return f"certificate names class {cert.catalogue_label}"
    if tuple(cert.extension) != tuple(b0[2 * n - 1:]):
        return "certificate extension does not match the node path"
    if cert.d_digest != vectors_digest(d):
        return "candidate digest mismatch"
    tables = cert.witness.tables
    for key, t in sorted(tables.items()):
        if sum((x for row in t for x in row), Fraction(0)) != 0:
            return f"pair table {key} does not sum to zero"
    total = sum((_eval(tables, v, n) for v in b0), Fraction(0))
    if total != 1:
        return f"h sums to {total} over B0, not 1"
    for v in d:
        val = _eval(tables, v, n)
        if val < 0:
            return f"h({format_vector(v)}) = {val} < 0"
    return ""


def _check_node(task) -> tuple[str, str, dict]:
    """Check one node; returns (kind, failure message or "", extra facts)."""
    n, label, b0, rec, kids, cert_text = task
    kind = rec.get("kind")
    d = enumerate_candidates(b0, n) if len(b0) < n * n else []
    if kind not in KINDS:
        return str(kind), f"unknown node kind {kind!r}", {}
    if kind != "completion" and rec.get("d_size") != len(d):
        return kind, f"recorded |D| = {rec.get('d_size')}, recomputed {len(d)}", {}
    if kind == "count":
        if len(b0) + len(d) >= n * n:
            return kind, f"counting refutation invalid: {len(b0)} + {len(d)} >= {n * n}", {}
    elif kind == "witness":
        if cert_text is None:
            return kind, "certificate file missing", {}
        try:
            cert = Certificate.loads(cert_text)
        except CertificateFormatError as exc:
            return kind, f"malformed certificate: {exc}", {}
        msg = _check_certificate(cert, b0, d, n, label)
        if msg:
            return kind, msg, {}
    elif kind == "branch":
        rule = rec.get("rule")
        if rule == "all":
            want = d
        elif rule == "cell":
            cell = rec.get("cell")
            if not isinstance(cell, list) or len(cell) != 4:
                return kind, "cell branch without a cell", {}
            i, j, a, b = cell
            if not (1 <= i < j <= n and 0 <= a < n and 0 <= b < n):
                return kind, f"bad cell {cell}", {}
            if any(v[i - 1] == a and v[j - 1] == b for v in b0):
                return kind, f"branch cell {cell} is already covered by B0", {}
            want = [v for v in d if v[i - 1] == a and v[j - 1] == b]
        else:
            return kind, f"unknown branch rule {rule!r}", {}
        have = list(kids)
        if have != want:
            missing = sorted(set(want) - set(have))
            if missing:
                return kind, f"candidate {format_vector(missing[0])} has no child", {}
            extra = sorted(set(have) - set(want))
            if extra:
                return kind, f"child {format_vector(extra[0])} is not a required candidate", {}
            return kind, "children are not in sorted candidate order", {}
    elif kind == "completion":
        code = PlaneCode(n, tuple(b0))
        rep = validate_code(code, complete=True)
        if not rep:
            return kind, f"completion fails validate_code: {rep.message}", {}
        try:
            validate_affine(code_to_affine(code)).raise_if_failed("affine plane")
        except DesignError as exc:
            return kind, str(exc), {}
        fp = completion_invariant(code)
        if rec.get("fingerprint") != fp:
            return kind, "completion fingerprint mismatch", {}
        return kind, "", {"fingerprint": fp}
    return kind, "", {}


def _read_json(path: Path):
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BundleFormatError(f"{path.name}: invalid JSON ({exc})") from exc


def _class_tasks(root: Path, n: int, label: int, seed, report: VerificationReport):
    """Parse one class tree into node tasks; structural problems are reported, not raised."""
    where = f"class-{label}"
    cdir = root / where
    try:
        tree = _read_json(cdir / "tree.json")
    except FileNotFoundError:
        report.fail(where, "tree.json missing")
        return [], set()
    try:
        if tree["order"] != n or tree["class"] != label:
            report.fail(where, "tree header does not match manifest")
        if [parse_vector(s, n) for s in tree["seed"]] != list(seed):
            report.fail(where, "stored seed differs from the seed rebuilt from the catalogue")
        records = {}
        for rec in tree["nodes"]:
            p = rec["path"]
            if p in records:
                report.fail(where, f"duplicate node {p}")
            records[p] = rec
    except (KeyError, TypeError, VectorError) as exc:
        raise BundleFormatError(f"{where}/tree.json: {exc}") from exc
    tasks, used, seen = [], {"tree.json"}, set()
    stack = [("0", tuple(seed))]
    while stack:
        p, b0 = stack.pop()
        rec = records.get(p)
        if rec is None:
            report.fail(f"{where} node {p}", "node missing from tree")
            continue
        seen.add(p)
        kids = []
        if rec.get("kind") == "branch":
            k = rec.get("children")
            if not isinstance(k, int) or k < 0:
                report.fail(f"{where} node {p}", "bad child count")
                continue
            for c in range(k):
                cp = f"{p}.{c}"
                crec = records.get(cp)
                if crec is None:
                    report.fail(f"{where} node {cp}", "node missing from tree")
                    continue
                try:
                    v = parse_vector(crec["added"], n)
                except (KeyError, TypeError, VectorError) as exc:
                    report.fail(f"{where} node {cp}", f"bad added vector: {exc}")
                    continue
                kids.append(v)
                stack.append((cp, b0 + (v,)))
        cert_text = None
        if rec.get("kind") == "witness":
            name = f"node-{p}.cert.json"
            used.add(name)
            try:
                cert_text = (cdir / name).read_text()
            except FileNotFoundError:
                pass
        tasks.append((where, p, (n, label, b0, rec, kids, cert_text)))
    for p in sorted(set(records) - seen):
        report.fail(f"{where} node {p}", "node not reachable from the root")
    return tasks, used


def _run(tasks, jobs):
    payload = [t[2] for t in tasks]
    if jobs <= 1 or len(payload) <= 1:
        return [_check_node(t) for t in payload]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_check_node, payload, chunksize=8))


def verify_bundle(path, jobs: int = 1) -> VerificationReport:
    """Re-check a bundle end to end.  Raises BundleFormatError if it cannot be read at all."""
    root = Path(path)
    if not root.is_dir():
        raise BundleFormatError(f"{root} is not a directory")
    report = VerificationReport(bundle_digest(root))
    try:
        manifest = _read_json(root / "manifest.json")
    except FileNotFoundError:
        raise BundleFormatError("manifest.json missing") from None
    try:
        n = int(manifest["order"])
        cat_info = manifest["catalogue"]
        searched = [int(x) for x in manifest["searched_classes"]]
        claimed = manifest["verdict"]
        comps = manifest["completions"]
        summaries = {int(s["class"]): s for s in manifest["classes"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleFormatError(f"manifest.json: {exc}") from exc
    report.verdict = claimed
    try:
        cat_text = (root / cat_info["file"]).read_text()
    except (FileNotFoundError, KeyError, TypeError):
        report.fail("catalogue", "catalogue file missing")
        return report
    if hashlib.sha256(cat_text.encode()).hexdigest() != cat_info.get("digest"):
        report.fail("catalogue", "digest does not match the manifest")
    try:
        cat = catalogue_from_text(cat_text, check_canonical=n - 1 <= MAX_ORDER)
    except CatalogueError as exc:
        report.fail("catalogue", str(exc))
        return report
    if cat.order != n - 1:
        report.fail("catalogue", f"order {cat.order}, expected {n - 1}")
        return report

    tasks, used_by_class = [], {}
    for label in searched:
        try:
            seed = _seed(n, cat[label].grid)
        except KeyError:
            report.fail(f"class-{label}", "label not in catalogue")
            continue
        t, used = _class_tasks(root, n, label, seed, report)
        tasks.extend(t)
        used_by_class[label] = used
    results = _run(tasks, jobs)

    per_class: dict[int, dict[str, int]] = {}
    leaf_kinds: set[str] = set()
    found: dict[str, list[str]] = {}
    for (where, p, task), (kind, msg, extra) in zip(tasks, results):
        label = task[1]
        counts = per_class.setdefault(label, {k: 0 for k in KINDS})
        if kind in counts:
            counts[kind] += 1
            report.counts[kind] += 1
        if kind != "branch":
            leaf_kinds.add(kind)  # a childless branch is a refuted leaf and adds nothing
        if msg:
            report.fail(f"{where} node {p}", msg)
        if "fingerprint" in extra:
            found.setdefault(extra["fingerprint"], []).append(f"{where}/{p}")

    for label in searched:
        counts = per_class.get(label, {})
        s = summaries.get(label)
        if s is None or any(s.get(k) != counts.get(k, 0) for k in KINDS):
            report.fail(f"class-{label}", "manifest summary does not match the tree")
        cdir = root / f"class-{label}"
        if cdir.is_dir():
            for f in sorted(cdir.iterdir()):
                if f.name not in used_by_class.get(label, ()):
                    report.fail(f"class-{label}", f"unexpected file {f.name}")
        tag = f"class-{label}"
        bad = any(f.startswith(tag + ":") or f.startswith(tag + " ") for f in report.failures)
        report.classes[label] = "fail" if bad else "pass"

    listed = {}
    for entry in comps:
        try:
            fp, rel, mult = entry["fingerprint"], entry["file"], entry["multiplicity"]
        except (KeyError, TypeError) as exc:
            raise BundleFormatError(f"manifest completion entry: {exc}") from exc
        listed[fp] = entry
        try:
            vs = load_vectors((root / rel).read_text(), n)
        except FileNotFoundError:
            report.fail("completions", f"{rel} missing")
            continue
        except FormatError as exc:
            report.fail("completions", f"{rel}: {exc}")
            continue
        code = PlaneCode(n, tuple(vs))
        rep = validate_code(code, complete=True)
        if not rep:
            report.fail("completions", f"{rel} fails validate_code: {rep.message}")
            continue
        if completion_invariant(code) != fp:
            report.fail("completions", f"{rel} fingerprint mismatch")
        if mult != len(found.get(fp, [])) or sorted(entry.get("occurrences", [])) != sorted(found.get(fp, [])):
            report.fail("completions", f"multiplicity of {fp[:16]} does not match the trees")
    for fp in found:
        if fp not in listed:
            report.fail("completions", f"fingerprint {fp[:16]} found in trees but not listed")

    complete = sorted(searched) == cat.labels
    if "depth_limit" in leaf_kinds:
        verdict = "Inconclusive"
    elif "completion" in leaf_kinds:
        verdict = "Completions"
    else:
        verdict = "NonExistence" if complete else "Partial"
    if verdict != claimed:
        report.fail("manifest", f"verdict {claimed!r} but the trees give {verdict!r}")
    if manifest.get("certificates") != report.counts["witness"]:
        report.fail("manifest", "certificate count does not match the trees")
    return report


# mutation harness


def _first_cert(root: Path) -> Path:
    return sorted(root.glob("class-*/node-*.cert.json"))[0]


def _edit_json(path: Path, fn):
    obj = json.loads(path.read_text())
    fn(obj)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _branching_tree(root: Path) -> Path:
    for t in sorted(root.glob("class-*/tree.json")):
        if any(r["kind"] == "branch" for r in json.loads(t.read_text())["nodes"]):
            return t
    raise ValueError("bundle has no branch node")


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _mut_entry(root):
    def f(c):
        t = c["tables"]["1,2"]
        t[0][1] = _fmt(Fraction(t[0][1]) + Fraction(1, 7))
    _edit_json(_first_cert(root), f)


def _mut_balanced(root):
    def f(c):
        b0 = c["b0"]
        t = c["tables"]["1,2"]
        a, b = b0[0][0], b0[0][1]
        hit = {(v[0], v[1]) for v in b0}
        x, y = next((x, y) for x in range(len(t)) for y in range(len(t)) if (x, y) not in hit)
        t[a][b] = _fmt(Fraction(t[a][b]) + 1)
        t[x][y] = _fmt(Fraction(t[x][y]) - 1)
    _edit_json(_first_cert(root), f)


def _mut_swap(root):
    def f(c):
        c["b0"][0], c["b0"][1] = c["b0"][1], c["b0"][0]
    _edit_json(_first_cert(root), f)


def _mut_sign(root):
    def f(c):
        for rows in c["tables"].values():
            for row in rows:
                row[:] = [_fmt(-Fraction(x)) for x in row]
    _edit_json(_first_cert(root), f)


def _mut_delete_child(root):
    """Drop the first child of a root branch and renumber its siblings, as a careless prover might."""
    tree = _branching_tree(root)
    obj = json.loads(tree.read_text())
    cdir = tree.parent

    def shift(path):
        parts = path.split(".")
        if len(parts) > 1:
            parts[1] = str(int(parts[1]) - 1)
        return ".".join(parts)

    for f in sorted(cdir.glob("node-0.0.*")):
        f.unlink()
    nodes = []
    for r in obj["nodes"]:
        if r["path"] == "0.0" or r["path"].startswith("0.0."):
            continue
        if r["path"] == "0":
            r["children"] -= 1
        else:
            old = r["path"]
            r["path"] = shift(old)
            cert = cdir / f"node-{old}.cert.json"
            if cert.exists():
                cert.rename(cdir / f"node-{r['path']}.cert.json.tmp")
        nodes.append(r)
    for f in cdir.glob("*.tmp"):
        f.rename(f.with_suffix(""))
    obj["nodes"] = nodes
    tree.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _mut_delete_cert(root):
    _first_cert(root).unlink()


def _mut_seed_relabel(root):
    """Swap two symbols throughout the first representative: still Latin, still isotopic, wrong seed."""
    cat = root / "catalogue.txt"
    lines = cat.read_text().splitlines()
    swap = {"0": "1", "1": "0"}
    started = False
    for k, line in enumerate(lines):
        if not line.strip() or line.startswith("#"):
            if started:
                break
            continue
        started = True
        lines[k] = " ".join(swap.get(x, x) for x in line.split())
    cat.write_text("\n".join(lines) + "\n")


def _mut_verdict(root):
    def f(m):
        m["verdict"] = "Completions" if m["verdict"] != "Completions" else "NonExistence"
    _edit_json(root / "manifest.json", f)


def _mut_added(root):
    tree = _branching_tree(root)

    def f(obj):
        kids = [r for r in obj["nodes"] if r["path"].count(".") == 1]
        kids[0]["added"] = kids[1]["added"]
    _edit_json(tree, f)


def _mut_kind(root):
    tree = _branching_tree(root)

    def f(obj):
        obj["nodes"][0]["kind"] = "count"
    _edit_json(tree, f)


MUTATIONS = {
    "entry_perturbation": _mut_entry,
    "balanced_perturbation": _mut_balanced,
    "vector_swap": _mut_swap,
    "sign_flip": _mut_sign,
    "child_deletion": _mut_delete_child,
    "certificate_deletion": _mut_delete_cert,
    "seed_relabel": _mut_seed_relabel,
    "verdict_flip": _mut_verdict,
    "added_vector_change": _mut_added,
    "kind_forgery": _mut_kind,
}


def mutate_bundle(src, dst, name: str) -> Path:
    """Copy the bundle at src to dst and apply mutation `name` to the copy."""
    dst = Path(dst)
    if dst.exists():
        shutil.rmtree(dst)
    shutil.copytree(src, dst)
    MUTATIONS[name](dst)
    return dst
