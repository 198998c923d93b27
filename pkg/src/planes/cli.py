"""Command line entry point: prove, verify, isotopy, bound, witness, structures.

Exit codes: 0 success, 1 failed check, 2 malformed input (verify,
structures), 3 inconclusive proof, 64 usage error, 70 internal error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__

EX_USAGE = 64
EX_SOFTWARE = 70

log = logging.getLogger("planes")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    order: int
    catalogue: str = "gen"
    out: str | None = None
    max_depth: int | None = None
    jobs: int = 1
    classes: tuple[int, ...] = ()
    log_level: str = "INFO"

    def __post_init__(self):
        if not 2 <= self.order <= 9:
            raise UsageError(f"order {self.order} outside [2, 9]")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise UsageError("max-depth must be >= 0")


def read_config(path) -> dict[str, str]:
    """Plain key=value lines; '#' starts a comment.  Keys use the long flag names."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        k = k.replace("-", "_")
        out["classes" if k == "class" else k] = v
    return out


class _KeyValueFormatter(logging.Formatter):
    def format(self, record):
        return f"level={record.levelname.lower()} logger={record.name} {record.getMessage()}"


def _setup_logging(level: str):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_KeyValueFormatter())
    root = logging.getLogger("planes")
    root.handlers[:] = [handler]
    root.setLevel(level.upper())
    root.propagate = False


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"bad class list {text!r}") from exc


def _default_jobs() -> int:
    raw = os.environ.get("PLANES_JOBS")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"PLANES_JOBS={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="planes", description="Delsarte-LP search for finite projective planes")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="key=value file; command line flags take precedence")
    p.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    pr = sub.add_parser("prove", help="run the search for one order and write a proof bundle")
    pr.add_argument("--order", type=int)
    pr.add_argument("--catalogue", help="catalogue file of order n-1, or 'gen' to enumerate")
    pr.add_argument("--out")
    pr.add_argument("--max-depth", type=int)
    pr.add_argument("--jobs", type=int)
    pr.add_argument("--class", dest="classes", action="append", help="class label(s), repeatable or comma separated")
    pr.add_argument("--full-branch-depth", type=int)
    pr.add_argument("--no-propagate", action="store_true", default=None)

    ve = sub.add_parser("verify", help="check a proof bundle or a single certificate")
    g = ve.add_mutually_exclusive_group()
    g.add_argument("--bundle")
    g.add_argument("--cert")
    ve.add_argument("--jobs", type=int)

    iso = sub.add_parser("isotopy", help="isotopy classes of Latin squares")
    iso.add_argument("--order", type=int)
    mode = iso.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", default=None, help="count reduced squares only")
    mode.add_argument("--canonicalize", metavar="FILE", help="print canonical forms of the squares in FILE")
    iso.add_argument("--out")

    bo = sub.add_parser("bound", help="check the Delsarte witness f and print the bound")
    bo.add_argument("--order", type=int)
    bo.add_argument("--brute-force", action="store_true", default=None)

    wi = sub.add_parser("witness", help="exact witness LP for one partial code")
    wi.add_argument("--b0", help="file with one vector per line")
    wi.add_argument("--out", help="write the certificate here")
    wi.add_argument("--label", type=int)

    st = sub.add_parser("structures", help="validate a structure file")
    st.add_argument("--kind", choices=["latin", "mols", "code", "affine", "projective"])
    st.add_argument("file", nargs="?")
    st.add_argument("--complete", action="store_true", default=None, help="code: require n^2 vectors")
    return p


def _merge(args, config: dict[str, str]):
    """Fill unset flags from the config file."""
    known = vars(args)
    for k, v in config.items():
        if k not in known or k in ("command", "config"):
            raise UsageError(f"unknown config key {k!r} for {args.command}")
        if known[k] is None:
            setattr(args, k, v)


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            raise UsageError(f"{args.command}: --{name.replace('_', '-')} is required")


def _as_int(x, name):
    if x is None:
        return None
    try:
        return int(x)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be an integer, got {x!r}") from None


def _truthy(x) -> bool:
    return str(x).lower() in ("1", "true", "yes", "on")


def cmd_prove(args) -> int:
    from .isotopy import MAX_ORDER, CatalogueError, isotopy_classes, load_catalogue
    from .search import Limits, prove_order, write_bundle

    _need(args, "order", "out")
    raw = args.classes or []
    classes = tuple(x for c in ([raw] if isinstance(raw, str) else raw) for x in _int_list(c))
    jobs = _as_int(args.jobs, "jobs")
    cfg = RunConfig(
        order=_as_int(args.order, "order"),
        catalogue=args.catalogue or "gen",
        out=args.out,
        max_depth=_as_int(args.max_depth, "max-depth"),
        jobs=_default_jobs() if jobs is None else jobs,
        classes=classes,
    )
    n = cfg.order
    if cfg.catalogue == "gen":
        if n - 1 > MAX_ORDER:
            raise UsageError(f"cannot generate a catalogue of order {n - 1}; pass --catalogue FILE")
        cat = isotopy_classes(n - 1)
    else:
        try:
            cat = load_catalogue(cfg.catalogue)
        except (OSError, CatalogueError) as exc:
            raise UsageError(f"catalogue: {exc}") from exc
    if cat.order != n - 1:
        raise UsageError(f"catalogue has order {cat.order}, expected {n - 1}")
    bad = [c for c in cfg.classes if not 1 <= c <= len(cat)]
    if bad:
        raise UsageError(f"class label {bad[0]} not in catalogue (1..{len(cat)})")
    limits = Limits(
        max_depth=cfg.max_depth,
        full_branch_depth=1 if args.full_branch_depth is None else _as_int(args.full_branch_depth, "full-branch-depth"),
        propagate=not _truthy(args.no_propagate) if args.no_propagate is not None else True,
    )
    t0 = time.monotonic()
    log.info("event=prove_start order=%d classes=%d jobs=%d", n, len(cfg.classes) or len(cat), cfg.jobs)
    bundle = prove_order(n, cat, limits, jobs=cfg.jobs, classes=cfg.classes or None)
    write_bundle(bundle, Path(cfg.out))
    log.info("event=prove_done order=%d verdict=%s certificates=%d seconds=%.1f",
             n, bundle.verdict, bundle.certificates(), time.monotonic() - t0)
    print(f"verdict={bundle.verdict} certificates={bundle.certificates()} "
          f"completions={sum(len(v) for v in bundle.completions().values())} "
          f"fingerprints={len(bundle.completions())}")
    return 3 if bundle.verdict == "Inconclusive" else 0


def cmd_verify(args) -> int:
    from .certify import BundleFormatError, verify_bundle
    from .witness import Certificate, CertificateFormatError, verify_witness

    if args.cert:
        try:
            cert = Certificate.loads(Path(args.cert).read_text())
        except (OSError, CertificateFormatError) as exc:
            print(f"malformed: {exc}")
            return 2
        rep = verify_witness(cert)
        print(f"candidates={rep.candidates} " + ("PASS" if rep else f"FAIL {rep.message}"))
        return 0 if rep else 1
    _need(args, "bundle")
    jobs = _as_int(args.jobs, "jobs")
    try:
        rep = verify_bundle(args.bundle, jobs=_default_jobs() if jobs is None else jobs)
    except BundleFormatError as exc:
        print(f"malformed: {exc}")
        return 2
    for line in rep.lines():
        print(line)
    return 0 if rep else 1


def cmd_isotopy(args) -> int:
    from .designs import LatinSquare
    from .formats import FormatError, format_grid_blocks, parse_grid_blocks
    from .isotopy import canonicalize_all, enumerate_reduced, isotopy_classes, save_catalogue

    if args.canonicalize:
        try:
            blocks = parse_grid_blocks(Path(args.canonicalize).read_text())
            squares = [LatinSquare.from_rows(rows) for _, rows in blocks]
            canon = canonicalize_all(squares)
        except (OSError, FormatError, ValueError) as exc:
            raise UsageError(f"canonicalize: {exc}") from exc
        print(format_grid_blocks([c.grid for c in canon]), end="")
        return 0
    _need(args, "order")
    m = _as_int(args.order, "order")
    try:
        if args.enumerate:
            print(f"order={m} reduced_squares={sum(1 for _ in enumerate_reduced(m))}")
            return 0
        cat = isotopy_classes(m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        save_catalogue(cat, args.out)
    else:
        print(cat.text(), end="")
    print(f"order={m} classes={len(cat)} digest={cat.digest()}", file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_bound(args) -> int:
    from .delsarte import WitnessCheckError, verify_delsarte_witness

    _need(args, "order")
    n = _as_int(args.order, "order")
    if n < 2:
        raise UsageError("order must be >= 2")
    try:
        rep = verify_delsarte_witness(n, brute_force=True if args.brute_force else None)
    except WitnessCheckError as exc:
        print(f"FAIL {exc}")
        return 1
    for line in rep.lines():
        print(line)
    return 0


def cmd_witness(args) -> int:
    from .candidates import enumerate_candidates
    from .formats import FormatError, load_vectors
    from .witness import build_lp, make_certificate, solve_feasibility

    _need(args, "b0")
    try:
        b0 = load_vectors(Path(args.b0).read_text())
        d = enumerate_candidates(b0)
        lp = build_lp(b0, d)
    except (OSError, FormatError, ValueError) as exc:
        raise UsageError(f"b0: {exc}") from exc
    res = solve_feasibility(lp)
    print(f"b0={len(b0)} candidates={len(d)} variables={lp.n_variables} pivots={res.pivots}")
    if res.feasible:
        print(f"witness found objective={res.objective}")
        if args.out:
            Path(args.out).write_text(make_certificate(lp, res.witness, _as_int(args.label, "label")).dumps())
    else:
        print(f"no witness: fractional completion on {len(res.cover)} candidates")
    return 0


def cmd_structures(args) -> int:
    from . import designs as ds
    from .formats import FormatError, load_vectors, parse_grid_blocks, parse_plane

    _need(args, "kind", "file")
    try:
        text = Path(args.file).read_text()
        if args.kind in ("latin", "mols"):
            squares = [ds.LatinSquare.from_rows(rows) for _, rows in parse_grid_blocks(text)]
            if not squares:
                raise FormatError("no squares found")
            if args.kind == "latin":
                reports = [ds.validate_latin(s) for s in squares]
                rep = next((r for r in reports if not r), reports[0])
            else:
                rep = ds.validate_mols(ds.MOLSet(squares[0].order, tuple(squares)))
        elif args.kind == "code":
            vs = load_vectors(text)
            if not vs:
                raise FormatError("no vectors found")
            rep = ds.validate_code(ds.PlaneCode(len(vs[0]), tuple(vs)), complete=bool(args.complete))
        else:
            classes = parse_plane(text)
            n = len(classes[0]) if classes else 0
            plane = ds.AffinePlane(n, tuple(tuple(c) for c in classes))
            rep = ds.validate_affine(plane)
            if rep and args.kind == "projective":
                rep = ds.validate_projective(ds.ProjectivePlane(plane))
    except (OSError, FormatError, ValueError) as exc:
        print(f"malformed: {exc}")
        return 2
    print("valid" if rep else f"invalid: {rep.message}")
    return 0 if rep else 1


COMMANDS = {
    "prove": cmd_prove,
    "verify": cmd_verify,
    "isotopy": cmd_isotopy,
    "bound": cmd_bound,
    "witness": cmd_witness,
    "structures": cmd_structures,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().rstrip())
        if args.config:
            _merge(args, read_config(args.config))
        level = (args.log_level or "INFO").upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            raise UsageError(f"unknown log level {args.log_level!r}")
        _setup_logging(level)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EX_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostics
        log.error("event=internal_error type=%s message=%r", type(exc).__name__, str(exc))
        import traceback

        traceback.print_exc()
        return EX_SOFTWARE
