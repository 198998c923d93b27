"""Acceptance suite: one or more tests per criterion, each reported as a PASS/FAIL line.

The conftest hooks print "PASS criterion k: ..." as each test finishes and repeat the
aggregated lines in the terminal summary.
"""
import os
import random
from collections import Counter
from itertools import combinations, permutations, product

import pytest

from planes.candidates import enumerate_candidates
from planes.canon import completion_invariant, fingerprint_affine
from planes.certify import MUTATIONS, bundle_digest, mutate_bundle, verify_bundle
from planes.delsarte import verify_delsarte_witness
from planes.designs import (AffinePlane, LatinSquare, MOLSet, PlaneCode, ProjectivePlane, affine_to_code,
                            affine_to_mols, code_to_affine, mols_to_affine, prime_plane, validate_affine,
                            validate_code, validate_latin, validate_mols, validate_projective)
from planes.isotopy import isotopy_classes
from planes.search import Limits, prove_order, seed_b0, write_bundle
from planes.znn import count_coincidences

criterion = pytest.mark.criterion


def depth_one_refuted(root):
    return root.kind == "branch" and all(c.kind == "witness" and not c.children for c in root.children)


@criterion("1", "order 6: NonExistence, 2 roots, 1 refuted at depth 0, 75 children refuted, 76 certificates, verify passes")
@pytest.mark.slow
def test_order6_nonexistence(proof6, bundle6):
    assert proof6.verdict == "NonExistence"
    roots = [c.root for c in proof6.classes]
    assert len(roots) == 2
    assert sorted(r.kind for r in roots) == ["branch", "witness"]
    branching = next(r for r in roots if r.kind == "branch")
    assert branching.d_size == 75 and len(branching.children) == 75
    assert depth_one_refuted(branching)
    assert proof6.certificates() == 76
    assert verify_bundle(bundle6)


@criterion("2", "order 7: 22 roots, 19 refuted at depth 0, branch sizes {288, 216} refuted at depth 1, "
                "completions unique and isomorphic to the prime plane")
@pytest.mark.slow
def test_order7_structure(proof7, bundle7):
    roots = [c.root for c in proof7.classes]
    assert len(roots) == 22
    assert sum(r.kind == "witness" for r in roots) == 19
    rest = [c for c in proof7.classes if c.root.kind != "witness"]
    refuted = [c for c in rest if depth_one_refuted(c.root)]
    assert sorted(c.root.d_size for c in refuted) == [216, 288]
    (third,) = [c for c in rest if c not in refuted]
    codes = [node.code for node in third.root.walk() if node.kind == "completion"]
    assert codes
    target = fingerprint_affine(prime_plane(7))
    for code in codes:
        plane = code_to_affine(PlaneCode(7, code))
        assert validate_affine(plane)
        assert completion_invariant(PlaneCode(7, code)) == target
    assert set(proof7.completions()) == {target}
    assert proof7.verdict == "Completions"
    assert verify_bundle(bundle7)


@criterion("3", "isotopy classes: 2 at order 5, 22 at order 6")
def test_isotopy_counts(catalogue5, catalogue6):
    assert len(catalogue5) == 2
    assert len(catalogue6) == 22


@criterion("3-ext", "isotopy classes: 564 at order 7 (extended)")
@pytest.mark.extended
def test_isotopy_order7():
    assert len(isotopy_classes(7)) == 564


@criterion("4", "Delsarte witness: bound n^2 for n = 2..7, vanishing off A, nonnegative Fourier side")
@pytest.mark.parametrize("n", range(2, 8))
def test_delsarte(n):
    rep = verify_delsarte_witness(n)
    assert rep.bound == n * n
    assert rep.vanishes_off_forbidden and rep.fourier_nonnegative
    assert rep.value_at_identity == n ** 3 * (n - 1)
    assert rep.constant_term == n * (n - 1)
    assert rep.brute_force_checked == (n <= 5)


@criterion("5", "zero-sum property on prime planes 2, 3, 5, 7")
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_zero_sum(p):
    code = affine_to_code(prime_plane(p)).vectors
    rng = random.Random(p)
    for i, j in combinations(range(p), 2):
        assert Counter((b[i], b[j]) for b in code) == Counter(product(range(p), repeat=2))
        for _ in range(3):
            g = {ab: rng.randint(-9, 9) for ab in product(range(p), repeat=2)}
            g[0, 0] -= sum(g.values())
            assert sum(g[b[i], b[j]] for b in code) == 0


def brute_candidates(b0, pool):
    members = set(b0)
    return sorted(v for v in pool if v not in members and all(count_coincidences(v, w) <= 1 for w in b0))


def random_partial(n, rng):
    if n == 2:
        b0 = [tuple(rng.randrange(n) for _ in range(n))]
    else:
        cat = isotopy_classes(n - 1)
        b0 = list(seed_b0(n, cat[rng.choice(cat.labels)]).vectors)
    for _ in range(rng.randint(0, 3)):
        d = enumerate_candidates(b0, n)
        if not d:
            break
        b0.append(rng.choice(d))
    return b0


@criterion("6", "candidate enumeration equals brute force (full space n <= 5, permutations n = 6, 7)")
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_candidates_oracle(n):
    rng = random.Random(100 + n)
    pool = list(product(range(n), repeat=n)) if n <= 5 else list(permutations(range(n)))
    for _ in range(4 if n <= 5 else 2):
        b0 = random_partial(n, rng)
        assert enumerate_candidates(b0, n) == brute_candidates(b0, pool)


C7 = "affine <-> MOLS <-> code round trips and validator violation battery"


@criterion("7", C7)
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_round_trips(p):
    plane = prime_plane(p)
    mols = affine_to_mols(plane)
    assert validate_mols(mols)
    again = mols_to_affine(mols)
    assert validate_affine(again) and affine_to_mols(again) == mols
    code = affine_to_code(again)
    assert validate_code(code, complete=True)
    back = code_to_affine(code)
    assert validate_affine(back) and validate_projective(ProjectivePlane(back))
    assert sorted(map(sorted, back.lines())) == sorted(map(sorted, plane.lines()))


@criterion("7", C7)
def test_validator_battery():
    good = prime_plane(3)
    assert not validate_latin(LatinSquare.from_rows([[0, 1], [0, 1]]))
    assert not validate_latin(LatinSquare.from_rows([[0, 0], [1, 1]]))
    assert not validate_latin(LatinSquare.from_rows([[0, 2], [2, 0]]))
    sq = affine_to_mols(good).squares[0]
    assert not validate_mols(MOLSet(3, (sq, sq)))
    assert not validate_mols(MOLSet(3, (sq,)), complete=True)
    lines = [list(map(sorted, cls)) for cls in good.classes]
    assert not validate_affine(AffinePlane(3, good.classes[:-1]))
    swapped = [c[:] for c in lines]
    swapped[0][0], swapped[1][0] = swapped[1][0], swapped[0][0]
    assert not validate_affine(AffinePlane(3, [[frozenset(x) for x in c] for c in swapped]))
    short = [c[:] for c in lines]
    short[2][0] = short[2][0][:2]
    assert not validate_affine(AffinePlane(3, [[frozenset(x) for x in c] for c in short]))
    assert not validate_projective(ProjectivePlane(AffinePlane(3, good.classes[:-1])))
    vecs = list(affine_to_code(good).vectors)
    assert not validate_code(PlaneCode(3, vecs[:-1]), complete=True)
    assert not validate_code(PlaneCode(3, vecs[:-1] + [vecs[0]]))
    clash = vecs[:-1] + [(vecs[0][0], vecs[0][1], (vecs[0][2] + 1) % 3)]
    assert not validate_code(PlaneCode(3, clash))


C8 = "verifier: 10/10 mutations rejected on the order-6 bundle; jobs 1 and 8 bundles byte-identical"


@criterion("8", C8)
@pytest.mark.slow
def test_mutations(bundle6, tmp_path):
    assert len(MUTATIONS) == 10
    caught = 0
    for name in MUTATIONS:
        report = verify_bundle(mutate_bundle(bundle6, tmp_path / name, name))
        caught += not report.ok
    assert caught == 10


@criterion("8", C8)
@pytest.mark.slow
def test_jobs_identical(proof6, bundle6, catalogue5, tmp_path):
    eight = write_bundle(prove_order(6, catalogue5, jobs=8), tmp_path / "jobs8")
    assert bundle_digest(eight) == bundle_digest(bundle6)
    names = sorted(p.relative_to(eight) for p in eight.rglob("*") if p.is_file())
    assert names == sorted(p.relative_to(bundle6) for p in bundle6.rglob("*") if p.is_file())
    for rel in names:
        assert (eight / rel).read_bytes() == (bundle6 / rel).read_bytes()


@criterion("9", "order 8 roots over the 564 order-7 seeds: 230 refuted, 334 need branching (extended)")
@pytest.mark.extended
def test_order8_roots():
    proof = prove_order(8, isotopy_classes(7), Limits(max_depth=0), jobs=int(os.environ.get("PLANES_JOBS", "1")))
    kinds = Counter(c.root.kind for c in proof.classes)
    assert len(proof.classes) == 564
    assert kinds == {"witness": 230, "depth_limit": 334}
